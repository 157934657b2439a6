"""Exact verification suite over ``(m, p, blocks)`` for the Jacobi-type example."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .example import CORRECTED, PRINTED, ExampleConfig, example_tsequence, explicit_audit
from .example import s_constant_resolution, scaled_Q_check
from .mapping import (build_bundle, delta_identity_check, mapped_representation_check,
                      printed_coefficient_audit, that_factorisation_check, verify_pik, verify_rn_constant,
                      verify_s_product)
from .recurrence import generate_P
from .report import Check, Report

DEFAULT_MATRIX = tuple((m, Fraction(p)) for m in (2, 3, 4) for p in (0, 1, 2, Fraction(5, 2)))


@dataclass
class Verification:
    """Gating reports decide the outcome; errata are recorded but never gate."""

    m: int
    p: Fraction
    blocks: int
    gating: list[Report] = field(default_factory=list)
    errata: list[Report] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.gating)

    def first_failure(self) -> tuple[Report, Check] | None:
        for r in self.gating:
            for c in r.checks:
                if not c.passed:
                    return r, c
        return None

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "p": self.p,
            "blocks": self.blocks,
            "passed": self.passed,
            "gating": [r.to_dict() for r in self.gating],
            "errata": [r.to_dict() for r in self.errata],
        }

    def render(self) -> str:
        head = f"verify m={self.m} p={self.p} blocks={self.blocks}: {'PASS' if self.passed else 'FAIL'}"
        body = [r.render() for r in self.gating]
        notes = []
        for r in self.errata:
            bad = len(r.failures())
            notes.append(f"  (not gating) {r.title}: {bad} of {len(r.checks)} entries differ")
        return "\n".join([head, *body, *notes])


def run_verification(m: int, p, blocks: int = 3) -> Verification:
    if blocks < 1:
        raise ValueError("blocks must be >= 1")
    cfg = ExampleConfig(m, Fraction(p))
    ts = example_tsequence(cfg)
    k = ts.k
    P = generate_P(ts, k * (blocks - 1) + 3 * m + 1)
    out = Verification(m, cfg.p, blocks)

    g = out.gating
    g.append(mapped_representation_check(ts, blocks))
    g.append(explicit_audit(cfg, blocks, P, CORRECTED))
    for n in range(blocks):
        g.append(delta_identity_check(ts, n))
    g.append(verify_pik(build_bundle(ts)))
    for n in range(1, blocks + 1):
        g.append(verify_rn_constant(ts, n))
        g.append(verify_s_product(ts, n))
    g.append(that_factorisation_check(ts, blocks))
    g.append(scaled_Q_check(cfg, blocks + 2))
    g.append(s_constant_resolution(cfg, blocks + 2))

    out.errata.append(printed_coefficient_audit(ts, blocks))
    out.errata.append(explicit_audit(cfg, blocks, P, PRINTED))
    return out


def run_matrix(cases=DEFAULT_MATRIX, blocks: int = 3, workers: int | None = None) -> list[Verification]:
    """Verify every ``(m, p)`` case concurrently; results keep the input order."""
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_verification, m, p, blocks) for m, p in cases]
        return [f.result() for f in futures]
