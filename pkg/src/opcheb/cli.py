"""``opcheb`` command line.

Exit status: 0 success, 1 identity or tolerance failure, 2 usage or
validation error, 3 numerical failure (quadrature, breakdown).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .example import (CORRECTED, PRINTED, ExampleConfig, beta_closed_forms, example_P_explicit,
                      example_norms, example_tsequence, example_weight)
from .mapping import build_bundle, derive_Q
from .measure import (DivergentIntegral, QuadratureError, StieltjesBreakdown, build_muP,
                      gram_matrix, gram_offdiag, mass_consistency, stieltjes_recover)
from .polycore import NotDivisible, Poly, format_rational, parse_rational
from .recurrence import InvalidTSequence, generate_P, generate_Q
from .report import jsonable
from .suite import run_verification

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_p(text: str, exact: bool) -> Fraction:
    if exact and any(ch in text.lower() for ch in ".e"):
        raise UsageError(f"--p {text!r}: exact commands take an integer or 'num/den' rational")
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise UsageError(f"--p: {exc}") from exc


def _config(args, exact: bool = True, measure: bool = False) -> ExampleConfig:
    p = _parse_p(args.p, exact)
    try:
        return ExampleConfig(args.m, p, measure)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _dec(q) -> str:
    return repr(float(q))


def _emit(args, header: list[str] | None, rows: list[list], payload) -> None:
    if args.format == "json":
        text = json.dumps(jsonable(payload), indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        if header:
            w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _poly_row(family: str, n: int, poly: Poly) -> list:
    return [family, n, poly.degree, ";".join(format_rational(c) for c in poly.coeffs)]


def _poly_obj(family: str, n: int, poly: Poly) -> dict:
    return {"family": family, "n": n, "degree": poly.degree,
            "coeffs": [format_rational(c) for c in poly.coeffs]}


POLY_HEADER = ["family", "n", "degree", "coeffs"]


def cmd_coeffs(args) -> int:
    cfg = _config(args)
    ts = example_tsequence(cfg)
    qr = derive_Q(ts) if args.derived else None
    header = ["n", "t_n", "t_n_decimal"] + (["r_n", "s_n"] if qr else [])
    rows, objs = [], []
    for n in range(args.count):
        t = ts.t(n)
        row = [n, format_rational(t), _dec(t)]
        obj = {"n": n, "t": t, "t_decimal": float(t)}
        if qr:
            r = qr.r(n)
            s = qr.s(n) if n >= 1 else None
            row += [format_rational(r), "" if s is None else format_rational(s)]
            obj.update(r=r, s=s)
        rows.append(row)
        objs.append(obj)
    _emit(args, header, rows, objs)
    return EXIT_OK


def cmd_polys(args) -> int:
    cfg = _config(args)
    ts = example_tsequence(cfg)
    items = []
    if args.family in ("P", "both"):
        items += [("P", n, P) for n, P in enumerate(generate_P(ts, args.count))]
    if args.family in ("Q", "both"):
        Q = generate_Q(build_bundle(ts).qr, args.count)
        items += [("Q", n, q) for n, q in enumerate(Q)]
    _emit(args, POLY_HEADER, [_poly_row(*it) for it in items], [_poly_obj(*it) for it in items])
    return EXIT_OK


def cmd_example(args) -> int:
    cfg = _config(args)
    if args.n < 0 or not 0 <= args.j <= 2 * cfg.m - 1:
        raise UsageError(f"need n >= 0 and 0 <= j <= {2 * cfg.m - 1}")
    idx = 2 * cfg.m * args.n + cfg.m + args.j + 1
    try:
        poly = example_P_explicit(cfg, args.n, args.j, args.form)
    except NotDivisible as exc:
        print(f"P_{idx} ({args.form} form): numerator not divisible by U_{cfg.m - 1}, "
              f"remainder {exc.remainder}", file=sys.stderr)
        return EXIT_FAIL
    _emit(args, POLY_HEADER, [_poly_row("P", idx, poly)], [_poly_obj("P", idx, poly)])
    if args.check:
        ref = generate_P(example_tsequence(cfg), idx + 1)[idx]
        if ref != poly:
            print(f"P_{idx}: explicit {poly} != recurrence {ref}", file=sys.stderr)
            return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    res = run_verification(cfg.m, cfg.p, args.blocks)
    if args.format == "json":
        _emit(args, None, [], res.to_dict())
    else:
        text = res.render() + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    bad = res.first_failure()
    if bad:
        rep, check = bad
        print(f"first failure: {rep.title}: {check.name} {check.detail}".rstrip(), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_measure(args) -> int:
    cfg = _config(args, exact=False, measure=True)
    ts = example_tsequence(cfg)
    wq, _ = example_weight(cfg)
    mu = build_muP(wq, ts, args.tol)
    info = mu.info
    closed = beta_closed_forms(cfg)
    out: dict = {
        "m": cfg.m, "p": float(cfg.p),
        "muQ": info["muQ"], "muQ_closed": closed["muQ"],
        "C": info["C"], "C_closed": closed["C"], "M": info["M"],
        "E": [list(iv) for iv in mu.intervals],
    }
    ok = True
    mc = mass_consistency(info["muQ"], info["C"], ts)
    out["M_i_max_deviation"] = max(abs(v - info["M"]) for v in mc.checks[0].data["M_i"])
    if args.gram:
        G = gram_matrix(mu, ts, args.gram, args.nodes)
        norms = example_norms(cfg, args.gram)
        off = gram_offdiag(G)
        ratio = max(abs(G[n, n] / G[0, 0] / float(norms[n]) - 1) for n in range(args.gram))
        out.update(gram_size=args.gram, gram_max_offdiag=off, gram_norm_ratio_deviation=ratio)
        ok &= off <= args.gram_tol and ratio <= args.recover_tol
    if args.recover:
        r, s = stieltjes_recover(mu, args.recover + 1, args.nodes)
        dev_t = max(abs(s[n] - float(ts.t(n))) for n in range(1, args.recover + 1))
        dev_r = max(abs(v) for v in r)
        out.update(recover=args.recover, recover_max_t_deviation=dev_t, recover_max_r=dev_r)
        ok &= dev_t <= args.recover_tol and dev_r <= args.recover_tol
    rows = [[k, json.dumps(jsonable(v), separators=(",", ":")) if isinstance(v, list) else
             (v if isinstance(v, int) else _dec(v))] for k, v in out.items()]
    _emit(args, ["quantity", "value"], rows, out)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--m", type=int, default=2, help="block half-length, m >= 2")
    common.add_argument("--p", default="1", help="example parameter, 'num/den' or decimal (measure only)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write to this file instead of standard output")

    parser = _Parser(prog="opcheb", description="Orthogonal polynomials from Chebyshev mappings.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("coeffs", parents=[common], help="t_n table of the example")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--derived", action="store_true", help="add the mapped r_n, s_n columns")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("polys", parents=[common], help="exact coefficients of P_n and/or Q_n")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--family", choices=("P", "Q", "both"), default="P")
    p.set_defaults(func=cmd_polys)

    p = sub.add_parser("example", parents=[common], help="P_{2mn+m+j+1} from the explicit formula")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--form", choices=(CORRECTED, PRINTED), default=CORRECTED)
    p.add_argument("--check", action="store_true", help="compare with the recurrence")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("verify", parents=[common], help="run the exact identity suite")
    p.add_argument("--blocks", type=int, default=3)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("measure", parents=[common], help="measure, Gram matrix, coefficient recovery")
    p.add_argument("--gram", type=int, default=0, help="Gram matrix size")
    p.add_argument("--recover", type=int, default=0, help="recover t_1 .. t_N by Stieltjes")
    p.add_argument("--nodes", type=int, default=1200, help="discretisation points per piece")
    p.add_argument("--tol", type=float, default=1e-12, help="quadrature tolerance")
    p.add_argument("--gram-tol", type=float, default=1e-9)
    p.add_argument("--recover-tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_measure)
    return parser


def _glue_negative_p(argv: list[str]) -> list[str]:
    # "--p -1/2" would otherwise read as an unknown option
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--p" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"--p={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_glue_negative_p(argv))
        if getattr(args, "count", 1) < 1:
            raise UsageError("--count must be >= 1")
        if getattr(args, "blocks", 1) < 1:
            raise UsageError("--blocks must be >= 1")
        if getattr(args, "gram", 0) < 0 or getattr(args, "recover", 0) < 0:
            raise UsageError("--gram and --recover must be >= 0")
        return args.func(args)
    except UsageError as exc:
        print(f"opcheb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidTSequence as exc:
        print(f"opcheb: invalid t-sequence: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, DivergentIntegral, StieltjesBreakdown, ArithmeticError) as exc:
        print(f"opcheb: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
