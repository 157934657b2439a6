"""Polynomial-mapping representation of ``P_n`` through ``Q_n(T^_{2m}(x))``.

Everything here is exact. The building blocks are the tridiagonal
determinants ``Delta_n(i, j; x)`` of the block coefficients
``a_n^(l) = t_{2mn+l}``; with them

    P_{2mn+m+j+1} = [A_j Q_{n+1}(T^_{2m}) + c_{n,j} B_j Q_n(T^_{2m})] / U^_{m-1}

for ``0 <= j <= 2m-1``, where ``A_j = Delta_n(m+2, m+j)``,
``B_j = Delta_n(m+j+3, m+2m-1)`` and ``c_{n,j} = a_n^(m+1) ... a_n^(m+j+1)``.
While ``j <= m-2`` every factor of ``c_{n,j}`` but the first is 1/4, giving the
often-quoted ``4^-j t_{2mn+m+1}``; past that point the product picks up
``t_{2m(n+1)}`` and ``t_{2m(n+1)+1}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .chebyshev import That, Uhat, zeros_T
from .polycore import NotDivisible, Poly, poly_compose, poly_divexact
from .recurrence import QRecurrence, TSequence, generate_P, generate_Q, require_valid
from .report import Report

QUARTER = Fraction(1, 4)
EIGHTH = Fraction(1, 8)

CHAIN = "chain"
PRINTED = "printed"


def delta(ts: TSequence, n: int, i: int, j: int) -> Poly:
    """``Delta_n(i, j; x)`` by its three-term recursion in ``j``.

    Base cases: ``0`` for ``j < i-2``, ``1`` for ``j = i-2``, ``x`` for
    ``j = i-1``; then ``Delta(i, j) = x Delta(i, j-1) - a_n^(j) Delta(i, j-2)``.
    """
    if i < 1:
        raise ValueError(f"Delta needs i >= 1, got {i}")
    if j < i - 2:
        return Poly.zero()
    x = Poly.x()
    prev, cur = Poly.one(), x
    if j == i - 2:
        return prev
    for l in range(i, j + 1):
        prev, cur = cur, x * cur - prev.scale(ts.a(n, l))
    return cur


def _correction(ts: TSequence, n: int) -> Fraction:
    return QUARTER - ts.t(ts.k * (n + 1))


def _check_j(ts: TSequence, j: int) -> None:
    if not 0 <= j <= 2 * ts.m - 1:
        raise ValueError(f"j must lie in [0, {2 * ts.m - 1}], got {j}")


def poly_A(ts: TSequence, n: int, j: int) -> Poly:
    _check_j(ts, j)
    m = ts.m
    cross = Uhat(j - m) * Uhat(m - 2) - Uhat(j - m - 1) * Uhat(m - 1)
    return Uhat(j) + cross.scale(_correction(ts, n))


def poly_B(ts: TSequence, n: int, j: int) -> Poly:
    _check_j(ts, j)
    m = ts.m
    cross = Uhat(m - j - 3) * Uhat(m - 1) - Uhat(m - j - 2) * Uhat(m - 2)
    return Uhat(2 * m - 2 - j) + cross.scale(_correction(ts, n))


def delta_identity_check(ts: TSequence, n: int) -> Report:
    """``Delta_n(m+2, m+j) = A_j`` and ``Delta_n(m+j+3, m+k-1) = B_j`` for all ``j``."""
    m, k = ts.m, ts.k
    rep = Report(f"delta identities (m={m}, n={n})")
    bad = []
    for j in range(2 * m):
        A, B = poly_A(ts, n, j), poly_B(ts, n, j)
        dA, dB = delta(ts, n, m + 2, m + j), delta(ts, n, m + j + 3, m + k - 1)
        if dA != A:
            bad.append(("A", n, j, dA, A))
        if dB != B:
            bad.append(("B", n, j, dB, B))
        if j <= 2 * m - 2 and (A.degree != j or B.degree != 2 * m - 2 - j):
            bad.append(("deg", n, j, A.degree, B.degree))
    rep.add("Delta = A_j, B_j", not bad, "" if not bad else f"first mismatch {bad[0][:3]}",
            mismatches=[b[:3] for b in bad])
    full = delta(ts, n, m + 2, m + k - 1)
    u = Uhat(2 * m - 1)
    factor = That(m) * Uhat(m - 1)
    via_delta = delta(ts, 0, 1, m - 1) * Uhat(m - 1)
    rep.add("Delta_n(m+2, m+k-1) = U^_{2m-1} = T^_m U^_{m-1}",
            full == u == factor == via_delta, lhs=full, rhs=u)
    return rep


def derive_Q(ts: TSequence) -> QRecurrence:
    """Recurrence coefficients of the mapped family ``Q_n``.

    ``r_n = 2^(4-2m) (t_{2mn+m} t_{2mn+1} + t_{2m(n+1)} t_{2mn+m+1} - 1/8)`` and
    ``s_n = 4^(4-2m) t_{2mn} t_{2mn+1} t_{2mn+m} t_{2m(n-1)+m+1}``.
    """
    m, k = ts.m, ts.k
    rscale = Fraction(2) ** (4 - 2 * m)
    sscale = Fraction(4) ** (4 - 2 * m)
    t = ts.t

    @lru_cache(maxsize=None)
    def r(n: int) -> Fraction:
        if n < 0:
            raise IndexError("r_n needs n >= 0")
        return rscale * (t(k * n + m) * t(k * n + 1) + t(k * (n + 1)) * t(k * n + m + 1) - EIGHTH)

    @lru_cache(maxsize=None)
    def s(n: int) -> Fraction:
        if n < 1:
            raise IndexError("s_n needs n >= 1")
        return sscale * t(k * n) * t(k * n + 1) * t(k * n + m) * t(k * (n - 1) + m + 1)

    return QRecurrence(r, s)


def b_coefficient(ts: TSequence, n: int, j: int, coefficient: str = CHAIN) -> Fraction:
    """Scalar multiplying ``B_j Q_n(T^_{2m})`` in the mapped representation.

    ``"chain"`` is the product ``a_n^(m+1) ... a_n^(m+j+1)``; ``"printed"`` is
    ``4^-j t_{2mn+m+1}``, which agrees with it only for ``j <= m-2`` (and
    trivially at ``j = 2m-1`` where ``B_j = 0``).
    """
    if coefficient == PRINTED:
        return Fraction(1, 4**j) * ts.t(ts.k * n + ts.m + 1)
    if coefficient != CHAIN:
        raise ValueError(f"unknown coefficient rule {coefficient!r}")
    out = Fraction(1)
    for l in range(ts.m + 1, ts.m + j + 2):
        out *= ts.a(n, l)
    return out


@dataclass(frozen=True)
class MappingBundle:
    ts: TSequence
    qr: QRecurrence
    theta: Poly  # T^_m
    eta: Poly  # U^_{m-1}
    pi: Poly  # T^_{2m}
    r0: Fraction

    @property
    def m(self) -> int:
        return self.ts.m


def build_bundle(ts: TSequence) -> MappingBundle:
    m = ts.m
    require_valid(ts, 2 * ts.k)
    r0 = Fraction(2) ** (4 - 2 * m) * (EIGHTH - ts.t(m + 1) * ts.t(2 * m + 1))
    return MappingBundle(ts, derive_Q(ts), That(m), Uhat(m - 1), That(2 * m), r0)


@lru_cache(maxsize=512)
def _composed(q: Poly, pi: Poly) -> Poly:
    return poly_compose(q, pi)


def mapped_numerator(bundle: MappingBundle, Qpolys, n: int, j: int, coefficient: str = CHAIN) -> Poly:
    ts = bundle.ts
    A, B = poly_A(ts, n, j), poly_B(ts, n, j)
    c = b_coefficient(ts, n, j, coefficient)
    return A * _composed(Qpolys[n + 1], bundle.pi) + (B * _composed(Qpolys[n], bundle.pi)).scale(c)


def mapped_P(bundle: MappingBundle, Qpolys, n: int, j: int, coefficient: str = CHAIN) -> Poly:
    """``P_{2mn+m+j+1}`` assembled from ``Q_n``, ``Q_{n+1}`` and ``T^_{2m}``.

    Raises :class:`NotDivisible` if the numerator is not a multiple of
    ``U^_{m-1}``.
    """
    _check_j(bundle.ts, j)
    if len(Qpolys) < n + 2:
        raise ValueError(f"need Q_0 .. Q_{n + 1}")
    return poly_divexact(mapped_numerator(bundle, Qpolys, n, j, coefficient), bundle.eta)


def verify_pik(bundle: MappingBundle, tol: float = 1e-12) -> Report:
    ts, m, k = bundle.ts, bundle.m, bundle.ts.k
    rep = Report(f"pi_k identities (m={m})")
    pik = (delta(ts, 0, 1, m) * bundle.eta
           - delta(ts, 0, m + 3, m + k - 1).scale(ts.a(0, m + 1))
           + bundle.r0)
    rep.add("pi_k = T^_{2m}", pik == bundle.pi, lhs=pik, rhs=bundle.pi)
    rep.add("r = r_0", bundle.r0 == bundle.qr.r(0), r=bundle.r0, r0=bundle.qr.r(0))
    rep.add("pi_k' = 2m U^_{2m-1}", pik.deriv() == Uhat(2 * m - 1).scale(2 * m))
    target = -(2.0 ** (1 - 2 * m))
    errs = [abs(float(pik(z)) - target) for z in zeros_T(m)]
    rep.add("pi_k(z_i) = -2^(1-2m)", max(errs) <= tol, f"max error {max(errs):.3e}", max_error=max(errs))
    rep.add("theta_m eta = U^_{2m-1}", bundle.theta * bundle.eta == Uhat(2 * m - 1))
    return rep


def rn_polynomial(ts: TSequence, n: int) -> Poly:
    """The combination of determinants whose constancy underlies ``r_n``."""
    m, k = ts.m, ts.k
    return (delta(ts, n, m + 3, m + k - 1).scale(ts.a(n, m + 1))
            - delta(ts, 0, m + 3, m + k - 1).scale(ts.a(0, m + 1))
            + delta(ts, n - 1, m + 2, m + k - 2).scale(ts.a(n, m))
            - (delta(ts, 0, 1, m - 2) * Uhat(m - 1)).scale(ts.a(0, m)))


def verify_rn_constant(ts: TSequence, n: int) -> Report:
    if n < 1:
        raise ValueError("verify_rn_constant needs n >= 1")
    m, k, t = ts.m, ts.k, ts.t
    qr = derive_Q(ts)
    rep = Report(f"r_n(x) constant (m={m}, n={n})")
    poly = rn_polynomial(ts, n)
    const = poly.coeffs[0] if poly.coeffs else Fraction(0)
    rep.add("r_n(x) has degree <= 0", poly.degree <= 0, str(poly), poly=poly)
    rep.add("r_n(x) = r_n - r_0", poly.degree <= 0 and const == qr.r(n) - qr.r(0),
            value=const, expected=qr.r(n) - qr.r(0))
    closed = Fraction(2) ** (4 - 2 * m) * (t(k * n + m) * t(k * n + 1) + t(k * (n + 1)) * t(k * n + m + 1)
                                          - t(m) / 2 - t(m + 1) * t(2 * m))
    rep.add("r_n(x) closed form", poly.degree <= 0 and const == closed, value=const, closed=closed)
    return rep


def verify_s_product(ts: TSequence, n: int) -> Report:
    if n < 1:
        raise ValueError("verify_s_product needs n >= 1")
    m, k = ts.m, ts.k
    prod = ts.a(n, m)
    for l in range(m + 1, m + k):
        prod *= ts.a(n - 1, l)
    s = derive_Q(ts).s(n)
    rep = Report(f"s_n product (m={m}, n={n})")
    rep.add("a_n^(m) a_{n-1}^(m+1) ... a_{n-1}^(m+k-1) = s_n", prod == s, product=prod, s=s)
    return rep


def mapped_representation_check(ts: TSequence, blocks: int, coefficient: str = CHAIN) -> Report:
    """Mapped representation against the raw recurrence for ``n < blocks``."""
    m, k = ts.m, ts.k
    top = k * (blocks - 1) + m + 2 * m
    P = generate_P(ts, top + 1)
    bundle = build_bundle(ts)
    Q = generate_Q(bundle.qr, blocks + 1)
    rep = Report(f"mapped representation (m={m}, blocks={blocks}, {coefficient})")
    for n in range(blocks):
        for j in range(2 * m):
            idx = k * n + m + j + 1
            try:
                got = mapped_P(bundle, Q, n, j, coefficient)
                ok = got == P[idx]
                detail = "" if ok else f"P_{idx}: got {got}, recurrence gives {P[idx]}"
            except NotDivisible as exc:
                ok, got, detail = False, None, f"P_{idx}: numerator not divisible by U^_{m-1} ({exc.remainder})"
            rep.add(f"P_{idx} (n={n}, j={j})", ok, detail, n=n, j=j, index=idx)
    return rep


def that_factorisation_check(ts: TSequence, blocks: int) -> Report:
    """``P_{2mn+m} = T^_m Q_n(T^_{2m})`` and the clean ``A_{2m-1}`` factorisation."""
    m, k = ts.m, ts.k
    bundle = build_bundle(ts)
    P = generate_P(ts, k * blocks + m + 1)
    Q = generate_Q(bundle.qr, blocks + 1)
    rep = Report(f"T^_m factorisation (m={m})")
    for n in range(blocks + 1):
        rhs = bundle.theta * _composed(Q[n], bundle.pi)
        rep.add(f"P_{k*n+m} = T^_m Q_{n}(T^_2m)", P[k * n + m] == rhs)
    for n in range(blocks):
        diff = poly_A(ts, n, 2 * m - 1) - Uhat(2 * m - 1)
        try:
            poly_divexact(diff, bundle.eta)
            ok = True
        except NotDivisible:
            ok = False
        rep.add(f"U^_{{m-1}} | A_{{2m-1}} - U^_{{2m-1}} (n={n})", ok)
    return rep


def printed_coefficient_audit(ts: TSequence, blocks: int) -> Report:
    """Where the shorthand ``4^-j t_{2mn+m+1}`` differs from the chain product."""
    rep = Report(f"4^-j shorthand vs chain product (m={ts.m})")
    for n in range(blocks):
        for j in range(2 * ts.m - 1):
            chain = b_coefficient(ts, n, j, CHAIN)
            printed = b_coefficient(ts, n, j, PRINTED)
            rep.add(f"n={n}, j={j}", chain == printed, chain=chain, printed=printed)
    return rep


def lift_tsequence(m: int, qr: QRecurrence, t_m, blocks: int) -> TSequence:
    """Invert :func:`derive_Q`: rebuild the t-sequence from ``(r_n, s_n)``.

    With ``t_1 = 1/2`` fixed, the value ``t_m`` is the one free parameter;
    ``r_0`` then gives ``t_{2m}``, ``s_n`` gives ``t_{2mn+m}`` and ``r_n``
    gives ``t_{2m(n+1)}``.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    half = Fraction(1, 2)
    rs = Fraction(2) ** (2 * m - 4)
    ss = Fraction(4) ** (2 * m - 4)
    u = [Fraction(0)]
    v = [Fraction(t_m)]
    for n in range(blocks):
        if n >= 1:
            denom = u[n] * (half - u[n]) * (half - v[n - 1])
            v.append(ss * Fraction(qr.s(n)) / denom)
        u.append((rs * Fraction(qr.r(n)) + EIGHTH - v[n] * (half - u[n])) / (half - v[n]))
    rows = [(u[n], half - u[n], v[n], half - v[n]) for n in range(blocks)]
    return TSequence.from_blocks(m, rows, label=f"lifted(t_m={t_m})")
