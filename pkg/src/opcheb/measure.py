"""Weights, quadrature and the transformed measure ``mu_P``.

Weights are stored in factored form

    w(x) = scale * g(x) * prod_i |x - loc_i| ** exponent_i

with ``g`` smooth (often absent). The factored form is what makes the
quadrature accurate: every integral is split at the singular locations, and on
each piece a tanh-sinh (double-exponential) rule is used whose nodes know
their exact distance to both ends. The singular factor belonging to an end
is evaluated from that distance, so nothing cancels even when a node sits
``1e-300`` away from the endpoint.

All routines run in double precision by default and in ``mpmath`` when an
extended working precision is configured
(:func:`opcheb.polycore.set_working_precision` or ``OPCHEB_PRECISION``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from .chebyshev import FIRST, cheb_eval, cospi
from .chebyshev import That, Uhat
from .mapping import delta
from .polycore import to_float, working_precision
from .recurrence import TSequence, eval_P
from .report import Report

Interval = tuple  # (a, b)

MASS_CLAMP = 1e-10
DEFAULT_TOL = 1e-12
DEFAULT_NODES = 1200

_TMAX = 6.5
_SNAP = 1e-13


class QuadratureError(ArithmeticError):
    """The rule did not reach the requested tolerance within its budget."""

    def __init__(self, message: str, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DivergentIntegral(ValueError):
    """A weight has a non-integrable singularity (exponent <= -1) on the domain."""


class StieltjesBreakdown(ArithmeticError):
    def __init__(self, index: int, message: str):
        super().__init__(f"{message} (last stable index {index - 1})")
        self.last_stable = index - 1


# --------------------------------------------------------------------------
# backend helpers: float64 arrays, or object arrays of mpf
# --------------------------------------------------------------------------

def _extended() -> bool:
    return working_precision() is not None


def _const(v):
    return to_float(v)


def _sqrt(v):
    return mpmath.sqrt(v) if isinstance(v, mpmath.mpf) else math.sqrt(v)


def _eps():
    return mpmath.mpf(10) ** -working_precision() if _extended() else np.finfo(float).eps


def _isfinite(v) -> bool:
    return mpmath.isfinite(v) if isinstance(v, mpmath.mpf) else math.isfinite(v)


def merge_singularities(pairs: Sequence[tuple]) -> tuple:
    """Add exponents at coinciding locations and drop zero exponents."""
    acc: dict[float, list] = {}
    for loc, e in pairs:
        slot = acc.setdefault(float(loc), [loc, 0.0])
        slot[1] += float(e)
    return tuple(sorted((loc, e) for loc, e in acc.values() if e != 0.0))


def node_cospi(q: Fraction):
    """``cos(pi q)`` as a float, or as an ``mpf`` at extended precision."""
    if _extended():
        return mpmath.cospi(mpmath.mpf(q.numerator) / q.denominator)
    return cospi(q)


def node_zeros_T(m: int) -> list:
    return [node_cospi(Fraction(2 * i - 1, 2 * m)) for i in range(1, m + 1)]


def node_zeros_U(m: int) -> list:
    return [node_cospi(Fraction(i, m + 1)) for i in range(1, m + 1)]


@dataclass(frozen=True)
class WeightFn:
    """Nonnegative weight on ``support`` given in factored form.

    ``singularities`` is a tuple of ``(location, exponent)``; each contributes
    ``|x - location| ** exponent``. ``smooth`` is an optional extra factor
    that must be smooth and positive on the open support.
    """

    support: Interval
    singularities: tuple = ()
    scale: float = 1.0
    smooth: Callable | None = None

    def __post_init__(self):
        a, b = self.support
        if not a < b:
            raise ValueError(f"empty support {self.support}")
        object.__setattr__(self, "singularities", merge_singularities(self.singularities))

    def with_factor(self, loc: float, exponent: float) -> "WeightFn":
        return replace(self, singularities=self.singularities + ((loc, exponent),))

    def exponent_at(self, loc: float) -> float:
        return sum(e for l, e in self.singularities if abs(l - loc) <= _SNAP)

    def evaluate(self, x, left=None, dl=None, right=None, dr=None):
        """Weight at ``x``; ``dl = x - left`` and ``dr = right - x`` if known."""
        val = _const(self.scale) * (x * 0 + 1)
        if self.smooth is not None:
            val = val * self.smooth(x)
        for loc, e in self.singularities:
            if left is not None and abs(loc - left) <= _SNAP:
                d = dl
            elif right is not None and abs(loc - right) <= _SNAP:
                d = dr
            else:
                d = np.abs(x - _const(loc))
            val = val * d ** _const(e)
        return val

    __call__ = evaluate


# --------------------------------------------------------------------------
# tanh-sinh rule
# --------------------------------------------------------------------------

def _de_rule(a, b, h):
    """Nodes, endpoint distances and weights of the tanh-sinh rule on ``[a, b]``."""
    n = int(_TMAX / h)
    if _extended():
        a_, b_ = _const(a), _const(b)
        L = b_ - a_
        hp = _const(h)
        xs, dls, drs, ws = [], [], [], []
        half_pi = mpmath.pi / 2
        for k in range(-n, n + 1):
            t = k * hp
            u = half_pi * mpmath.sinh(t)
            e = mpmath.exp(-2 * abs(u))
            dl = L / (1 + mpmath.exp(-2 * u))
            dr = L / (1 + mpmath.exp(2 * u))
            w = hp * L / 2 * half_pi * mpmath.cosh(t) * 4 * e / (1 + e) ** 2
            if dl == 0 or dr == 0 or w == 0:
                continue
            xs.append(a_ + dl if u < 0 else b_ - dr)
            dls.append(dl)
            drs.append(dr)
            ws.append(w)
        mk = lambda v: np.array(v, dtype=object)
        return mk(xs), mk(dls), mk(drs), mk(ws)
    t = np.arange(-n, n + 1) * h
    u = (np.pi / 2) * np.sinh(t)
    L = b - a
    with np.errstate(over="ignore", under="ignore"):
        e = np.exp(-2 * np.abs(u))
        dl = L / (1 + np.exp(-2 * u))
        dr = L / (1 + np.exp(2 * u))
        w = h * L / 2 * (np.pi / 2) * np.cosh(t) * 4 * e / (1 + e) ** 2
    keep = (dl > 0) & (dr > 0) & (w > 0)
    dl, dr, w, u = dl[keep], dr[keep], w[keep], u[keep]
    x = np.where(u < 0, a + dl, b - dr)
    return x, dl, dr, w


def _pieces(w: WeightFn, a: float, b: float) -> list[Interval]:
    cuts = [a] + [loc for loc, _ in w.singularities if a + _SNAP < loc < b - _SNAP] + [b]
    return list(zip(cuts[:-1], cuts[1:]))


def _check_integrable(w: WeightFn, a: float, b: float) -> None:
    for loc, e in w.singularities:
        if a - _SNAP <= loc <= b + _SNAP and e <= -1:
            raise DivergentIntegral(f"exponent {e} at {loc} is not integrable on [{a}, {b}]")


def _piece_values(w: WeightFn, f, a, b, h):
    x, dl, dr, q = _de_rule(a, b, h)
    vals = w.evaluate(x, a, dl, b, dr) * q
    if f is not None:
        vals = vals * f(x)
    return vals


def quad(w: WeightFn, f: Callable | None, a: float, b: float, tol: float = DEFAULT_TOL,
         max_level: int = 10):
    """``int_a^b f(x) w(x) dx`` to absolute accuracy ``tol``.

    The interval is split at every singular location of ``w`` inside
    ``(a, b)``; each piece is integrated with tanh-sinh at step ``2^-k``,
    refining until two successive levels agree. ``f=None`` integrates the
    weight alone. Raises :class:`QuadratureError` if ``max_level`` is
    reached first.
    """
    lo, hi = w.support
    if a < lo - _SNAP or b > hi + _SNAP or not a < b:
        raise ValueError(f"[{a}, {b}] is not inside the support {w.support}")
    _check_integrable(w, a, b)
    total = 0
    for pa, pb in _pieces(w, a, b):
        prev = None
        for level in range(1, max_level + 1):
            h = 2.0 ** -level
            est = sum(_piece_values(w, f, pa, pb, h))
            if prev is not None and level >= 3 and abs(est - prev) <= tol:
                break
            prev = est
        else:
            raise QuadratureError(
                f"no convergence on [{pa}, {pb}] after {max_level} levels",
                estimate=est, error=abs(est - prev))
        total = total + est
    return total


# --------------------------------------------------------------------------
# measures
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Measure:
    """Absolutely continuous part on disjoint open intervals plus point masses."""

    weight: WeightFn | None = None
    intervals: tuple = ()
    point_masses: tuple = ()
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        ivs = tuple(sorted((a, b) for a, b in self.intervals))
        for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
            if a1 < b0:
                raise ValueError("intervals must be disjoint")
        object.__setattr__(self, "intervals", ivs)
        for _, mass in self.point_masses:
            if mass < 0:
                raise ValueError("point masses must be nonnegative")

    def integrate(self, f: Callable | None = None, tol: float = DEFAULT_TOL):
        total = 0
        if self.weight is not None:
            for a, b in self.intervals:
                total = total + quad(self.weight, f, a, b, tol)
        for loc, mass in self.point_masses:
            val = _const(mass)
            if f is not None:
                val = val * f(_const(loc))
            total = total + val
        return total

    def total_mass(self, tol: float = DEFAULT_TOL):
        return self.integrate(None, tol)

    def discretize(self, nodes: int = DEFAULT_NODES):
        """Nodes and positive weights representing the measure.

        ``nodes`` is the tanh-sinh point budget per smooth piece; point masses
        are appended as themselves.
        """
        h = 2 * _TMAX / nodes
        xs, ws = [], []
        if self.weight is not None:
            for a, b in self.intervals:
                for pa, pb in _pieces(self.weight, a, b):
                    x, dl, dr, q = _de_rule(pa, pb, h)
                    xs.append(x)
                    ws.append(self.weight.evaluate(x, pa, dl, pb, dr) * q)
        dtype = object if _extended() else float
        for loc, mass in self.point_masses:
            if mass > 0:
                xs.append(np.array([_const(loc)], dtype=dtype))
                ws.append(np.array([_const(mass)], dtype=dtype))
        if not xs:
            raise ValueError("empty measure")
        return np.concatenate(xs), np.concatenate(ws)

    def support_closure(self) -> list[Interval]:
        """Closure of the support: merged intervals plus isolated masses."""
        merged: list[list[float]] = []
        for a, b in self.intervals:
            if merged and abs(a - merged[-1][1]) <= _SNAP:
                merged[-1][1] = b
            else:
                merged.append([a, b])
        out = [tuple(iv) for iv in merged]
        for loc, mass in self.point_masses:
            if mass > 0 and not any(a - _SNAP <= loc <= b + _SNAP for a, b in out):
                out.append((loc, loc))
        return sorted(out)


# --------------------------------------------------------------------------
# the mapped measure
# --------------------------------------------------------------------------

def _edge(m: int) -> float:
    return 2.0 ** (1 - 2 * m)


def compute_C(wq: WeightFn, xi: float, eta: float, m: int, tol: float = DEFAULT_TOL):
    """``C = int_xi^eta w_Q(x) / (x + 2^(1-2m)) dx``; raises if divergent."""
    c = _edge(m)
    if xi < -c - _SNAP or eta > c + _SNAP:
        raise ValueError(f"[{xi}, {eta}] must lie in [-2^(1-2m), 2^(1-2m)]")
    shifted = wq.with_factor(-c, -1.0)
    try:
        return quad(shifted, None, xi, eta, tol)
    except DivergentIntegral as exc:
        raise DivergentIntegral(f"C is infinite, point masses undefined: {exc}") from exc


def compute_mass_M(muQ_total, C, ts: TSequence, tol: float = MASS_CLAMP, clamp: bool = True):
    """``M = (2^(2m-3) mu_Q(R) / t_m - C) / m``.

    Values in ``[-tol, 0)`` are quadrature noise and are clamped to zero;
    anything more negative means the inputs are inconsistent.
    """
    m = ts.m
    t_m = ts.t(m)
    if t_m <= 0:
        raise ValueError(f"t_m must be positive, got {t_m}")
    M = (_const(2 ** (2 * m - 3)) * muQ_total / _const(t_m) - C) / m
    if clamp:
        if M < -tol:
            raise ValueError(f"M = {float(M):.3e} < 0: mu_Q and t_m are inconsistent")
        if M < 0:
            M = 0 * M
    return M


def branch_point(l: int, gamma: float, m: int) -> float:
    """The ``x`` on the ``l``-th monotone branch of ``T_{2m}`` with ``T_{2m}(x) = gamma``.

    Branch ``l`` is ``x = cos(theta)`` for ``theta`` in ``[l pi/2m, (l+1) pi/2m]``.
    """
    k = 2 * m
    if gamma in (1.0, -1.0):
        phase = 0 if gamma == 1.0 else 1
        num = l + phase if l % 2 == 0 else l + 1 - phase
        return node_cospi(Fraction(num, k))
    if _extended():
        g = _const(gamma)
        phi = mpmath.acos(g)
        theta = (l * mpmath.pi + phi) / k if l % 2 == 0 else ((l + 1) * mpmath.pi - phi) / k
        return mpmath.cos(theta)
    phi = math.acos(gamma)
    theta = (l * math.pi + phi) / k if l % 2 == 0 else ((l + 1) * math.pi - phi) / k
    x = math.cos(theta)
    return _refine_branch_point(x, l, gamma, m)


def _refine_branch_point(x0: float, l: int, gamma: float, m: int) -> float:
    k = 2 * m
    lo, hi = cospi(Fraction(l + 1, k)), cospi(Fraction(l, k))
    f = lambda x: cheb_eval(FIRST, k, x) - gamma
    flo = f(lo)
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    xb = 0.5 * (lo + hi)
    return x0 if abs(f(x0)) <= abs(f(xb)) else xb


def preimage_E(xi: float, eta: float, m: int) -> list[Interval]:
    """Open intervals where ``xi < T^_{2m}(x) < eta``, one per monotone branch.

    Sorted ascending. For a proper window there are exactly ``2m`` of them,
    separated by the zeros of ``U_{2m-1}``.
    """
    c = _edge(m)
    if not (-c - _SNAP <= xi < eta <= c + _SNAP):
        raise ValueError(f"need -2^(1-2m) <= xi < eta <= 2^(1-2m), got ({xi}, {eta})")
    g_lo = max(-1.0, min(1.0, xi / c))
    g_hi = max(-1.0, min(1.0, eta / c))
    out = []
    for l in range(2 * m):
        p, q = branch_point(l, g_lo, m), branch_point(l, g_hi, m)
        out.append((min(p, q), max(p, q)))
    return sorted(out)


def _level_roots(gamma: float, m: int) -> list[float]:
    return [branch_point(l, gamma, m) for l in range(2 * m)]


def _pullback_singularities(wq: WeightFn, m: int):
    c = _edge(m)
    pairs: list[tuple] = []
    outside: list[tuple] = []
    for loc, e in wq.singularities:
        gamma = loc / c
        if -1.0 - 1e-15 <= gamma <= 1.0 + 1e-15:
            gamma = max(-1.0, min(1.0, gamma))
            pairs += [(r, e) for r in _level_roots(gamma, m)]
        else:
            outside.append((loc, e))
    pairs += [(y, 1.0) for y in node_zeros_U(m - 1)]
    pairs += [(z, -1.0) for z in node_zeros_T(m)]
    return pairs, outside


def pullback_weight(wq: WeightFn, m: int, support: Interval = (-1.0, 1.0)) -> WeightFn:
    """``w_P(x) = |U_{m-1}(x) / T_m(x)| w_Q(T^_{2m}(x))`` in factored form."""
    pairs, outside = _pullback_singularities(wq, m)
    pi = That(2 * m)
    smooth = None
    if wq.smooth is not None or outside:
        def smooth(x, _g=wq.smooth, _out=tuple(outside)):
            y = pi(x)
            val = x * 0 + 1
            if _g is not None:
                val = val * _g(y)
            for loc, e in _out:
                val = val * np.abs(y - _const(loc)) ** _const(e)
            return val
    return WeightFn(support, tuple(pairs), wq.scale, smooth)


def build_muP(wq: WeightFn, ts: TSequence, tol: float = DEFAULT_TOL) -> Measure:
    """The measure of ``P_n``: pulled-back weight on ``E`` plus masses ``M`` at the zeros of ``T_m``.

    ``info`` carries ``muQ``, ``C`` and ``M``. Masses not exceeding
    :data:`MASS_CLAMP` are dropped.
    """
    m = ts.m
    xi, eta = wq.support
    muQ = quad(wq, None, xi, eta, tol)
    C = compute_C(wq, xi, eta, m, tol)
    M = compute_mass_M(muQ, C, ts)
    E = preimage_E(xi, eta, m)
    wp = pullback_weight(wq, m, (E[0][0], E[-1][1]))
    # below the clamp tolerance a mass is indistinguishable from quadrature noise
    masses = tuple((z, M) for z in node_zeros_T(m)) if M > MASS_CLAMP else ()
    return Measure(wp, tuple(E), masses, {"muQ": muQ, "C": C, "M": M, "m": m})


def mass_consistency(muQ_total, C, ts: TSequence, tol: float = 1e-10) -> Report:
    """Per-zero masses ``M_i`` from determinants and derivatives versus ``M``."""
    m = ts.m
    theta_d = That(m).deriv()
    prod = Fraction(1)
    for j in range(1, m + 1):
        prod *= ts.a(0, j)
    d = delta(ts, 0, 2, m - 1)
    M = compute_mass_M(muQ_total, C, ts, clamp=False)
    rep = Report(f"point-mass consistency (m={m})")
    vals = []
    for z in node_zeros_T(m):
        zf = _const(z)
        Mi = (muQ_total * d(zf) / _const(prod) - Uhat(m - 1)(zf) * C) / theta_d(zf)
        vals.append(Mi)
    err = max(abs(v - M) for v in vals)
    rep.add("M_i = M for every zero of T_m", err <= tol, f"max |M_i - M| = {float(err):.3e}",
            M=M, M_i=vals)
    return rep


# --------------------------------------------------------------------------
# recovery of recurrence coefficients
# --------------------------------------------------------------------------

def stieltjes_from_nodes(x, w, count: int):
    """Discretised Stieltjes procedure on the discrete measure ``sum w_k delta(x_k)``.

    Returns ``(r, s)`` with ``r[n]`` for ``n < count`` and ``s[0]`` the total
    mass, ``s[n]`` (``1 <= n < count``) the monic recurrence coefficients.
    Works in orthonormal form so nothing under- or overflows.
    """
    mass = sum(w)
    if not mass > 0:
        raise StieltjesBreakdown(0, "measure has no mass")
    q_prev = x * 0
    q = x * 0 + 1 / _sqrt(mass)
    r, s = [], [mass]
    for k in range(count):
        rk = sum(w * x * q * q)
        r.append(rk)
        if k + 1 == count:
            break
        u = (x - rk) * q
        v = u - _sqrt(s[k]) * q_prev if k >= 1 else u
        sk = sum(w * v * v)
        # below this the new direction is rounding noise: the measure has run out of support
        noise = 1e4 * _eps() ** 2 * (sum(w * u * u) + (s[k] if k >= 1 else 0))
        if not (_isfinite(sk) and sk > noise):
            raise StieltjesBreakdown(k + 1, f"s_{k+1} = {sk} is not positive")
        s.append(sk)
        q_prev, q = q, v / _sqrt(sk)
    return r, s


def stieltjes_recover(mu: Measure, count: int, nodes: int = DEFAULT_NODES):
    """Recurrence coefficients of the monic orthogonal polynomials of ``mu``."""
    x, w = mu.discretize(nodes)
    return stieltjes_from_nodes(x, w, count)


def gram_matrix(mu: Measure, ts: TSequence, size: int, nodes: int = DEFAULT_NODES) -> np.ndarray:
    """``G[i, j] = int P_i P_j dmu`` for ``i, j < size``."""
    x, w = mu.discretize(nodes)
    tvals = [_const(ts.t(i)) for i in range(size)]
    V = eval_P(tvals, x, size)
    return (V * w) @ V.T


def gram_offdiag(G) -> float:
    d = np.array([_sqrt(G[i, i]) for i in range(G.shape[0])], dtype=G.dtype)
    R = G / np.outer(d, d)
    n = G.shape[0]
    return float(max((abs(R[i, j]) for i in range(n) for j in range(n) if i != j), default=0.0))
