"""Chebyshev polynomials of the first and second kind.

``T_n(cos t) = cos(n t)`` and ``U_n(cos t) = sin((n+1) t) / sin t``. The monic
variants are ``T^_n = 2^(1-n) T_n`` and ``U^_n = 2^(-n) U_n`` for ``n >= 1``,
with ``T^_0 = U^_0 = 1``. Every family is the zero polynomial at negative
index.
"""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .polycore import EXACT, Poly


class Kind(enum.Enum):
    FIRST = "T"
    SECOND = "U"


FIRST = Kind.FIRST
SECOND = Kind.SECOND


@lru_cache(maxsize=None)
def _cheb_coeffs(kind: Kind, n: int) -> tuple:
    if n < 0:
        return ()
    x = Poly.x()
    prev = Poly.one()
    cur = x if kind is FIRST else Poly.exact([0, 2])
    if n == 0:
        return prev.coeffs
    for _ in range(n - 1):
        prev, cur = cur, Poly.exact([0, 2]) * cur - prev
    return cur.coeffs


def monic_scale(kind: Kind, n: int) -> Fraction:
    """Factor turning ``T_n`` / ``U_n`` into its monic version."""
    if n <= 0:
        return Fraction(1)
    return Fraction(1, 2 ** (n - 1)) if kind is FIRST else Fraction(1, 2**n)


def cheb_poly(kind: Kind, n: int, monic: bool = False) -> Poly:
    """Exact Chebyshev polynomial; zero for ``n < 0``."""
    p = Poly(_cheb_coeffs(kind, n), EXACT)
    return p.scale(monic_scale(kind, n)) if monic else p


def T(n: int) -> Poly:
    return cheb_poly(FIRST, n)


def U(n: int) -> Poly:
    return cheb_poly(SECOND, n)


def That(n: int) -> Poly:
    return cheb_poly(FIRST, n, monic=True)


def Uhat(n: int) -> Poly:
    return cheb_poly(SECOND, n, monic=True)


def _eval_unit(kind, n, ax):
    # ax in [0, 1]; t = arccos(ax) computed from 1 - ax, which is exact near 1
    t = 2.0 * np.arcsin(np.sqrt((1.0 - ax) / 2.0))
    if kind is FIRST:
        return np.cos(n * t)
    st = np.sin(t)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = np.sin((n + 1) * t) / st
    return np.where(st == 0.0, float(n + 1), val)


def _eval_outer(kind, n, ax):
    # ax > 1
    phi = np.arccosh(ax)
    if kind is FIRST:
        return np.cosh(n * phi)
    return np.sinh((n + 1) * phi) / np.sinh(phi)


def _eval_mp(kind, n, x):
    sign = -1 if (x < 0 and n % 2) else 1
    ax = abs(x)
    if ax <= 1:
        t = 2 * mpmath.asin(mpmath.sqrt((1 - ax) / 2))
        if kind is FIRST:
            v = mpmath.cos(n * t)
        else:
            st = mpmath.sin(t)
            v = mpmath.mpf(n + 1) if st == 0 else mpmath.sin((n + 1) * t) / st
    else:
        phi = mpmath.acosh(ax)
        v = mpmath.cosh(n * phi) if kind is FIRST else mpmath.sinh((n + 1) * phi) / mpmath.sinh(phi)
    return sign * v


def cheb_eval(kind: Kind, n: int, x, monic: bool = False):
    """Evaluate ``T_n`` or ``U_n`` (optionally monic) in floating point.

    Uses the trigonometric form on ``[-1, 1]`` and the hyperbolic form
    outside, both on ``|x|`` with the parity sign restored afterwards, which
    keeps the absolute error near ``n * eps`` for ``n`` up to a few hundred.
    Accepts floats, numpy arrays and ``mpmath.mpf`` scalars.
    """
    if n < 0:
        return 0 * x
    scale = monic_scale(kind, n)
    if isinstance(x, mpmath.mpf):
        v = _eval_mp(kind, n, x)
        return v * mpmath.mpf(scale.numerator) / scale.denominator if monic else v
    xa = np.asarray(x, dtype=float)
    ax = np.abs(xa)
    with np.errstate(all="ignore"):
        val = np.where(
            ax <= 1.0,
            _eval_unit(kind, n, np.minimum(ax, 1.0)),
            _eval_outer(kind, n, np.maximum(ax, 1.0)),
        )
    if n % 2:
        val = np.where(xa < 0, -val, val)
    if monic:
        val = val * float(scale)
    return val if np.ndim(x) else float(val)


def cospi(q: Fraction) -> float:
    """``cos(pi*q)`` for rational ``q``, exact at the symmetric points.

    Computed as ``sin(pi*(1/2 - q))`` so that the zeros come out as exact
    zeros and values at ``q`` and ``1 - q`` are exact negatives.
    """
    r = Fraction(1, 2) - Fraction(q)
    return math.sin(math.pi * float(r)) if r >= 0 else -math.sin(math.pi * float(-r))


def zeros_T(m: int) -> list[float]:
    """Zeros ``z_i = cos((2i-1) pi / (2m))`` of ``T_m`` in descending order."""
    if m < 1:
        raise ValueError("zeros_T needs m >= 1")
    return [cospi(Fraction(2 * i - 1, 2 * m)) for i in range(1, m + 1)]


def zeros_U(m: int) -> list[float]:
    """Zeros ``cos(i pi / (m+1))`` of ``U_m``, descending."""
    if m < 0:
        raise ValueError("zeros_U needs m >= 0")
    return [cospi(Fraction(i, m + 1)) for i in range(1, m + 1)]
