"""Constrained recurrence coefficients and the monic families they generate.

A :class:`TSequence` describes ``t_1, t_2, ...`` for a fixed ``m >= 2`` in
blocks of length ``k = 2m``. Inside block ``n`` (indices ``2mn .. 2mn+2m-1``)
only the offsets ``0, 1, m, m+1`` are free; every other offset is fixed at
1/4, and the free values pair up as ``t_{2mn} + t_{2mn+1} = 1/2`` and
``t_{2mn+m} + t_{2mn+m+1} = 1/2``. The family ``P_n`` follows from

    P_{n+1}(x) = x P_n(x) - t_n P_{n-1}(x),   P_0 = 1, P_{-1} = 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .polycore import Poly

QUARTER = Fraction(1, 4)
HALF = Fraction(1, 2)

Quadruple = tuple  # (t_{2mn}, t_{2mn+1}, t_{2mn+m}, t_{2mn+m+1})


class InvalidTSequence(ValueError):
    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class Violation:
    index: int | None
    message: str

    def __str__(self):
        where = "" if self.index is None else f"t_{self.index}: "
        return where + self.message


@dataclass(frozen=True)
class BlockIndex:
    """Position ``2mn + j`` split into block ``n`` and offset ``j``."""

    n: int
    j: int
    m: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.j < 2 * self.m:
            raise ValueError(f"bad block index (n={self.n}, j={self.j}) for m={self.m}")

    @property
    def linear(self) -> int:
        return 2 * self.m * self.n + self.j

    @classmethod
    def of(cls, index: int, m: int) -> "BlockIndex":
        n, j = divmod(index, 2 * m)
        return cls(n, j, m)


@dataclass(frozen=True)
class TSequence:
    """Coefficient sequence defined by its four free values per block.

    ``free(n)`` returns ``(t_{2mn}, t_{2mn+1}, t_{2mn+m}, t_{2mn+m+1})``. The
    fixed 1/4 positions are computed, never stored. A sequence read from data
    (:meth:`from_values`) instead stores every value, so that
    :func:`validate_tsequence` can report a wrong entry at a fixed position.
    """

    m: int
    free: Callable[[int], Quadruple] | None = None
    explicit: Callable[[int], Fraction] | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if (self.free is None) == (self.explicit is None):
            raise TypeError("give exactly one of free= or explicit=")

    @property
    def k(self) -> int:
        return 2 * self.m

    def block(self, n: int) -> Quadruple:
        """The four free values of block ``n``."""
        if self.free is not None:
            return tuple(self.free(n))
        base = self.k * n
        return tuple(self.explicit(base + j) for j in (0, 1, self.m, self.m + 1))

    def t(self, index: int) -> Fraction:
        if index < 0:
            raise IndexError(f"negative index {index}")
        if self.m < 2:
            raise ValueError("the block structure needs m >= 2")
        if self.explicit is not None:
            return _as_exact(self.explicit(index))
        if index == 0:
            return Fraction(0)
        n, j = divmod(index, self.k)
        if j in (0, 1):
            return _as_exact(self.free(n)[j])
        if j in (self.m, self.m + 1):
            return _as_exact(self.free(n)[j - self.m + 2])
        return QUARTER

    def a(self, n: int, j: int) -> Fraction:
        """Block coefficient ``a_n^(j) = t_{kn+j}``; undefined at ``(0, 0)``."""
        index = self.k * n + j
        if index < 1:
            raise IndexError(f"a_{n}^({j}) is undefined (linear index {index})")
        return self.t(index)

    def values(self, count: int) -> list[Fraction]:
        return [self.t(i) for i in range(count)]

    @classmethod
    def from_blocks(cls, m: int, blocks: Sequence[Quadruple], label: str = "") -> "TSequence":
        rows = [tuple(Fraction(v) for v in row) for row in blocks]

        def free(n: int) -> Quadruple:
            if n >= len(rows):
                raise IndexError(f"block {n} not supplied (have {len(rows)})")
            return rows[n]

        return cls(m, free=free, label=label)

    @classmethod
    def from_values(cls, m: int, values: Sequence, label: str = "") -> "TSequence":
        """Sequence given verbatim as ``t_0, t_1, ...``."""
        vals = list(values)

        def explicit(i: int):
            if i >= len(vals):
                raise IndexError(f"t_{i} not supplied (have {len(vals)})")
            return vals[i]

        return cls(m, explicit=explicit, label=label)


def _as_exact(v) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, Rational):
        raise TypeError(f"t-values must be exact rationals, got {v!r}")
    return Fraction(v)


@dataclass(frozen=True)
class QRecurrence:
    """Coefficients of ``Q_{n+1} = (x - r_n) Q_n - s_n Q_{n-1}``."""

    r: Callable[[int], Fraction]
    s: Callable[[int], Fraction]


def validate_tsequence(ts: TSequence, blocks: int) -> list[Violation]:
    """Check every block constraint for blocks ``0 .. blocks-1``.

    Returns the list of violations; an empty list means valid.
    """
    if blocks < 1:
        raise ValueError("blocks must be >= 1")
    if ts.m < 2:
        return [Violation(None, f"m={ts.m}: the construction cannot be considered for m = 1 "
                                "(the constraints would force t_2 = 0)")]
    out: list[Violation] = []
    m, k = ts.m, ts.k
    for n in range(blocks):
        try:
            quad = ts.block(n)
            if len(quad) != 4:
                out.append(Violation(k * n, "free(n) must return four values"))
                continue
            for v in quad:
                _as_exact(v)
        except TypeError as exc:
            out.append(Violation(k * n, f"{exc} (complex or inexact parameters are not supported)"))
            continue
        except IndexError as exc:
            out.append(Violation(k * n, str(exc)))
            continue
        u0, u1, v0, v1 = (Fraction(v) for v in quad)
        if n == 0 and u0 != 0:
            out.append(Violation(0, f"t_0 must be 0, got {u0}"))
        if u0 + u1 != HALF:
            out.append(Violation(k * n, f"t_{k*n} + t_{k*n+1} = {u0 + u1} != 1/2"))
        if v0 + v1 != HALF:
            out.append(Violation(k * n + m, f"t_{k*n+m} + t_{k*n+m+1} = {v0 + v1} != 1/2"))
        for j in range(k):
            idx = k * n + j
            if idx == 0:
                continue
            try:
                val = ts.t(idx)
            except (TypeError, IndexError) as exc:
                out.append(Violation(idx, str(exc)))
                continue
            if val == 0:
                out.append(Violation(idx, "must be nonzero"))
            if j not in (0, 1, m, m + 1) and val != QUARTER:
                out.append(Violation(idx, f"= {val}, expected 1/4"))
    return out


def is_positive(ts: TSequence, count: int) -> bool:
    return all(ts.t(i) > 0 for i in range(1, count))


def require_valid(ts: TSequence, count: int) -> None:
    # blocks covering t_1 .. t_{count-2}, the values the recurrence touches
    blocks = max(1, -(-(count - 1) // ts.k)) if ts.m >= 2 else 1
    bad = validate_tsequence(ts, blocks)
    if bad:
        raise InvalidTSequence(bad)


def generate_P(ts: TSequence, count: int) -> list[Poly]:
    """Exact monic ``P_0, ..., P_{count-1}`` from the t-recurrence."""
    if count < 1:
        raise ValueError("count must be >= 1")
    require_valid(ts, count)
    x = Poly.x()
    out = [Poly.one()]
    prev = Poly.zero()
    for n in range(count - 1):
        nxt = x * out[n] - prev.scale(ts.t(n))
        prev = out[n]
        out.append(nxt)
    return out


def generate_Q(qr: QRecurrence, count: int) -> list[Poly]:
    """Exact monic ``Q_0, ..., Q_{count-1}``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out = [Poly.one()]
    prev = Poly.zero()
    for n in range(count - 1):
        shift = Poly.exact([-Fraction(qr.r(n)), 1])
        nxt = shift * out[n]
        if n >= 1:
            nxt = nxt - prev.scale(Fraction(qr.s(n)))
        prev = out[n]
        out.append(nxt)
    return out


def norm_products(ts: TSequence, count: int) -> list[Fraction]:
    """Norm ratios ``h_n / h_0 = t_1 t_2 ... t_n`` for ``n < count``."""
    out = [Fraction(1)]
    for n in range(1, count):
        out.append(out[-1] * ts.t(n))
    return out[:count]


def eval_P(tvals: Sequence[float], x, count: int) -> np.ndarray:
    """Values of ``P_0 .. P_{count-1}`` at ``x`` by the float recurrence.

    ``tvals[n]`` is ``t_n`` as a float. Returns an array of shape
    ``(count,) + x.shape``; works with object arrays of ``mpf`` as well.
    """
    x = np.asarray(x)
    out = np.empty((count,) + x.shape, dtype=x.dtype)
    out[0] = 1
    if count > 1:
        out[1] = x
    for n in range(1, count - 1):
        out[n + 1] = x * out[n] - tvals[n] * out[n - 1]
    return out


def zeros_P(ts: TSequence, n: int) -> np.ndarray:
    """Zeros of ``P_n`` (positive case) as eigenvalues of the Jacobi matrix.

    The matrix is symmetric tridiagonal with zero diagonal and off-diagonal
    ``sqrt(t_1), ..., sqrt(t_{n-1})``. Returned in ascending order.
    """
    if n < 1:
        return np.empty(0)
    off = np.sqrt([float(ts.t(i)) for i in range(1, n)])
    if np.any(~np.isfinite(off)):
        raise ValueError("zeros_P needs t_i > 0")
    return eigh_tridiagonal(np.zeros(n), off, eigvals_only=True)
