"""Dense univariate polynomials over the rationals or the floats.

A polynomial is an immutable :class:`Poly` holding its coefficients in
ascending degree order, e.g. ``Poly.exact([1, 0, -2])`` is ``1 - 2x^2``.
Trailing zeros are always stripped, so the zero polynomial has an empty
coefficient tuple and degree :data:`DEG_ZERO`.

Exact polynomials carry :class:`fractions.Fraction` coefficients, which are
normalised after every operation; identity checks built on them are
bit-exact. Float polynomials carry Python floats (or ``mpmath.mpf`` when an
extended working precision is configured, see :func:`set_working_precision`).
"""
from __future__ import annotations

import math
import os
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import mpmath

EXACT = "exact"
FLOAT = "float"

#: Degree reported for the zero polynomial.
DEG_ZERO = -math.inf


class NotDivisible(ArithmeticError):
    """Raised when an exact division leaves a nonzero remainder."""

    def __init__(self, dividend: "Poly", divisor: "Poly", remainder: "Poly"):
        super().__init__(f"{dividend} is not divisible by {divisor} (remainder {remainder})")
        self.dividend = dividend
        self.divisor = divisor
        self.remainder = remainder


class FieldMismatch(TypeError):
    """Raised when exact and float polynomials are combined."""


# --------------------------------------------------------------------------
# working precision
# --------------------------------------------------------------------------

_precision_digits: int | None = None


def _env_precision() -> int | None:
    raw = os.environ.get("OPCHEB_PRECISION", "").strip()
    if not raw:
        return None
    digits = int(raw)
    if digits < 16:
        raise ValueError("OPCHEB_PRECISION must be at least 16 decimal digits")
    return digits


def set_working_precision(digits: int | None) -> None:
    """Select the float working precision.

    ``None`` means native double precision. Any other value switches the
    numerical routines to ``mpmath`` with that many decimal digits.
    """
    global _precision_digits
    if digits is not None and digits < 16:
        raise ValueError("extended precision must be at least 16 decimal digits")
    _precision_digits = digits
    if digits is not None:
        mpmath.mp.dps = digits


def working_precision() -> int | None:
    """Decimal digits of the extended precision, or ``None`` for double."""
    return _precision_digits


def to_float(value):
    """Convert a scalar to the working float type."""
    if _precision_digits is None:
        return float(value)
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


set_working_precision(_env_precision())


# --------------------------------------------------------------------------
# polynomials
# --------------------------------------------------------------------------

def _normalize(coeffs: Iterable) -> tuple:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class Poly:
    """Immutable dense polynomial with a field tag (``"exact"`` or ``"float"``)."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs: Iterable = (), field: str = EXACT):
        if field not in (EXACT, FLOAT):
            raise ValueError(f"unknown field {field!r}")
        if field == EXACT:
            conv = []
            for c in coeffs:
                if not isinstance(c, Rational):
                    raise TypeError(f"exact polynomial needs rational coefficients, got {c!r}")
                conv.append(Fraction(c))
        else:
            conv = [to_float(c) for c in coeffs]
        object.__setattr__(self, "coeffs", _normalize(conv))
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def exact(cls, coeffs: Iterable) -> "Poly":
        return cls(coeffs, EXACT)

    @classmethod
    def float(cls, coeffs: Iterable) -> "Poly":
        return cls(coeffs, FLOAT)

    @classmethod
    def zero(cls, field: str = EXACT) -> "Poly":
        return cls((), field)

    @classmethod
    def one(cls, field: str = EXACT) -> "Poly":
        return cls((1,), field)

    @classmethod
    def x(cls, field: str = EXACT) -> "Poly":
        return cls((0, 1), field)

    @classmethod
    def constant(cls, c, field: str = EXACT) -> "Poly":
        return cls((c,), field)

    @property
    def degree(self):
        """Degree, or :data:`DEG_ZERO` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else DEG_ZERO

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def to_float(self) -> "Poly":
        return Poly(self.coeffs, FLOAT)

    def deriv(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:], self.field)

    def scale(self, c) -> "Poly":
        """Multiply every coefficient by the scalar ``c``."""
        return Poly([c * a for a in self.coeffs], self.field)

    def __add__(self, other):
        return poly_add(self, _coerce(other, self.field))

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.field)

    def __sub__(self, other):
        return poly_add(self, -_coerce(other, self.field))

    def __rsub__(self, other):
        return poly_add(_coerce(other, self.field), -self)

    def __mul__(self, other):
        if isinstance(other, Poly):
            return poly_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __call__(self, x):
        return poly_eval(self, x)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __repr__(self):
        return f"Poly.{self.field}({list(self.coeffs)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append(f"-{mono}")
            else:
                terms.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(reversed(terms)).replace("+ -", "- ")


def _coerce(value, field: str) -> Poly:
    if isinstance(value, Poly):
        return value
    return Poly((value,), field)


def _check_fields(a: Poly, b: Poly) -> str:
    if a.field != b.field:
        raise FieldMismatch(f"cannot combine {a.field} and {b.field} polynomials")
    return a.field


def poly_add(a: Poly, b: Poly) -> Poly:
    field = _check_fields(a, b)
    n = max(len(a.coeffs), len(b.coeffs))
    zero = 0
    ac = a.coeffs + (zero,) * (n - len(a.coeffs))
    bc = b.coeffs + (zero,) * (n - len(b.coeffs))
    return Poly([x + y for x, y in zip(ac, bc)], field)


def poly_mul(a: Poly, b: Poly) -> Poly:
    field = _check_fields(a, b)
    if a.is_zero or b.is_zero:
        return Poly.zero(field)
    out = [0] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, ai in enumerate(a.coeffs):
        if ai == 0:
            continue
        for j, bj in enumerate(b.coeffs):
            out[i + j] += ai * bj
    return Poly(out, field)


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Exact long division ``a = q*b + r`` with ``deg r < deg b``."""
    field = _check_fields(a, b)
    if field != EXACT:
        raise FieldMismatch("long division is only defined for exact polynomials")
    if b.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    rem = list(a.coeffs)
    db = len(b.coeffs) - 1
    lead = b.coeffs[-1]
    if len(rem) - 1 < db:
        return Poly.zero(), a
    quot = [Fraction(0)] * (len(rem) - db)
    for k in range(len(rem) - 1, db - 1, -1):
        c = rem[k] / lead
        quot[k - db] = c
        if c:
            for i, bi in enumerate(b.coeffs):
                rem[k - db + i] -= c * bi
    return Poly(quot), Poly(rem[:db])


def poly_divexact(a: Poly, b: Poly) -> Poly:
    """Quotient ``a / b``; raises :class:`NotDivisible` on a nonzero remainder."""
    q, r = poly_divmod(a, b)
    if not r.is_zero:
        raise NotDivisible(a, b, r)
    return q


def poly_compose(outer: Poly, inner: Poly) -> Poly:
    """``outer(inner(x))`` by Horner's scheme over polynomials."""
    field = _check_fields(outer, inner)
    acc = Poly.zero(field)
    for c in reversed(outer.coeffs):
        acc = poly_add(poly_mul(acc, inner), Poly((c,), field))
    return acc


def poly_eval(a: Poly, x):
    """Horner evaluation.

    An exact polynomial evaluated at a rational point gives an exact result;
    at a float (or numpy array, or ``mpf``) its coefficients are converted
    first.
    """
    if isinstance(x, Rational) and a.field == EXACT:
        acc = Fraction(0)
        for c in reversed(a.coeffs):
            acc = acc * x + c
        return acc
    coeffs = a.coeffs if a.field == FLOAT else [to_float(c) for c in a.coeffs]
    acc = 0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def format_rational(q: Fraction) -> str:
    """``"num/den"`` without whitespace; integers keep a ``/1`` denominator."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``"5/2"``, ``"-3"`` or a finite decimal such as ``"2.5"`` exactly."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def poly_from_roots(roots: Sequence, field: str = FLOAT) -> Poly:
    out = Poly.one(field)
    for r in roots:
        out = out * Poly((-r, 1), field)
    return out
