"""Independent sympy oracles shared by the test modules."""
from fractions import Fraction

import pytest
import sympy as sp

from opcheb.polycore import Poly

X = sp.symbols("x")


def sym_to_poly(expr) -> Poly:
    coeffs = sp.Poly(sp.expand(expr), X).all_coeffs()[::-1]
    return Poly.exact([Fraction(int(sp.fraction(c)[0]), int(sp.fraction(c)[1])) for c in coeffs])


def oracle_t(m, p, count):
    """Example t-values straight from the four closed forms (sympy rationals)."""
    p = sp.Rational(p)
    out = []
    for i in range(count):
        n, j = divmod(i, 2 * m)
        if p == 0 and n == 0 and j in (0, 1):
            v = [sp.Integer(0), sp.Rational(1, 2)][j]
        elif j == 0:
            v = sp.Rational(n) / (4 * n + p)
        elif j == 1:
            v = (2 * n + p) / (2 * (4 * n + p))
        elif j == m:
            v = (2 * n + p + 1) / (2 * (4 * n + p + 2))
        elif j == m + 1:
            v = sp.Rational(2 * n + 1) / (2 * (4 * n + p + 2))
        else:
            v = sp.Rational(1, 4)
        out.append(v)
    return out


def oracle_P(m, p, count):
    t = oracle_t(m, p, count)
    P = [sp.Integer(1), X]
    for n in range(1, count - 1):
        P.append(sp.expand(X * P[n] - t[n] * P[n - 1]))
    return [sym_to_poly(e) for e in P[:count]]


def as_fraction(v) -> Fraction:
    num, den = sp.fraction(sp.Rational(v))
    return Fraction(int(num), int(den))


@pytest.fixture(autouse=True)
def _double_precision():
    from opcheb.polycore import set_working_precision, working_precision
    saved = working_precision()
    set_working_precision(None)
    yield
    set_working_precision(saved)


# acceptance lines, printed once at the end of the run
ACCEPTANCE: dict[str, tuple[bool, str, str]] = {}


def record_acceptance(key: str, title: str, passed: bool, detail: str) -> None:
    ACCEPTANCE[key] = (bool(passed), title, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.rstrip("ab")), k)):
        passed, title, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {key}: {title} -- {detail}")
