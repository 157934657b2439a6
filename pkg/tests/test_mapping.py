from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opcheb.chebyshev import That, Uhat
from opcheb.example import ExampleConfig, example_tsequence
from opcheb.mapping import (CHAIN, PRINTED, b_coefficient, build_bundle, delta,
                            delta_identity_check, derive_Q, lift_tsequence, mapped_representation_check,
                            mapped_P, poly_A, poly_B, printed_coefficient_audit, that_factorisation_check,
                            rn_polynomial, verify_pik, verify_rn_constant, verify_s_product)
from opcheb.polycore import Poly, poly_compose
from opcheb.recurrence import TSequence, generate_P, generate_Q, validate_tsequence

F = Fraction


def ex(m, p):
    return example_tsequence(ExampleConfig(m, F(p)))


def test_delta_base_cases():
    ts = ex(2, 1)
    assert delta(ts, 0, 5, 3) == Poly.one()
    assert delta(ts, 0, 5, 2).is_zero
    assert delta(ts, 0, 5, 4) == Poly.x()
    # 2x2 determinant
    assert delta(ts, 1, 3, 3) == Poly.exact([-ts.a(1, 3), 0, 1])


def test_delta_all_quarter_is_uhat():
    ts = ex(3, 0)
    for d in range(0, 4):
        assert delta(ts, 1, 2, 2 + d - 2) == Uhat(d)


def test_A_and_B_examples():
    ts = ex(2, 1)
    assert poly_A(ts, 0, 0) == Uhat(0)
    assert poly_A(ts, 0, 2) == Uhat(2) + F(1, 20)
    # both correction products survive here: (1/4 - 1/5) (U^_{-1} U^_1 - U^_0 U^_0)
    assert poly_B(ts, 0, 0) == Uhat(2) - F(1, 20) == delta(ts, 0, 5, 5)
    assert poly_B(ts, 0, 3).is_zero
    assert poly_A(ex(2, 0), 0, 3) == Uhat(3)
    assert poly_B(ex(3, 0), 1, 4) == Poly.one()


def test_B_with_nonzero_correction():
    ts = ex(2, 1)
    for j in range(4):
        assert poly_B(ts, 0, j) == delta(ts, 0, 2 + j + 3, 2 + 3)
        assert poly_A(ts, 0, j) == delta(ts, 0, 4, 2 + j)
    assert poly_B(ts, 0, 1) == Uhat(1)
    assert poly_A(ts, 0, 3) == Uhat(3) + (Uhat(1) * Uhat(0) - Uhat(0) * Uhat(1)).scale(F(1, 20))


@pytest.mark.parametrize("m,p,n", [(2, 1, 0), (3, 0, 2), (4, F(5, 2), 1), (3, 2, 1)])
def test_delta_identities(m, p, n):
    rep = delta_identity_check(ex(m, p), n)
    assert rep.passed, rep.render()


def test_derive_Q_values():
    assert all(derive_Q(ex(m, 0)).r(n) == 0 for m in (2, 3) for n in (1, 2, 3))
    assert derive_Q(ex(2, 0)).r(0) == F(1, 16)
    assert derive_Q(ex(2, 0)).s(1) == F(1, 256)
    assert derive_Q(ex(3, 0)).s(1) == F(1, 4**6)
    # r_0 for m=2, p=1 equals 2^(1-2m) a_0 of the Jacobi family, 1/8 * 3/5
    assert derive_Q(ex(2, 1)).r(0) == F(3, 40)


def test_mapped_P_examples():
    ts = ex(2, 0)
    b = build_bundle(ts)
    Q = generate_Q(b.qr, 3)
    assert mapped_P(b, Q, 0, 0) == That(3)
    ts = ex(2, 1)
    b = build_bundle(ts)
    Q = generate_Q(b.qr, 3)
    P = generate_P(ts, 8)
    assert mapped_P(b, Q, 0, 1) == P[4]
    assert mapped_P(b, Q, 0, 3) == That(2) * poly_compose(Q[1], That(4))


@pytest.mark.parametrize("m", [2, 3, 4])
@pytest.mark.parametrize("p", [0, 1, 2, F(5, 2)])
def test_mapped_representation(m, p):
    rep = mapped_representation_check(ex(m, p), 3)
    assert rep.passed, rep.render()


def test_printed_shorthand_agrees_only_for_small_j():
    ts = ex(3, 1)
    for j in range(0, 2 * 3 - 1):
        same = b_coefficient(ts, 0, j, CHAIN) == b_coefficient(ts, 0, j, PRINTED)
        assert same == (j <= 1)
    assert not mapped_representation_check(ts, 2, PRINTED).passed
    audit = printed_coefficient_audit(ts, 2)
    assert not audit.passed


@pytest.mark.parametrize("m,p", [(2, 1), (3, 0), (4, 2)])
def test_pik(m, p):
    rep = verify_pik(build_bundle(ex(m, p)))
    assert rep.passed, rep.render()


def test_pik_at_zero_of_T2():
    b = build_bundle(ex(2, 1))
    assert abs(float(b.pi(2**-0.5)) + 0.125) < 1e-15


@pytest.mark.parametrize("m,p,n", [(2, 0, 1), (3, 0, 2), (2, 1, 1), (3, 2, 2), (4, F(5, 2), 1)])
def test_rn_constant(m, p, n):
    rep = verify_rn_constant(ex(m, p), n)
    assert rep.passed, rep.render()


def test_rn_chebyshev_case_is_minus_r0():
    # r_n = 0 for n >= 1 but r_0 = 2^(-2m), so the combination is -2^(-2m)
    for m in (2, 3):
        for n in (1, 2):
            assert rn_polynomial(ex(m, 0), n) == Poly.constant(-F(1, 4**m))


@pytest.mark.parametrize("m,p,n", [(2, 0, 1), (3, 0, 1), (2, 1, 1), (4, F(5, 2), 2)])
def test_s_product(m, p, n):
    rep = verify_s_product(ex(m, p), n)
    assert rep.passed, rep.render()


@pytest.mark.parametrize("m,p", [(2, 1), (3, F(5, 2))])
def test_that_factorisation(m, p):
    assert that_factorisation_check(ex(m, p), 3).passed


def _random_tsequence(m, draws):
    rows = []
    for n, (u, v) in enumerate(draws):
        u0 = F(0) if n == 0 else u
        rows.append((u0, F(1, 2) - u0, v, F(1, 2) - v))
    return TSequence.from_blocks(m, rows)


nonzero_part = st.fractions(min_value=F(1, 50), max_value=F(12, 25), max_denominator=50)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.lists(st.tuples(nonzero_part, nonzero_part), min_size=4, max_size=4))
def test_mapped_representation_for_arbitrary_valid_sequences(m, draws):
    ts = _random_tsequence(m, draws)
    assert validate_tsequence(ts, 4) == []
    assert mapped_representation_check(ts, 2).passed
    assert delta_identity_check(ts, 1).passed
    assert verify_rn_constant(ts, 1).passed
    assert verify_s_product(ts, 2).passed


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4), st.lists(st.tuples(nonzero_part, nonzero_part), min_size=4, max_size=4))
def test_lift_inverts_derive(m, draws):
    ts = _random_tsequence(m, draws)
    lifted = lift_tsequence(m, derive_Q(ts), ts.t(m), 3)
    assert lifted.values(3 * 2 * m) == ts.values(3 * 2 * m)
