import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import QQ

from biquant import builtins

from biquant.characters import (
    Convention,
    CTCharacter,
    OracleCharacter,
    PolyDiffOp,
    calibrated_convention,
    compare_characters,
    evaluate,
    example_correction_terms,
    exp_diff_op,
    gamma_ct,
    oracle_character,
    verify_example_correction,
)
from biquant.enveloping import symmetric_ring
from biquant.errors import NonTransverseError, PreconditionError, SeriesError
from biquant.lie import LinearForm
from biquant.orbits import lagrangian_check, transverse_polarization
from biquant.reduction import QuotientContext, invariants

RING = symmetric_ring(("U", "V", "Z"))
U, V, Z = RING.gens


def test_diff_op_apply():
    d_u = PolyDiffOp(RING, {(1, 0, 0): 1})
    assert d_u(U**3 * V) == 3 * U**2 * V
    assert PolyDiffOp.identity(RING)(V + Z) == V + Z


def test_diff_op_compose_follows_leibniz():
    euler = PolyDiffOp(RING, {(1, 0, 0): U})
    square = euler.compose(euler)
    p = U**2 + V * U**3
    assert square(p) == euler(euler(p))
    assert square == PolyDiffOp(RING, {(1, 0, 0): U, (2, 0, 0): U**2})


def test_exp_of_a_derivative_is_a_shift():
    shift = exp_diff_op(RING, {(1, 0, 0): 1}, 3)
    assert shift(U**2) == U**2 + 2 * U + 1
    assert shift(U**3 * Z) == (U + 1) ** 3 * Z


def test_exp_with_coefficients_in_other_variables():
    op = exp_diff_op(RING, {(0, 1, 0): Z}, 2)
    assert op(V**2) == V**2 + 2 * Z * V + Z**2


def test_exp_rejects_non_nilpotent_series():
    with pytest.raises(SeriesError):
        exp_diff_op(RING, {(0, 0, 0): 1}, 2)
    with pytest.raises(SeriesError):
        exp_diff_op(RING, {(1, 0, 0): U}, 2)


def test_example_correction_only_touches_cubes_in_u():
    forward = exp_diff_op(RING, example_correction_terms(RING, QQ(3), 1), 6)
    assert forward(V**2 * Z) == V**2 * Z
    assert forward(U**3) != U**3


def _inverse_pair(degree):
    terms = example_correction_terms(RING, QQ(3), 1)
    negated = {alpha: -c for alpha, c in terms.items()}
    return exp_diff_op(RING, terms, degree), exp_diff_op(RING, negated, degree)


@pytest.mark.parametrize("p", [U**7, U**4 * Z**2, U**3 * V * Z, U**6])
def test_exp_of_the_negated_operator_is_the_inverse(p):
    forward, backward = _inverse_pair(7)
    assert backward(forward(p)) == p
    assert forward(backward(p)) == p


low_degree_polys = st.dictionaries(
    st.tuples(st.integers(0, 4), st.integers(0, 1), st.integers(0, 1)),
    st.integers(-4, 4).filter(bool).map(QQ),
    max_size=4,
).map(lambda terms: RING.from_dict(terms) if terms else RING.zero)


@settings(max_examples=30, deadline=None)
@given(low_degree_polys)
def test_exp_round_trip_on_low_degree_polynomials(p):
    forward, backward = _inverse_pair(6)
    assert backward(forward(p)) == p


def test_evaluate(example5):
    L = example5.algebra
    f = example5.form("g")
    vectors = [L.basis_vector(n) for n in ("U", "V", "Z")]
    assert evaluate(U * V + Z, vectors, f) == QQ(2 * -1 - 7)
    assert evaluate(U * V + Z, vectors, f, sign=-1) == QQ(2 * -1 + 7)


def test_calibrated_convention():
    convention = calibrated_convention()
    assert convention == Convention(sigma=1, evaluation_sign=-1)
    assert convention.as_dict()["source"] == "heisenberg3 calibration"


def test_oracle_on_a_central_element(example5, example5_ctx):
    f = example5.form("f")
    pol = transverse_polarization(example5.algebra, example5_ctx.h, f)
    oracle = OracleCharacter(example5_ctx, f, pol)
    value, constant = oracle.evaluate(Z)
    assert value == QQ(-3)
    assert constant


def test_characters_agree_on_linear_invariants(example5, example5_ctx):
    f = example5.form("f")
    pol = transverse_polarization(example5.algebra, example5_ctx.h, f)
    ct = CTCharacter(example5_ctx, f, pol, 1)
    assert ct(Z) == QQ(-3)
    assert ct(example5_ctx.ring.one) == QQ(1)


def test_point_must_extend_the_character(example5, example5_ctx):
    L = example5.algebra
    wrong = LinearForm(L, [0, 0, 0, 2, 3])
    pol = transverse_polarization(L, example5_ctx.h, example5.form("f"))
    with pytest.raises(PreconditionError):
        gamma_ct(example5_ctx, Z, wrong, pol)
    with pytest.raises(PreconditionError):
        oracle_character(example5_ctx, Z, wrong, pol)


@pytest.mark.parametrize("form", ["f", "g"])
def test_compare_example5(example5, example5_ctx, form):
    f = example5.form(form)
    pol = transverse_polarization(example5.algebra, example5_ctx.h, f)
    report = compare_characters(example5_ctx, 3, f, pol)
    assert report.agreement, report.disagreements
    assert report.ct.multiplicative
    assert report.oracle.multiplicative
    assert set(report.ct.values) == {str(p.as_expr()) for p in invariants(example5_ctx, 3)}
    residuals = report.oracle.residual_constant
    assert set(residuals) == set(report.oracle.values)
    assert residuals["1"] and residuals["Z"]
    assert set(report.oracle.nonconstant_residuals) == {k for k, constant in residuals.items() if not constant}
    assert "residual_is_constant" in report.oracle.to_frame().columns


def test_compare_heisenberg(heisenberg, heisenberg_ctx):
    f = heisenberg.form("g")
    pol = transverse_polarization(heisenberg.algebra, heisenberg_ctx.h, f)
    report = compare_characters(heisenberg_ctx, 3, f, pol)
    assert report.agreement
    assert report.supplement == "canonical"
    assert list(report.oracle.to_frame().columns) == ["invariant", "method", "value", "residual_is_constant"]


def test_example_correction_is_trivial_up_to_degree_five():
    report = verify_example_correction(5, 5, np.random.default_rng(0))
    assert report.passed
    assert report.nontrivial == 0
    # 12 invariants of degree <= 5, one row each per trial
    assert len(report.to_frame()) == 5 * 12


@pytest.mark.slow
def test_example_correction_degree_six():
    report = verify_example_correction(6, 2, np.random.default_rng(1))
    assert report.passed
    assert report.nontrivial >= 1


@pytest.mark.parametrize("name", ["example5", "heisenberg3"])
def test_characters_at_sampled_generic_forms(name):
    defs = builtins.load(name)
    L = defs.algebra
    h = defs.subalgebra("h")
    lam = defs.character("lambda")
    ctx = QuotientContext(L, h, lam, defs.supplement(h))
    check = lagrangian_check(L, h, lam, 16, np.random.default_rng(11))
    assert check.holds_generically
    compared = 0
    for f in check.witnesses:
        try:
            pol = transverse_polarization(L, h, f)
        except NonTransverseError:
            continue
        report = compare_characters(ctx, 4, f, pol, pair_degree=4)
        assert report.ct.multiplicative, report.ct.failures
        assert report.oracle.multiplicative, report.oracle.failures
        assert report.agreement, report.disagreements
        compared += 1
        if compared == 8:
            break
    assert compared == 8
