import pytest
from sympy import QQ

from biquant import exact
from biquant.exact import PARAM_RING, PARAM_FIELD, T


def test_rational_literals():
    assert exact.rational("-3/4") == QQ(-3, 4)
    assert exact.rational(" 5 ") == QQ(5)
    assert exact.rational(7) == QQ(7)


def test_rational_rejects_garbage():
    with pytest.raises(ValueError):
        exact.rational("x/2")


def test_nullspace_is_killed():
    m = exact.matrix([[1, 2, 3], [2, 4, 6]], 3)
    kernel = exact.nullspace(m)
    assert len(kernel) == 2
    for v in kernel:
        assert not any(exact.apply(m, v))


def test_nullspace_of_invertible_matrix_is_empty():
    assert exact.nullspace(exact.matrix([[1, 1], [0, 1]], 2)) == []


def test_coordinates():
    basis = [(QQ(1), QQ(1), QQ(0)), (QQ(0), QQ(1), QQ(1))]
    assert exact.coordinates((QQ(2), QQ(5), QQ(3)), basis, 3) == (QQ(2), QQ(3))
    assert exact.coordinates((QQ(1), QQ(0), QQ(0)), basis, 3) is None


def test_extend_basis_skips_dependent_candidates():
    base = [(QQ(1), QQ(1))]
    added = exact.extend_basis(base, [(QQ(2), QQ(2)), (QQ(0), QQ(1)), (QQ(1), QQ(0))], 2)
    assert added == [(QQ(0), QQ(1))]


def test_span_and_independence():
    vectors = [(QQ(1), QQ(2)), (QQ(2), QQ(4))]
    assert exact.span_rank(vectors, 2) == 1
    assert not exact.is_independent(vectors, 2)
    assert exact.in_span((QQ(3), QQ(6)), vectors, 2)


def test_unify():
    assert exact.unify(QQ, QQ) == QQ
    assert exact.unify(QQ, PARAM_RING) == PARAM_RING
    assert exact.unify(PARAM_RING, PARAM_FIELD) == PARAM_FIELD


def test_clear_denominators_of_constants():
    assert exact.clear_denominators([QQ(1, 2), QQ(1, 3)]) == (PARAM_RING.convert(3), PARAM_RING.convert(2))


def test_clear_denominators_keeps_powers_of_t():
    v = [PARAM_FIELD.from_sympy(T / 2), PARAM_FIELD.from_sympy(T**2 / 3)]
    assert exact.clear_denominators(v) == (PARAM_RING.from_sympy(3 * T), PARAM_RING.from_sympy(2 * T**2))


def test_clear_denominators_of_rational_functions():
    v = [PARAM_FIELD.from_sympy(1 / (T + 1)), PARAM_FIELD.convert(1)]
    assert exact.clear_denominators(v) == (PARAM_RING.convert(1), PARAM_RING.from_sympy(T + 1))


def test_clear_denominators_makes_first_entry_positive():
    v = [PARAM_FIELD.from_sympy(-T), PARAM_FIELD.convert(2)]
    assert exact.clear_denominators(v) == (PARAM_RING.from_sympy(T), PARAM_RING.convert(-2))


def test_substitute():
    assert exact.substitute(PARAM_RING.from_sympy(T**2 + 1), PARAM_RING, 2) == QQ(5)
    assert exact.substitute(QQ(3, 7), QQ, 5) == QQ(3, 7)


def test_clear_denominators_divides_out_common_content():
    v = [PARAM_FIELD.from_sympy(4 * T / 3), PARAM_FIELD.convert(QQ(8, 9))]
    assert exact.clear_denominators(v) == (PARAM_RING.from_sympy(3 * T), PARAM_RING.convert(2))
