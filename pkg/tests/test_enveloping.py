import pytest
from hypothesis import given, settings, strategies as st
from sympy import QQ

from biquant import builtins, dsl, exact
from biquant.enveloping import (
    PBWElement,
    adjoint,
    duflo_factor_traces,
    multiply,
    poly_degree,
    straighten,
    symmetric_ring,
    symmetrize,
)
from biquant.errors import PreconditionError
from biquant.reduction import monomials_up_to

EXAMPLE5 = builtins.load("example5").algebra
BUILTIN_ALGEBRAS = ["example5", "heisenberg3", "sl2", "abelian:3"]
NILPOTENT_ALGEBRAS = ["example5", "heisenberg3", "abelian:4"]


def pbw_elements(algebra, max_exponent=1, max_terms=3):
    monomials = st.tuples(*[st.integers(0, max_exponent)] * algebra.dim)
    coeffs = st.integers(-3, 3).filter(bool).map(QQ)
    return st.dictionaries(monomials, coeffs, max_size=max_terms).map(lambda terms: PBWElement(algebra, terms))


def test_straighten_heisenberg(heisenberg):
    L = heisenberg.algebra
    assert straighten(L, "YX") == straighten(L, "XY") - PBWElement.generator(L, "Z")
    assert str(straighten(L, "YX")) == "X*Y - Z"


def test_straighten_sl2(sl2):
    L = sl2.algebra
    H, E, F = (PBWElement.generator(L, n) for n in "HEF")
    assert straighten(L, "FE") == E * F - H
    assert straighten(L, "EH") == H * E - E.scale(2)


def test_ordered_words_are_monomials(example5):
    L = example5.algebra
    assert straighten(L, "XUVEZ") == PBWElement.monomial(L, (1, 1, 1, 1, 1))


def test_generators_of_a_commutator(example5):
    L = example5.algebra
    X, U = PBWElement.generator(L, "X"), PBWElement.generator(L, "U")
    assert X * U - U * X == PBWElement.generator(L, "V")


@settings(max_examples=25, deadline=None)
@given(pbw_elements(EXAMPLE5), pbw_elements(EXAMPLE5), pbw_elements(EXAMPLE5))
def test_product_is_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@settings(max_examples=25, deadline=None)
@given(pbw_elements(EXAMPLE5), pbw_elements(EXAMPLE5), pbw_elements(EXAMPLE5))
def test_product_distributes(a, b, c):
    assert a * (b + c) == a * b + a * c


@settings(max_examples=25, deadline=None)
@given(pbw_elements(EXAMPLE5, max_exponent=2))
def test_one_is_neutral(a):
    one = PBWElement.one(EXAMPLE5)
    assert one * a == a
    assert a * one == a


def test_degree_and_parts(heisenberg):
    L = heisenberg.algebra
    u = straighten(L, "YX")
    assert u.degree() == 2
    assert u.homogeneous_part(1) == -PBWElement.generator(L, "Z")
    assert u.coefficient((1, 1, 0)) == QQ(1)
    assert PBWElement.zero(L).degree() == -1


def test_power(heisenberg):
    L = heisenberg.algebra
    X = PBWElement.generator(L, "X")
    assert X ** 3 == PBWElement.monomial(L, (3, 0, 0))
    assert X ** 0 == PBWElement.one(L)


def test_elements_of_different_algebras_do_not_mix(heisenberg, example5):
    with pytest.raises(PreconditionError):
        PBWElement.one(heisenberg.algebra) + PBWElement.one(example5.algebra)


def test_parameter_coefficients(heisenberg):
    L = heisenberg.algebra
    t = exact.PARAM_RING.from_sympy(exact.T)
    u = PBWElement.generator(L, "X", exact.PARAM_RING).scale(t)
    v = PBWElement.generator(L, "Y")
    product = u * v - v * u
    assert product.domain == exact.PARAM_RING
    assert product == PBWElement.generator(L, "Z", exact.PARAM_RING).scale(t)


def test_symmetrize_quadratic(heisenberg):
    L = heisenberg.algebra
    S = symmetric_ring(L.names)
    X, Y, Z = S.gens
    expected = PBWElement.monomial(L, (1, 1, 0)) - PBWElement.generator(L, "Z").scale(QQ(1, 2))
    assert symmetrize(L, X * Y) == expected


def test_symmetrize_is_the_average_over_orderings(example5):
    L = example5.algebra
    S = symmetric_ring(L.names)
    X, U, V, E, Z = S.gens
    words = ["XXU", "XUX", "UXX"]
    average = sum((straighten(L, w) for w in words), PBWElement.zero(L)).scale(QQ(1, 3))
    assert symmetrize(L, X**2 * U) == average


def test_symmetrize_on_abelian_is_identity():
    L = builtins.load("abelian:3").algebra
    S = symmetric_ring(L.names)
    A1, A2, A3 = S.gens
    p = A1**2 * A3 - 3 * A2
    assert symmetrize(L, p).to_symmetric(S) == p


def test_adjoint(heisenberg):
    L = heisenberg.algebra
    X = PBWElement.generator(L, "X")
    assert adjoint(L, L.basis_vector("Y"), X) == -PBWElement.generator(L, "Z")


@pytest.mark.parametrize("name", ["example5", "heisenberg3", "abelian:4"])
def test_traces_vanish_on_nilpotent_algebras(name):
    L = builtins.load(name).algebra
    for y in L.basis():
        assert not any(duflo_factor_traces(L, y, L.dim))


def test_traces_on_sl2(sl2):
    L = sl2.algebra
    assert duflo_factor_traces(L, L.basis_vector("H"), 3) == [QQ(0), QQ(8), QQ(0)]


def test_poly_degree():
    S = symmetric_ring(("a", "b"))
    a, b = S.gens
    assert poly_degree(a**2 * b + b) == 3
    assert poly_degree(S.zero) == -1
    assert poly_degree(S.one) == 0


def test_multiply_unifies_domains(heisenberg):
    L = heisenberg.algebra
    a = PBWElement.generator(L, "X", exact.PARAM_RING)
    b = PBWElement.generator(L, "Y")
    assert multiply(a, b).domain == exact.PARAM_RING


def small_vectors(dim):
    return st.lists(st.integers(-3, 3), min_size=dim, max_size=dim)


@pytest.mark.parametrize("name", BUILTIN_ALGEBRAS)
@settings(max_examples=15, deadline=None)
@given(data=st.data())
def test_product_is_associative_on_every_builtin(name, data):
    L = builtins.load(name).algebra
    a, b, c = (data.draw(pbw_elements(L)) for _ in range(3))
    assert (a * b) * c == a * (b * c)


@pytest.mark.parametrize("name", BUILTIN_ALGEBRAS)
@settings(max_examples=15, deadline=None)
@given(data=st.data())
def test_adjoint_is_a_derivation(name, data):
    L = builtins.load(name).algebra
    y = data.draw(small_vectors(L.dim))
    a, b = data.draw(pbw_elements(L)), data.draw(pbw_elements(L))
    assert adjoint(L, y, a * b) == adjoint(L, y, a) * b + a * adjoint(L, y, b)


@pytest.mark.parametrize("name", ["example5", "heisenberg3", "sl2"])
def test_symmetrize_has_the_monomial_as_leading_term(name):
    L = builtins.load(name).algebra
    S = symmetric_ring(L.names)
    for exps in monomials_up_to(L.dim, 5):
        image = symmetrize(L, S.from_dict({exps: QQ.one}))
        assert (image - PBWElement.monomial(L, exps)).degree() < sum(exps)


@pytest.mark.parametrize("name", NILPOTENT_ALGEBRAS)
@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_traces_vanish_at_arbitrary_elements(name, data):
    L = builtins.load(name).algebra
    y = data.draw(st.lists(st.fractions(-5, 5, max_denominator=7), min_size=L.dim, max_size=L.dim))
    assert not any(duflo_factor_traces(L, y, L.dim))


def test_memo_tables_can_be_cleared():
    L = dsl.parse("algebra h3\nbasis X Y Z\nbracket [X,Y] = Z\n").algebra
    before = straighten(L, "ZYX")
    assert L.memo_size() > 0
    assert L.clear_memo() > 0
    assert L.memo_size() == 0
    assert straighten(L, "ZYX") == before
