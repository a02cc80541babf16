import pytest
from sympy import QQ

from biquant import exact
from biquant.errors import CharacterError, DependentSubspaceError, NotNilpotentError, PreconditionError
from biquant.lie import (
    CharacterFunctional,
    LieAlgebra,
    LinearForm,
    Subalgebra,
    Subspace,
    ascending_central_series,
    complement,
    ideal_flag,
    lower_central_series,
    validate,
)


def vec(*values):
    return exact.vector(values)


def test_from_brackets_fills_antisymmetry():
    L = LieAlgebra.from_brackets("XYZ", {("X", "Y"): {"Z": 1}})
    assert L.bracket(L.basis_vector("X"), L.basis_vector("Y")) == vec(0, 0, 1)
    assert L.bracket(L.basis_vector("Y"), L.basis_vector("X")) == vec(0, 0, -1)


def test_equal_algebras_hash_alike():
    a = LieAlgebra.from_brackets("XYZ", {("X", "Y"): {"Z": 1}})
    b = LieAlgebra.from_brackets("XYZ", {("Y", "X"): {"Z": -1}})
    assert a == b
    assert hash(a) == hash(b)


def test_duplicate_names_are_rejected():
    with pytest.raises(PreconditionError):
        LieAlgebra(("X", "X"), [[[0, 0], [0, 0]], [[0, 0], [0, 0]]])


def test_validate_example5(example5):
    report = validate(example5.algebra)
    assert report.antisymmetric and report.jacobi and report.nilpotent
    assert report.nilpotency_class == 3
    assert report.lower_central_dims == [5, 3, 2, 0]
    assert report.failures == []


def test_validate_sl2_is_not_nilpotent(sl2):
    report = validate(sl2.algebra)
    assert report.jacobi
    assert not report.nilpotent
    assert report.nilpotency_class == 0


def test_validate_reports_jacobi_failure():
    L = LieAlgebra.from_brackets("ABC", {("A", "B"): {"C": 1}, ("A", "C"): {"A": 1}})
    report = validate(L)
    assert not report.jacobi
    assert report.failures == ["Jacobi fails for (A, B, C)"]


def test_validate_abelian_has_class_one():
    L = LieAlgebra.from_brackets("AB", {})
    report = validate(L)
    assert report.nilpotent
    assert report.nilpotency_class == 1


def test_lower_central_series_of_heisenberg(heisenberg):
    series = lower_central_series(heisenberg.algebra)
    assert [len(s) for s in series] == [3, 1, 0]


def test_ascending_central_series(example5):
    series = ascending_central_series(example5.algebra)
    assert [len(s) for s in series] == [0, 2, 3, 5]


def test_ascending_central_series_needs_nilpotency(sl2):
    with pytest.raises(NotNilpotentError):
        ascending_central_series(sl2.algebra)


def test_ideal_flag_is_a_complete_flag_of_ideals(example5):
    L = example5.algebra
    flag = ideal_flag(L)
    assert [g.dim for g in flag] == [0, 1, 2, 3, 4, 5]
    for smaller, larger in zip(flag, flag[1:]):
        assert larger.is_ideal()
        assert larger.contains_subspace(smaller)


def test_ideal_flag_follows_priority(heisenberg):
    L = heisenberg.algebra
    flag = ideal_flag(L, priority=[0, 1, 2])
    assert flag[2].contains(L.basis_vector("X"))
    default = ideal_flag(L)
    assert default[2].contains(L.basis_vector("Y"))


def test_change_basis(heisenberg):
    L = heisenberg.algebra
    M = L.change_basis([vec(1, 0, 0), vec(0, 1, 0), vec(0, 0, 2)], names=("X", "Y", "W"))
    assert M.c[0][1] == (QQ(0), QQ(0), QQ(1, 2))
    assert M.names == ("X", "Y", "W")


def test_change_basis_rejects_dependent_vectors(heisenberg):
    with pytest.raises(DependentSubspaceError):
        heisenberg.algebra.change_basis([vec(1, 0, 0), vec(2, 0, 0), vec(0, 0, 1)])


def test_describe(example5):
    L = example5.algebra
    assert L.describe(vec(1, -3, 0, 0, 0)) == "X - 3*U"
    assert L.describe(vec(0, 0, QQ(1, 2), 0, -1)) == "1/2*V - Z"
    assert L.describe(vec(0, 0, 0, 0, 0)) == "0"


def test_subspace_names(example5):
    L = example5.algebra
    s = Subspace(L, [vec(1, 0, 0, 0, 0), vec(0, 1, 1, 0, 0)], prefix="q")
    assert s.names == ("X", "q2")


def test_dependent_subspace_is_rejected(example5):
    with pytest.raises(DependentSubspaceError):
        Subspace(example5.algebra, [vec(1, 0, 0, 0, 0), vec(2, 0, 0, 0, 0)])


def test_intersection(example5):
    L = example5.algebra
    a = Subspace(L, [vec(1, 0, 0, 0, 0), vec(0, 1, 0, 0, 0)])
    b = Subspace(L, [vec(1, 1, 0, 0, 0), vec(0, 0, 1, 0, 0)])
    common = a.intersection(b)
    assert common.dim == 1
    assert common.contains(vec(1, 1, 0, 0, 0))


def test_subalgebra_must_be_closed(heisenberg):
    with pytest.raises(PreconditionError):
        Subalgebra(heisenberg.algebra, [vec(1, 0, 0), vec(0, 1, 0)])


def test_character_must_kill_the_derived_algebra(heisenberg):
    L = heisenberg.algebra
    g = Subalgebra(L, L.basis())
    with pytest.raises(CharacterError) as info:
        CharacterFunctional(g, [0, 0, 1])
    assert info.value.pair == ("X", "Y")


def test_character_extension_agrees_on_h(example5):
    lam = example5.character("lambda")
    f0 = lam.extension()
    for v in lam.h.vectors:
        assert f0(v) == lam(v)


def test_character_outside_h_is_rejected(example5):
    lam = example5.character("lambda")
    with pytest.raises(PreconditionError):
        lam(example5.algebra.basis_vector("U"))


def test_linear_form_arithmetic(heisenberg):
    L = heisenberg.algebra
    f = LinearForm(L, [1, 2, 3])
    assert f(vec(1, 1, 1)) == QQ(6)
    assert (-f).coords == vec(-1, -2, -3)
    assert f.scaled(2) == LinearForm(L, [2, 4, 6])
    assert f.restricted_to(Subspace(L, [vec(0, 0, 1)])) == (QQ(3),)


def test_complement(example5):
    L = example5.algebra
    h = example5.subalgebra("h")
    q = complement(L, h)
    assert q.dim == 3
    assert exact.is_independent(list(q.vectors) + list(h.vectors), 5)


def test_complement_with_preferred_vectors(example5):
    L = example5.algebra
    h = example5.subalgebra("h")
    q = complement(L, h, preferred=["Z"])
    assert q.names[0] == "Z"
    with pytest.raises(DependentSubspaceError):
        complement(L, h, preferred=["E"])
