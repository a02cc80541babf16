import pytest
from sympy import QQ

from biquant import builtins, dsl
from biquant.errors import ParseError, PreconditionError

HEADER = "algebra h3\nbasis X Y Z\nbracket [X,Y] = Z\n"


def test_parse_example5():
    defs = dsl.parse(builtins.text("example5"))
    L = defs.algebra
    assert L.name == "example5"
    assert L.names == ("X", "U", "V", "E", "Z")
    assert L.bracket(L.basis_vector("U"), L.basis_vector("V")) == L.basis_vector("E")
    assert L.bracket(L.basis_vector("V"), L.basis_vector("X")) == tuple(-c for c in L.basis_vector("Z"))
    assert list(defs.subalgebras) == ["h"]
    assert defs.subspaces["q"].names == ("U", "V", "Z")
    assert defs.character("lambda").values == (QQ(0), QQ(1))
    assert defs.form("g").coords == (QQ(0), QQ(2), QQ(-1), QQ(1), QQ(-7))


def test_coefficients_and_combinations():
    defs = dsl.parse(
        "basis A B C\n"
        "bracket [A,B] = 1/2*C\n"
        "subspace s = A - 3B; -C\n"
    )
    L = defs.algebra
    assert L.name == "g"
    assert L.c[0][1] == (QQ(0), QQ(0), QQ(1, 2))
    s = defs.subspaces["s"]
    assert s.vectors == ((QQ(1), QQ(-3), QQ(0)), (QQ(0), QQ(0), QQ(-1)))
    assert s.names == ("s1", "s2")


def test_zero_bracket_and_comments():
    defs = dsl.parse("# two generators\nbasis A B  # trailing\nbracket [A,B] = 0\n")
    assert not any(defs.algebra.c[0][1])


def test_non_unit_subalgebra_vectors_are_named_after_the_subalgebra():
    defs = dsl.parse(HEADER + "subalgebra k = Y + Z\ncharacter chi on k: k1=2\n")
    assert defs.subalgebra("k").names == ("k1",)
    assert defs.character("chi").values == (QQ(2),)


@pytest.mark.parametrize("name", ["example5", "heisenberg3", "sl2", "abelian:3"])
def test_pretty_print_round_trip(name):
    defs = builtins.load(name)
    again = dsl.parse(dsl.pretty_print(defs))
    assert again.payload() == defs.payload()


def test_round_trip_with_rational_entries():
    text = HEADER + "subspace q = X - 1/3*Y; Z\nform f: X=1/2, Z=-4\n"
    defs = dsl.parse(text)
    assert dsl.parse(dsl.pretty_print(defs)).payload() == defs.payload()


def test_unknown_statement_position():
    with pytest.raises(ParseError) as info:
        dsl.parse("basis A B\n  frobnicate A\n")
    assert info.value.line == 2
    assert info.value.column == 3
    assert info.value.token == "frobnicate"
    assert "line 2, column 3" in str(info.value)


def test_malformed_bracket():
    with pytest.raises(ParseError) as info:
        dsl.parse("basis A B\nbracket [A,B = A\n")
    assert info.value.line == 2
    assert info.value.column is not None


@pytest.mark.parametrize("text, message", [
    ("basis A B\nbracket [A,A] = B\n", "must be zero"),
    ("basis A B\nbracket [A,B] = A\nbracket [A,B] = A\n", "declared twice"),
    ("basis A B\nbracket [A,B] = A\nbracket [B,A] = B\n", "contradicts"),
    ("basis A B\nbracket [A,C] = A\n", "unknown basis element"),
    ("basis A A\n", "repeated basis names"),
    ("bracket [A,B] = A\n", "before 'basis'"),
    ("algebra x\n", "no 'basis' statement"),
    (HEADER + "form f: W=1\n", "unknown basis element"),
    (HEADER + "subspace q = X\nbracket [X,Z] = Y\n", "brackets must precede"),
    (HEADER + "character c on nowhere: X=1\n", "unknown subalgebra"),
    (HEADER + "subspace canonical = X\n", "reserved"),
])
def test_rejected_declarations(text, message):
    with pytest.raises(ParseError) as info:
        dsl.parse(text)
    assert message in str(info.value)


def test_mathematical_errors_carry_the_line():
    with pytest.raises(ParseError) as info:
        dsl.parse(HEADER + "subalgebra k = X; Y\n")
    assert info.value.line == 4
    with pytest.raises(ParseError) as info:
        dsl.parse(HEADER + "subalgebra g = X; Y; Z\ncharacter c on g: Z=1\n")
    assert info.value.line == 5
    assert "[X, Y]" in str(info.value)


def test_consistent_brackets_in_both_orders():
    defs = dsl.parse("basis A B\nbracket [A,B] = A\nbracket [B,A] = -A\n")
    assert defs.algebra.c[1][0] == (QQ(-1), QQ(0))


def test_lookups():
    defs = builtins.load("heisenberg3")
    assert defs.subalgebra().names == ("Y",)
    assert defs.character(on=defs.subalgebra("hz")) is defs.character("mu")
    with pytest.raises(PreconditionError):
        defs.form("nope")
    with pytest.raises(PreconditionError):
        defs.subalgebra("nope")


def test_supplement_prefers_declared_subspaces():
    defs = builtins.load("heisenberg3")
    assert defs.supplement(defs.subalgebra("h")) is defs.subspaces["q"]
    assert defs.supplement(defs.subalgebra("hz")).names == ("X",)


def test_load_file(tmp_path):
    path = tmp_path / "h3.lie"
    path.write_text(HEADER, encoding="utf-8")
    assert dsl.load_file(path).algebra.dim == 3
    with pytest.raises(PreconditionError):
        dsl.load_file(tmp_path / "missing.lie")


def test_unknown_builtin():
    with pytest.raises(PreconditionError):
        builtins.text("e8")
    with pytest.raises(PreconditionError):
        builtins.text("abelian:0")
