"""Named algebras shipped with the package, written in the input format."""
import functools

from biquant import dsl
from biquant.errors import PreconditionError

EXAMPLE5 = """\
# five-dimensional filiform example
algebra example5
basis X U V E Z
bracket [U,V] = E
bracket [X,U] = V
bracket [X,V] = Z
subalgebra h = X; E
subspace q = U; V; Z
character lambda on h: E=1
form f: E=1, Z=3
form g: U=2, V=-1, E=1, Z=-7
"""

HEISENBERG3 = """\
algebra heisenberg3
basis X Y Z
bracket [X,Y] = Z
subalgebra h = Y
subalgebra hz = Y; Z
subspace q = X; Z
character lambda on h: Y=1
character mu on hz: Z=1
form f: Y=1, Z=3
form g: X=2, Y=1, Z=-5
"""

SL2 = """\
# not nilpotent; used as a negative control for validation
algebra sl2
basis H E F
bracket [H,E] = 2E
bracket [H,F] = -2F
bracket [E,F] = H
"""

BUILTINS = {
    "example5": EXAMPLE5,
    "heisenberg3": HEISENBERG3,
    "sl2": SL2,
}


def abelian_text(n):
    """``abelian:N`` with ``h = <A1>``, ``λ(A1) = 1`` and ``q`` the other coordinates"""
    names = [f"A{i}" for i in range(1, n + 1)]
    lines = [f"algebra abelian{n}", "basis " + " ".join(names)]
    if n >= 2:
        lines += ["subalgebra h = A1", "subspace q = " + "; ".join(names[1:]), "character lambda on h: A1=1"]
    return "\n".join(lines) + "\n"


def names():
    return sorted(BUILTINS) + ["abelian:N"]


def text(name):
    """Source text of a built-in algebra"""
    if name in BUILTINS:
        return BUILTINS[name]
    if name.startswith("abelian:"):
        try:
            n = int(name.split(":", 1)[1])
        except ValueError:
            n = 0
        if n < 1:
            raise PreconditionError(f"abelian:N needs a positive integer N, got {name!r}")
        return abelian_text(n)
    raise PreconditionError(f"unknown built-in {name!r}; available: {', '.join(names())}")


@functools.lru_cache(maxsize=None)
def load(name):
    """Parsed built-in; the same object is returned on every call"""
    return dsl.parse(text(name), source=f"<builtin {name}>")
