"""
Line-oriented input format for Lie algebras and their configurations::

    algebra example5
    basis X U V E Z
    bracket [U,V] = E
    bracket [X,U] = V
    subalgebra h = X; E
    subspace q = U; V; Z
    form f: E=1, Z=3
    character lambda on h: E=1

``#`` starts a comment. Brackets not declared are zero; ``[B,A]`` follows
from ``[A,B]`` by antisymmetry.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path

import pyparsing as pp
from sympy import QQ

from biquant import exact
from biquant.errors import BiquantError, ParseError, PreconditionError
from biquant.lie import CharacterFunctional, LieAlgebra, LinearForm, Subalgebra, Subspace, complement

logger = logging.getLogger(__name__)

RESERVED_SUPPLEMENTS = ("canonical",)

_ident = pp.Word(pp.alphas + "_", pp.alphanums + "_")
_rational = pp.Regex(r"[0-9]+(/[0-9]+)?")
_signed = pp.Regex(r"[+-]?[0-9]+(/[0-9]+)?")
_sign = pp.one_of("+ -")
_coeff = pp.Optional(_rational + pp.Optional(pp.Suppress("*")), default="1")
_first = pp.Group(pp.Optional(_sign, default="+") + _coeff + _ident)
_other = pp.Group(_sign + _coeff + _ident)
_lincomb = pp.Group(pp.Group(_first + pp.ZeroOrMore(_other)) | pp.Group(pp.Suppress(pp.Literal("0"))))
_assignment = pp.Group(_ident + pp.Suppress("=") + _signed)
_assignments = pp.Group(pp.Optional(pp.delimited_list(_assignment)))

_statements = {
    "algebra": pp.Keyword("algebra") + _ident,
    "basis": pp.Keyword("basis") + pp.Group(pp.OneOrMore(_ident)),
    "bracket": (pp.Keyword("bracket") + pp.Suppress("[") + _ident + pp.Suppress(",") + _ident
                + pp.Suppress("]") + pp.Suppress("=") + _lincomb),
    "subalgebra": (pp.Keyword("subalgebra") + _ident + pp.Suppress("=")
                   + pp.Group(pp.delimited_list(_lincomb, delim=";"))),
    "subspace": (pp.Keyword("subspace") + _ident + pp.Suppress("=")
                 + pp.Group(pp.delimited_list(_lincomb, delim=";"))),
    "form": pp.Keyword("form") + _ident + pp.Suppress(":") + _assignments,
    "character": (pp.Keyword("character") + _ident + pp.Suppress(pp.Keyword("on")) + _ident
                  + pp.Suppress(":") + _assignments),
}


@dataclass
class AlgebraFile:
    """A parsed input: the algebra and its named configurations, in declaration order"""
    algebra: LieAlgebra
    subalgebras: dict = field(default_factory=dict)
    subspaces: dict = field(default_factory=dict)
    forms: dict = field(default_factory=dict)
    characters: dict = field(default_factory=dict)

    def subalgebra(self, name=None):
        if not self.subalgebras:
            raise PreconditionError(f"{self.algebra.name} declares no subalgebra")
        if name is None:
            return next(iter(self.subalgebras.values()))
        try:
            return self.subalgebras[name]
        except KeyError:
            raise PreconditionError(f"unknown subalgebra {name!r}; declared: {list(self.subalgebras)}")

    def character(self, name=None, on=None):
        """Named character, or the first one declared (on ``on`` if given)"""
        if name is not None:
            try:
                return self.characters[name]
            except KeyError:
                raise PreconditionError(f"unknown character {name!r}; declared: {list(self.characters)}")
        for chi in self.characters.values():
            if on is None or chi.h is on:
                return chi
        raise PreconditionError(f"{self.algebra.name} declares no character on the chosen subalgebra")

    def form(self, name):
        try:
            return self.forms[name]
        except KeyError:
            raise PreconditionError(f"unknown form {name!r}; declared: {list(self.forms)}")

    def supplement(self, h):
        """First declared subspace supplementing ``h``, else the coordinate complement"""
        n = self.algebra.dim
        for q in self.subspaces.values():
            if q.dim + h.dim == n and exact.is_independent(list(q.vectors) + list(h.vectors), n):
                return q
        return complement(self.algebra, h)

    def payload(self):
        """Plain comparable summary of the declarations"""
        L = self.algebra
        return {
            "algebra": L.name,
            "basis": list(L.names),
            "constants": [[[str(c) for c in v] for v in row] for row in L.c],
            "subalgebras": {k: [list(h.names), [L.describe(v) for v in h.vectors]] for k, h in self.subalgebras.items()},
            "subspaces": {k: [list(q.names), [L.describe(v) for v in q.vectors]] for k, q in self.subspaces.items()},
            "forms": {k: [str(a) for a in f.coords] for k, f in self.forms.items()},
            "characters": {k: [self._subalgebra_name(chi.h), [str(a) for a in chi.values]]
                           for k, chi in self.characters.items()},
        }

    def _subalgebra_name(self, h):
        return next((k for k, v in self.subalgebras.items() if v is h), None)


class _Builder:
    def __init__(self, source):
        self.source = source
        self.name = None
        self.names = None
        self.brackets = {}
        self.algebra = None
        self.result = None

    def error(self, message, line, column=None, token=None):
        return ParseError(f"{self.source}: {message}", line=line, column=column, token=token)

    def need_basis(self, lineno, keyword):
        if self.names is None:
            raise self.error(f"'{keyword}' before 'basis'", lineno, 1, keyword)

    def finish_algebra(self, lineno):
        if self.algebra is not None:
            return
        self.need_basis(lineno, "declaration")
        n = len(self.names)
        index = {s: i for i, s in enumerate(self.names)}
        c = [[[QQ.zero] * n for _ in range(n)] for _ in range(n)]
        for (a, b), v in self.brackets.items():
            i, j = index[a], index[b]
            c[i][j] = list(v)
            if (b, a) not in self.brackets:
                c[j][i] = [-x for x in v]
        self.algebra = LieAlgebra(self.names, c, name=self.name or "g")
        self.result = AlgebraFile(self.algebra)

    def vector(self, combo, lineno):
        n = len(self.names)
        v = [QQ.zero] * n
        for sign, coeff, ident in combo:
            if ident not in self.names:
                raise self.error(f"unknown basis element {ident!r}", lineno, None, ident)
            value = exact.rational(coeff)
            v[self.names.index(ident)] += -value if sign == "-" else value
        return tuple(v)


def parse(text, source="<string>"):
    """
    Parse the input format into an AlgebraFile

    Raises:
        ParseError: With the 1-based line and column of the offending token
    """
    builder = _Builder(source)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        keyword = line.split()[0]
        grammar = _statements.get(keyword)
        if grammar is None:
            column = line.index(keyword) + 1
            raise builder.error(f"unknown statement {keyword!r}", lineno, column, keyword)
        try:
            tokens = grammar.parse_string(line, parse_all=True)
        except pp.ParseException as exc:
            rest = line[exc.loc:].split()
            raise builder.error(f"malformed {keyword} statement", lineno, exc.col, rest[0] if rest else None)
        try:
            _apply(builder, keyword, tokens, lineno)
        except ParseError:
            raise
        except BiquantError as exc:
            raise builder.error(str(exc), lineno)
        except ValueError as exc:
            raise builder.error(str(exc), lineno)
    if builder.names is None:
        raise builder.error("no 'basis' statement", max(1, len(text.splitlines())))
    builder.finish_algebra(len(text.splitlines()))
    logger.debug("parsed %s: %d basis elements, %d subalgebras", source, builder.algebra.dim,
                 len(builder.result.subalgebras))
    return builder.result


def _apply(builder, keyword, tokens, lineno):
    if keyword == "algebra":
        if builder.algebra is not None or builder.name is not None:
            raise builder.error("'algebra' must come first and only once", lineno, 1, "algebra")
        builder.name = tokens[1]
    elif keyword == "basis":
        if builder.names is not None:
            raise builder.error("duplicate 'basis' statement", lineno, 1, "basis")
        names = tuple(tokens[1])
        if len(set(names)) != len(names):
            raise builder.error(f"repeated basis names in {list(names)}", lineno)
        builder.names = names
    elif keyword == "bracket":
        builder.need_basis(lineno, keyword)
        if builder.algebra is not None:
            raise builder.error("brackets must precede subalgebras, subspaces, forms and characters", lineno, 1, keyword)
        a, b, combo = tokens[1], tokens[2], tokens[3]
        for ident in (a, b):
            if ident not in builder.names:
                raise builder.error(f"unknown basis element {ident!r}", lineno, None, ident)
        v = builder.vector(combo[0] if combo else [], lineno)
        if a == b and any(v):
            raise builder.error(f"[{a},{a}] must be zero", lineno)
        if (a, b) in builder.brackets:
            raise builder.error(f"bracket [{a},{b}] declared twice", lineno)
        if (b, a) in builder.brackets and builder.brackets[(b, a)] != tuple(-x for x in v):
            raise builder.error(f"[{a},{b}] contradicts the declared [{b},{a}]", lineno)
        builder.brackets[(a, b)] = v
    elif keyword in ("subalgebra", "subspace"):
        builder.finish_algebra(lineno)
        name = tokens[1]
        store = builder.result.subalgebras if keyword == "subalgebra" else builder.result.subspaces
        if name in store:
            raise builder.error(f"{keyword} {name!r} declared twice", lineno, None, name)
        if keyword == "subspace" and name in RESERVED_SUPPLEMENTS:
            raise builder.error(f"{name!r} is a reserved supplement name", lineno, None, name)
        vectors = [builder.vector(c[0] if c else [], lineno) for c in tokens[2]]
        cls = Subalgebra if keyword == "subalgebra" else Subspace
        store[name] = cls(builder.algebra, vectors, prefix=name)
    elif keyword == "form":
        builder.finish_algebra(lineno)
        name = tokens[1]
        coords = [QQ.zero] * builder.algebra.dim
        for ident, value in tokens[2]:
            if ident not in builder.names:
                raise builder.error(f"unknown basis element {ident!r}", lineno, None, ident)
            coords[builder.names.index(ident)] = exact.rational(value)
        builder.result.forms[name] = LinearForm(builder.algebra, coords)
    elif keyword == "character":
        builder.finish_algebra(lineno)
        name, on = tokens[1], tokens[2]
        if on not in builder.result.subalgebras:
            raise builder.error(f"unknown subalgebra {on!r}", lineno, None, on)
        h = builder.result.subalgebras[on]
        values = [QQ.zero] * h.dim
        for ident, value in tokens[3]:
            if ident not in h.names:
                raise builder.error(f"{ident!r} is not a basis element of {on} ({list(h.names)})", lineno, None, ident)
            values[h.names.index(ident)] = exact.rational(value)
        builder.result.characters[name] = CharacterFunctional(h, values)


def load_file(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise PreconditionError(f"cannot read {path}: {exc.strerror}")
    return parse(text, source=str(path))


def pretty_print(defs):
    """Input-format text for an AlgebraFile; parsing it gives back the same payload"""
    L = defs.algebra
    lines = [f"algebra {L.name}", "basis " + " ".join(L.names)]
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            if any(L.c[i][j]):
                lines.append(f"bracket [{L.names[i]},{L.names[j]}] = {L.describe(L.c[i][j])}")
    for name, h in defs.subalgebras.items():
        lines.append(f"subalgebra {name} = " + "; ".join(L.describe(v) for v in h.vectors))
    for name, q in defs.subspaces.items():
        lines.append(f"subspace {name} = " + "; ".join(L.describe(v) for v in q.vectors))
    for name, f in defs.forms.items():
        values = ", ".join(f"{n}={a}" for n, a in zip(L.names, f.coords) if a)
        lines.append(f"form {name}: {values}")
    for name, chi in defs.characters.items():
        values = ", ".join(f"{n}={a}" for n, a in zip(chi.h.names, chi.values) if a)
        lines.append(f"character {name} on {defs._subalgebra_name(chi.h)}: {values}")
    return "\n".join(lines) + "\n"
