"""
Lie algebras given by rational structure constants, their subspaces,
linear forms and characters of subalgebras.
"""
import itertools
import logging
import threading
from dataclasses import dataclass, field

from sympy import QQ

from biquant import exact
from biquant.errors import (
    CharacterError,
    DependentSubspaceError,
    DimensionMismatchError,
    NotNilpotentError,
    PreconditionError,
)

logger = logging.getLogger(__name__)


class LieAlgebra:
    """
    Finite dimensional Lie algebra over QQ on a named basis

    ``[x_i, x_j] = sum_k c[i][j][k] x_k``. Construction does not check the
    axioms; use ``validate`` for that.
    """
    def __init__(self, names, constants, name="g"):
        """
        Args:
            names: Distinct basis identifiers
            constants: Nested sequence ``c[i][j]`` of length-``dim`` vectors
            name: Display name of the algebra
        """
        names = tuple(names)
        if not names:
            raise PreconditionError("a Lie algebra needs at least one basis element")
        if len(set(names)) != len(names):
            raise PreconditionError(f"basis names are not distinct: {names}")
        n = len(names)
        self.name = name
        self.names = names
        self.dim = n
        c = tuple(tuple(exact.vector(constants[i][j]) for j in range(n)) for i in range(n))
        for i in range(n):
            for j in range(n):
                if len(c[i][j]) != n:
                    raise DimensionMismatchError(f"bracket [{names[i]},{names[j]}] has {len(c[i][j])} coordinates, expected {n}")
        self.c = c
        self._hash = hash((names, c))
        # scratch memo tables for the enveloping algebra, guarded by _lock
        self._memo = {}
        self._lock = threading.RLock()

    @classmethod
    def from_brackets(cls, names, brackets, name="g"):
        """
        Build an algebra from the nonzero brackets of basis pairs

        Args:
            names: Basis identifiers
            brackets: Mapping ``(a, b) -> {name: coefficient}``; the bracket
                ``[b, a]`` is filled in by antisymmetry
            name: Display name

        Returns:
            LieAlgebra
        """
        names = tuple(names)
        n = len(names)
        index = {s: i for i, s in enumerate(names)}
        c = [[[QQ.zero] * n for _ in range(n)] for _ in range(n)]
        for (a, b), combo in brackets.items():
            i, j = index[a], index[b]
            for target, coeff in combo.items():
                k = index[target]
                coeff = exact.rational(coeff)
                c[i][j][k] += coeff
                c[j][i][k] -= coeff
        return cls(names, c, name=name)

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.names == other.names and self.c == other.c

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"LieAlgebra({self.name!r}, {list(self.names)})"

    def memo(self, kind):
        """Per-algebra memo table; callers must hold ``lock`` while mutating"""
        with self._lock:
            return self._memo.setdefault(kind, {})

    def memo_size(self):
        with self._lock:
            return sum(len(table) for table in self._memo.values())

    def clear_memo(self):
        """Drop the memo tables and return how many entries they held"""
        with self._lock:
            dropped = self.memo_size()
            self._memo = {}
        return dropped

    @property
    def lock(self):
        return self._lock

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise PreconditionError(f"unknown basis element {name!r} in {self.name}")

    def basis_vector(self, name_or_index, domain=QQ):
        i = name_or_index if isinstance(name_or_index, int) else self.index(name_or_index)
        return exact.unit_vector(self.dim, i, domain)

    def basis(self, domain=QQ):
        return [exact.unit_vector(self.dim, i, domain) for i in range(self.dim)]

    def bracket(self, v, w):
        return bracket(self, v, w)

    def is_central(self, i):
        return all(not any(self.c[i][j]) for j in range(self.dim))

    def ad_matrix(self, y):
        """Matrix of ``ad y`` acting on column coordinate vectors"""
        n = self.dim
        cols = [self.bracket(y, exact.unit_vector(n, j)) for j in range(n)]
        rows = [[cols[j][k] for j in range(n)] for k in range(n)]
        return exact.matrix(rows, n)

    def change_basis(self, vectors, names=None, name=None):
        """
        Structure constants of the same algebra in another basis

        Args:
            vectors: ``dim`` independent coordinate vectors (new basis)
            names: Names for the new basis vectors
            name: Display name of the result

        Returns:
            LieAlgebra whose i-th basis element is ``vectors[i]``
        """
        n = self.dim
        vectors = [exact.vector(v) for v in vectors]
        if len(vectors) != n or not exact.is_independent(vectors, n):
            raise DependentSubspaceError("change of basis needs dim independent vectors")
        names = tuple(names) if names is not None else tuple(f"b{i}" for i in range(n))
        p = exact.matrix([[vectors[j][i] for j in range(n)] for i in range(n)], n)
        p_inv = p.inv()
        c = [[exact.apply(p_inv, self.bracket(vectors[a], vectors[b])) for b in range(n)] for a in range(n)]
        return LieAlgebra(names, c, name=name or self.name)

    def describe(self, v):
        """Readable linear combination of basis names, e.g. ``X - 3*U``"""
        parts = []
        for coeff, name in zip(v, self.names):
            if not coeff:
                continue
            if coeff == 1:
                term = name
            elif coeff == -1:
                term = f"-{name}"
            else:
                term = f"{exact.render(coeff)}*{name}"
            parts.append(term)
        if not parts:
            return "0"
        text = parts[0]
        for p in parts[1:]:
            text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return text


def bracket(L, v, w):
    """
    Bracket of two coordinate vectors

    Raises:
        DimensionMismatchError: If a vector does not have ``L.dim`` entries
    """
    n = L.dim
    if len(v) != n or len(w) != n:
        raise DimensionMismatchError(f"expected vectors of length {n}, got {len(v)} and {len(w)}")
    zero = (v[0] * 0) if n else QQ.zero
    out = [zero] * n
    for i, a in enumerate(v):
        if not a:
            continue
        for j, b in enumerate(w):
            if not b:
                continue
            ab = a * b
            for k, c in enumerate(L.c[i][j]):
                if c:
                    out[k] += ab * c
    return tuple(out)


class Subspace:
    """
    Subspace of a Lie algebra given by independent coordinate vectors

    Vectors that are coordinate unit vectors are named after the basis
    element; others get ``prefix1, prefix2, ...`` unless names are given.
    """
    def __init__(self, parent, vectors, names=None, prefix="w"):
        self.parent = parent
        self.vectors = tuple(exact.vector(v) for v in vectors)
        n = parent.dim
        for v in self.vectors:
            if len(v) != n:
                raise DimensionMismatchError(f"vector of length {len(v)} in an algebra of dimension {n}")
        if not exact.is_independent(list(self.vectors), n):
            raise DependentSubspaceError("basis vectors of a subspace must be linearly independent")
        if names is None:
            names = []
            for i, v in enumerate(self.vectors):
                support = [k for k, a in enumerate(v) if a]
                if len(support) == 1 and v[support[0]] == 1:
                    names.append(parent.names[support[0]])
                else:
                    names.append(f"{prefix}{i + 1}")
        self.names = tuple(names)
        if len(self.names) != len(self.vectors):
            raise DimensionMismatchError("one name per basis vector is required")

    @property
    def dim(self):
        return len(self.vectors)

    def __repr__(self):
        return f"{type(self).__name__}({[self.parent.describe(v) for v in self.vectors]})"

    def contains(self, v):
        return exact.in_span(exact.vector(v), list(self.vectors), self.parent.dim)

    def contains_subspace(self, other):
        return all(self.contains(v) for v in other.vectors)

    def coordinates(self, v):
        return exact.coordinates(exact.vector(v), list(self.vectors), self.parent.dim)

    def span_with(self, other):
        """Row-reduced basis of ``self + other``"""
        return exact.span_basis(list(self.vectors) + list(other.vectors), self.parent.dim)

    def intersection(self, other):
        """Subspace ``self ∩ other``"""
        n = self.parent.dim
        a, b = list(self.vectors), list(other.vectors)
        if not a or not b:
            return Subspace(self.parent, [])
        # sum x_i a_i - sum y_j b_j = 0
        rows = [[a[i][k] for i in range(len(a))] + [-b[j][k] for j in range(len(b))] for k in range(n)]
        kernel = exact.nullspace(exact.matrix(rows, len(a) + len(b)))
        vectors = []
        for sol in kernel:
            vectors.append(tuple(sum((sol[i] * a[i][k] for i in range(len(a))), QQ.zero) for k in range(n)))
        return Subspace(self.parent, exact.span_basis(vectors, n))

    def is_subalgebra(self):
        return all(self.contains(bracket(self.parent, v, w))
                   for v, w in itertools.combinations(self.vectors, 2))

    def is_ideal(self):
        return all(self.contains(bracket(self.parent, b, v))
                   for b in self.parent.basis() for v in self.vectors)


class Subalgebra(Subspace):
    """Subspace closed under the bracket"""
    def __init__(self, parent, vectors, names=None, prefix="h"):
        super().__init__(parent, vectors, names=names, prefix=prefix)
        for (i, v), (j, w) in itertools.combinations(enumerate(self.vectors), 2):
            if not self.contains(bracket(parent, v, w)):
                raise PreconditionError(f"[{self.names[i]}, {self.names[j]}] leaves the subspace; not a subalgebra")

    @classmethod
    def of(cls, subspace):
        return cls(subspace.parent, subspace.vectors, names=subspace.names)


class LinearForm:
    """
    Element ``f`` of the dual, given by its values on the basis

    Values may lie in QQ or in one of the parameter domains.
    """
    def __init__(self, parent, coords, domain=QQ):
        if len(coords) != parent.dim:
            raise DimensionMismatchError(f"form needs {parent.dim} values, got {len(coords)}")
        self.parent = parent
        self.domain = domain
        self.coords = exact.vector(coords, domain)

    def __call__(self, v):
        return sum((a * self.domain.convert(b) for a, b in zip(self.coords, v)), self.domain.zero)

    def __neg__(self):
        return LinearForm(self.parent, [-a for a in self.coords], self.domain)

    def __eq__(self, other):
        return isinstance(other, LinearForm) and self.parent == other.parent and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        values = ", ".join(f"{n}={exact.render(a, self.domain)}" for n, a in zip(self.parent.names, self.coords))
        return f"LinearForm({values})"

    def scaled(self, factor):
        return LinearForm(self.parent, [factor * a for a in self.coords], self.domain)

    def restricted_to(self, subspace):
        """Values on the basis vectors of a subspace"""
        return tuple(self(v) for v in subspace.vectors)


class CharacterFunctional:
    """
    Functional ``λ`` on a subalgebra with ``λ([h, h]) = 0``

    Args:
        h: Subalgebra
        values: ``λ`` of each basis vector of ``h``
        domain: Domain of the values (QQ, or QQ[t] for the rescaled ``tλ``)

    Raises:
        CharacterError: Naming the first basis pair whose bracket is not killed
    """
    def __init__(self, h, values, domain=QQ):
        if len(values) != h.dim:
            raise DimensionMismatchError(f"character on a {h.dim}-dimensional subalgebra needs {h.dim} values")
        self.h = h
        self.domain = domain
        self.values = exact.vector(values, domain)
        for (i, v), (j, w) in itertools.combinations(enumerate(h.vectors), 2):
            value = self(bracket(h.parent, v, w))
            if value:
                raise CharacterError(
                    f"character does not vanish on [{h.names[i]}, {h.names[j]}] "
                    f"(value {exact.render(value, domain)})",
                    pair=(h.names[i], h.names[j]),
                )

    def __call__(self, v):
        coords = self.h.coordinates(v)
        if coords is None:
            raise PreconditionError(f"{self.h.parent.describe(v)} is not in the subalgebra")
        return sum((self.domain.convert_from(a, QQ) * b for a, b in zip(coords, self.values)), self.domain.zero)

    def scaled_by_parameter(self):
        """The family ``tλ`` with values in QQ[t]"""
        t = exact.PARAM_RING.from_sympy(exact.T)
        return CharacterFunctional(self.h, [t * exact.PARAM_RING.convert_from(a, QQ) for a in self.values],
                                   domain=exact.PARAM_RING)

    def extension(self):
        """
        Some linear form ``f0`` on the whole algebra with ``f0|h = λ``

        Only defined for rational characters.
        """
        n = self.h.parent.dim
        if not self.h.vectors:
            return LinearForm(self.h.parent, [0] * n)
        # f0 @ h_i = λ_i: solve for f0 with the h vectors as rows
        m = exact.matrix([list(v) + [lam] for v, lam in zip(self.h.vectors, self.values)], n + 1)
        reduced, pivots = exact.rref(m)
        coords = [QQ.zero] * n
        for i, p in enumerate(pivots):
            coords[p] = reduced.to_list()[i][n]
        return LinearForm(self.h.parent, coords)


@dataclass
class ValidationReport:
    antisymmetric: bool
    jacobi: bool
    nilpotent: bool
    nilpotency_class: int
    lower_central_dims: list = field(default_factory=list)
    failures: list = field(default_factory=list)


def lower_central_series(L):
    """
    ``g ⊇ [g,g] ⊇ [g,[g,g]] ⊇ ...`` until it stabilizes

    Returns:
        List of row-reduced bases, starting with ``g``
    """
    n = L.dim
    series = [L.basis()]
    while True:
        current = series[-1]
        brackets = [bracket(L, b, v) for b in L.basis() for v in current]
        nxt = exact.span_basis([w for w in brackets if any(w)], n)
        if len(nxt) == len(current):
            return series
        series.append(nxt)
        if not nxt:
            return series


def validate(L):
    """
    Check antisymmetry, the Jacobi identity and nilpotency

    Returns:
        ValidationReport; failures lists the offending pairs and triples.
        ``nilpotency_class`` is 0 when the algebra is not nilpotent.
    """
    n = L.dim
    failures = []
    antisymmetric = True
    for i in range(n):
        for j in range(i, n):
            if any(a + b for a, b in zip(L.c[i][j], L.c[j][i])):
                antisymmetric = False
                failures.append(f"antisymmetry fails for ({L.names[i]}, {L.names[j]})")
    jacobi = True
    basis = L.basis()
    for i, j, k in itertools.combinations(range(n), 3):
        x, y, z = basis[i], basis[j], basis[k]
        total = [a + b + c for a, b, c in zip(bracket(L, x, bracket(L, y, z)),
                                              bracket(L, y, bracket(L, z, x)),
                                              bracket(L, z, bracket(L, x, y)))]
        if any(total):
            jacobi = False
            failures.append(f"Jacobi fails for ({L.names[i]}, {L.names[j]}, {L.names[k]})")
    series = lower_central_series(L)
    nilpotent = not series[-1]
    nilpotency_class = len(series) - 1 if nilpotent else 0
    logger.debug("lower central series of %s: dims %s", L.name, [len(s) for s in series])
    return ValidationReport(antisymmetric, jacobi, nilpotent, nilpotency_class,
                            [len(s) for s in series], failures)


def ascending_central_series(L):
    """
    ``0 = z_0 ⊂ z_1 ⊂ ...`` with ``z_{k+1} = {x : [x, g] ⊆ z_k}``

    Raises:
        NotNilpotentError: If the series stops before reaching ``g``
    """
    n = L.dim
    series = [[]]
    while len(series[-1]) < n:
        current = series[-1]
        annihilator = exact.nullspace(exact.matrix(current, n)) if current else L.basis()
        rows = []
        for phi in annihilator:
            for j in range(n):
                ej = exact.unit_vector(n, j)
                rows.append([sum((a * b for a, b in zip(phi, bracket(L, exact.unit_vector(n, i), ej))), QQ.zero)
                             for i in range(n)])
        nxt = exact.span_basis(exact.nullspace(exact.matrix(rows, n)), n)
        if len(nxt) == len(current):
            raise NotNilpotentError(f"{L.name} is not nilpotent: the ascending central series stops at dimension {len(current)}")
        series.append(nxt)
    return series


def ideal_flag(L, priority=None):
    """
    Complete flag of ideals ``0 = g_0 ⊂ g_1 ⊂ ... ⊂ g_dim = g``

    Each step of the ascending central series is refined one vector at a
    time; any subspace between ``z_k`` and ``z_{k+1}`` is an ideal. Unit
    vectors are preferred in ``priority`` order (default: reversed basis
    order), then the row-reduced basis of ``z_{k+1}``.

    Args:
        L: Nilpotent LieAlgebra
        priority: Basis indices in order of preference

    Returns:
        List of ``dim + 1`` Subspaces

    Raises:
        NotNilpotentError: If L is not nilpotent
    """
    n = L.dim
    priority = list(reversed(range(n))) if priority is None else list(priority)
    flag = [Subspace(L, [])]
    current = []
    for step in ascending_central_series(L)[1:]:
        candidates = [exact.unit_vector(n, i) for i in priority]
        candidates = [c for c in candidates if exact.in_span(c, step, n)] + list(step)
        for v in exact.extend_basis(current, candidates, n):
            current = current + [v]
            flag.append(Subspace(L, current))
    return flag


def complement(L, h, preferred=None):
    """
    Supplementary subspace ``q`` with ``q ⊕ h = g``

    Args:
        L: LieAlgebra
        h: Subspace
        preferred: Basis indices or names tried first

    Returns:
        Subspace spanned by unit vectors

    Raises:
        DependentSubspaceError: If the preferred vectors are dependent with h
    """
    n = L.dim
    chosen = []
    base = list(h.vectors)
    if preferred:
        indices = [p if isinstance(p, int) else L.index(p) for p in preferred]
        vectors = [exact.unit_vector(n, i) for i in indices]
        if not exact.is_independent(base + vectors, n):
            names = ", ".join(L.names[i] for i in indices)
            raise DependentSubspaceError(f"preferred vectors ({names}) are dependent with {h!r}")
        chosen = vectors
    chosen += exact.extend_basis(base + chosen, L.basis(), n)
    return Subspace(L, chosen)
