"""
Universal enveloping algebra in the ordered PBW basis.

Elements are finite sums ``sum c_m x^m`` where ``x^m = x_0^{m_0} ... x_{n-1}^{m_{n-1}}``
is an ordered monomial stored as an exponent tuple. Products are brought
back to PBW order with the bracket relations. The symmetric algebra is
represented by sympy polynomial rings over the basis names.
"""
import logging

from sympy import QQ
from sympy.polys.rings import PolyRing

from biquant import exact
from biquant.errors import DimensionMismatchError, PreconditionError

logger = logging.getLogger(__name__)


def symmetric_ring(names, domain=QQ):
    """Polynomial ring ``S`` on the given generator names over ``domain``"""
    return PolyRing(tuple(names), domain)


def poly_degree(p):
    """Total degree of a symmetric-algebra polynomial; -1 for zero"""
    return max((sum(m) for m in p.monoms()), default=-1) if p else -1


def _add_into(target, exps, coeff):
    total = target.get(exps, QQ.zero) + coeff
    if total:
        target[exps] = total
    else:
        target.pop(exps, None)


def _times_generator(L, exps, j):
    """
    Straightened right product ``x^exps · x_j`` with rational coefficients

    With ``k`` the last index present in ``exps``: if ``k <= j`` the product
    is already ordered; otherwise ``m' x_k x_j = (m' x_j) x_k + sum_l c_kj^l m' x_l``.
    """
    memo = L.memo("times_generator")
    key = (exps, j)
    with L.lock:
        hit = memo.get(key)
    if hit is not None:
        return hit
    k = max((i for i, e in enumerate(exps) if e), default=-1)
    if k <= j:
        bumped = list(exps)
        bumped[j] += 1
        result = {tuple(bumped): QQ.one}
    else:
        lowered = list(exps)
        lowered[k] -= 1
        lowered = tuple(lowered)
        result = {}
        for e, c in _times_generator(L, lowered, j).items():
            for e2, c2 in _times_generator(L, e, k).items():
                _add_into(result, e2, c * c2)
        for l, c in enumerate(L.c[k][j]):
            if c:
                for e, c2 in _times_generator(L, lowered, l).items():
                    _add_into(result, e, c * c2)
    with L.lock:
        return memo.setdefault(key, result)


def _monomial_product(L, left, right):
    """``x^left · x^right`` as a dict of rational coefficients"""
    memo = L.memo("monomial_product")
    key = (left, right)
    with L.lock:
        hit = memo.get(key)
    if hit is not None:
        return hit
    current = {left: QQ.one}
    for j, e in enumerate(right):
        for _ in range(e):
            nxt = {}
            for m, c in current.items():
                for m2, c2 in _times_generator(L, m, j).items():
                    _add_into(nxt, m2, c * c2)
            current = nxt
    with L.lock:
        return memo.setdefault(key, current)


class PBWElement:
    """
    Element of ``U(g)`` with coefficients in a domain ``K``

    Args:
        algebra: LieAlgebra
        terms: Mapping ``exponent tuple -> coefficient``; zero terms are dropped
        domain: QQ, QQ[t] or QQ(t)
    """
    __slots__ = ("algebra", "domain", "terms")

    def __init__(self, algebra, terms=None, domain=QQ):
        self.algebra = algebra
        self.domain = domain
        cleaned = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != algebra.dim:
                raise DimensionMismatchError(f"exponent {exps} does not match dimension {algebra.dim}")
            if coeff:
                cleaned[exps] = coeff
        self.terms = cleaned

    @classmethod
    def zero(cls, algebra, domain=QQ):
        return cls(algebra, {}, domain)

    @classmethod
    def one(cls, algebra, domain=QQ):
        return cls(algebra, {(0,) * algebra.dim: domain.one}, domain)

    @classmethod
    def monomial(cls, algebra, exps, coeff=None, domain=QQ):
        return cls(algebra, {tuple(exps): domain.one if coeff is None else coeff}, domain)

    @classmethod
    def generator(cls, algebra, name_or_index, domain=QQ):
        i = name_or_index if isinstance(name_or_index, int) else algebra.index(name_or_index)
        exps = [0] * algebra.dim
        exps[i] = 1
        return cls(algebra, {tuple(exps): domain.one}, domain)

    @classmethod
    def from_vector(cls, algebra, v, domain=QQ):
        """Degree one element ``sum v_i x_i``"""
        terms = {}
        for i, a in enumerate(v):
            exps = [0] * algebra.dim
            exps[i] = 1
            terms[tuple(exps)] = domain.convert(a)
        return cls(algebra, terms, domain)

    def convert(self, domain):
        if domain == self.domain:
            return self
        return PBWElement(self.algebra, {m: domain.convert_from(c, self.domain) for m, c in self.terms.items()}, domain)

    def _coerce(self, other):
        if isinstance(other, PBWElement):
            if other.algebra != self.algebra:
                raise PreconditionError("elements of different enveloping algebras cannot be combined")
            domain = exact.unify(self.domain, other.domain)
            return self.convert(domain), other.convert(domain)
        domain = self.domain
        return self, PBWElement(self.algebra, {(0,) * self.algebra.dim: domain.convert(other)}, domain)

    def __add__(self, other):
        a, b = self._coerce(other)
        terms = dict(a.terms)
        for m, c in b.terms.items():
            total = terms.get(m, a.domain.zero) + c
            if total:
                terms[m] = total
            else:
                terms.pop(m, None)
        return PBWElement(a.algebra, terms, a.domain)

    __radd__ = __add__

    def __neg__(self):
        return PBWElement(self.algebra, {m: -c for m, c in self.terms.items()}, self.domain)

    def __sub__(self, other):
        a, b = self._coerce(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor):
        factor = self.domain.convert(factor)
        return PBWElement(self.algebra, {m: factor * c for m, c in self.terms.items()}, self.domain)

    def __mul__(self, other):
        if isinstance(other, PBWElement):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k):
        result = PBWElement.one(self.algebra, self.domain)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, PBWElement):
            a, b = self._coerce(other)
            return a.terms == b.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Maximal total degree; -1 for zero"""
        return max((sum(m) for m in self.terms), default=-1)

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), self.domain.zero)

    def homogeneous_part(self, d):
        return PBWElement(self.algebra, {m: c for m, c in self.terms.items() if sum(m) == d}, self.domain)

    def support_indices(self):
        """Indices of generators appearing in some monomial"""
        return {i for m in self.terms for i, e in enumerate(m) if e}

    def sorted_terms(self):
        """Terms by decreasing degree, then reverse-lexicographic exponent order"""
        return sorted(self.terms.items(), key=lambda item: (-sum(item[0]), tuple(-e for e in item[0])))

    def to_symmetric(self, ring=None):
        """Same coefficients read as a commutative polynomial"""
        ring = ring or symmetric_ring(self.algebra.names, self.domain)
        return ring.from_dict(dict(self.terms)) if self.terms else ring.zero

    def __repr__(self):
        return f"PBWElement({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, coeff in self.sorted_terms():
            factors = []
            for name, e in zip(self.algebra.names, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            text = exact.render(coeff, self.domain)
            if factors:
                word = "*".join(factors)
                if text == "1":
                    text = word
                elif text == "-1":
                    text = f"-{word}"
                else:
                    if self.domain != QQ and any(ch in text for ch in "+- ") and not text.startswith("-"):
                        text = f"({text})"
                    text = f"{text}*{word}"
            parts.append(text)
        return " + ".join(parts).replace("+ -", "- ")


def straighten(L, word, domain=QQ):
    """
    PBW expansion of the product of generators in ``word``

    Args:
        L: LieAlgebra
        word: Sequence of generator indices or names, multiplied left to right
        domain: Coefficient domain of the result

    Returns:
        PBWElement
    """
    current = {(0,) * L.dim: QQ.one}
    for letter in word:
        j = letter if isinstance(letter, int) else L.index(letter)
        nxt = {}
        for m, c in current.items():
            for m2, c2 in _times_generator(L, m, j).items():
                _add_into(nxt, m2, c * c2)
        current = nxt
    return PBWElement(L, {m: domain.convert_from(c, QQ) for m, c in current.items()}, domain)


def multiply(a, b):
    """Product of two PBW elements over the common coefficient domain"""
    a, b = a._coerce(b)
    L, K = a.algebra, a.domain
    result = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            cc = ca * cb
            for m, q in _monomial_product(L, ma, mb).items():
                total = result.get(m, K.zero) + cc * K.convert_from(q, QQ)
                if total:
                    result[m] = total
                else:
                    result.pop(m, None)
    return PBWElement(L, result, K)


def _symmetrized_monomial(L, exps):
    """
    ``β(x^exps)`` as a dict of rational coefficients

    The average of a monomial over all orderings equals, letter by letter,
    ``sum_i (exps_i / |exps|) β(x^{exps - e_i}) · x_i``.
    """
    memo = L.memo("symmetrize")
    with L.lock:
        hit = memo.get(exps)
    if hit is not None:
        return hit
    total = sum(exps)
    if total <= 1:
        result = {exps: QQ.one}
    else:
        result = {}
        for i, e in enumerate(exps):
            if not e:
                continue
            lowered = list(exps)
            lowered[i] -= 1
            weight = QQ(e, total)
            for m, c in _symmetrized_monomial(L, tuple(lowered)).items():
                for m2, c2 in _times_generator(L, m, i).items():
                    _add_into(result, m2, weight * c * c2)
    with L.lock:
        return memo.setdefault(exps, result)


def symmetrize(L, p, domain=None):
    """
    Symmetrization map ``β: S(g) -> U(g)``

    Args:
        L: LieAlgebra
        p: Polynomial in ``symmetric_ring(L.names, K)``
        domain: Coefficient domain of the result, defaults to ``p``'s ring domain

    Returns:
        PBWElement
    """
    K = domain or p.ring.domain
    if len(p.ring.gens) != L.dim:
        raise DimensionMismatchError(f"polynomial has {len(p.ring.gens)} variables, algebra has dimension {L.dim}")
    result = {}
    for exps, coeff in p.terms():
        coeff = K.convert_from(coeff, p.ring.domain)
        for m, q in _symmetrized_monomial(L, tuple(exps)).items():
            total = result.get(m, K.zero) + coeff * K.convert_from(q, QQ)
            if total:
                result[m] = total
            else:
                result.pop(m, None)
    return PBWElement(L, result, K)


def adjoint(L, y, u):
    """``ad(Y)(u) = Y u - u Y`` for a coordinate vector ``y``"""
    Y = PBWElement.from_vector(L, y, u.domain)
    return Y * u - u * Y


def duflo_factor_traces(L, y, max_power):
    """
    Traces ``tr((ad y)^k)`` for ``k = 1 .. max_power``

    These determine the power series of ``det((1 - e^{-ad y}) / ad y)^{1/2}``;
    on nilpotent algebras every trace vanishes.
    """
    m = L.ad_matrix(exact.vector(y))
    power = m
    traces = []
    for _ in range(max_power):
        rows = power.to_list()
        traces.append(sum((rows[i][i] for i in range(L.dim)), QQ.zero))
        power = power * m
    return traces


def rewrite(u, target, images):
    """
    Transport an element to another PBW basis of the same Lie algebra

    Args:
        u: PBWElement over the source algebra
        target: LieAlgebra in the new basis
        images: For each source generator, its coordinate vector in ``target``

    Returns:
        PBWElement over ``target``
    """
    if len(images) != u.algebra.dim:
        raise DimensionMismatchError("one image vector per source generator is required")
    K = u.domain
    linear = [PBWElement.from_vector(target, v, K) for v in images]
    result = PBWElement.zero(target, K)
    for exps, coeff in u.terms.items():
        term = PBWElement.one(target, K).scale(coeff)
        for i, e in enumerate(exps):
            for _ in range(e):
                term = term * linear[i]
        result = result + term
    return result
