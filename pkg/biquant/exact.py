"""
Exact coefficient domains and dense linear algebra over them.

Three coefficient domains are used throughout the package:

* ``QQ``: arbitrary precision rationals
* ``PARAM_RING``: univariate polynomials ``QQ[t]``
* ``PARAM_FIELD``: rational functions ``QQ(t)``

Matrices are sympy ``DomainMatrix`` objects; vectors are tuples of domain
elements.
"""
import functools
import logging
from fractions import Fraction

import sympy
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)

T = sympy.Symbol("t")
PARAM_RING = QQ[T]
PARAM_FIELD = QQ.frac_field(T)


def rational(value):
    """
    Convert an int, Fraction, string like ``"-3/4"`` or sympy number to ``QQ``

    Raises:
        ValueError: If the value is not a rational literal
    """
    if isinstance(value, str):
        try:
            value = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"malformed rational {value!r}")
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, sympy.Basic):
        return QQ.from_sympy(value)
    return QQ.convert(value)


def render(value, domain=QQ):
    """Render a domain element as a string; rationals come out as ``p/q``"""
    if domain == QQ:
        return str(value)
    return str(domain.to_sympy(value))


def unify(*domains):
    """Smallest of QQ, QQ[t], QQ(t) containing all the given domains"""
    if any(d == PARAM_FIELD for d in domains):
        return PARAM_FIELD
    if any(d == PARAM_RING for d in domains):
        return PARAM_RING
    return QQ


def field_of(domain):
    """The fraction field of a coefficient domain"""
    return domain if domain.is_Field else domain.get_field()


def vector(values, domain=QQ):
    """Tuple of domain elements from arbitrary rational-like values"""
    if domain == QQ:
        return tuple(rational(v) for v in values)
    return tuple(domain.convert(v) for v in values)


def convert_vector(values, source, target):
    if source == target:
        return tuple(values)
    return tuple(target.convert_from(v, source) for v in values)


def unit_vector(n, i, domain=QQ):
    return tuple(domain.one if j == i else domain.zero for j in range(n))


def is_zero_vector(v):
    return not any(v)


def matrix(rows, cols, domain=QQ):
    """
    Build a dense matrix from a list of rows

    Args:
        rows: List of row lists of domain elements
        cols: Number of columns (needed when there are no rows)
        domain: Coefficient domain

    Returns:
        DomainMatrix of shape (len(rows), cols)
    """
    return DomainMatrix([list(r) for r in rows], (len(rows), cols), domain)


def rref(m):
    """
    Reduced row echelon form over the fraction field of the entries

    Args:
        m: DomainMatrix over QQ, QQ[t] or QQ(t)

    Returns:
        Tuple (rref matrix, pivot columns); an empty matrix is returned as is
    """
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return m, []
    reduced, pivots = m.to_field().rref()
    return reduced, list(pivots)


def rank(m):
    return len(rref(m)[1])


def nullspace(m):
    """
    Basis of the right kernel of ``m``

    Args:
        m: DomainMatrix

    Returns:
        List of vectors (tuples over the fraction field) with ``m @ v == 0``,
        one per free column, empty iff the rank equals the column count
    """
    rows, cols = m.shape
    field = field_of(m.domain)
    if rows == 0:
        return [unit_vector(cols, j, field) for j in range(cols)]
    reduced, pivots = rref(m)
    entries = reduced.to_list()
    free = [j for j in range(cols) if j not in pivots]
    basis = []
    for j in free:
        v = [field.zero] * cols
        v[j] = field.one
        for i, p in enumerate(pivots):
            v[p] = -entries[i][j]
        basis.append(tuple(v))
    return basis


def apply(m, v):
    """Matrix times column vector, over the domain of ``m``"""
    domain = m.domain
    return tuple(sum((a * b for a, b in zip(row, v)), domain.zero) for row in m.to_list())


def span_basis(vectors, dim, domain=QQ):
    """Row-reduced basis of the span of ``vectors``"""
    if not vectors:
        return []
    reduced, pivots = rref(matrix(vectors, dim, domain))
    return [tuple(row) for row in reduced.to_list()[:len(pivots)]]


def span_rank(vectors, dim, domain=QQ):
    if not vectors:
        return 0
    return rank(matrix(vectors, dim, domain))


def is_independent(vectors, dim, domain=QQ):
    return span_rank(vectors, dim, domain) == len(vectors)


def in_span(v, vectors, dim, domain=QQ):
    return span_rank(list(vectors) + [v], dim, domain) == span_rank(vectors, dim, domain)


def coordinates(v, basis, dim, domain=QQ):
    """
    Coordinates of ``v`` in an independent family ``basis``

    Returns:
        Tuple of coefficients, or None if ``v`` is not in the span
    """
    k = len(basis)
    if k == 0:
        return () if is_zero_vector(v) else None
    # columns are the basis vectors, last column is v
    rows = [[basis[j][i] for j in range(k)] + [v[i]] for i in range(dim)]
    reduced, pivots = rref(matrix(rows, k + 1, domain))
    if k in pivots:
        return None
    entries = reduced.to_list()
    coords = [field_of(domain).zero] * k
    for i, p in enumerate(pivots):
        coords[p] = entries[i][k]
    return tuple(coords)


def extend_basis(base, candidates, dim, domain=QQ):
    """
    Greedily extend an independent family by candidates, in order

    Returns:
        The added candidates (not including ``base``)
    """
    chosen = []
    current = list(base)
    r = span_rank(current, dim, domain)
    for c in candidates:
        if r == dim:
            break
        trial = span_rank(current + [c], dim, domain)
        if trial > r:
            current.append(c)
            chosen.append(c)
            r = trial
    return chosen


def clear_denominators(v):
    """
    Turn a vector over QQ(t) into a polynomial family over QQ[t]

    The vector is multiplied by the lcm of the denominators and then by a
    rational constant so that the integer content of all coefficients is 1
    and the leading coefficient of the first nonzero entry is positive.

    Args:
        v: Sequence of elements of ``PARAM_FIELD`` (or anything convertible)

    Returns:
        Tuple of ``PARAM_RING`` elements
    """
    fracs = [PARAM_FIELD.convert(e) for e in v]
    if not any(fracs):
        return tuple(PARAM_RING.zero for _ in fracs)
    lcm = None
    for f in fracs:
        if f:
            lcm = f.denom if lcm is None else lcm.lcm(f.denom)
    polys = [f.numer * lcm.exquo(f.denom) if f else None for f in fracs]
    # over QQ, gcd is gcd of numerators over lcm of denominators
    content = functools.reduce(QQ.gcd, (p.content() for p in polys if p is not None))
    scale = QQ.one / content
    first = next(p for p in polys if p is not None)
    if first.LC < 0:
        scale = -scale
    result = []
    for p in polys:
        if p is None:
            result.append(PARAM_RING.zero)
        else:
            result.append(PARAM_RING.from_sympy((p * scale).as_expr()))
    return tuple(result)


def substitute(value, domain, t0):
    """Evaluate an element of QQ[t] or QQ(t) at ``t = t0``; QQ passes through"""
    if domain == QQ:
        return value
    expr = domain.to_sympy(value).subs(T, sympy.Rational(str(t0)))
    return QQ.from_sympy(expr)
