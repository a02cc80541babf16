"""
Reduction modulo the left ideal ``U(g)h_λ``, the quotient symmetrization
``β_q`` and its inverse, invariant algebras and change of supplement.

Every context works in an adapted basis of ``g``: the supplement's basis
first, then the subalgebra's. In that basis an ordered monomial ends with
its ``h`` letters, so reduction is a single pass replacing each trailing
``x_H`` by ``-λ(H)``.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from sympy import QQ

from biquant import exact
from biquant.enveloping import PBWElement, adjoint, poly_degree, rewrite, symmetric_ring, symmetrize
from biquant.errors import (
    CertificateError,
    DimensionMismatchError,
    NonComplementError,
    NotReducedError,
    PreconditionError,
)
from biquant.lie import CharacterFunctional, Subspace

logger = logging.getLogger(__name__)


def monomials_up_to(nvars, degree):
    """Exponent tuples of total degree ``<= degree``, by degree then lexicographically descending"""
    out = []
    for d in range(degree + 1):
        level = [m for m in itertools.product(range(d + 1), repeat=nvars) if sum(m) == d]
        out.extend(sorted(level, reverse=True))
    return out


def convert_poly(p, ring):
    """Move a polynomial into ``ring`` (same generator count, wider domain)"""
    if p.ring == ring:
        return p
    if len(p.ring.gens) != len(ring.gens):
        raise DimensionMismatchError(f"cannot move a polynomial in {p.ring.symbols} into {ring.symbols}")
    source = p.ring.domain
    return ring.from_dict({m: ring.domain.convert_from(c, source) for m, c in p.terms()})


class QuotientContext:
    """
    The data ``(g, h, λ, q)`` with ``q ⊕ h = g``, in the adapted basis

    Args:
        L: LieAlgebra
        h: Subalgebra
        lam: CharacterFunctional on ``h``
        q: Subspace supplementing ``h``
        family: Replace ``λ`` by ``tλ`` and work over QQ[t]

    Attributes:
        algebra: LieAlgebra in the basis ``(q basis, h basis)``
        k: ``dim q``; generators ``0..k-1`` of ``algebra`` span ``q``
        domain: QQ, or QQ[t] in family mode
        ring: ``S(q)`` as a polynomial ring on the supplement's names; for ``h = g``
            it has no generators and the quotient is the ground field

    Raises:
        NonComplementError: If ``q ⊕ h != g``
    """
    def __init__(self, L, h, lam, q, family=False):
        n = L.dim
        if q.dim + h.dim != n or not exact.is_independent(list(q.vectors) + list(h.vectors), n):
            raise NonComplementError(f"{q!r} is not a supplement of {h!r} (dims {q.dim} + {h.dim}, ambient {n})")
        names = tuple(q.names) + tuple(h.names)
        if len(set(names)) != len(names):
            raise PreconditionError(f"supplement and subalgebra names overlap: {names}")
        self.L = L
        self.h = h
        self.lam = lam
        self.q = q
        self.family = family
        self.k = q.dim
        self.domain = exact.PARAM_RING if family else QQ
        values = [lam(v) for v in h.vectors]
        if family:
            t = exact.PARAM_RING.from_sympy(exact.T)
            self.lam_values = tuple(t * exact.PARAM_RING.convert_from(a, lam.domain) for a in values)
        else:
            self.lam_values = tuple(QQ.convert(a) for a in values)
        vectors = list(q.vectors) + list(h.vectors)
        self.algebra = L.change_basis(vectors, names, name=f"{L.name}[{','.join(names)}]")
        self.vectors = tuple(vectors)
        # coordinates of L's basis vectors in the adapted basis
        p = exact.matrix([[vectors[j][i] for j in range(n)] for i in range(n)], n)
        p_inv = p.inv().to_list()
        self.images_from_ambient = tuple(tuple(p_inv[r][i] for r in range(n)) for i in range(n))
        self.ring = symmetric_ring(q.names, self.domain)
        logger.debug("quotient context on %s with q = %s, family=%s", L.name, q.names, family)

    def __repr__(self):
        return f"QuotientContext({self.L.name}, q={list(self.q.names)}, h={list(self.h.names)})"

    def at(self, t0):
        """Context for the rescaled character ``t0·λ``"""
        t0 = exact.rational(t0)
        values = [t0 * QQ.convert(a) for a in (self.lam(v) for v in self.h.vectors)]
        return QuotientContext(self.L, self.h, CharacterFunctional(self.h, values), self.q)

    def coordinates(self, v):
        """Coordinates of an ambient vector in the adapted basis"""
        return exact.coordinates(exact.vector(v), list(self.vectors), self.L.dim)

    def to_adapted(self, u):
        """Rewrite an element of ``U(g)`` in the ambient PBW basis into the adapted one"""
        if u.algebra is self.algebra:
            return u
        if u.algebra != self.L:
            raise PreconditionError("element does not belong to this context's Lie algebra")
        return rewrite(u, self.algebra, self.images_from_ambient)

    def to_ambient(self, u):
        return rewrite(u, self.L, self.vectors)

    def ring_over(self, domain):
        return symmetric_ring(self.q.names, domain)

    def q_poly(self, p):
        """Accept a polynomial on the supplement's names over any of the coefficient domains"""
        if tuple(str(s) for s in p.ring.symbols) != tuple(self.q.names):
            raise DimensionMismatchError(f"polynomial on {p.ring.symbols} is not on the supplement {self.q.names}")
        return p

    def embed(self, p):
        """``S(q) ⊆ S(g)``: a supplement polynomial as a PBW-ordered element of the adapted algebra"""
        p = self.q_poly(p)
        K = exact.unify(p.ring.domain, self.domain)
        pad = (0,) * (self.algebra.dim - self.k)
        terms = {tuple(m) + pad: K.convert_from(c, p.ring.domain) for m, c in p.terms()}
        return PBWElement(self.algebra, terms, K)


def reduce(ctx, u):
    """
    Normal form of ``u`` modulo ``U(g)h_λ``, supported on ``q`` monomials

    Args:
        ctx: QuotientContext
        u: PBWElement in the adapted basis (ambient elements are rewritten first)

    Returns:
        PBWElement over the adapted algebra
    """
    u = ctx.to_adapted(u)
    K = exact.unify(u.domain, ctx.domain)
    lam = [K.convert_from(a, ctx.domain) for a in ctx.lam_values]
    k = ctx.k
    result = {}
    for exps, coeff in u.terms.items():
        coeff = K.convert_from(coeff, u.domain)
        for a, e in zip(lam, exps[k:]):
            if e:
                coeff *= (-a) ** e
        if not coeff:
            continue
        key = tuple(exps[:k]) + (0,) * (len(exps) - k)
        total = result.get(key, K.zero) + coeff
        if total:
            result[key] = total
        else:
            result.pop(key, None)
    return PBWElement(ctx.algebra, result, K)


def beta_q(ctx, p):
    """``β_q = reduce ∘ symmetrize`` on a polynomial over the supplement"""
    P = ctx.embed(p)
    S = symmetric_ring(ctx.algebra.names, P.domain)
    return reduce(ctx, symmetrize(ctx.algebra, S.from_dict(dict(P.terms)) if P.terms else S.zero))


def beta_q_inverse(ctx, u):
    """
    Inverse of ``β_q`` on reduced elements

    Subtracts ``β_q`` of the top-degree part until nothing is left; the
    symbol of ``β_q(x^m)`` is ``x^m`` so the degree drops every round.

    Raises:
        NotReducedError: If ``u`` has a monomial containing an ``h`` letter
    """
    if u.algebra is not ctx.algebra:
        u = ctx.to_adapted(u)
    k = ctx.k
    for exps in u.terms:
        if any(exps[k:]):
            raise NotReducedError(f"{u} is not reduced: it involves {ctx.h.names}; call reduce first")
    K = exact.unify(u.domain, ctx.domain)
    ring = ctx.ring_over(K)
    result = ring.zero
    remainder = u.convert(K)
    while remainder:
        top = remainder.homogeneous_part(remainder.degree())
        piece = ring.from_dict({m[:k]: c for m, c in top.terms.items()})
        result += piece
        remainder = remainder - beta_q(ctx, piece)
    return result


def quotient_product(ctx, p1, p2):
    """Transported product ``β_q⁻¹(reduce(β_q(p1) β_q(p2)))``"""
    return beta_q_inverse(ctx, reduce(ctx, beta_q(ctx, p1) * beta_q(ctx, p2)))


def direct_sum_residual(ctx, u):
    """``reduce(u - β_q(β_q⁻¹(reduce(u))))``; zero for every ``u``"""
    r = reduce(ctx, u)
    return reduce(ctx, ctx.to_adapted(u) - beta_q(ctx, beta_q_inverse(ctx, r)))


def invariance_defect(ctx, p):
    """
    ``reduce(ad(H_j)(β_q(p)))`` for each basis element ``H_j`` of ``h``

    Returns:
        Dict mapping the ``h`` names whose condition fails to the nonzero residue
    """
    u = beta_q(ctx, p)
    n = ctx.algebra.dim
    failures = {}
    for j in range(ctx.k, n):
        r = reduce(ctx, adjoint(ctx.algebra, exact.unit_vector(n, j), u))
        if r:
            failures[ctx.algebra.names[j]] = r
    return failures


def invariance_certificate(ctx, p):
    return not invariance_defect(ctx, p)


@dataclass
class InvariantBasis:
    """A basis of the invariants of degree ``<= degree`` in ``S(q)``"""
    context: QuotientContext
    degree: int
    elements: list = field(default_factory=list)
    domain: object = QQ
    rank: int = 0
    unknowns: int = 0

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def dimension(self):
        return len(self.elements)

    def contains(self, p):
        """Whether ``p`` lies in the span of the basis"""
        monos = monomials_up_to(self.context.k, self.degree)
        domain = exact.field_of(exact.unify(self.domain, p.ring.domain))
        rows = [_coefficients(e, monos, domain) for e in self.elements]
        if poly_degree(p) > self.degree:
            return False
        target = _coefficients(p, monos, domain)
        return exact.in_span(target, rows, len(monos), domain)


def _coefficients(p, monos, domain):
    lookup = dict(p.terms())
    return tuple(domain.convert_from(lookup.get(m, p.ring.domain.zero), p.ring.domain) for m in monos)


def _invariance_column(ctx, mono):
    p = ctx.ring.from_dict({mono: ctx.domain.one})
    u = beta_q(ctx, p)
    n = ctx.algebra.dim
    column = {}
    for j in range(ctx.k, n):
        r = reduce(ctx, adjoint(ctx.algebra, exact.unit_vector(n, j), u))
        for exps, c in r.terms.items():
            column[(j, exps)] = c
    return column


def _solve_invariants(ctx, degree, workers):
    monos = monomials_up_to(ctx.k, degree)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(lambda m: _invariance_column(ctx, m), monos))
    else:
        columns = [_invariance_column(ctx, m) for m in monos]
    keys = sorted({key for col in columns for key in col})
    K = ctx.domain
    rows = [[col.get(key, K.zero) for col in columns] for key in keys]
    m = exact.matrix(rows, len(monos), K)
    kernel = exact.nullspace(m)
    logger.debug("invariant system: %d unknowns, %d equations, rank %d", len(monos), len(keys), len(monos) - len(kernel))
    return monos, kernel, len(monos) - len(kernel)


def invariants(ctx, degree, workers=1, certify=True):
    """
    Basis of ``{p in S(q), deg p <= degree : reduce(ad H_j β_q(p)) = 0 for all j}``

    Args:
        ctx: QuotientContext (rational, not family mode)
        degree: Degree bound
        workers: Threads computing the columns of the linear system
        certify: Re-check every basis element directly

    Returns:
        InvariantBasis over QQ

    Raises:
        CertificateError: If a returned element fails the direct check
    """
    if ctx.family:
        return invariants_family(ctx, degree, workers=workers, certify=certify)
    monos, kernel, rank = _solve_invariants(ctx, degree, workers)
    elements = [ctx.ring.from_dict({m: c for m, c in zip(monos, v) if c}) for v in kernel]
    elements.sort(key=lambda p: (poly_degree(p), str(p)))
    basis = InvariantBasis(ctx, degree, elements, QQ, rank, len(monos))
    if certify:
        _certify(basis)
    return basis


def invariants_family(ctx, degree, workers=1, certify=True):
    """
    Polynomial families ``t -> u_t`` of invariants for the ideal generated by ``H + tλ(H)``

    The system is solved over QQ(t) and each solution is cleared of
    denominators, giving elements with coefficients in QQ[t].

    Args:
        ctx: QuotientContext; a rational context is switched to family mode
    """
    if not ctx.family:
        ctx = QuotientContext(ctx.L, ctx.h, ctx.lam, ctx.q, family=True)
    monos, kernel, rank = _solve_invariants(ctx, degree, workers)
    elements = []
    for v in kernel:
        cleared = exact.clear_denominators(v)
        elements.append(ctx.ring.from_dict({m: c for m, c in zip(monos, cleared) if c}))
    elements.sort(key=lambda p: (poly_degree(p), str(p)))
    basis = InvariantBasis(ctx, degree, elements, exact.PARAM_RING, rank, len(monos))
    if certify:
        _certify(basis)
    return basis


def _certify(basis):
    for p in basis.elements:
        defect = invariance_defect(basis.context, p)
        if defect:
            raise CertificateError(f"solver returned a non-invariant element {p}: {defect}")


def specialize(basis, t0=1):
    """
    Specialize a family basis at ``t = t0``

    Vanishing elements are dropped and the rest reduced to an independent
    set, so the result is a basis of the specialized family space.

    Returns:
        InvariantBasis over QQ for the context at ``t0·λ``
    """
    ctx = basis.context
    target = ctx.at(t0)
    monos = monomials_up_to(ctx.k, basis.degree)
    vectors = []
    for p in basis.elements:
        lookup = dict(p.terms())
        v = tuple(exact.substitute(lookup.get(m, p.ring.domain.zero), p.ring.domain, t0) for m in monos)
        if any(v):
            vectors.append(v)
    independent = exact.span_basis(vectors, len(monos)) if vectors else []
    elements = [target.ring.from_dict({m: c for m, c in zip(monos, v) if c}) for v in independent]
    elements.sort(key=lambda p: (poly_degree(p), str(p)))
    dropped = len(basis.elements) - len(elements)
    if dropped:
        logger.info("specialization at t = %s dropped %d dependent or vanishing families", t0, dropped)
    return InvariantBasis(target, basis.degree, elements, QQ, basis.rank, basis.unknowns)


def noncommuting_pairs(basis, pair_degree=None, workers=1):
    """
    Pairs of basis invariants whose transported products differ in the two orders

    The invariants form a commutative algebra whenever the lagrangian
    condition holds, so on such configurations the result is empty.
    Only pairs whose degrees add up to at most ``pair_degree`` (default:
    all pairs) are multiplied.

    Returns:
        List of ``(p1, p2)`` with ``p1 ⋆ p2 != p2 ⋆ p1``
    """
    ctx = basis.context
    pairs = [(p1, p2) for p1, p2 in itertools.combinations(basis.elements, 2)
             if pair_degree is None or poly_degree(p1) + poly_degree(p2) <= pair_degree]

    def commutes(pair):
        p1, p2 = pair
        return quotient_product(ctx, p1, p2) == quotient_product(ctx, p2, p1)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flags = list(pool.map(commutes, pairs))
    else:
        flags = [commutes(pair) for pair in pairs]
    failures = [pair for pair, ok in zip(pairs, flags) if not ok]
    logger.debug("checked %d invariant pairs for commutativity, %d fail", len(pairs), len(failures))
    return failures


def lift_supplement(q_ref, q_new, h):
    """
    Basis of ``q_new`` congruent modulo ``h`` to the basis of ``q_ref``

    The returned subspace spans ``q_new`` and carries the names of
    ``q_ref``, which identifies ``S(q_ref)`` with ``S(q_new)`` by projection
    along ``h``.

    Raises:
        NonComplementError: If ``q_new`` does not supplement ``h``
    """
    L = q_new.parent
    n = L.dim
    family = list(q_new.vectors) + list(h.vectors)
    if q_new.dim + h.dim != n or not exact.is_independent(family, n):
        raise NonComplementError(f"{q_new!r} is not a supplement of {h!r}")
    lifted = []
    for u in q_ref.vectors:
        coords = exact.coordinates(u, family, n)
        lifted.append(tuple(
            sum((coords[j] * q_new.vectors[j][i] for j in range(q_new.dim)), QQ.zero) for i in range(n)
        ))
    return Subspace(L, lifted, names=q_ref.names)


@dataclass
class SupplementMap:
    """
    The map ``S(q1)_{<=d} -> S(q2)_{<=d}``, ``p -> β_{q2}⁻¹(β_{q1}(p))``

    Both sides use the names of ``q1``; ``target.q`` is the lifted ``q2``.
    """
    source: QuotientContext
    target: QuotientContext
    degree: int
    monomials: list
    columns: list

    def __call__(self, p):
        p = self.source.q_poly(p)
        K = exact.unify(p.ring.domain, self.source.domain)
        ring = self.target.ring_over(K)
        images = dict(zip(self.monomials, self.columns))
        result = ring.zero
        for m, c in p.terms():
            if m not in images:
                raise DimensionMismatchError(f"monomial {m} exceeds the degree {self.degree} of the supplement map")
            result += convert_poly(images[m], ring) * K.convert_from(c, p.ring.domain)
        return result

    def matrix(self):
        """Square matrix on the monomial basis; column ``j`` is the image of monomial ``j``"""
        K = self.columns[0].ring.domain if self.columns else QQ
        rows = [[dict(col.terms()).get(m, K.zero) for col in self.columns] for m in self.monomials]
        return exact.matrix(rows, len(self.monomials), K)

    def is_unitriangular(self):
        """``M(x^m) - x^m`` has degree below ``|m|`` for every monomial"""
        for m, col in zip(self.monomials, self.columns):
            d = sum(m)
            for exps, c in col.terms():
                if sum(exps) > d or (sum(exps) == d and (exps != m or c != 1)):
                    return False
            if dict(col.terms()).get(m) != 1:
                return False
        return True

    def compose(self, other):
        """``other ∘ self``"""
        return SupplementMap(self.source, other.target, self.degree, self.monomials,
                             [other(col) for col in self.columns])

    def reverse(self):
        """The map back from the lifted target supplement to the source supplement"""
        return change_of_supplement(self.source.L, self.source.h, self.source.lam, self.target.q,
                                    self.source.q, self.degree, family=self.source.family)

    def is_identity(self):
        return all(col == col.ring.from_dict({m: col.ring.domain.one})
                   for m, col in zip(self.monomials, self.columns))


def change_of_supplement(L, h, lam, q1, q2, degree, family=False):
    """
    Change of supplement ``β_{q2}⁻¹ ∘ reduce_{q2} ∘ β_{q1}`` on ``S(q1)_{<=degree}``

    Args:
        L: LieAlgebra
        h: Subalgebra
        lam: CharacterFunctional on ``h``
        q1: Source supplement
        q2: Target supplement, identified with ``q1`` along ``h``
        degree: Degree bound

    Returns:
        SupplementMap

    Raises:
        NonComplementError: If either space does not supplement ``h``
    """
    source = QuotientContext(L, h, lam, q1, family=family)
    target = QuotientContext(L, h, lam, lift_supplement(q1, q2, h), family=family)
    images = [target.coordinates(v) for v in source.vectors]
    monos = monomials_up_to(source.k, degree)
    columns = []
    for m in monos:
        u = beta_q(source, source.ring.from_dict({m: source.domain.one}))
        columns.append(beta_q_inverse(target, reduce(target, rewrite(u, target.algebra, images))))
    return SupplementMap(source, target, degree, monos, columns)
