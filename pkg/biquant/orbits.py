"""
Coadjoint orbit linear algebra: the skew form of a linear form, orbit
dimensions, the lagrangian condition on ``λ + h^⊥`` and polarizations.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import pandas as pd
from sympy import QQ

from biquant import exact
from biquant.errors import CertificateError, NonTransverseError, PreconditionError
from biquant.lie import LinearForm, Subalgebra, Subspace, bracket, ideal_flag

logger = logging.getLogger(__name__)

MAX_FLAG_TRIALS = 120


@dataclass
class SkewForm:
    f: LinearForm
    rows: list

    @property
    def matrix(self):
        return exact.matrix(self.rows, len(self.rows))

    def rank(self):
        return exact.rank(self.matrix)

    def is_antisymmetric(self):
        n = len(self.rows)
        return all(self.rows[i][j] == -self.rows[j][i] for i in range(n) for j in range(n))


def skew_form(L, f):
    """``B_f(x_i, x_j) = f([x_i, x_j])``"""
    basis = L.basis()
    rows = [[f(bracket(L, x, y)) for y in basis] for x in basis]
    return SkewForm(f, rows)


@dataclass
class OrbitDims:
    dim_g_orbit: int
    dim_h_orbit: int
    stabilizer: Subspace

    @property
    def profile(self):
        return self.dim_h_orbit, self.dim_g_orbit

    @property
    def is_lagrangian(self):
        return 2 * self.dim_h_orbit == self.dim_g_orbit


def orbit_dims(L, h, f):
    """
    Dimensions of ``g·f`` and ``h·f`` and the stabilizer ``g^f``

    Args:
        L: LieAlgebra
        h: Subspace
        f: Rational LinearForm
    """
    form = skew_form(L, f)
    stabilizer = Subspace(L, exact.span_basis(exact.nullspace(form.matrix), L.dim), prefix="s")
    block = [[f(bracket(L, v, y)) for y in L.basis()] for v in h.vectors]
    dim_h = exact.rank(exact.matrix(block, L.dim)) if block else 0
    return OrbitDims(L.dim - stabilizer.dim, dim_h, stabilizer)


def annihilator(L, h):
    """Basis of ``h^⊥``, as coordinate vectors of linear forms"""
    if not h.vectors:
        return L.basis()
    return exact.span_basis(exact.nullspace(exact.matrix(list(h.vectors), L.dim)), L.dim)


def sample_forms(L, h, lam, count, rng, box=20):
    """
    Random rational points ``f0 + sum a_k n_k`` of ``λ + h^⊥``

    ``f0`` is a fixed extension of ``λ``, ``n_k`` a basis of ``h^⊥`` and the
    ``a_k`` integers drawn from ``[-box, box]`` in order from ``rng``.
    """
    f0 = lam.extension()
    directions = annihilator(L, h)
    forms = []
    for _ in range(count):
        draws = [int(a) for a in rng.integers(-box, box + 1, size=len(directions))]
        coords = list(f0.coords)
        for a, nvec in zip(draws, directions):
            coords = [c + QQ(a) * x for c, x in zip(coords, nvec)]
        forms.append(LinearForm(L, coords))
    return forms


@dataclass
class LagrangianReport:
    holds_generically: bool
    profile: tuple
    witnesses: list = field(default_factory=list)
    samples: list = field(default_factory=list)

    def to_frame(self):
        return pd.DataFrame([
            {"form": repr(f), "dim_h_orbit": dims.dim_h_orbit, "dim_g_orbit": dims.dim_g_orbit,
             "lagrangian": dims.is_lagrangian}
            for f, dims in self.samples
        ])


def lagrangian_check(L, h, lam, samples, rng, box=20, workers=1):
    """
    Test ``dim(h·f) = dim(g·f)/2`` on a Zariski-open subset of ``λ + h^⊥``

    The forms are sampled up front; the verdict is read at the maximal
    observed ``(dim g·f, dim h·f)`` profile, which is attained on an open set.

    Args:
        L: LieAlgebra
        h: Subalgebra
        lam: CharacterFunctional on ``h``
        samples: Number of sampled forms, at least 1
        rng: ``numpy.random.Generator``
        box: Sampling box half-width
        workers: Threads computing orbit dimensions

    Returns:
        LagrangianReport; ``witnesses`` are the sampled forms at the maximal profile

    Raises:
        PreconditionError: If ``samples < 1``
    """
    if samples < 1:
        raise PreconditionError("lagrangian_check needs at least one sample")
    forms = sample_forms(L, h, lam, samples, rng, box)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            dims = list(pool.map(lambda f: orbit_dims(L, h, f), forms))
    else:
        dims = [orbit_dims(L, h, f) for f in forms]
    best = max((d.dim_g_orbit, d.dim_h_orbit) for d in dims)
    witnesses = [f for f, d in zip(forms, dims) if (d.dim_g_orbit, d.dim_h_orbit) == best]
    if len(witnesses) < len(forms):
        logger.warning("%d of %d samples are degenerate (below the profile %s)",
                       len(forms) - len(witnesses), len(forms), best)
    holds = 2 * best[1] == best[0]
    return LagrangianReport(holds, (best[1], best[0]), witnesses, list(zip(forms, dims)))


@dataclass
class Polarization:
    """
    Maximal isotropic subalgebra ``b`` for ``f``

    ``q_b`` is the adapted supplement of ``h`` inside ``b`` when it has been
    computed for a transverse ``h``.
    """
    f: LinearForm
    b: Subalgebra
    q_b: Subspace = None
    flag_priority: tuple = None
    certificate: dict = field(default_factory=dict)


def _restricted_stabilizer(L, f, vectors):
    """``{w in span(vectors) : f([w, v]) = 0 for v in vectors}``"""
    k = len(vectors)
    rows = [[f(bracket(L, vectors[j], vectors[r])) for j in range(k)] for r in range(k)]
    kernel = exact.nullspace(exact.matrix(rows, k))
    return [tuple(sum((a * v[i] for a, v in zip(sol, vectors)), QQ.zero) for i in range(L.dim)) for sol in kernel]


def polarization_certificate(L, f, b):
    """Subalgebra, isotropy, stabilizer and dimension checks for a candidate polarization"""
    stabilizer = orbit_dims(L, b, f).stabilizer
    isotropic = all(not f(bracket(L, v, w)) for v, w in itertools.combinations(b.vectors, 2))
    return {
        "subalgebra": b.is_subalgebra(),
        "isotropic": isotropic,
        "contains_stabilizer": b.contains_subspace(stabilizer),
        "maximal_dimension": 2 * b.dim == L.dim + stabilizer.dim,
    }


def vergne_polarization(L, f, flag):
    """
    ``b = sum_i (g_i)^{f|g_i}`` along a complete flag of ideals

    Raises:
        CertificateError: If the result fails the polarization checks
    """
    vectors = []
    for g_i in flag[1:]:
        vectors.extend(_restricted_stabilizer(L, f, list(g_i.vectors)))
    basis = exact.span_basis(vectors, L.dim)
    b = Subspace(L, basis, prefix="b")
    certificate = polarization_certificate(L, f, b)
    if not all(certificate.values()):
        raise CertificateError(f"Vergne construction failed its certificate for {f!r}: {certificate}")
    return Polarization(f, Subalgebra.of(b), certificate=certificate)


def adapted_supplement(L, h, b):
    """
    Supplement ``q_b ⊆ b`` of ``h``: the rows of ``b``'s row-reduced basis extending ``h ∩ b``

    Raises:
        NonTransverseError: If ``h + b != g``
    """
    if len(h.span_with(b)) != L.dim:
        raise NonTransverseError(f"non-transverse pair: h + b has dimension {len(h.span_with(b))} < {L.dim}")
    common = h.intersection(b)
    rows = exact.span_basis(list(b.vectors), L.dim)
    chosen = exact.extend_basis(list(common.vectors), rows, L.dim)
    return Subspace(L, chosen, prefix="q")


def _flag_priorities(n):
    """Default priority (reversed basis order) first, then the remaining permutations"""
    default = tuple(reversed(range(n)))
    yield default
    for p in itertools.permutations(range(n)):
        if p != default:
            yield p


def transverse_polarization(L, h, f):
    """
    A Vergne polarization ``b`` at ``f`` with ``h + b = g``, plus its adapted supplement

    Flags from other completion priorities are tried when the default flag
    gives a non-transverse ``b``.

    Raises:
        NonTransverseError: If no tried flag gives a transverse polarization
    """
    seen = set()
    for trial, priority in enumerate(_flag_priorities(L.dim)):
        if trial >= MAX_FLAG_TRIALS:
            break
        flag = ideal_flag(L, priority)
        key = tuple(tuple(g.vectors) for g in flag)
        if key in seen:
            continue
        seen.add(key)
        pol = vergne_polarization(L, f, flag)
        if len(h.span_with(pol.b)) == L.dim:
            pol.q_b = adapted_supplement(L, h, pol.b)
            pol.flag_priority = tuple(L.names[i] for i in priority)
            if trial:
                logger.info("default flag is not transverse to h; using priority %s", pol.flag_priority)
            return pol
    raise NonTransverseError(f"no Vergne polarization at {f!r} is transverse to {h!r}; resample f")


def shear_candidates(L, h, q_b):
    """
    Supplements ``q_b`` with one basis vector sheared into ``h``

    Yields:
        Tuples ``(description, Subspace)`` for coefficients ``-1`` and ``1``
    """
    for i, j, c in itertools.product(range(q_b.dim), range(h.dim), (1, -1)):
        vectors = list(q_b.vectors)
        vectors[i] = tuple(a + c * b for a, b in zip(vectors[i], h.vectors[j]))
        description = f"{q_b.names[i]} {'+' if c > 0 else '-'} {h.names[j]}"
        yield description, Subspace(L, vectors, names=q_b.names)
