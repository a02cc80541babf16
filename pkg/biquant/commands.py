"""
Bodies of the command-line subcommands. Each takes the parsed arguments
and the effective settings and returns a RunReport.
"""
import logging

import numpy as np

from biquant import builtins, dsl, exact
from biquant.characters import (
    calibrated_convention,
    compare_characters,
    verify_example_correction,
)
from biquant.enveloping import duflo_factor_traces
from biquant.errors import NonTransverseError, PreconditionError
from biquant.lie import ideal_flag, validate
from biquant.orbits import lagrangian_check, transverse_polarization
from biquant.reduction import (
    QuotientContext,
    change_of_supplement,
    invariants,
    invariants_family,
    noncommuting_pairs,
    specialize,
)
from biquant.reporting import RunReport

logger = logging.getLogger(__name__)


def load_definitions(args):
    """The AlgebraFile named by ``--builtin`` or the positional file"""
    if getattr(args, "builtin", None):
        return builtins.load(args.builtin), f"builtin:{args.builtin}"
    return dsl.load_file(args.file), str(args.file)


def configuration(defs, args):
    """``(h, λ, q)`` chosen by ``--subalgebra`` and ``--character``"""
    h = defs.subalgebra(getattr(args, "subalgebra", None))
    name = getattr(args, "character", None)
    lam = defs.character(name) if name else defs.character(on=h)
    if lam.h is not h:
        raise PreconditionError(f"character {name!r} is not defined on the chosen subalgebra")
    return h, lam, defs.supplement(h)


def _inputs(source, settings, **extra):
    inputs = {"source": source, "seed": settings.seed}
    inputs.update(extra)
    return inputs


def _poly_list(basis):
    return [str(p.as_expr()) for p in basis.elements]


def run_validate(args, settings):
    defs, source = load_definitions(args)
    L = defs.algebra
    result = validate(L)
    report = RunReport("validate", inputs=_inputs(source, settings), algebra=L.name, basis=list(L.names),
                       antisymmetric=result.antisymmetric, jacobi=result.jacobi, nilpotent=result.nilpotent,
                       nilpotency_class=result.nilpotency_class, lower_central_dims=result.lower_central_dims,
                       failures=result.failures)
    if result.nilpotent:
        report["ideal_flag"] = [[L.describe(v) for v in g.vectors] for g in ideal_flag(L)[1:]]
        report["duflo_traces_vanish"] = all(
            not any(duflo_factor_traces(L, y, L.dim)) for y in L.basis()
        )
    return report


def run_orbits(args, settings):
    defs, source = load_definitions(args)
    L = defs.algebra
    h, lam, _ = configuration(defs, args)
    rng = np.random.default_rng(settings.seed)
    result = lagrangian_check(L, h, lam, settings.samples, rng, settings.box, settings.workers)
    report = RunReport("orbits", inputs=_inputs(source, settings, samples=settings.samples, box=settings.box),
                       subalgebra=[L.describe(v) for v in h.vectors], holds_generically=result.holds_generically,
                       profile={"dim_h_orbit": result.profile[0], "dim_g_orbit": result.profile[1]},
                       witnesses=[repr(f) for f in result.witnesses])
    report.add_table("samples", result.to_frame())
    witness = result.witnesses[0]
    try:
        pol = transverse_polarization(L, h, witness)
        report["polarization"] = {
            "form": repr(witness),
            "b": [L.describe(v) for v in pol.b.vectors],
            "adapted_supplement": [L.describe(v) for v in pol.q_b.vectors],
            "flag_priority": list(pol.flag_priority),
            "certificate": pol.certificate,
        }
    except NonTransverseError as exc:
        logger.warning("%s", exc)
        report["polarization"] = {"form": repr(witness), "error": str(exc)}
    return report


def _parse_specialization(text):
    """``t=V`` with V rational"""
    name, sep, value = (text or "").partition("=")
    if name.strip() != "t" or not sep:
        raise PreconditionError(f"--specialize expects t=<rational>, got {text!r}")
    try:
        return exact.rational(value)
    except ValueError:
        raise PreconditionError(f"--specialize expects t=<rational>, got {value.strip()!r} in {text!r}")


def run_invariants(args, settings):
    defs, source = load_definitions(args)
    h, lam, q = configuration(defs, args)
    L = defs.algebra
    ctx = QuotientContext(L, h, lam, q)
    degree = args.degree
    family = args.family or args.specialize is not None
    t0 = _parse_specialization(args.specialize) if args.specialize is not None else exact.rational(1)
    report = RunReport("invariants", inputs=_inputs(source, settings, degree=degree, family=family),
                       supplement=list(q.names))
    basis = invariants(ctx, degree, workers=settings.workers)
    report["basis"] = _poly_list(basis)
    report["dimension"] = basis.dimension
    report["unknowns"] = basis.unknowns
    noncommuting = noncommuting_pairs(basis, pair_degree=degree, workers=settings.workers)
    report["commutative"] = not noncommuting
    report["noncommuting_pairs"] = [[str(p1.as_expr()), str(p2.as_expr())] for p1, p2 in noncommuting]
    if family:
        fam = invariants_family(ctx, degree, workers=settings.workers)
        report["family_basis"] = _poly_list(fam)
        report["family_dimension"] = fam.dimension
        special = specialize(fam, t0)
        direct = basis if t0 == 1 else invariants(ctx.at(t0), degree, workers=settings.workers)
        report["specialization"] = {
            "t": t0,
            "basis": _poly_list(special),
            "dimension": special.dimension,
            "direct_dimension": direct.dimension,
            "contained": all(direct.contains(p) for p in special.elements),
        }
    return report


def run_character(args, settings):
    defs, source = load_definitions(args)
    L = defs.algebra
    h, lam, q = configuration(defs, args)
    ctx = QuotientContext(L, h, lam, q)
    f = defs.form(args.form)
    convention = calibrated_convention()
    pol = transverse_polarization(L, h, f)
    basis = invariants(ctx, args.degree, workers=settings.workers)
    report = RunReport("character", inputs=_inputs(source, settings, form=args.form, degree=args.degree,
                                                   method=args.method),
                       convention=convention.as_dict(), invariants=_poly_list(basis))
    methods = ("ct", "polarization") if args.method == "both" else (args.method,)
    compared = compare_characters(ctx, args.degree, f, pol, convention, search=False, workers=settings.workers)
    for method in methods:
        character = compared.ct if method == "ct" else compared.oracle
        report[method] = {"values": character.values, "multiplicative": character.multiplicative,
                          "failures": character.failures}
        if method == "polarization":
            report[method]["nonconstant_residuals"] = character.nonconstant_residuals
        report.add_table(f"{method}_values", character.to_frame())
    if len(methods) == 2:
        report["agreement"] = compared.agreement
    return report


def run_compare(args, settings):
    defs, source = load_definitions(args)
    L = defs.algebra
    h, lam, q = configuration(defs, args)
    ctx = QuotientContext(L, h, lam, q)
    convention = calibrated_convention()
    rng = np.random.default_rng(settings.seed)
    check = lagrangian_check(L, h, lam, settings.samples, rng, settings.box)
    if not check.holds_generically:
        raise PreconditionError(f"the lagrangian condition fails generically (profile {check.profile}); nothing to compare")
    rows = []
    agreement = True
    for index, f in enumerate(check.witnesses):
        try:
            pol = transverse_polarization(L, h, f)
        except NonTransverseError as exc:
            logger.warning("sample %d skipped: %s", index, exc)
            continue
        result = compare_characters(ctx, args.degree, f, pol, convention, workers=settings.workers)
        agreement = agreement and result.agreement
        rows.append({
            "sample": index,
            "form": repr(f),
            "agreement": result.agreement,
            "supplement": result.supplement,
            "ct_multiplicative": result.ct.multiplicative,
            "oracle_multiplicative": result.oracle.multiplicative,
            "disagreements": "; ".join(result.disagreements),
        })
    if not rows:
        raise PreconditionError("no sampled form admits a transverse polarization; increase --samples")
    report = RunReport("compare", inputs=_inputs(source, settings, degree=args.degree, samples=settings.samples),
                       convention=convention.as_dict(), agreement=agreement, compared=len(rows))
    report.add_table("samples", rows)
    return report


def run_example_check(args, settings):
    rng = np.random.default_rng(settings.seed)
    result = verify_example_correction(args.degree, args.trials, rng, settings.box, settings.workers)
    report = RunReport("example-check",
                       inputs={"source": "builtin:example5", "seed": settings.seed, "degree": args.degree,
                               "trials": args.trials},
                       passed=result.passed, nontrivial_invariants=result.nontrivial)
    report.add_table("identities", result.to_frame())
    return report


def _named_supplement(defs, h, name):
    """A declared subspace, ``canonical``, or ``polarization:FORM``"""
    if name == "canonical":
        return defs.supplement(h)
    if name.startswith("polarization:"):
        f = defs.form(name.split(":", 1)[1])
        return transverse_polarization(defs.algebra, h, f).q_b
    try:
        return defs.subspaces[name]
    except KeyError:
        raise PreconditionError(f"unknown supplement {name!r}; declared: {list(defs.subspaces)}, "
                                "or canonical, polarization:<form>")


def run_supplement_map(args, settings):
    defs, source = load_definitions(args)
    L = defs.algebra
    h, lam, _ = configuration(defs, args)
    q1 = _named_supplement(defs, h, args.source_supplement)
    q2 = _named_supplement(defs, h, args.target_supplement)
    mapping = change_of_supplement(L, h, lam, q1, q2, args.degree)
    report = RunReport("supplement-map",
                       inputs=_inputs(source, settings, source_supplement=args.source_supplement,
                                      target_supplement=args.target_supplement, degree=args.degree),
                       source_basis=[L.describe(v) for v in q1.vectors],
                       target_basis=[L.describe(v) for v in q2.vectors],
                       lifted_target_basis=[L.describe(v) for v in mapping.target.q.vectors],
                       identified_names=list(mapping.source.q.names),
                       unitriangular=mapping.is_unitriangular(), identity=mapping.is_identity())
    report.add_table("columns", [
        {"monomial": str(mapping.source.ring.from_dict({m: mapping.source.domain.one}).as_expr()), "image": str(col.as_expr())}
        for m, col in zip(mapping.monomials, mapping.columns)
    ])
    return report


COMMANDS = {
    "validate": run_validate,
    "orbits": run_orbits,
    "invariants": run_invariants,
    "character": run_character,
    "compare": run_compare,
    "example-check": run_example_check,
    "supplement-map": run_supplement_map,
}


def run(args, settings):
    """Dispatch ``args.command`` and return its RunReport"""
    logger.info("running %s", args.command)
    return COMMANDS[args.command](args, settings)
