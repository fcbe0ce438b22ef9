"""Suite registry: what each named suite checks and what it needs from omega."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import partial
from typing import Callable, Optional

from .courant import (
    CourantStructure,
    verify_curvature,
    verify_def21_axioms,
    verify_def22_axioms,
    verify_symmetry,
    verify_symmetry_negative,
)
from .exterior import (
    DifferentialForm,
    exterior_derivative,
    interior_product,
    lie_derivative_form,
    poincare_primitive,
    pullback_form,
    pushforward_vf,
    random_affine_map,
    random_form,
    random_vector_field,
    vf_bracket,
    wedge,
)
from .lie2 import (
    CourantInstance,
    EmbeddingHom,
    PlecticInstance,
    check_bracket_chain_map,
    check_hom_coherence,
    check_hom_homotopy,
    check_jacobiator_identity,
)
from .plectic import PlecticStructure, check_two_plectic, verify_degeneracy, verify_plectic_identities
from .report import IdentityResult, Report, Settings, SuiteReport, mismatch, run_identity
from .ring import random_polynomial
from .scenario import SUITE_NAMES, Scenario, ScenarioError

__all__ = ["Context", "prepare", "run_suites", "verify_ring_laws", "verify_exterior_calculus", "SUITES"]


# -- ring laws ------------------------------------------------------------------


def _polys(n, s, rng, k):
    return [random_polynomial(n, s.max_degree, s.coeff_bound, rng, s.max_terms) for _ in range(k)]


def _add_laws(n, s, rng):
    p, q, r = _polys(n, s, rng, 3)
    return mismatch((p + q) + r - (p + (q + r)), p=p, q=q, r=r) or mismatch(p + q - (q + p), p=p, q=q)


def _mul_laws(n, s, rng):
    p, q, r = _polys(n, s, rng, 3)
    return mismatch((p * q) * r - p * (q * r), p=p, q=q, r=r) or mismatch(p * q - q * p, p=p, q=q)


def _distributive(n, s, rng):
    p, q, r = _polys(n, s, rng, 3)
    return mismatch(p * (q + r) - (p * q + p * r), p=p, q=q, r=r)


def _partials_commute(n, s, rng):
    (p,) = _polys(n, s, rng, 1)
    i, j = (int(x) for x in rng.integers(1, n + 1, size=2))
    return mismatch(p.partial(i).partial(j) - p.partial(j).partial(i), p=p, i=i, j=j)


def _partial_leibniz(n, s, rng):
    p, q = _polys(n, s, rng, 2)
    i = int(rng.integers(1, n + 1))
    return mismatch((p * q).partial(i) - (p.partial(i) * q + p * q.partial(i)), p=p, q=q, i=i)


def _eval_homomorphism(n, s, rng):
    p, q = _polys(n, s, rng, 2)
    from gmpy2 import mpq

    point = [mpq(int(a), int(b)) for a, b in zip(rng.integers(-5, 6, size=n), rng.integers(1, 4, size=n))]
    if (p * q).evaluate(point) != p.evaluate(point) * q.evaluate(point):
        return f"(pq)(x) != p(x) q(x) at {[str(c) for c in point]}; p = {p}; q = {q}"
    if (p + q).evaluate(point) != p.evaluate(point) + q.evaluate(point):
        return f"(p+q)(x) != p(x) + q(x) at {[str(c) for c in point]}; p = {p}; q = {q}"
    return None


RING_LAWS = [
    ("addition_assoc_comm", "(p+q)+r = p+(q+r), p+q = q+p", _add_laws),
    ("multiplication_assoc_comm", "(pq)r = p(qr), pq = qp", _mul_laws),
    ("distributive", "p(q+r) = pq + pr", _distributive),
    ("partials_commute", "d_i d_j p = d_j d_i p", _partials_commute),
    ("partial_leibniz", "d_i(pq) = (d_i p) q + p d_i q", _partial_leibniz),
    ("evaluation_homomorphism", "(pq)(x) = p(x) q(x), (p+q)(x) = p(x) + q(x)", _eval_homomorphism),
]


def verify_ring_laws(n: int, settings: Settings, suite: str = "ring_laws") -> list[IdentityResult]:
    return [run_identity(name, a, partial(fn, n, settings), settings, suite) for name, a, fn in RING_LAWS]


# -- exterior calculus ------------------------------------------------------------


def _form(n, s, rng, k=None):
    k = int(rng.integers(0, n + 1)) if k is None else k
    return random_form(n, k, rng, s.max_degree, s.coeff_bound, s.max_terms)


def _vf(n, s, rng):
    return random_vector_field(n, rng, s.max_degree, s.coeff_bound, s.max_terms)


def _d_squared(n, s, rng):
    a = _form(n, s, rng)
    return mismatch(exterior_derivative(exterior_derivative(a)), a=a)


def _d_leibniz(n, s, rng):
    a, b = _form(n, s, rng), _form(n, s, rng)
    sign = -1 if a.degree % 2 else 1
    res = exterior_derivative(wedge(a, b)) - wedge(exterior_derivative(a), b) - wedge(a, exterior_derivative(b)) * sign
    return mismatch(res, a=a, b=b)


def _wedge_graded(n, s, rng):
    a, b = _form(n, s, rng), _form(n, s, rng)
    sign = -1 if (a.degree * b.degree) % 2 else 1
    return mismatch(wedge(a, b) - wedge(b, a) * sign, a=a, b=b)


def _interior_twice(n, s, rng):
    v = _vf(n, s, rng)
    a = _form(n, s, rng, int(rng.integers(2, n + 1)) if n >= 2 else 1)
    if a.degree < 2:
        return None
    return mismatch(interior_product(v, interior_product(v, a)), v=v, a=a)


def _interior_antiderivation(n, s, rng):
    v = _vf(n, s, rng)
    a, b = _form(n, s, rng, int(rng.integers(1, n + 1))), _form(n, s, rng, int(rng.integers(1, n + 1)))
    sign = -1 if a.degree % 2 else 1
    res = interior_product(v, wedge(a, b)) - wedge(interior_product(v, a), b) - wedge(a, interior_product(v, b)) * sign
    return mismatch(res, v=v, a=a, b=b)


def _interior_bracket(n, s, rng):
    u, v = _vf(n, s, rng), _vf(n, s, rng)
    a = _form(n, s, rng, int(rng.integers(1, n + 1)))
    res = interior_product(vf_bracket(u, v), a) - (
        lie_derivative_form(u, interior_product(v, a)) - interior_product(v, lie_derivative_form(u, a))
    )
    return mismatch(res, u=u, v=v, a=a)


def _lie_commutes_d(n, s, rng):
    v, a = _vf(n, s, rng), _form(n, s, rng)
    return mismatch(lie_derivative_form(v, exterior_derivative(a)) - exterior_derivative(lie_derivative_form(v, a)), v=v, a=a)


def _lie_leibniz(n, s, rng):
    v, a, b = _vf(n, s, rng), _form(n, s, rng), _form(n, s, rng)
    res = lie_derivative_form(v, wedge(a, b)) - wedge(lie_derivative_form(v, a), b) - wedge(a, lie_derivative_form(v, b))
    return mismatch(res, v=v, a=a, b=b)


def _poincare(n, s, rng):
    b = _form(n, s, rng, int(rng.integers(0, n)))
    a = exterior_derivative(b)
    if a.is_zero():
        return None
    return mismatch(exterior_derivative(poincare_primitive(a)) - a, a=a)


def _pullback_natural(n, s, rng):
    phi = random_affine_map(n, rng)
    a, b = _form(n, s, rng), _form(n, s, rng)
    res = pullback_form(phi, exterior_derivative(a)) - exterior_derivative(pullback_form(phi, a))
    res2 = pullback_form(phi, wedge(a, b)) - wedge(pullback_form(phi, a), pullback_form(phi, b))
    return mismatch(res, phi=phi, a=a) or mismatch(res2, phi=phi, a=a, b=b)


def _pushforward_natural(n, s, rng):
    phi = random_affine_map(n, rng)
    u, v = _vf(n, s, rng), _vf(n, s, rng)
    res = pushforward_vf(phi, vf_bracket(u, v)) - vf_bracket(pushforward_vf(phi, u), pushforward_vf(phi, v))
    return mismatch(res, phi=phi, u=u, v=v)


def _pull_push_contraction(n, s, rng):
    phi = random_affine_map(n, rng)
    v = _vf(n, s, rng)
    a = _form(n, s, rng, int(rng.integers(1, n + 1)))
    res = pullback_form(phi, interior_product(pushforward_vf(phi, v), a)) - interior_product(v, pullback_form(phi, a))
    return mismatch(res, phi=phi, v=v, a=a)


EXTERIOR = [
    ("d_squared_zero", "d d a = 0", _d_squared),
    ("d_graded_leibniz", "d(a^b) = da^b + (-1)^k a^db", _d_leibniz),
    ("wedge_graded_commutative", "a^b = (-1)^(kl) b^a", _wedge_graded),
    ("interior_twice_zero", "i_v i_v a = 0", _interior_twice),
    ("interior_antiderivation", "i_v(a^b) = i_v a^b + (-1)^k a^i_v b", _interior_antiderivation),
    ("interior_of_bracket", "i_[u,v] a = L_u i_v a - i_v L_u a", _interior_bracket),
    ("lie_commutes_with_d", "L_v d a = d L_v a", _lie_commutes_d),
    ("lie_derivation_of_wedge", "L_v(a^b) = L_v a^b + a^L_v b", _lie_leibniz),
    ("homotopy_primitive", "d P(a) = a for closed a", _poincare),
    ("pullback_natural", "phi^* d = d phi^*, phi^*(a^b) = phi^*a^phi^*b", _pullback_natural),
    ("pushforward_natural", "phi_*[u,v] = [phi_*u, phi_*v]", _pushforward_natural),
    ("pullback_pushforward_contraction", "phi^*(i_{phi_* v} a) = i_v phi^* a", _pull_push_contraction),
]


def verify_exterior_calculus(n: int, settings: Settings, suite: str = "exterior_calculus") -> list[IdentityResult]:
    return [run_identity(name, a, partial(fn, n, settings), settings, suite) for name, a, fn in EXTERIOR]


# -- registry -----------------------------------------------------------------------


@dataclass
class Context:
    """Structures built from a scenario once, shared by its suites."""

    scenario: Scenario
    C: Optional[CourantStructure] = None
    P: Optional[PlecticStructure] = None


NEEDS_CLOSED = {
    "plectic", "courant_def21", "courant_def22", "curvature", "lie2_plectic",
    "lie2_courant", "embedding", "symmetry", "symmetry_negative",
}
NEEDS_PLECTIC = {"plectic", "lie2_plectic", "embedding"}


def prepare(scenario: Scenario, suites: list[str]) -> Context:
    """Validate omega as far as the chosen suites require.

    Raises ``NotClosedError`` or ``DegenerateError`` from the exterior and
    plectic modules.
    """
    unknown = [s for s in suites if s not in SUITE_NAMES]
    if unknown:
        raise ScenarioError(f"unknown suite(s) {unknown}; choose from {', '.join(SUITE_NAMES)}")
    ctx = Context(scenario)
    chosen = set(suites)
    if chosen & NEEDS_CLOSED:
        ctx.C = CourantStructure(scenario.dimension, scenario.omega)
    if chosen & NEEDS_PLECTIC:
        ctx.P = check_two_plectic(scenario.omega, scenario.sample_points)
        if not ctx.P.constant_coefficients:
            raise ScenarioError("plectic, lie2_plectic and embedding need a constant-coefficient omega")
    elif "symmetry" in chosen and scenario.omega.is_constant() and not scenario.omega.is_zero():
        try:
            ctx.P = check_two_plectic(scenario.omega)
        except ValueError:
            ctx.P = None
    return ctx


def _gauge_B(ctx: Context) -> Optional[DifferentialForm]:
    B = ctx.scenario.named_objects.get("B")
    if B is None:
        return None
    if not isinstance(B, DifferentialForm) or B.degree != 2:
        raise ScenarioError("named object 'B' must be a 2-form")
    return B


def _lie2_plectic(ctx, s, suite):
    inst = PlecticInstance(ctx.P)
    return check_bracket_chain_map(inst, s, suite) + check_jacobiator_identity(inst, s, suite)


def _lie2_courant(ctx, s, suite):
    inst = CourantInstance(ctx.C)
    return check_bracket_chain_map(inst, s, suite) + check_jacobiator_identity(inst, s, suite)


def _embedding(ctx, s, suite):
    H = EmbeddingHom.of(ctx.P)
    return check_hom_homotopy(H, s, suite) + check_hom_coherence(H, s, suite)


SUITES: dict[str, Callable[[Context, Settings, str], list[IdentityResult]]] = {
    "ring_laws": lambda ctx, s, suite: verify_ring_laws(ctx.scenario.dimension, s, suite),
    "exterior_calculus": lambda ctx, s, suite: verify_exterior_calculus(ctx.scenario.dimension, s, suite),
    "plectic": lambda ctx, s, suite: verify_plectic_identities(ctx.P, s, suite),
    "courant_def21": lambda ctx, s, suite: verify_def21_axioms(ctx.C, s, suite),
    "courant_def22": lambda ctx, s, suite: verify_def22_axioms(ctx.C, s, suite),
    "curvature": lambda ctx, s, suite: verify_curvature(ctx.C, s, suite),
    "lie2_plectic": _lie2_plectic,
    "lie2_courant": _lie2_courant,
    "embedding": _embedding,
    "symmetry": lambda ctx, s, suite: verify_symmetry(ctx.C, ctx.P, s, suite),
    "symmetry_negative": lambda ctx, s, suite: verify_symmetry_negative(ctx.C, s, suite, B=_gauge_B(ctx)),
    "degeneracy_r4": lambda ctx, s, suite: verify_degeneracy(s, suite),
}


def settings_for(scenario: Scenario, **overrides) -> Settings:
    base = Settings(
        trials=scenario.trials,
        seed=scenario.seed,
        max_degree=scenario.max_degree,
        coeff_bound=scenario.coeff_bound,
    )
    return replace(base, **{k: v for k, v in overrides.items() if v is not None})


def run_suites(scenario: Scenario, suites: Optional[list[str]] = None, settings: Optional[Settings] = None) -> Report:
    """Run the chosen suites (default: the scenario's list) in the given order."""
    suites = list(scenario.suites if not suites else suites)
    settings = settings or settings_for(scenario)
    ctx = prepare(scenario, suites)
    return Report([SuiteReport(name, SUITES[name](ctx, settings, name)) for name in suites], settings)
