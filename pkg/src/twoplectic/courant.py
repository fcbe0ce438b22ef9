"""Split exact Courant algebroids ``E_omega = TM + T*M`` over R^n.

Sections are pairs ``(v, alpha)``.  The pairing is
``<(v1,a1),(v2,a2)> = i_{v1} a2 + i_{v2} a1``, the anchor is projection onto
``v``, ``D f = (0, df)``, and the skew bracket is the standard one plus the
twist ``(0, i_{v2} i_{v1} omega)``.  The Dorfman product is computed two ways
and the two must agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import partial
from itertools import combinations
from typing import Optional, Sequence

from gmpy2 import mpq

from .exterior import (
    AffineMap,
    DifferentialForm,
    NotClosedError,
    VectorField,
    exterior_derivative,
    interior_product,
    lie_derivative_form,
    poincare_primitive,
    pullback_form,
    pushforward_vf,
    random_form,
    random_vector_field,
    vf_bracket,
)
from .plectic import (
    InconsistencyError,
    NotHamiltonianError,
    PlecticStructure,
    hamiltonian_vector_field,
    random_hamiltonian_pair,
)
from .report import IdentityResult, Settings, mismatch, run_identity, single
from .ring import Polynomial, random_polynomial

__all__ = [
    "Section",
    "CourantStructure",
    "Connection",
    "Derivation",
    "AutomorphismVerdict",
    "SymmetryVerdict",
    "bilinear_form",
    "anchor",
    "rho_star",
    "d_operator",
    "standard_bracket",
    "twisted_bracket",
    "dorfman",
    "jacobiator_T",
    "verify_def21_axioms",
    "verify_def22_axioms",
    "connection_apply",
    "curvature_three_form",
    "gauge_exp_b",
    "gauge_twist_relation",
    "affine_transport",
    "check_automorphism",
    "derivation_action",
    "adjoint_action",
    "is_plectic_symmetry_section",
    "random_section",
]

HALF = mpq(1, 2)
FIXTURE_TRIALS = 20


@dataclass(frozen=True)
class Section:
    v: VectorField
    alpha: DifferentialForm

    def __post_init__(self):
        if self.alpha.degree != 1:
            raise ValueError("section form part must be a 1-form")
        if self.v.nvars != self.alpha.nvars:
            raise ValueError("section components disagree on dimension")

    @property
    def nvars(self) -> int:
        return self.v.nvars

    @classmethod
    def zero(cls, n: int) -> "Section":
        return cls(VectorField.zero(n), DifferentialForm.zero(n, 1))

    def __add__(self, other):
        return Section(self.v + other.v, self.alpha + other.alpha)

    def __sub__(self, other):
        return Section(self.v - other.v, self.alpha - other.alpha)

    def __neg__(self):
        return Section(-self.v, -self.alpha)

    def __mul__(self, f):
        return Section(self.v * f, self.alpha * f)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.v.is_zero() and self.alpha.is_zero()

    def __str__(self):
        return f"({self.v}, {self.alpha})"


@dataclass(frozen=True)
class CourantStructure:
    """``E_omega``; ``validate=False`` skips the closedness check (negative tests only)."""

    nvars: int
    twist: DifferentialForm
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.twist.degree != 3 or self.twist.nvars != self.nvars:
            raise ValueError("twist must be a 3-form on R^n")
        if self.validate:
            d = exterior_derivative(self.twist)
            if not d.is_zero():
                raise NotClosedError("twist is not closed", d)

    @classmethod
    def standard(cls, n: int) -> "CourantStructure":
        return cls(n, DifferentialForm.zero(n, 3))

    def __str__(self):
        return f"E_omega(R^{self.nvars}, omega = {self.twist})"


def _fn(form: DifferentialForm) -> Polynomial:
    return form.as_function()


def _d(f: Polynomial) -> DifferentialForm:
    return exterior_derivative(DifferentialForm.function(f))


def bilinear_form(e1: Section, e2: Section) -> Polynomial:
    return _fn(interior_product(e1.v, e2.alpha)) + _fn(interior_product(e2.v, e1.alpha))


def anchor(e: Section) -> VectorField:
    return e.v


def rho_star(alpha: DifferentialForm) -> Section:
    return Section(VectorField.zero(alpha.nvars), alpha)


def d_operator(f: Polynomial) -> Section:
    return rho_star(_d(f))


def standard_bracket(e1: Section, e2: Section) -> Section:
    v1, a1, v2, a2 = e1.v, e1.alpha, e2.v, e2.alpha
    mixed = _fn(interior_product(v1, a2)) - _fn(interior_product(v2, a1))
    form = lie_derivative_form(v1, a2) - lie_derivative_form(v2, a1) - _d(mixed.scale(HALF))
    return Section(vf_bracket(v1, v2), form)


def _twist_term(C: CourantStructure, v1: VectorField, v2: VectorField) -> DifferentialForm:
    if C.twist.is_zero():
        return DifferentialForm.zero(C.nvars, 1)
    return interior_product(v2, interior_product(v1, C.twist))


def twisted_bracket(C: CourantStructure, e1: Section, e2: Section) -> Section:
    base = standard_bracket(e1, e2)
    return Section(base.v, base.alpha + _twist_term(C, e1.v, e2.v))


def dorfman(C: CourantStructure, e1: Section, e2: Section) -> Section:
    """Non-skew product, via the skew bracket and via the expanded formula."""
    via_bracket = twisted_bracket(C, e1, e2) + d_operator(bilinear_form(e1, e2).scale(HALF))
    expanded = Section(
        vf_bracket(e1.v, e2.v),
        lie_derivative_form(e1.v, e2.alpha)
        - interior_product(e2.v, exterior_derivative(e1.alpha))
        + _twist_term(C, e1.v, e2.v),
    )
    if via_bracket != expanded:
        raise InconsistencyError(f"Dorfman routes disagree: {via_bracket} vs {expanded}")
    return expanded


def jacobiator_T(C: CourantStructure, e1: Section, e2: Section, e3: Section) -> Polynomial:
    br = partial(twisted_bracket, C)
    total = bilinear_form(br(e1, e2), e3) + bilinear_form(br(e3, e1), e2) + bilinear_form(br(e2, e3), e1)
    return total.scale(mpq(1, 6))


def random_section(n: int, rng, s: Settings) -> Section:
    return Section(
        random_vector_field(n, rng, s.max_degree, s.coeff_bound, s.max_terms),
        random_form(n, 1, rng, s.max_degree, s.coeff_bound, s.max_terms),
    )


def _sections(C, rng, s, k):
    return [random_section(C.nvars, rng, s) for _ in range(k)]


def _function(C, rng, s):
    return random_polynomial(C.nvars, s.max_degree, s.coeff_bound, rng, s.max_terms)


# -- skew-bracket axioms ------------------------------------------------------


def _ax1_jacobi(C, s, rng):
    e1, e2, e3 = _sections(C, rng, s, 3)
    br = partial(twisted_bracket, C)
    res = br(e1, br(e2, e3)) - br(br(e1, e2), e3) - br(e2, br(e1, e3)) + d_operator(jacobiator_T(C, e1, e2, e3))
    return mismatch(res, e1=e1, e2=e2, e3=e3)


def _ax2_anchor(C, s, rng):
    e1, e2 = _sections(C, rng, s, 2)
    return mismatch(twisted_bracket(C, e1, e2).v - vf_bracket(e1.v, e2.v), e1=e1, e2=e2)


def _ax3_leibniz(C, s, rng):
    e1, e2 = _sections(C, rng, s, 2)
    f = _function(C, rng, s)
    rhs = (
        twisted_bracket(C, e1, e2) * f
        + e2 * e1.v(f)
        - d_operator(f) * bilinear_form(e1, e2).scale(HALF)
    )
    return mismatch(twisted_bracket(C, e1, e2 * f) - rhs, e1=e1, e2=e2, f=f)


def _ax4_isotropic_d(C, s, rng):
    f, g = _function(C, rng, s), _function(C, rng, s)
    return mismatch(bilinear_form(d_operator(f), d_operator(g)), f=f, g=g)


def _ax5_metric(C, s, rng):
    e1, e2, e3 = _sections(C, rng, s, 3)
    br = partial(twisted_bracket, C)
    h12 = br(e1, e2) + d_operator(bilinear_form(e1, e2).scale(HALF))
    h13 = br(e1, e3) + d_operator(bilinear_form(e1, e3).scale(HALF))
    res = e1.v(bilinear_form(e2, e3)) - bilinear_form(h12, e3) - bilinear_form(e2, h13)
    return mismatch(res, e1=e1, e2=e2, e3=e3)


def _skew(C, s, rng):
    e1, e2 = _sections(C, rng, s, 2)
    return mismatch(twisted_bracket(C, e1, e2) + twisted_bracket(C, e2, e1), e1=e1, e2=e2)


def _d_represents_anchor(C, s, rng):
    (e,) = _sections(C, rng, s, 1)
    f = _function(C, rng, s)
    return mismatch(bilinear_form(d_operator(f), e) - e.v(f), e=e, f=f)


def _exact_sequence(C, s, rng):
    (e,) = _sections(C, rng, s, 1)
    a = random_form(C.nvars, 1, rng, s.max_degree, s.coeff_bound, s.max_terms)
    res = bilinear_form(rho_star(a), e) - _fn(interior_product(anchor(e), a))
    if not anchor(rho_star(a)).is_zero():
        return f"anchor of rho*({a}) is nonzero"
    return mismatch(res, e=e, alpha=a)


DEF21 = [
    ("bracket_jacobi_anomaly", "[[e1,[[e2,e3]]]] - [[[[e1,e2]],e3]] - [[e2,[[e1,e3]]]] = -D T(e1,e2,e3)", _ax1_jacobi),
    ("anchor_homomorphism", "rho[[e1,e2]] = [rho e1, rho e2]", _ax2_anchor),
    ("bracket_leibniz", "[[e1, f e2]] = f[[e1,e2]] + rho(e1)(f) e2 - 1/2 <e1,e2> Df", _ax3_leibniz),
    ("d_isotropic", "<Df, Dg> = 0", _ax4_isotropic_d),
    (
        "metric_compatibility",
        "rho(e1)<e2,e3> = <[[e1,e2]] + 1/2 D<e1,e2>, e3> + <e2, [[e1,e3]] + 1/2 D<e1,e3>>",
        _ax5_metric,
    ),
    ("bracket_skew", "[[e1,e2]] = -[[e2,e1]]", _skew),
    ("d_represents_anchor", "<Df, e> = rho(e) f", _d_represents_anchor),
    ("exact_sequence", "rho(rho* a) = 0 and <rho* a, e> = a(rho e)", _exact_sequence),
]


def verify_def21_axioms(
    C: CourantStructure, settings: Settings, suite: str = "courant_def21", only: Sequence[str] | None = None,
    expect_failure: Sequence[str] = (),
) -> list[IdentityResult]:
    """Check the skew-bracket Courant axioms on random polynomial sections.

    Never raises on a mathematical failure; failing trials are counted and
    the first counterexample is printed into the result.
    """
    return [
        run_identity(name, anchor_text, partial(fn, C, settings), settings, suite, expect_failure=name in expect_failure)
        for name, anchor_text, fn in DEF21
        if only is None or name in only
    ]


# -- Dorfman axioms -----------------------------------------------------------


def _dax1(C, s, rng):
    e1, e2, e3 = _sections(C, rng, s, 3)
    o = partial(dorfman, C)
    res = o(e1, o(e2, e3)) - o(o(e1, e2), e3) - o(e2, o(e1, e3))
    return mismatch(res, e1=e1, e2=e2, e3=e3)


def _dax2(C, s, rng):
    e1, e2 = _sections(C, rng, s, 2)
    return mismatch(dorfman(C, e1, e2).v - vf_bracket(e1.v, e2.v), e1=e1, e2=e2)


def _dax3(C, s, rng):
    e1, e2 = _sections(C, rng, s, 2)
    f = _function(C, rng, s)
    res = dorfman(C, e1, e2 * f) - dorfman(C, e1, e2) * f - e2 * e1.v(f)
    return mismatch(res, e1=e1, e2=e2, f=f)


def _dax4(C, s, rng):
    (e,) = _sections(C, rng, s, 1)
    return mismatch(dorfman(C, e, e) - d_operator(bilinear_form(e, e).scale(HALF)), e=e)


def _dax5(C, s, rng):
    e1, e2, e3 = _sections(C, rng, s, 3)
    res = e1.v(bilinear_form(e2, e3)) - bilinear_form(dorfman(C, e1, e2), e3) - bilinear_form(e2, dorfman(C, e1, e3))
    return mismatch(res, e1=e1, e2=e2, e3=e3)


def _dorfman_relation(C, s, rng):
    e1, e2 = _sections(C, rng, s, 2)
    res = dorfman(C, e1, e2) - twisted_bracket(C, e1, e2) - d_operator(bilinear_form(e1, e2).scale(HALF))
    return mismatch(res, e1=e1, e2=e2)


DEF22 = [
    ("dorfman_leibniz_jacobi", "e1 o (e2 o e3) = (e1 o e2) o e3 + e2 o (e1 o e3)", _dax1),
    ("dorfman_anchor", "rho(e1 o e2) = [rho e1, rho e2]", _dax2),
    ("dorfman_leibniz_function", "e1 o (f e2) = f (e1 o e2) + rho(e1)(f) e2", _dax3),
    ("dorfman_square", "e o e = 1/2 D<e,e>", _dax4),
    ("dorfman_metric", "rho(e1)<e2,e3> = <e1 o e2, e3> + <e2, e1 o e3>", _dax5),
    ("dorfman_vs_bracket", "x o y - [[x,y]] - 1/2 D<x,y> = 0", _dorfman_relation),
]


def verify_def22_axioms(C: CourantStructure, settings: Settings, suite: str = "courant_def22") -> list[IdentityResult]:
    return [
        run_identity(name, anchor_text, partial(fn, C, settings), settings, suite)
        for name, anchor_text, fn in DEF22
    ]


# -- connections and curvature ------------------------------------------------


@dataclass(frozen=True)
class Connection:
    """Splitting ``A(v) = (v, i_v theta)``, a 2-form shift of the zero splitting."""

    theta: DifferentialForm

    def __post_init__(self):
        if self.theta.degree != 2:
            raise ValueError("connection shift must be a 2-form")

    @classmethod
    def zero(cls, n: int) -> "Connection":
        return cls(DifferentialForm.zero(n, 2))

    def shifted(self, theta: DifferentialForm) -> "Connection":
        return Connection(self.theta + theta)


def connection_apply(A: Connection, v: VectorField) -> Section:
    return Section(v, interior_product(v, A.theta))


def curvature_three_form(
    C: CourantStructure, A: Connection, sample_vfs: Sequence[VectorField] = ()
) -> DifferentialForm:
    """Read off ``omega'(v1,v2,v3) = <[[A v1, A v2]], A v3>`` on the coordinate frame.

    For every pair of ``sample_vfs`` the curvature tensor
    ``F(v1,v2) = [[A v1, A v2]] - A[v1,v2]`` is compared with
    ``rho*(omega'(v1,v2,.))``; disagreement raises ``InconsistencyError``.
    """
    n = C.nvars
    frame = [connection_apply(A, VectorField.coordinate(n, i)) for i in range(1, n + 1)]
    comps = {}
    brackets = {}
    for i, j in combinations(range(n), 2):
        brackets[(i, j)] = twisted_bracket(C, frame[i], frame[j])
    for i, j, k in combinations(range(n), 3):
        comps[(i + 1, j + 1, k + 1)] = bilinear_form(brackets[(i, j)], frame[k])
    omega = DifferentialForm(n, 3, comps)
    for v1, v2 in combinations(sample_vfs, 2):
        F = twisted_bracket(C, connection_apply(A, v1), connection_apply(A, v2)) - connection_apply(
            A, vf_bracket(v1, v2)
        )
        expected = rho_star(interior_product(v2, interior_product(v1, omega)))
        if F != expected:
            raise InconsistencyError(f"curvature tensor {F} differs from rho*(omega'(v1,v2,.)) = {expected}")
    return omega


def _curv_zero_splitting(C, s, rng):
    vfs = [random_vector_field(C.nvars, rng, s.max_degree, s.coeff_bound, s.max_terms) for _ in range(3)]
    return mismatch(curvature_three_form(C, Connection.zero(C.nvars), vfs) - C.twist, sample=vfs[0])


def _curv_shift(C, s, rng):
    theta = random_form(C.nvars, 2, rng, s.max_degree, s.coeff_bound, s.max_terms)
    vfs = [random_vector_field(C.nvars, rng, s.max_degree, s.coeff_bound, s.max_terms) for _ in range(2)]
    base = curvature_three_form(C, Connection.zero(C.nvars))
    shifted = curvature_three_form(C, Connection(theta), vfs)
    return mismatch(shifted - base - exterior_derivative(theta), theta=theta)


def _curv_closed(C, s, rng):
    theta = random_form(C.nvars, 2, rng, s.max_degree, s.coeff_bound, s.max_terms)
    w = curvature_three_form(C, Connection(theta))
    return mismatch(exterior_derivative(w), theta=theta, curvature=w)


def _connection_isotropic(C, s, rng):
    theta = random_form(C.nvars, 2, rng, s.max_degree, s.coeff_bound, s.max_terms)
    v1, v2 = (random_vector_field(C.nvars, rng, s.max_degree, s.coeff_bound, s.max_terms) for _ in range(2))
    A = Connection(theta)
    return mismatch(bilinear_form(connection_apply(A, v1), connection_apply(A, v2)), theta=theta)


def verify_curvature(C: CourantStructure, settings: Settings, suite: str = "curvature") -> list[IdentityResult]:
    out = [
        single(
            "zero_splitting_curvature_is_twist",
            "<[[A d_i, A d_j]], A d_k> = omega_ijk for A(v) = (v, 0)",
            mismatch(curvature_three_form(C, Connection.zero(C.nvars)) - C.twist, omega=C.twist),
        )
    ]
    for name, anchor_text, fn in [
        ("zero_splitting_tensor_check", "F(v1,v2) = rho* omega(v1,v2,.) on random fields", _curv_zero_splitting),
        ("curvature_shift", "curv(A + theta) - curv(A) = d theta", _curv_shift),
        ("curvature_closed", "d curv(A + theta) = 0", _curv_closed),
        ("connection_isotropic", "<A v1, A v2> = 0", _connection_isotropic),
    ]:
        out.append(run_identity(name, anchor_text, partial(fn, C, settings), settings, suite))
    return out


# -- symmetries -----------------------------------------------------------------


def gauge_exp_b(B: DifferentialForm, e: Section) -> Section:
    """``exp B (v, alpha) = (v, alpha + i_v B)``."""
    return Section(e.v, e.alpha + interior_product(e.v, B))


def _random_two_form(n, rng, s):
    return random_form(n, 2, rng, s.max_degree, s.coeff_bound, s.max_terms)


def _gauge_relation(omega, B, s, rng):
    n = omega.nvars
    B = B if B is not None else _random_two_form(n, rng, s)
    e1, e2 = random_section(n, rng, s), random_section(n, rng, s)
    C = CourantStructure(n, omega, validate=False)
    C_shift = CourantStructure(n, omega + exterior_derivative(B), validate=False)
    lhs = twisted_bracket(C, gauge_exp_b(B, e1), gauge_exp_b(B, e2))
    rhs = gauge_exp_b(B, twisted_bracket(C_shift, e1, e2))
    return mismatch(lhs - rhs, B=B, e1=e1, e2=e2)


def _gauge_preserves_bracket(omega, B, s, rng):
    n = omega.nvars
    e1, e2 = random_section(n, rng, s), random_section(n, rng, s)
    C = CourantStructure(n, omega, validate=False)
    lhs = twisted_bracket(C, gauge_exp_b(B, e1), gauge_exp_b(B, e2))
    rhs = gauge_exp_b(B, twisted_bracket(C, e1, e2))
    return mismatch(lhs - rhs, B=B, dB=exterior_derivative(B), e1=e1, e2=e2)


def _gauge_preserves_pairing(omega, B, s, rng):
    n = omega.nvars
    B = B if B is not None else _random_two_form(n, rng, s)
    e1, e2 = random_section(n, rng, s), random_section(n, rng, s)
    res = bilinear_form(gauge_exp_b(B, e1), gauge_exp_b(B, e2)) - bilinear_form(e1, e2)
    return mismatch(res, B=B, e1=e1, e2=e2)


def gauge_twist_relation(
    omega: DifferentialForm,
    B: Optional[DifferentialForm],
    settings: Settings,
    suite: str = "symmetry",
    label: str = "",
) -> list[IdentityResult]:
    """Check ``[[exp B e1, exp B e2]]_omega = exp B [[e1,e2]]_{omega + dB}``.

    ``B=None`` draws a fresh random 2-form per trial.  For a fixed ``B`` the
    report also checks bracket preservation, which is expected to fail
    exactly when ``dB != 0``.
    """
    tag = f"[{label}]" if label else ""
    out = [
        run_identity(
            f"gauge_twist_relation{tag}",
            "[[exp B e1, exp B e2]]_omega = exp B [[e1,e2]]_(omega+dB)",
            partial(_gauge_relation, omega, B, settings),
            settings,
            suite,
        ),
        run_identity(
            f"gauge_preserves_pairing{tag}",
            "<exp B e1, exp B e2> = <e1,e2>",
            partial(_gauge_preserves_pairing, omega, B, settings),
            settings,
            suite,
        ),
    ]
    if B is not None:
        closed = exterior_derivative(B).is_zero()
        out.append(
            run_identity(
                f"gauge_preserves_bracket{tag}",
                "exp B preserves [[.,.]]_omega iff dB = 0",
                partial(_gauge_preserves_bracket, omega, B, settings),
                settings,
                suite,
                expect_failure=not closed,
            )
        )
    return out


def affine_transport(phi: AffineMap, e: Section) -> Section:
    """``Phi(v, alpha) = (phi_* v, (phi^*)^{-1} alpha)``."""
    return Section(pushforward_vf(phi, e.v), pullback_form(phi.inverse(), e.alpha))


def _automorphism_map(phi, B, e):
    return affine_transport(phi, gauge_exp_b(B, e))


def _pullback_fn(phi: AffineMap, f: Polynomial) -> Polynomial:
    return f.compose(phi.coordinate_polys())


def _auto_pairing(omega, phi, B, s, rng):
    n = omega.nvars
    e1, e2 = random_section(n, rng, s), random_section(n, rng, s)
    F1, F2 = _automorphism_map(phi, B, e1), _automorphism_map(phi, B, e2)
    return mismatch(_pullback_fn(phi, bilinear_form(F1, F2)) - bilinear_form(e1, e2), e1=e1, e2=e2)


def _auto_bracket(omega, phi, B, s, rng):
    n = omega.nvars
    C = CourantStructure(n, omega, validate=False)
    e1, e2 = random_section(n, rng, s), random_section(n, rng, s)
    F = partial(_automorphism_map, phi, B)
    res = F(twisted_bracket(C, e1, e2)) - twisted_bracket(C, F(e1), F(e2))
    return mismatch(res, e1=e1, e2=e2)


def _auto_anchor(omega, phi, B, s, rng):
    (e,) = [random_section(omega.nvars, rng, s)]
    return mismatch(anchor(_automorphism_map(phi, B, e)) - pushforward_vf(phi, anchor(e)), e=e)


@dataclass(frozen=True)
class AutomorphismVerdict:
    conditions: tuple[IdentityResult, ...]
    criterion_residual: DifferentialForm  # omega - phi^* omega - dB

    @property
    def is_automorphism(self) -> bool:
        return all(c.failures == 0 for c in self.conditions)

    @property
    def criterion_holds(self) -> bool:
        return self.criterion_residual.is_zero()

    @property
    def agree(self) -> bool:
        return self.is_automorphism == self.criterion_holds

    def summary(self) -> str:
        failing = [c for c in self.conditions if c.failures]
        parts = [
            f"conditions say automorphism={self.is_automorphism}",
            f"omega - phi*omega - dB = {self.criterion_residual}",
        ]
        if failing:
            parts.append(f"first failing condition {failing[0].name}: {failing[0].counterexample}")
        return "; ".join(parts)


def check_automorphism(
    omega: DifferentialForm,
    phi: AffineMap,
    B: DifferentialForm,
    settings: Settings,
    suite: str = "symmetry",
    label: str = "",
) -> AutomorphismVerdict:
    """Test ``F = Phi exp B`` against the three automorphism conditions on random
    sections, and independently evaluate ``omega - phi^* omega - dB``."""
    tag = f"[{label}]" if label else ""
    conds = tuple(
        run_identity(name + tag, text, partial(fn, omega, phi, B, settings), settings, suite)
        for name, text, fn in [
            ("auto_pairing", "phi^*<F e1, F e2> = <e1, e2>", _auto_pairing),
            ("auto_bracket", "F[[e1,e2]] = [[F e1, F e2]]", _auto_bracket),
            ("auto_anchor", "rho(F e) = phi_* rho(e)", _auto_anchor),
        ]
    )
    residual = omega - pullback_form(phi, omega) - exterior_derivative(B)
    return AutomorphismVerdict(conds, residual)


@dataclass(frozen=True)
class Derivation:
    """Infinitesimal symmetry ``(u, B)``; valid for ``omega`` iff ``L_u omega = dB``."""

    u: VectorField
    B: DifferentialForm

    def residual(self, omega: DifferentialForm) -> DifferentialForm:
        return lie_derivative_form(self.u, omega) - exterior_derivative(self.B)

    def is_valid(self, omega: DifferentialForm) -> bool:
        return self.residual(omega).is_zero()

    @classmethod
    def checked(cls, omega: DifferentialForm, u: VectorField, B: DifferentialForm) -> "Derivation":
        d = cls(u, B)
        res = d.residual(omega)
        if not res.is_zero():
            raise ValueError(f"L_u omega - dB = {res} is nonzero; (u, B) is not a derivation")
        return d


def derivation_action(Dv: Derivation, e: Section) -> Section:
    """``(u,B).(v,alpha) = ([u,v], L_u alpha + i_v B)``."""
    return Section(vf_bracket(Dv.u, e.v), lie_derivative_form(Dv.u, e.alpha) + interior_product(e.v, Dv.B))


def adjoint_derivation(C: CourantStructure, s: Section) -> Derivation:
    """``(u, -d beta + i_u omega)`` for ``s = (u, beta)``."""
    B = -exterior_derivative(s.alpha)
    if not C.twist.is_zero():
        B = B + interior_product(s.v, C.twist)
    return Derivation(s.v, B)


def adjoint_action(C: CourantStructure, s: Section, e: Section) -> Section:
    out = derivation_action(adjoint_derivation(C, s), e)
    check = dorfman(C, s, e)
    if out != check:
        raise InconsistencyError(f"ad_s(e) = {out} but s o e = {check}")
    return out


@dataclass(frozen=True)
class SymmetryVerdict:
    is_symmetry: bool
    B: DifferentialForm
    hamiltonian_field: Optional[VectorField] = None

    def __str__(self):
        if self.is_symmetry:
            return f"symmetry section; -beta has Hamiltonian field {self.hamiltonian_field}"
        return f"not a symmetry section; B = {self.B}"


def is_plectic_symmetry_section(P: PlecticStructure, s: Section) -> SymmetryVerdict:
    """Is ``ad_s`` the pair ``(u, 0)``, i.e. ``s = (v_a, -a)`` for a Hamiltonian ``a``?

    When the 2-form ``B = -d beta + i_u omega`` vanishes, ``-beta`` is solved
    for independently and its Hamiltonian field must equal ``u``.
    """
    C = CourantStructure(P.nvars, P.omega)
    B = adjoint_derivation(C, s).B
    if not B.is_zero():
        return SymmetryVerdict(False, B)
    v = hamiltonian_vector_field(P, -s.alpha)
    if v != s.v:
        raise InconsistencyError(f"B = 0 but Hamiltonian field of -beta is {v}, not u = {s.v}")
    return SymmetryVerdict(True, B, v)


# -- symmetry suites ----------------------------------------------------------


def _transport_relation(omega, s, rng):
    n = omega.nvars
    from .exterior import random_affine_map

    phi = random_affine_map(n, rng, 1)
    e1, e2 = random_section(n, rng, s), random_section(n, rng, s)
    C = CourantStructure(n, omega, validate=False)
    C_pull = CourantStructure(n, pullback_form(phi, omega), validate=False)
    lhs = twisted_bracket(C, affine_transport(phi, e1), affine_transport(phi, e2))
    rhs = affine_transport(phi, twisted_bracket(C_pull, e1, e2))
    return mismatch(lhs - rhs, phi=phi, e1=e1, e2=e2)


def _adjoint_is_dorfman(C, s, rng):
    a, e = random_section(C.nvars, rng, s), random_section(C.nvars, rng, s)
    try:
        adjoint_action(C, a, e)
    except InconsistencyError as exc:
        return str(exc)
    return None


def _adjoint_is_derivation(C, s, rng):
    a = random_section(C.nvars, rng, s)
    d = adjoint_derivation(C, a)
    return mismatch(d.residual(C.twist), s=a)


def _derivation_leibniz(C, s, rng):
    # derivation (u, B) built from a random u with B = i_u omega + closed part
    n = C.nvars
    u = random_vector_field(n, rng, s.max_degree, s.coeff_bound, s.max_terms)
    closed = exterior_derivative(random_form(n, 1, rng, s.max_degree, s.coeff_bound, s.max_terms))
    B = interior_product(u, C.twist) + closed if not C.twist.is_zero() else closed
    Dv = Derivation.checked(C.twist, u, B)
    e1, e2 = random_section(n, rng, s), random_section(n, rng, s)
    o = partial(dorfman, C)
    res = derivation_action(Dv, o(e1, e2)) - o(derivation_action(Dv, e1), e2) - o(e1, derivation_action(Dv, e2))
    return mismatch(res, u=u, B=B, e1=e1, e2=e2)


def _spanning_sections(n: int) -> list[Section]:
    out = []
    zero_v, zero_a = VectorField.zero(n), DifferentialForm.zero(n, 1)
    for i in range(1, n + 1):
        out.append(Section(VectorField.coordinate(n, i), zero_a))
        out.append(Section(zero_v, DifferentialForm.dx(n, i)))
        for j in range(1, n + 1):
            xj = Polynomial.var(n, j)
            out.append(Section(VectorField.coordinate(n, i, xj), zero_a))
            out.append(Section(zero_v, DifferentialForm.dx(n, i, coeff=xj)))
    return out


def brute_force_symmetry(C: CourantStructure, s: Section) -> bool:
    """``ad_s(e) = (L_u v, L_u alpha)`` on every section of a spanning set."""
    for e in _spanning_sections(C.nvars):
        target = Section(vf_bracket(s.v, e.v), lie_derivative_form(s.v, e.alpha))
        if dorfman(C, s, e) != target:
            return False
    return True


def _image_sections_accepted(P, s, rng):
    a = random_hamiltonian_pair(P, rng, s.max_degree, s.coeff_bound, s.max_terms)
    sec = Section(a.v, -a.alpha)
    verdict = is_plectic_symmetry_section(P, sec)
    C = CourantStructure(P.nvars, P.omega)
    if not verdict.is_symmetry:
        return f"phi0({a.alpha}) rejected with B = {verdict.B}"
    if not brute_force_symmetry(C, sec):
        return f"phi0({a.alpha}) accepted but spanning-set criterion fails"
    return None


def non_image_section(P: PlecticStructure, rng, s: Settings) -> Section:
    """A section with nonzero adjoint 2-form: perturb ``(v_a, -a)`` so that ``B != 0``."""
    n = P.nvars
    a = random_hamiltonian_pair(P, rng, s.max_degree, s.coeff_bound, s.max_terms)
    while True:
        if rng.integers(0, 2):
            w = VectorField([Polynomial.constant(n, int(c)) for c in rng.integers(-2, 3, size=n)])
            sec = Section(a.v + w, -a.alpha)
        else:
            eta = random_form(n, 1, rng, max(s.max_degree, 1), s.coeff_bound, s.max_terms)
            sec = Section(a.v, -a.alpha + eta)
        if not adjoint_derivation(CourantStructure(n, P.omega), sec).B.is_zero():
            return sec


def _non_image_rejected(P, s, rng):
    sec = non_image_section(P, rng, s)
    verdict = is_plectic_symmetry_section(P, sec)
    C = CourantStructure(P.nvars, P.omega)
    if verdict.is_symmetry:
        return f"{sec} accepted although its adjoint 2-form is nonzero"
    if brute_force_symmetry(C, sec):
        return f"{sec} rejected but spanning-set criterion holds"
    try:
        v = hamiltonian_vector_field(P, -sec.alpha)
    except NotHamiltonianError:
        return None
    if v == sec.v:
        return f"{sec} rejected although -beta has Hamiltonian field u"
    return None


def automorphism_fixtures(n: int = 3) -> list[tuple[str, AffineMap, DifferentialForm, DifferentialForm]]:
    """Affine fixtures ``(label, phi, B, omega)`` on R^3 with the volume form.

    Includes maps with determinant != 1 compensated by ``B = (1 - det) P(omega)``
    and uncompensated ones (e.g. the determinant -1 coordinate swap).
    """
    from itertools import permutations

    from .exterior import dx

    vol = dx(n, 1, 2, 3)
    zeroB = DifferentialForm.zero(n, 2)
    x = [Polynomial.var(n, i) for i in range(1, n + 1)]
    closedB = exterior_derivative(DifferentialForm.dx(n, 1, coeff=x[1] * x[2]))
    out = []
    for perm in permutations(range(1, n + 1)):
        phi = AffineMap.permutation(perm)
        label = "perm" + "".join(map(str, perm))
        out.append((label, phi, zeroB, vol))
        if phi.determinant() != 1:
            out.append((label + "+compensated", phi, poincare_primitive(vol) * (1 - phi.determinant()), vol))
    out.append(("identity+closedB", AffineMap.identity(n), closedB, vol))
    out.append(("identity+nonclosedB", AffineMap.identity(n), DifferentialForm.dx(n, 2, 3, coeff=x[0]), vol))
    out.append(("translation", AffineMap(AffineMap.identity(n).matrix, [1, -2, mpq(1, 2)]), zeroB, vol))
    out.append(("shear", AffineMap([[1, 2, 0], [0, 1, -1], [0, 0, 1]], [0, 1, 0]), zeroB, vol))
    out.append(("scale2", AffineMap([[2, 0, 0], [0, 1, 0], [0, 0, 1]], [0, 0, 0]), zeroB, vol))
    scale = AffineMap([[2, 0, 0], [0, 1, 0], [0, 0, 1]], [0, 0, 0])
    out.append(("scale2+compensated", scale, poincare_primitive(vol) * (1 - scale.determinant()), vol))
    out.append(("unimodular_scale", AffineMap([[2, 0, 0], [0, mpq(1, 2), 0], [0, 0, 1]], [3, 0, 0]), zeroB, vol))
    out.append(("rotation90", AffineMap([[0, -1, 0], [1, 0, 0], [0, 0, 1]], [0, 0, 1]), zeroB, vol))
    reflect = AffineMap([[-1, 0, 0], [0, 1, 0], [0, 0, 1]], [0, 0, 0])
    out.append(("reflection", reflect, zeroB, vol))
    out.append(("reflection+compensated", reflect, poincare_primitive(vol) * 2, vol))
    out.append(("scale_half", AffineMap([[mpq(1, 2), 0, 0], [0, 1, 0], [0, 0, 1]], [0, 0, 0]), zeroB, vol))
    out.append(("standard_swap", AffineMap.permutation((2, 1, 3)), zeroB, DifferentialForm.zero(n, 3)))
    return out


def verify_symmetry(C: CourantStructure, P: Optional[PlecticStructure], settings: Settings, suite: str = "symmetry"):
    n = C.nvars
    out = gauge_twist_relation(C.twist, None, settings, suite, label="random B")
    x = [Polynomial.var(n, i) for i in range(1, n + 1)]
    closedB = exterior_derivative(DifferentialForm.dx(n, 1, coeff=x[0] * x[-1]))
    out += gauge_twist_relation(C.twist, closedB, settings, suite, label="closed B")
    out.append(
        run_identity(
            "transport_relation",
            "[[Phi e1, Phi e2]]_omega = Phi [[e1,e2]]_(phi* omega)",
            partial(_transport_relation, C.twist, settings),
            settings,
            suite,
        )
    )
    for name, text, fn in [
        ("adjoint_is_dorfman", "ad_s(e) = s o_omega e", _adjoint_is_dorfman),
        ("adjoint_is_derivation", "L_u omega = d(-d beta + i_u omega)", _adjoint_is_derivation),
        ("derivation_leibniz", "(u,B).(e1 o e2) = ((u,B).e1) o e2 + e1 o ((u,B).e2)", _derivation_leibniz),
    ]:
        out.append(run_identity(name, text, partial(fn, C, settings), settings, suite))
    if n == 3:
        # each fixture runs three randomized conditions; a smaller sample keeps the suite fast
        fixture_settings = replace(settings, trials=min(settings.trials, FIXTURE_TRIALS))
        for label, phi, B, omega in automorphism_fixtures(n):
            v = check_automorphism(omega, phi, B, fixture_settings, suite, label)
            out.append(
                single(
                    f"automorphism_criterion_agrees[{label}]",
                    "F = Phi exp B automorphism iff omega - phi* omega = dB",
                    None if v.agree else v.summary(),
                )
            )
    if P is not None and P.constant_coefficients:
        out.append(
            run_identity(
                "hamiltonian_sections_are_symmetries",
                "ad_(v_a,-a)(v,alpha) = (L_u v, L_u alpha)",
                partial(_image_sections_accepted, P, settings),
                settings,
                suite,
            )
        )
        out.append(
            run_identity(
                "non_image_sections_rejected",
                "B = -d beta + i_u omega != 0 => not in image of phi0",
                partial(_non_image_rejected, P, settings),
                settings,
                suite,
            )
        )
    return out


def verify_symmetry_negative(
    C: CourantStructure, settings: Settings, suite: str = "symmetry_negative", B: Optional[DifferentialForm] = None
):
    """Fixtures that must fail, each recorded as an expected failure with its witness.

    ``B`` defaults to ``x1 dx2^dx3``; the gauge relation must still hold for
    it while bracket preservation fails.
    """
    n = C.nvars
    x = [Polynomial.var(n, i) for i in range(1, n + 1)]
    if B is None:
        B = DifferentialForm.dx(n, 2, 3, coeff=x[0]) if n >= 3 else DifferentialForm.dx(n, 1, 2, coeff=x[0])
    elif exterior_derivative(B).is_zero():
        raise ValueError("the negative gauge fixture needs a 2-form with dB != 0")
    out = gauge_twist_relation(C.twist, B, settings, suite, label="non-closed B")
    if n == 3 and not C.twist.is_zero():
        swap = AffineMap.permutation((2, 1, 3))
        fixture_settings = replace(settings, trials=min(settings.trials, FIXTURE_TRIALS))
        v = check_automorphism(C.twist, swap, DifferentialForm.zero(n, 2), fixture_settings, suite, "swap")
        out.append(
            single(
                "swap_is_automorphism",
                "coordinate swap (det -1) preserves [[.,.]]_omega",
                None if v.is_automorphism else v.summary(),
                expect_failure=True,
            )
        )
        out.append(
            single(
                "swap_verdicts_agree",
                "automorphism conditions agree with omega - phi* omega = dB",
                None if v.agree else v.summary(),
            )
        )
    bad = DifferentialForm.dx(n, 1, 2, 3, coeff=x[-1]) if n >= 4 else None
    if bad is not None:
        out += verify_def21_axioms(
            CourantStructure(n, C.twist + bad, validate=False),
            settings,
            suite,
            only=("bracket_jacobi_anomaly",),
            expect_failure=("bracket_jacobi_anomaly",),
        )
    return out
