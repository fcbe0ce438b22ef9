"""2-plectic structures, Hamiltonian 1-forms and the semi-bracket.

A 3-form ``omega`` on R^n is 2-plectic when ``d omega = 0`` and
``i_v omega = 0`` forces ``v = 0``.  For constant ``omega`` the latter is the
rank condition on the ``C(n,2) x n`` contraction matrix
``M[(j,k), i] = omega(d_i, d_j, d_k)``; a Hamiltonian vector field is then an
exact linear solve against that matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from itertools import combinations
from typing import Optional, Sequence

from gmpy2 import mpq

from . import linalg
from .exterior import (
    DifferentialForm,
    NotClosedError,
    VectorField,
    exterior_derivative,
    interior_product,
    lie_derivative_form,
    vf_bracket,
)
from .report import IdentityResult, Settings, mismatch, run_identity
from .ring import Polynomial, Rational, random_polynomial, rational

__all__ = [
    "PlecticStructure",
    "HamiltonianPair",
    "RankCertificate",
    "DegenerateError",
    "NotHamiltonianError",
    "InconsistencyError",
    "NotClosedError",
    "contraction_matrix",
    "check_two_plectic",
    "hamiltonian_vector_field",
    "hamiltonian_pair",
    "semi_bracket",
    "jacobiator_JL",
    "b_form",
    "random_hamiltonian_pair",
    "volume_form",
    "standard_r3",
    "standard_r6",
    "verify_plectic_identities",
    "random_constant_three_form",
    "verify_degeneracy",
]


class DegenerateError(ValueError):
    """``omega`` has a nonzero kernel vector somewhere."""

    def __init__(self, witness: VectorField, point=None, rank: int | None = None):
        where = "" if point is None else f" at point {tuple(str(p) for p in point)}"
        super().__init__(f"3-form is degenerate{where}: i_w omega = 0 for w = {witness}")
        self.witness = witness
        self.point = point
        self.rank = rank


class NotHamiltonianError(ValueError):
    """No vector field solves ``d alpha = -i_v omega``; ``residual`` is what is left."""

    def __init__(self, alpha: DifferentialForm, residual: DifferentialForm):
        super().__init__(f"{alpha} is not Hamiltonian; residual d(alpha) + i_v omega = {residual}")
        self.alpha = alpha
        self.residual = residual


class InconsistencyError(RuntimeError):
    """Two independent routes to the same quantity disagreed (a bug, not bad input)."""


@dataclass(frozen=True)
class RankCertificate:
    point: Optional[tuple[Rational, ...]]
    matrix: tuple[tuple[Rational, ...], ...]
    rank: int


@dataclass(frozen=True)
class HamiltonianPair:
    alpha: DifferentialForm
    v: VectorField

    def __add__(self, other: "HamiltonianPair") -> "HamiltonianPair":
        return HamiltonianPair(self.alpha + other.alpha, self.v + other.v)

    def __sub__(self, other: "HamiltonianPair") -> "HamiltonianPair":
        return HamiltonianPair(self.alpha - other.alpha, self.v - other.v)

    def __neg__(self):
        return HamiltonianPair(-self.alpha, -self.v)

    def is_zero(self) -> bool:
        return self.alpha.is_zero() and self.v.is_zero()

    def __str__(self):
        return f"<{self.alpha} | {self.v}>"


def contraction_matrix(omega: DifferentialForm) -> list[list[Rational]]:
    """Rows indexed by pairs j<k, columns by i: ``omega(d_i, d_j, d_k)``.

    ``omega`` must have constant coefficients (freeze it at a point first).
    """
    n = omega.nvars
    rows = []
    for j, k in combinations(range(1, n + 1), 2):
        rows.append([omega.component((i, j, k)).constant_term() for i in range(1, n + 1)])
    return rows


def _blocks(omega: DifferentialForm) -> tuple[tuple[int, ...], ...]:
    # connected components of coordinates that share an omega component
    parent = list(range(omega.nvars + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for idx in omega.comps:
        for i in idx[1:]:
            parent[find(i)] = find(idx[0])
    groups: dict[int, list[int]] = {}
    for i in range(1, omega.nvars + 1):
        groups.setdefault(find(i), []).append(i)
    return tuple(tuple(g) for g in sorted(groups.values()))


@dataclass(frozen=True)
class PlecticStructure:
    nvars: int
    omega: DifferentialForm
    constant_coefficients: bool
    certificates: tuple[RankCertificate, ...]
    blocks: tuple[tuple[int, ...], ...] = ()
    # pivot rows of the contraction matrix and the inverse of that n x n block
    _pivot_rows: tuple[int, ...] = field(default=(), repr=False, compare=False)
    _pivot_inverse: tuple[tuple[Rational, ...], ...] = field(default=(), repr=False, compare=False)

    @property
    def rank(self) -> int:
        return min(c.rank for c in self.certificates)

    def __str__(self):
        return f"(R^{self.nvars}, {self.omega})"


def _kernel_witness(matrix, n) -> VectorField:
    vec = linalg.nullspace(matrix, n)[0]
    return VectorField([Polynomial.constant(n, c) for c in vec])


def check_two_plectic(omega: DifferentialForm, sample_points: Sequence[Sequence] = ()) -> PlecticStructure:
    """Certify ``omega`` as 2-plectic.

    Closedness is checked exactly.  For constant ``omega`` nondegeneracy is an
    exact rank computation; otherwise it is certified pointwise at the origin
    plus ``sample_points``, which is evidence rather than proof.

    Raises ``NotClosedError`` (carrying ``d omega``) or ``DegenerateError``
    (carrying a kernel vector).
    """
    if omega.degree != 3:
        raise ValueError(f"expected a 3-form, got degree {omega.degree}")
    n = omega.nvars
    d_omega = exterior_derivative(omega)
    if not d_omega.is_zero():
        raise NotClosedError("3-form is not closed", d_omega)

    constant = omega.is_constant()
    certs = []
    if constant:
        m = contraction_matrix(omega)
        r = linalg.rank(m)
        if r < n:
            raise DegenerateError(_kernel_witness(m, n), rank=r)
        certs.append(RankCertificate(None, tuple(map(tuple, m)), r))
        rows = tuple(linalg.independent_rows(m))
        inv = linalg.inverse([m[i] for i in rows])
        return PlecticStructure(
            n, omega, True, tuple(certs), _blocks(omega), rows, tuple(map(tuple, inv))
        )

    points = [tuple(mpq(0) for _ in range(n))]
    for p in sample_points:
        p = tuple(rational(x) for x in p)
        if len(p) != n:
            raise ValueError(f"sample point {p} has wrong dimension")
        if p not in points:
            points.append(p)
    for p in points:
        m = contraction_matrix(omega.evaluate(p))
        r = linalg.rank(m)
        if r < n:
            raise DegenerateError(_kernel_witness(m, n), point=p, rank=r)
        certs.append(RankCertificate(p, tuple(map(tuple, m)), r))
    return PlecticStructure(n, omega, False, tuple(certs), _blocks(omega))


def hamiltonian_vector_field(P: PlecticStructure, alpha: DifferentialForm) -> VectorField:
    """The unique ``v`` with ``d alpha = -i_v omega``.

    Since the contraction matrix is constant, every coefficient polynomial of
    ``v`` is a fixed rational combination of the components of ``-d alpha``.
    The full equation is re-verified; failure raises ``NotHamiltonianError``.
    """
    if not P.constant_coefficients:
        raise ValueError("Hamiltonian solving needs a constant-coefficient 2-plectic form")
    if alpha.degree != 1 or alpha.nvars != P.nvars:
        raise ValueError("alpha must be a 1-form on the same space")
    n = P.nvars
    d_alpha = exterior_derivative(alpha)
    pairs = list(combinations(range(1, n + 1), 2))
    rhs = [-d_alpha.component(pairs[r]) for r in P._pivot_rows]
    comps = []
    for i in range(n):
        acc = Polynomial.zero(n)
        for c, b in zip(P._pivot_inverse[i], rhs):
            if c and b:
                acc = acc + b.scale(c)
        comps.append(acc)
    v = VectorField(comps)
    residual = d_alpha + interior_product(v, P.omega)
    if not residual.is_zero():
        raise NotHamiltonianError(alpha, residual)
    return v


def hamiltonian_pair(P: PlecticStructure, alpha: DifferentialForm) -> HamiltonianPair:
    return HamiltonianPair(alpha, hamiltonian_vector_field(P, alpha))


def is_valid_pair(P: PlecticStructure, a: HamiltonianPair) -> bool:
    return (exterior_derivative(a.alpha) + interior_product(a.v, P.omega)).is_zero()


def semi_bracket(P: PlecticStructure, a: HamiltonianPair, b: HamiltonianPair, resolve: bool = False) -> HamiltonianPair:
    """``{alpha, beta} = i_{v_beta} i_{v_alpha} omega`` paired with ``[v_alpha, v_beta]``.

    With ``resolve=True`` the vector field is also obtained by solving for the
    bracket form directly, and the two answers must agree.
    """
    form = interior_product(b.v, interior_product(a.v, P.omega))
    v = vf_bracket(a.v, b.v)
    if resolve:
        solved = hamiltonian_vector_field(P, form)
        if solved != v:
            raise InconsistencyError(f"bracket field {v} differs from re-solved field {solved}")
    return HamiltonianPair(form, v)


def jacobiator_JL(P: PlecticStructure, a: HamiltonianPair, b: HamiltonianPair, c: HamiltonianPair) -> Polynomial:
    """``i_{v_alpha} i_{v_beta} i_{v_gamma} omega`` (innermost contraction is gamma)."""
    return interior_product(a.v, interior_product(b.v, interior_product(c.v, P.omega))).as_function()


def b_form(a: HamiltonianPair, b: HamiltonianPair) -> Polynomial:
    """``(i_{v_alpha} beta - i_{v_beta} alpha) / 2``."""
    diff = interior_product(a.v, b.alpha) - interior_product(b.v, a.alpha)
    return diff.as_function().scale(mpq(1, 2))


def random_hamiltonian_pair(
    P: PlecticStructure,
    rng,
    max_degree: int = 3,
    coeff_bound: int = 3,
    max_terms: int = 3,
    max_tries: int = 25,
) -> HamiltonianPair:
    """Sample a 1-form whose components live block-by-block, then solve for v.

    For a direct sum of volume forms on coordinate blocks every such form is
    Hamiltonian.  Other structures fall back to rejection sampling.
    """
    if not P.constant_coefficients:
        raise ValueError("random Hamiltonian pairs need a constant-coefficient 2-plectic form")
    n = P.nvars
    for _ in range(max_tries):
        comps = {}
        for block in P.blocks:
            for i in block:
                comps[(i,)] = random_polynomial(n, max_degree, coeff_bound, rng, max_terms, variables=block)
        alpha = DifferentialForm(n, 1, comps)
        try:
            return hamiltonian_pair(P, alpha)
        except NotHamiltonianError:
            continue
    raise RuntimeError(f"no Hamiltonian 1-form found after {max_tries} draws; check the 2-plectic structure")


# -- shipped structures -------------------------------------------------------


def volume_form(nvars: int, block: Sequence[int] = (1, 2, 3)) -> DifferentialForm:
    return DifferentialForm.dx(nvars, *block)


def standard_r3() -> PlecticStructure:
    return check_two_plectic(volume_form(3))


def standard_r6() -> PlecticStructure:
    return check_two_plectic(volume_form(6, (1, 2, 3)) + volume_form(6, (4, 5, 6)))


# -- identity suite -----------------------------------------------------------


def _pairs(P, rng, s: Settings, k: int):
    return [random_hamiltonian_pair(P, rng, s.max_degree, s.coeff_bound, s.max_terms) for _ in range(k)]


def _bracket_is_hamiltonian(P, s, rng):
    a, b = _pairs(P, rng, s, 2)
    br = semi_bracket(P, a, b)
    res = exterior_derivative(br.alpha) + interior_product(vf_bracket(a.v, b.v), P.omega)
    return mismatch(res, alpha=a.alpha, beta=b.alpha)


def _bracket_skew(P, s, rng):
    a, b = _pairs(P, rng, s, 2)
    res = semi_bracket(P, a, b).alpha + semi_bracket(P, b, a).alpha
    return mismatch(res, alpha=a.alpha, beta=b.alpha)


def _bracket_jacobi(P, s, rng):
    a, b, c = _pairs(P, rng, s, 3)
    br = partial(semi_bracket, P)
    lhs = br(a, br(b, c)).alpha - br(br(a, b), c).alpha - br(b, br(a, c)).alpha
    res = lhs - exterior_derivative(DifferentialForm.function(jacobiator_JL(P, a, b, c)))
    return mismatch(res, alpha=a.alpha, beta=b.alpha, gamma=c.alpha)


def _lie_derivative_lemma(P, s, rng):
    a, b = _pairs(P, rng, s, 2)
    rhs = semi_bracket(P, a, b).alpha + exterior_derivative(interior_product(a.v, b.alpha))
    return mismatch(lie_derivative_form(a.v, b.alpha) - rhs, alpha=a.alpha, beta=b.alpha)


def _d(p: Polynomial) -> DifferentialForm:
    return exterior_derivative(DifferentialForm.function(p))


def _ip(v, form) -> Polynomial:
    return interior_product(v, form).as_function()


def _cyclic_lemma(P, s, rng):
    a, b, c = _pairs(P, rng, s, 3)
    lhs = (
        _ip(vf_bracket(a.v, b.v), c.alpha)
        + _ip(vf_bracket(b.v, c.v), a.alpha)
        + _ip(vf_bracket(c.v, a.v), b.alpha)
    )
    rhs = jacobiator_JL(P, a, b, c).scale(-3) + (
        _ip(a.v, _d(b_form(b, c))) + _ip(c.v, _d(b_form(a, b))) + _ip(b.v, _d(b_form(c, a)))
    ).scale(2)
    return mismatch(lhs - rhs, alpha=a.alpha, beta=b.alpha, gamma=c.alpha)


def _lie_difference_lemma(P, s, rng):
    a, b = _pairs(P, rng, s, 2)
    lhs = lie_derivative_form(b.v, a.alpha) - lie_derivative_form(a.v, b.alpha)
    rhs = (semi_bracket(P, a, b).alpha + _d(b_form(a, b))) * -2
    return mismatch(lhs - rhs, alpha=a.alpha, beta=b.alpha)


def _closed_shift_uniqueness(P, s, rng):
    (a,) = _pairs(P, rng, s, 1)
    p = random_polynomial(P.nvars, s.max_degree + 1, s.coeff_bound, rng, s.max_terms)
    v2 = hamiltonian_vector_field(P, a.alpha + _d(p))
    return mismatch(v2 - a.v, alpha=a.alpha, p=p)


def _resolved_bracket_field(P, s, rng):
    a, b = _pairs(P, rng, s, 2)
    try:
        semi_bracket(P, a, b, resolve=True)
    except (InconsistencyError, NotHamiltonianError) as exc:
        return str(exc)
    return None


PLECTIC_IDENTITIES = [
    ("bracket_is_hamiltonian", "d{a,b} = -i_[v_a,v_b] omega", _bracket_is_hamiltonian),
    ("bracket_skew", "{a,b} + {b,a} = 0", _bracket_skew),
    ("bracket_jacobi_up_to_exact", "{a,{b,c}} - {{a,b},c} - {b,{a,c}} = d J_L(a,b,c)", _bracket_jacobi),
    ("lie_derivative_of_hamiltonian", "L_{v_a} b = {a,b} + d i_{v_a} b", _lie_derivative_lemma),
    (
        "cyclic_bracket_contraction",
        "i_[v_a,v_b] c + cyc = -3 i_a i_b i_c omega + 2(i_a dB(b,c) + i_c dB(a,b) + i_b dB(c,a))",
        _cyclic_lemma,
    ),
    ("lie_derivative_difference", "L_{v_b} a - L_{v_a} b = -2({a,b} + dB(a,b))", _lie_difference_lemma),
    ("closed_shift_same_field", "v_{a + dp} = v_a", _closed_shift_uniqueness),
    ("bracket_field_resolves", "solve({a,b}) = [v_a, v_b]", _resolved_bracket_field),
]


def verify_plectic_identities(P: PlecticStructure, settings: Settings, suite: str = "plectic") -> list[IdentityResult]:
    return [
        run_identity(name, anchor, partial(fn, P, settings), settings, suite)
        for name, anchor, fn in PLECTIC_IDENTITIES
    ]


# -- degeneracy in dimension four ---------------------------------------------


def random_constant_three_form(nvars: int, rng, coeff_bound: int = 3) -> DifferentialForm:
    comps = {
        idx: Polynomial.constant(nvars, int(rng.integers(-coeff_bound, coeff_bound + 1)))
        for idx in combinations(range(1, nvars + 1), 3)
    }
    return DifferentialForm(nvars, 3, comps)


def _r4_degenerate(s: Settings, rng):
    omega = random_constant_three_form(4, rng, s.coeff_bound)
    try:
        P = check_two_plectic(omega)
    except DegenerateError as exc:
        w = exc.witness
        if w.is_zero():
            return f"zero kernel witness for {omega}"
        contracted = interior_product(w, omega)
        return mismatch(contracted, omega=omega, witness=w)
    return f"{omega} accepted with rank {P.rank}"


def _certificate(name: str, P_factory, expected_rank: int) -> IdentityResult:
    P = P_factory()
    cert = P.certificates[0]
    problems = []
    if cert.rank != expected_rank or linalg.rank(cert.matrix) != expected_rank:
        problems.append(f"rank {cert.rank}, expected {expected_rank}")
    if linalg.nullspace(cert.matrix, P.nvars):
        problems.append("contraction matrix has a kernel")
    return IdentityResult(
        name,
        f"rank of i_. omega on R^{P.nvars} = {expected_rank}",
        1,
        int(bool(problems)),
        "; ".join(problems) or None,
    )


def verify_degeneracy(settings: Settings, suite: str = "degeneracy_r4") -> list[IdentityResult]:
    """Every constant 3-form on R^4 has a kernel vector; the shipped forms do not."""
    return [
        run_identity(
            "constant_r4_forms_degenerate",
            "every constant 3-form on R^4 has w != 0 with i_w omega = 0",
            partial(_r4_degenerate, settings),
            settings,
            suite,
        ),
        _certificate("r3_volume_rank_certificate", standard_r3, 3),
        _certificate("r6_block_rank_certificate", standard_r6, 6),
    ]
