"""Semistrict Lie 2-algebras as two-term complexes ``L1 -> L0``.

Two instances exist: the Hamiltonian 1-forms of a 2-plectic structure over
the functions, and the sections of ``E_omega`` over the functions.  Elements
carry a grade; anything landing in grade 2 or higher is zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Any, Optional

from gmpy2 import mpq

from .courant import (
    CourantStructure,
    Section,
    bilinear_form,
    d_operator,
    jacobiator_T,
    random_section,
    twisted_bracket,
)
from .exterior import DifferentialForm, VectorField, exterior_derivative
from .plectic import (
    HamiltonianPair,
    PlecticStructure,
    b_form,
    is_valid_pair,
    jacobiator_JL,
    random_hamiltonian_pair,
    semi_bracket,
)
from .report import IdentityResult, Settings, mismatch, run_identity
from .ring import Polynomial, random_polynomial

__all__ = [
    "Lie2Element",
    "PlecticInstance",
    "CourantInstance",
    "EmbeddingHom",
    "l2_bracket",
    "l2_jacobiator",
    "coherence_residual",
    "check_bracket_chain_map",
    "check_jacobiator_identity",
    "hom_phi0",
    "hom_phi1",
    "hom_phi2",
    "check_hom_homotopy",
    "check_hom_coherence",
    "coherence_closed_form",
]

HALF = mpq(1, 2)


@dataclass(frozen=True)
class Lie2Element:
    grade: int
    payload: Any = None

    def __post_init__(self):
        if self.grade < 0:
            raise ValueError("negative grade")
        if self.grade >= 2 and self.payload is not None:
            raise ValueError("grade >= 2 elements are zero")

    def is_zero(self) -> bool:
        return self.grade >= 2 or self.payload.is_zero()

    def _combine(self, other: "Lie2Element", op) -> "Lie2Element":
        if self.grade >= 2 and other.grade >= 2:
            return TOP
        if self.grade != other.grade:
            raise ValueError(f"cannot add grade {self.grade} to grade {other.grade}")
        return Lie2Element(self.grade, op(self.payload, other.payload))

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return self if self.grade >= 2 else Lie2Element(self.grade, -self.payload)

    def __str__(self):
        return "0" if self.grade >= 2 else str(self.payload)


TOP = Lie2Element(2)


class _Instance:
    """Dispatch record: differential, grade-wise bracket, Jacobiator, samplers."""

    nvars: int

    def zero0(self):
        raise NotImplementedError

    def zero1(self) -> Lie2Element:
        return Lie2Element(1, Polynomial.zero(self.nvars))

    def differential(self, x: Lie2Element) -> Lie2Element:
        if x.grade != 1:
            raise ValueError(f"differential is only defined on grade 1 (got grade {x.grade})")
        return Lie2Element(0, self._d(x.payload))

    def bracket(self, x: Lie2Element, y: Lie2Element) -> Lie2Element:
        g = x.grade + y.grade
        if g >= 2:
            return TOP
        if g == 0:
            return Lie2Element(0, self._bracket00(x.payload, y.payload))
        if x.grade == 0:
            return Lie2Element(1, self._bracket01(x.payload, y.payload))
        return Lie2Element(1, -self._bracket01(y.payload, x.payload))

    def jacobiator(self, x: Lie2Element, y: Lie2Element, z: Lie2Element) -> Lie2Element:
        if x.grade + y.grade + z.grade > 0:
            return TOP
        return Lie2Element(1, self._jacobiator(x.payload, y.payload, z.payload))


class PlecticInstance(_Instance):
    """Hamiltonian pairs in grade 0, functions in grade 1; brackets involving
    a function vanish."""

    def __init__(self, P: PlecticStructure, resolve: bool = False):
        self.P = P
        self.nvars = P.nvars
        self.resolve = resolve

    def zero0(self) -> Lie2Element:
        n = self.nvars
        return Lie2Element(0, HamiltonianPair(DifferentialForm.zero(n, 1), VectorField.zero(n)))

    def _d(self, f: Polynomial) -> HamiltonianPair:
        return HamiltonianPair(exterior_derivative(DifferentialForm.function(f)), VectorField.zero(self.nvars))

    def _bracket00(self, a, b):
        return semi_bracket(self.P, a, b, resolve=self.resolve)

    def _bracket01(self, a, f):
        return Polynomial.zero(self.nvars)

    def _jacobiator(self, a, b, c):
        return jacobiator_JL(self.P, a, b, c)

    def random0(self, rng, s: Settings) -> Lie2Element:
        return Lie2Element(0, random_hamiltonian_pair(self.P, rng, s.max_degree, s.coeff_bound, s.max_terms))

    def random1(self, rng, s: Settings) -> Lie2Element:
        return Lie2Element(1, random_polynomial(self.nvars, s.max_degree, s.coeff_bound, rng, s.max_terms))

    def valid0(self, x: Lie2Element) -> Optional[str]:
        if is_valid_pair(self.P, x.payload):
            return None
        return f"{x} violates d alpha = -i_v omega"


class CourantInstance(_Instance):
    """Sections in grade 0 with differential ``D``; ``[[e, f]] = <e, Df>/2``."""

    def __init__(self, C: CourantStructure):
        self.C = C
        self.nvars = C.nvars

    def zero0(self) -> Lie2Element:
        return Lie2Element(0, Section.zero(self.nvars))

    def _d(self, f: Polynomial) -> Section:
        return d_operator(f)

    def _bracket00(self, e1, e2):
        return twisted_bracket(self.C, e1, e2)

    def _bracket01(self, e, f):
        return bilinear_form(e, d_operator(f)).scale(HALF)

    def _jacobiator(self, e1, e2, e3):
        return -jacobiator_T(self.C, e1, e2, e3)

    def random0(self, rng, s: Settings) -> Lie2Element:
        return Lie2Element(0, random_section(self.nvars, rng, s))

    def random1(self, rng, s: Settings) -> Lie2Element:
        return Lie2Element(1, random_polynomial(self.nvars, s.max_degree, s.coeff_bound, rng, s.max_terms))

    def valid0(self, x: Lie2Element) -> Optional[str]:
        return None


def l2_bracket(inst: _Instance, x: Lie2Element, y: Lie2Element) -> Lie2Element:
    return inst.bracket(x, y)


def l2_jacobiator(inst: _Instance, x: Lie2Element, y: Lie2Element, z: Lie2Element) -> Lie2Element:
    return inst.jacobiator(x, y, z)


def coherence_residual(inst: _Instance, x, y, z, w) -> Lie2Element:
    """Left minus right side of the Jacobiator coherence law."""
    br, J = inst.bracket, inst.jacobiator
    lhs = br(x, J(y, z, w)) + J(x, br(y, z), w) + J(x, z, br(y, w)) + br(J(x, y, z), w) + br(z, J(x, y, w))
    rhs = J(x, y, br(z, w)) + J(br(x, y), z, w) + br(y, J(x, z, w)) + J(y, br(x, z), w) + J(y, z, br(x, w))
    return lhs - rhs


# -- instance checks ------------------------------------------------------------


def _bracket_lands_in_carrier(inst, s, rng):
    x, y = inst.random0(rng, s), inst.random0(rng, s)
    return inst.valid0(inst.bracket(x, y))


def _chain_map_01(inst, s, rng):
    x, f = inst.random0(rng, s), inst.random1(rng, s)
    res = inst.differential(inst.bracket(x, f)) - inst.bracket(x, inst.differential(f))
    res_flip = inst.differential(inst.bracket(f, x)) - inst.bracket(inst.differential(f), x)
    return mismatch(res, x=x, f=f) or mismatch(res_flip, x=x, f=f)


def _chain_map_11(inst, s, rng):
    f, g = inst.random1(rng, s), inst.random1(rng, s)
    res = inst.bracket(inst.differential(f), g) - inst.bracket(f, inst.differential(g))
    grade2 = inst.bracket(f, g)
    if not grade2.is_zero():
        return f"[f, g] = {grade2} is not zero"
    return mismatch(res, f=f, g=g)


def _bracket_antisymmetric(inst, s, rng):
    x, y, f = inst.random0(rng, s), inst.random0(rng, s), inst.random1(rng, s)
    return mismatch(inst.bracket(x, y) + inst.bracket(y, x), x=x, y=y) or mismatch(
        inst.bracket(x, f) + inst.bracket(f, x), x=x, f=f
    )


def _homotopy_00(inst, s, rng):
    x, y, z = (inst.random0(rng, s) for _ in range(3))
    br = inst.bracket
    res = br(x, br(y, z)) - br(br(x, y), z) - br(y, br(x, z)) - inst.differential(inst.jacobiator(x, y, z))
    return mismatch(res, x=x, y=y, z=z)


def _homotopy_01(inst, s, rng):
    x, y, f = inst.random0(rng, s), inst.random0(rng, s), inst.random1(rng, s)
    br = inst.bracket
    res = br(x, br(y, f)) - br(br(x, y), f) - br(y, br(x, f)) - inst.jacobiator(x, y, inst.differential(f))
    return mismatch(res, x=x, y=y, f=f)


def _jacobiator_antisymmetric(inst, s, rng):
    x, y, z = (inst.random0(rng, s) for _ in range(3))
    J = inst.jacobiator
    res = J(x, y, z) + J(y, x, z)
    res2 = J(x, y, z) + J(x, z, y)
    return mismatch(res, x=x, y=y, z=z) or mismatch(res2, x=x, y=y, z=z)


def _coherence_00(inst, s, rng):
    x, y, z, w = (inst.random0(rng, s) for _ in range(4))
    return mismatch(coherence_residual(inst, x, y, z, w), x=x, y=y, z=z, w=w)


def _coherence_mixed(inst, s, rng):
    x, y, z, f = inst.random0(rng, s), inst.random0(rng, s), inst.random0(rng, s), inst.random1(rng, s)
    for quad in ((x, y, z, f), (f, x, y, z), (x, f, y, z), (x, y, f, z)):
        res = coherence_residual(inst, *quad)
        if not res.is_zero() or res.grade < 2:
            return f"mixed-grade coherence gave grade {res.grade} value {res}"
    return None


def _courant_jacobiator_is_minus_T(inst, s, rng):
    x, y, z = (inst.random0(rng, s) for _ in range(3))
    res = inst.jacobiator(x, y, z).payload + jacobiator_T(inst.C, x.payload, y.payload, z.payload)
    return mismatch(res, x=x, y=y, z=z)


CHAIN_MAP = [
    ("bracket_lands_in_grade0", "[x, y] lies in the grade-0 carrier", _bracket_lands_in_carrier),
    ("bracket_chain_map_01", "d[x, f] = [x, df] and d[f, x] = [df, x]", _chain_map_01),
    ("bracket_chain_map_11", "[df, g] = [f, dg]; [f, g] = 0", _chain_map_11),
    ("bracket_antisymmetric", "[x, y] = -[y, x]", _bracket_antisymmetric),
]

JACOBIATOR = [
    ("jacobiator_homotopy_0", "[x,[y,z]] - [[x,y],z] - [y,[x,z]] = d J(x,y,z)", _homotopy_00),
    ("jacobiator_homotopy_1", "[x,[y,f]] - [[x,y],f] - [y,[x,f]] = J(x,y,df)", _homotopy_01),
    ("jacobiator_antisymmetric", "J is antisymmetric in its arguments", _jacobiator_antisymmetric),
    (
        "jacobiator_coherence",
        "[x,J(y,z,w)] + J(x,[y,z],w) + J(x,z,[y,w]) + [J(x,y,z),w] + [z,J(x,y,w)] = "
        "J(x,y,[z,w]) + J([x,y],z,w) + [y,J(x,z,w)] + J(y,[x,z],w) + J(y,z,[x,w])",
        _coherence_00,
    ),
    ("jacobiator_coherence_mixed_grade", "coherence law with a grade-1 argument reduces to 0 = 0", _coherence_mixed),
]


def check_bracket_chain_map(inst: _Instance, settings: Settings, suite: str) -> list[IdentityResult]:
    return [run_identity(n, a, partial(fn, inst, settings), settings, suite) for n, a, fn in CHAIN_MAP]


def check_jacobiator_identity(inst: _Instance, settings: Settings, suite: str) -> list[IdentityResult]:
    out = [run_identity(n, a, partial(fn, inst, settings), settings, suite) for n, a, fn in JACOBIATOR]
    if isinstance(inst, CourantInstance):
        out.append(
            run_identity(
                "jacobiator_is_minus_T",
                "J_C(e1,e2,e3) = -T(e1,e2,e3)",
                partial(_courant_jacobiator_is_minus_T, inst, settings),
                settings,
                suite,
            )
        )
    return out


# -- the embedding ----------------------------------------------------------------


@dataclass(frozen=True)
class EmbeddingHom:
    source: PlecticInstance
    target: CourantInstance

    def __post_init__(self):
        if self.source.P.omega != self.target.C.twist:
            raise ValueError("embedding needs the Courant twist to equal the 2-plectic form")

    @classmethod
    def of(cls, P: PlecticStructure) -> "EmbeddingHom":
        return cls(PlecticInstance(P), CourantInstance(CourantStructure(P.nvars, P.omega)))


def hom_phi0(H: EmbeddingHom, a: HamiltonianPair) -> Section:
    """``alpha -> (v_alpha, -alpha)``."""
    return Section(a.v, -a.alpha)


def hom_phi1(H: EmbeddingHom, f: Polynomial) -> Polynomial:
    return -f


def hom_phi2(H: EmbeddingHom, a: HamiltonianPair, b: HamiltonianPair) -> Polynomial:
    return -b_form(a, b)


def _phi0(H, x: Lie2Element) -> Lie2Element:
    return Lie2Element(0, hom_phi0(H, x.payload))


def _phi1(H, x: Lie2Element) -> Lie2Element:
    return Lie2Element(1, hom_phi1(H, x.payload))


def _phi2(H, x: Lie2Element, y: Lie2Element) -> Lie2Element:
    return Lie2Element(1, hom_phi2(H, x.payload, y.payload))


def coherence_sides(H: EmbeddingHom, x, y, z) -> tuple[Polynomial, Polynomial]:
    """Both sides of the homomorphism coherence equation on grade-0 inputs."""
    src, tgt = H.source, H.target
    br, brt = src.bracket, tgt.bracket
    p0 = partial(_phi0, H)
    p2 = partial(_phi2, H)
    lhs = tgt.jacobiator(p0(x), p0(y), p0(z)) - _phi1(H, src.jacobiator(x, y, z))
    rhs = (
        p2(x, br(y, z))
        - p2(br(x, y), z)
        - p2(y, br(x, z))
        - brt(p2(x, y), p0(z))
        + brt(p0(x), p2(y, z))
        - brt(p0(y), p2(x, z))
    )
    return lhs.payload, rhs.payload


def coherence_closed_form(a: HamiltonianPair, b: HamiltonianPair, c: HamiltonianPair) -> Polynomial:
    """``(v_c(B(a,b)) + v_a(B(b,c)) + v_b(B(c,a))) / 2``."""
    total = c.v(b_form(a, b)) + a.v(b_form(b, c)) + b.v(b_form(c, a))
    return total.scale(HALF)


def _hom_chain_square(H, s, rng):
    f = H.source.random1(rng, s)
    res = _phi0(H, H.source.differential(f)) - H.target.differential(_phi1(H, f))
    return mismatch(res, f=f)


def _hom_homotopy_00(H, s, rng):
    x, y = H.source.random0(rng, s), H.source.random0(rng, s)
    p0 = partial(_phi0, H)
    res = H.target.bracket(p0(x), p0(y)) - p0(H.source.bracket(x, y)) - H.target.differential(_phi2(H, x, y))
    return mismatch(res, alpha=x, beta=y)


def _hom_homotopy_01(H, s, rng):
    x, f = H.source.random0(rng, s), H.source.random1(rng, s)
    res = (
        H.target.bracket(_phi0(H, x), _phi1(H, f))
        - _phi1(H, H.source.bracket(x, f))
        - _phi2(H, x, H.source.differential(f))
    )
    return mismatch(res, alpha=x, f=f)


def _hom_coherence(H, s, rng):
    x, y, z = (H.source.random0(rng, s) for _ in range(3))
    lhs, rhs = coherence_sides(H, x, y, z)
    return mismatch(lhs - rhs, alpha=x, beta=y, gamma=z)


def _hom_coherence_closed_form(H, s, rng):
    x, y, z = (H.source.random0(rng, s) for _ in range(3))
    lhs, rhs = coherence_sides(H, x, y, z)
    closed = coherence_closed_form(x.payload, y.payload, z.payload)
    return mismatch(lhs - closed, side="left", alpha=x, beta=y, gamma=z) or mismatch(
        rhs - closed, side="right", alpha=x, beta=y, gamma=z
    )


def _hom_injective(H, s, rng):
    x, y = H.source.random0(rng, s), H.source.random0(rng, s)
    image = hom_phi0(H, x.payload)
    recovered = HamiltonianPair(-image.alpha, image.v)
    if recovered != x.payload:
        return f"phi0({x}) = {image} does not determine its argument"
    same_image = (hom_phi0(H, x.payload) - hom_phi0(H, y.payload)).is_zero()
    if same_image != (x.payload - y.payload).is_zero():
        return f"phi0 identifies {x} and {y}"
    return None


def _hom_phi2_antisymmetric(H, s, rng):
    x, y = H.source.random0(rng, s), H.source.random0(rng, s)
    return mismatch(hom_phi2(H, x.payload, y.payload) + hom_phi2(H, y.payload, x.payload), alpha=x, beta=y)


HOMOTOPY = [
    ("embedding_chain_square", "phi0(df) = D phi1(f)", _hom_chain_square),
    ("embedding_homotopy_00", "[[phi0 a, phi0 b]] - phi0{a,b} = D phi2(a,b)", _hom_homotopy_00),
    ("embedding_homotopy_01", "[[phi0 a, phi1 f]] - phi1[a,f] = phi2(a, df)", _hom_homotopy_01),
    ("embedding_injective", "phi0(a) = phi0(b) => a = b", _hom_injective),
    ("phi2_antisymmetric", "phi2(a,b) = -phi2(b,a)", _hom_phi2_antisymmetric),
]

COHERENCE = [
    (
        "embedding_coherence",
        "J'(phi0 x, phi0 y, phi0 z) - phi1 J(x,y,z) = phi2(x,[y,z]) - phi2([x,y],z) - phi2(y,[x,z]) "
        "- [phi2(x,y), phi0 z]' + [phi0 x, phi2(y,z)]' - [phi0 y, phi2(x,z)]'",
        _hom_coherence,
    ),
    (
        "embedding_coherence_closed_form",
        "both sides = 1/2 (i_{v_c} dB(a,b) + cyclic)",
        _hom_coherence_closed_form,
    ),
]


def check_hom_homotopy(H: EmbeddingHom, settings: Settings, suite: str = "embedding") -> list[IdentityResult]:
    return [run_identity(n, a, partial(fn, H, settings), settings, suite) for n, a, fn in HOMOTOPY]


def check_hom_coherence(H: EmbeddingHom, settings: Settings, suite: str = "embedding") -> list[IdentityResult]:
    return [run_identity(n, a, partial(fn, H, settings), settings, suite) for n, a, fn in COHERENCE]
