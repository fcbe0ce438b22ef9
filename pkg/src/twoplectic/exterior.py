"""Differential forms and vector fields on R^n with polynomial coefficients.

Forms are stored as ``{strictly increasing index tuple: Polynomial}`` with
1-based indices, so ``{(1, 3): x2}`` is ``x2 dx1^dx3``.  Every sign in this
module comes from sorting index tuples, never from a stored convention.

The interior product contracts the first slot:

    i_v(dx_{i1}^...^dx_{ik}) = sum_j (-1)^(j-1) v^{i_j} dx_{i1}^..(omit j)..^dx_{ik}
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from . import linalg
from .ring import Polynomial, Rational, format_rational, random_polynomial, rational

__all__ = [
    "DifferentialForm",
    "VectorField",
    "AffineMap",
    "sort_indices",
    "wedge",
    "exterior_derivative",
    "interior_product",
    "lie_derivative_form",
    "vf_bracket",
    "pullback_form",
    "pushforward_vf",
    "poincare_primitive",
    "form_equal",
    "NotClosedError",
    "dx",
    "coordinate_frame",
    "one_form",
    "random_form",
    "random_vector_field",
    "random_affine_map",
]


class NotClosedError(ValueError):
    """Raised when an operation needs a closed form and ``d`` of it is nonzero."""

    def __init__(self, message: str, differential: "DifferentialForm"):
        super().__init__(f"{message}: d = {differential}")
        self.differential = differential


def sort_indices(indices: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Return ``(sign, sorted tuple)``; sign is 0 when an index repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


class DifferentialForm:
    __slots__ = ("nvars", "degree", "comps")

    def __init__(self, nvars: int, degree: int, comps: Mapping[Sequence[int], Polynomial] | None = None):
        if nvars < 1 or degree < 0:
            raise ValueError("need nvars >= 1 and degree >= 0")
        self.nvars = nvars
        self.degree = degree
        out: dict[tuple[int, ...], Polynomial] = {}
        for idx, p in (comps or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index tuple {idx} does not have length {degree}")
            if any(not 1 <= i <= nvars for i in idx):
                raise ValueError(f"index tuple {idx} out of range 1..{nvars}")
            if not isinstance(p, Polynomial):
                p = Polynomial.constant(nvars, p)
            elif p.nvars != nvars:
                raise ValueError("coefficient dimension mismatch")
            sign, key = sort_indices(idx)
            if sign == 0 or not p:
                continue
            term = p if sign > 0 else -p
            q = out.get(key)
            q = term if q is None else q + term
            if q:
                out[key] = q
            else:
                out.pop(key, None)
        self.comps = out

    @classmethod
    def _raw(cls, nvars, degree, comps):
        f = object.__new__(cls)
        f.nvars = nvars
        f.degree = degree
        f.comps = {k: p for k, p in comps.items() if p}
        return f

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int, degree: int) -> "DifferentialForm":
        return cls._raw(nvars, degree, {})

    @classmethod
    def function(cls, p: Polynomial) -> "DifferentialForm":
        return cls._raw(p.nvars, 0, {(): p})

    @classmethod
    def dx(cls, nvars: int, *indices: int, coeff=1) -> "DifferentialForm":
        """``coeff * dx_{i1}^...^dx_{ik}`` for arbitrary (unsorted) indices."""
        c = coeff if isinstance(coeff, Polynomial) else Polynomial.constant(nvars, coeff)
        return cls(nvars, len(indices), {tuple(indices): c})

    # -- protocol -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.comps

    def __bool__(self):
        return bool(self.comps)

    def component(self, indices: Sequence[int]) -> Polynomial:
        """Coefficient of ``dx_{i1}^...^dx_{ik}`` for any index order (antisymmetrised)."""
        sign, key = sort_indices(indices)
        if sign == 0:
            return Polynomial.zero(self.nvars)
        p = self.comps.get(key)
        if p is None:
            return Polynomial.zero(self.nvars)
        return p if sign > 0 else -p

    def as_function(self) -> Polynomial:
        if self.degree != 0:
            raise ValueError("not a 0-form")
        return self.comps.get((), Polynomial.zero(self.nvars))

    def is_constant(self) -> bool:
        return all(p.is_constant() for p in self.comps.values())

    def evaluate(self, point: Sequence) -> "DifferentialForm":
        """Freeze the coefficients at a point, giving a constant form."""
        n = self.nvars
        return DifferentialForm._raw(
            n, self.degree, {k: Polynomial.constant(n, p.evaluate(point)) for k, p in self.comps.items()}
        )

    def max_coefficient_degree(self) -> int:
        return max((p.degree() for p in self.comps.values()), default=-1)

    def _check(self, other: "DifferentialForm"):
        if self.nvars != other.nvars:
            raise ValueError(f"dimension mismatch: {self.nvars} vs {other.nvars}")
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self.nvars == other.nvars and self.degree == other.degree and self.comps == other.comps

    def __hash__(self):
        return hash((self.nvars, self.degree, frozenset(self.comps.items())))

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        self._check(other)
        out = dict(self.comps)
        for k, p in other.comps.items():
            q = out.get(k)
            out[k] = p if q is None else q + p
        return DifferentialForm._raw(self.nvars, self.degree, out)

    def __neg__(self):
        return DifferentialForm._raw(self.nvars, self.degree, {k: -p for k, p in self.comps.items()})

    def __sub__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, c):
        """Multiply by a function (Polynomial) or a rational scalar."""
        if isinstance(c, Polynomial):
            if c.nvars != self.nvars:
                raise ValueError("dimension mismatch")
            return DifferentialForm._raw(self.nvars, self.degree, {k: c * p for k, p in self.comps.items()})
        if isinstance(c, (int, Rational)):
            return DifferentialForm._raw(self.nvars, self.degree, {k: p.scale(c) for k, p in self.comps.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __str__(self):
        if not self.comps:
            return "0"
        out = []
        for k, (idx, p) in enumerate(sorted(self.comps.items())):
            legs = "^".join(f"dx{i}" for i in idx)
            text = str(p)
            neg = False
            if p.is_monomial():
                if text.startswith("-"):
                    neg, text = True, text[1:]
                if not legs:
                    body = text
                elif text == "1":
                    body = legs
                else:
                    body = f"{text} {legs}"
            else:
                body = f"({text}) {legs}" if legs else f"({text})"
            if k == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def __repr__(self):
        return f"DifferentialForm(n={self.nvars}, k={self.degree}, {self})"


class VectorField:
    __slots__ = ("nvars", "comps")

    def __init__(self, comps: Sequence[Polynomial]):
        comps = tuple(comps)
        if not comps:
            raise ValueError("a vector field needs at least one component")
        n = comps[0].nvars
        if len(comps) != n or any(c.nvars != n for c in comps):
            raise ValueError(f"vector field on R^{n} needs {n} components of dimension {n}")
        self.nvars = n
        self.comps = comps

    @classmethod
    def zero(cls, nvars: int) -> "VectorField":
        return cls([Polynomial.zero(nvars)] * nvars)

    @classmethod
    def coordinate(cls, nvars: int, i: int, coeff=1) -> "VectorField":
        """``coeff * d/dx_i`` (1-based)."""
        c = coeff if isinstance(coeff, Polynomial) else Polynomial.constant(nvars, coeff)
        return cls([c if k == i else Polynomial.zero(nvars) for k in range(1, nvars + 1)])

    @classmethod
    def euler(cls, nvars: int) -> "VectorField":
        return cls([Polynomial.var(nvars, i) for i in range(1, nvars + 1)])

    def is_zero(self) -> bool:
        return not any(self.comps)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.comps == other.comps

    def __hash__(self):
        return hash(self.comps)

    def _check(self, other):
        if self.nvars != other.nvars:
            raise ValueError(f"dimension mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        self._check(other)
        return VectorField([a + b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return VectorField([-a for a in self.comps])

    def __sub__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        self._check(other)
        return VectorField([a - b for a, b in zip(self.comps, other.comps)])

    def __mul__(self, c):
        if isinstance(c, (Polynomial, int, Rational)):
            return VectorField([c * a for a in self.comps])
        return NotImplemented

    __rmul__ = __mul__

    def __call__(self, f: Polynomial) -> Polynomial:
        """Directional derivative ``v(f) = sum_i v^i d_i f``."""
        if f.nvars != self.nvars:
            raise ValueError("dimension mismatch")
        out = Polynomial.zero(self.nvars)
        for i, c in enumerate(self.comps, start=1):
            if c:
                df = f.partial(i)
                if df:
                    out = out + c * df
        return out

    def evaluate(self, point: Sequence) -> list[Rational]:
        return [c.evaluate(point) for c in self.comps]

    def max_coefficient_degree(self) -> int:
        return max((c.degree() for c in self.comps), default=-1)

    def __str__(self):
        terms = [(i, c) for i, c in enumerate(self.comps, start=1) if c]
        if not terms:
            return "0"
        out = []
        for k, (i, c) in enumerate(terms):
            text = str(c)
            neg = False
            if c.is_monomial():
                if text.startswith("-"):
                    neg, text = True, text[1:]
                body = f"∂{i}" if text == "1" else f"{text} ∂{i}"
            else:
                body = f"({text}) ∂{i}"
            if k == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def __repr__(self):
        return f"VectorField({self})"


# -- Cartan calculus ----------------------------------------------------------


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    if a.nvars != b.nvars:
        raise ValueError(f"dimension mismatch: {a.nvars} vs {b.nvars}")
    n, k = a.nvars, a.degree + b.degree
    out: dict[tuple[int, ...], Polynomial] = {}
    if k > n:
        return DifferentialForm.zero(n, k)
    for I, p in a.comps.items():
        for J, q in b.comps.items():
            if set(I) & set(J):
                continue
            inversions = sum(1 for i in I for j in J if i > j)
            key = tuple(sorted(I + J))
            term = p * q
            if inversions % 2:
                term = -term
            prev = out.get(key)
            out[key] = term if prev is None else prev + term
    return DifferentialForm._raw(n, k, out)


def exterior_derivative(a: DifferentialForm) -> DifferentialForm:
    """``d(f dx_I) = sum_i d_i f dx_i ^ dx_I`` with the sign from sorting."""
    n = a.nvars
    out: dict[tuple[int, ...], Polynomial] = {}
    if a.degree >= n:
        return DifferentialForm.zero(n, a.degree + 1)
    for I, f in a.comps.items():
        for i in range(1, n + 1):
            if i in I:
                continue
            df = f.partial(i)
            if not df:
                continue
            pos = sum(1 for j in I if j < i)
            key = I[:pos] + (i,) + I[pos:]
            if pos % 2:
                df = -df
            prev = out.get(key)
            out[key] = df if prev is None else prev + df
    return DifferentialForm._raw(n, a.degree + 1, out)


def interior_product(v: VectorField, a: DifferentialForm) -> DifferentialForm:
    if v.nvars != a.nvars:
        raise ValueError(f"dimension mismatch: {v.nvars} vs {a.nvars}")
    if a.degree == 0:
        raise ValueError("interior product of a 0-form is undefined")
    n = a.nvars
    out: dict[tuple[int, ...], Polynomial] = {}
    for I, f in a.comps.items():
        for j, i in enumerate(I):
            vi = v.comps[i - 1]
            if not vi:
                continue
            term = vi * f
            if j % 2:
                term = -term
            key = I[:j] + I[j + 1:]
            prev = out.get(key)
            out[key] = term if prev is None else prev + term
    return DifferentialForm._raw(n, a.degree - 1, out)


def lie_derivative_form(v: VectorField, a: DifferentialForm) -> DifferentialForm:
    """Cartan formula ``L_v = i_v d + d i_v`` (``L_v f = i_v df`` on functions)."""
    da = exterior_derivative(a)
    out = interior_product(v, da)
    if a.degree > 0:
        out = out + exterior_derivative(interior_product(v, a))
    return out


def vf_bracket(u: VectorField, v: VectorField) -> VectorField:
    """Lie bracket; component i is ``sum_j (u^j d_j v^i - v^j d_j u^i)``."""
    if u.nvars != v.nvars:
        raise ValueError(f"dimension mismatch: {u.nvars} vs {v.nvars}")
    return VectorField([u(vi) - v(ui) for ui, vi in zip(u.comps, v.comps)])


def form_equal(a: DifferentialForm, b: DifferentialForm) -> bool:
    if a.nvars != b.nvars:
        raise ValueError(f"dimension mismatch: {a.nvars} vs {b.nvars}")
    if a.degree != b.degree:
        return a.is_zero() and b.is_zero()
    return (a - b).is_zero()


def poincare_primitive(a: DifferentialForm) -> DifferentialForm:
    """Homotopy-operator primitive of a closed form of degree >= 1.

    Uses ``P(a)(x) = int_0^1 t^(k-1) (i_X a)(t x) dt`` with ``X`` the Euler
    field; a coefficient monomial of degree m picks up the factor 1/(m + k).
    """
    if a.degree < 1:
        raise ValueError("primitive needs a form of degree >= 1")
    da = exterior_derivative(a)
    if not da.is_zero():
        raise NotClosedError("form is not closed", da)
    k = a.degree
    scaled = DifferentialForm._raw(
        a.nvars, k, {I: p.map_terms(lambda e: mpq(1, sum(e) + k)) for I, p in a.comps.items()}
    )
    return interior_product(VectorField.euler(a.nvars), scaled)


# -- affine diffeomorphisms ---------------------------------------------------


@dataclass(frozen=True)
class AffineMap:
    """``phi(x) = A x + b`` with an exact rational inverse."""

    matrix: tuple[tuple[Rational, ...], ...]
    offset: tuple[Rational, ...]
    inverse_matrix: tuple[tuple[Rational, ...], ...] = field(default=None)

    def __post_init__(self):
        A = tuple(tuple(rational(x) for x in row) for row in self.matrix)
        n = len(A)
        if any(len(row) != n for row in A):
            raise ValueError("affine matrix must be square")
        b = tuple(rational(x) for x in self.offset) if self.offset is not None else (mpq(0),) * n
        if len(b) != n:
            raise ValueError("offset length mismatch")
        if self.inverse_matrix is None:
            inv = tuple(tuple(row) for row in linalg.inverse(A))
        else:
            inv = tuple(tuple(rational(x) for x in row) for row in self.inverse_matrix)
        if linalg.matmul(A, inv) != linalg.identity(n):
            raise ValueError("inverse_matrix is not an exact inverse of matrix")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "offset", b)
        object.__setattr__(self, "inverse_matrix", inv)

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls(linalg.identity(n), [0] * n)

    @classmethod
    def permutation(cls, perm: Sequence[int], offset=None) -> "AffineMap":
        """``phi(x)_i = x_{perm[i]}`` (1-based entries)."""
        n = len(perm)
        A = [[int(perm[i] == j + 1) for j in range(n)] for i in range(n)]
        return cls(A, offset if offset is not None else [0] * n)

    @property
    def nvars(self) -> int:
        return len(self.matrix)

    def determinant(self) -> Rational:
        a = [list(r) for r in self.matrix]
        n = len(a)
        det = mpq(1)
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c] != 0), None)
            if p is None:
                return mpq(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                det = -det
            det *= a[c][c]
            for i in range(c + 1, n):
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return det

    def inverse(self) -> "AffineMap":
        Ainv = self.inverse_matrix
        b = [-sum((Ainv[i][j] * self.offset[j] for j in range(self.nvars)), mpq(0)) for i in range(self.nvars)]
        return AffineMap(Ainv, b, self.matrix)

    def coordinate_polys(self) -> list[Polynomial]:
        """The components ``phi^i(x)`` as degree-1 polynomials."""
        n = self.nvars
        out = []
        for i in range(n):
            terms = {(0,) * n: self.offset[i]}
            for j in range(n):
                e = [0] * n
                e[j] = 1
                terms[tuple(e)] = self.matrix[i][j]
            out.append(Polynomial(n, terms))
        return out

    def __call__(self, point: Sequence) -> list[Rational]:
        x = [rational(t) for t in point]
        return [sum((a * t for a, t in zip(row, x)), mpq(0)) + b for row, b in zip(self.matrix, self.offset)]

    def __str__(self):
        rows = "; ".join(" ".join(format_rational(x) for x in row) for row in self.matrix)
        off = " ".join(format_rational(x) for x in self.offset)
        return f"x -> [{rows}] x + ({off})"


def pullback_form(phi: AffineMap, a: DifferentialForm) -> DifferentialForm:
    """``phi^* a``: coefficients composed with phi, legs ``dx_i -> sum_j A_ij dx_j``."""
    n = a.nvars
    if phi.nvars != n:
        raise ValueError("dimension mismatch")
    subs = phi.coordinate_polys()
    legs = [
        DifferentialForm._raw(n, 1, {(j + 1,): Polynomial.constant(n, phi.matrix[i][j]) for j in range(n)})
        for i in range(n)
    ]
    out = DifferentialForm.zero(n, a.degree)
    for I, f in a.comps.items():
        term = DifferentialForm.function(f.compose(subs))
        for i in I:
            term = wedge(term, legs[i - 1])
        out = out + term
    return out


def pushforward_vf(phi: AffineMap, v: VectorField) -> VectorField:
    """``(phi_* v)(y) = A v(phi^{-1}(y))``."""
    n = v.nvars
    if phi.nvars != n:
        raise ValueError("dimension mismatch")
    back = phi.inverse().coordinate_polys()
    moved = [c.compose(back) for c in v.comps]
    return VectorField(
        [
            sum((moved[j].scale(phi.matrix[i][j]) for j in range(n)), Polynomial.zero(n))
            for i in range(n)
        ]
    )


def dx(nvars: int, *indices: int, coeff=1) -> DifferentialForm:
    return DifferentialForm.dx(nvars, *indices, coeff=coeff)


def coordinate_frame(nvars: int) -> list[VectorField]:
    return [VectorField.coordinate(nvars, i) for i in range(1, nvars + 1)]


def one_form(comps: Iterable[Polynomial]) -> DifferentialForm:
    """1-form ``sum_i comps[i-1] dx_i``."""
    comps = list(comps)
    n = comps[0].nvars
    return DifferentialForm(n, 1, {(i,): p for i, p in enumerate(comps, start=1)})


# -- random generation --------------------------------------------------------


def random_form(nvars, degree, rng, max_degree=3, coeff_bound=3, max_terms=3, variables=None):
    """Random k-form; each coordinate component is an independent random polynomial."""
    comps = {
        I: random_polynomial(nvars, max_degree, coeff_bound, rng, max_terms, variables)
        for I in combinations(range(1, nvars + 1), degree)
    }
    return DifferentialForm(nvars, degree, comps)


def random_vector_field(nvars, rng, max_degree=3, coeff_bound=3, max_terms=3):
    return VectorField([random_polynomial(nvars, max_degree, coeff_bound, rng, max_terms) for _ in range(nvars)])


def random_affine_map(nvars, rng, entry_bound=2) -> AffineMap:
    """Random invertible affine map with small integer entries (resampled until det != 0)."""
    while True:
        A = rng.integers(-entry_bound, entry_bound + 1, size=(nvars, nvars)).tolist()
        b = rng.integers(-entry_bound, entry_bound + 1, size=nvars).tolist()
        if linalg.rank(A) == nvars:
            return AffineMap(A, b)
