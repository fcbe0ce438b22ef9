"""Exact rationals and sparse multivariate polynomials over Q.

Polynomials stand in for smooth functions on R^n.  Variables are numbered
1..n to match the coordinate names ``x1, ..., xn`` used everywhere else.
"""

from __future__ import annotations

import zlib
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

import numpy as np
from gmpy2 import mpq

Rational = type(mpq())

__all__ = [
    "Rational",
    "Polynomial",
    "rational",
    "format_rational",
    "make_rng",
    "random_polynomial",
    "monomials_up_to",
]


def rational(value) -> Rational:
    """Coerce an int, Fraction, mpq or ``"p/q"`` string to an exact rational.

    Floats are rejected: they would smuggle rounding into exact checks.
    """
    if isinstance(value, float):
        raise TypeError(f"refusing float coefficient {value!r}; use 'p/q' strings")
    if isinstance(value, str):
        value = value.strip()
        if "/" in value:
            num, den = value.split("/")
            if int(den) == 0:
                raise ZeroDivisionError(f"zero denominator in {value!r}")
            return mpq(int(num), int(den))
        return mpq(int(value))
    if isinstance(value, Rational):
        return value
    return mpq(value)


def format_rational(q: Rational) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _glex_key(exps: tuple[int, ...]):
    return (-sum(exps), tuple(-e for e in exps))


class Polynomial:
    """Immutable sparse polynomial: ``{exponent tuple: nonzero mpq}``."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], object] | None = None):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        clean: dict[tuple[int, ...], Rational] = {}
        if terms:
            for exps, c in terms.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != nvars:
                    raise ValueError(f"exponent vector {exps} does not have length {nvars}")
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent in {exps}")
                c = rational(c)
                if c:
                    clean[exps] = clean.get(exps, mpq(0)) + c
                    if not clean[exps]:
                        del clean[exps]
        self.nvars = nvars
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "Polynomial":
        # trusted constructor: terms already canonical
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        c = rational(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Polynomial":
        """The coordinate function x_i (1-based)."""
        if not 1 <= i <= nvars:
            raise IndexError(f"variable index {i} out of range 1..{nvars}")
        exps = [0] * nvars
        exps[i - 1] = 1
        return cls._raw(nvars, {tuple(exps): mpq(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> "Polynomial":
        return cls(len(exps), {tuple(exps): coeff})

    # -- basic protocol -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Rational:
        return self.terms.get((0,) * self.nvars, mpq(0))

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Rational)):
            return self.terms == ({(0,) * self.nvars: mpq(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def _check(self, other: "Polynomial"):
        if self.nvars != other.nvars:
            raise ValueError(f"dimension mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.nvars, other)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = rational(c)
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(self.nvars, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
        elif isinstance(other, (int, Rational)):
            return self.scale(other)
        else:
            return NotImplemented
        if not self.terms or not other.terms:
            return Polynomial.zero(self.nvars)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict[tuple[int, ...], Rational] = {}
        get = out.get
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple([x + y for x, y in zip(ea, eb)])
                s = get(e)
                out[e] = ca * cb if s is None else s + ca * cb
        return Polynomial._raw(self.nvars, {e: c for e, c in out.items() if c})

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus -----------------------------------------------------------

    def partial(self, i: int) -> "Polynomial":
        """Exact partial derivative with respect to x_i (1-based)."""
        if not 1 <= i <= self.nvars:
            raise IndexError(f"variable index {i} out of range 1..{self.nvars}")
        k = i - 1
        out = {}
        for e, c in self.terms.items():
            p = e[k]
            if p:
                e2 = e[:k] + (p - 1,) + e[k + 1:]
                out[e2] = c * p
        return Polynomial._raw(self.nvars, out)

    def evaluate(self, point: Sequence) -> Rational:
        if len(point) != self.nvars:
            raise ValueError(f"point has length {len(point)}, expected {self.nvars}")
        pt = [rational(x) for x in point]
        total = mpq(0)
        for e, c in self.terms.items():
            t = c
            for x, p in zip(pt, e):
                if p:
                    t *= x ** p
            total += t
        return total

    def compose(self, subs: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute ``x_i -> subs[i-1]`` (all in the same ambient dimension)."""
        if len(subs) != self.nvars:
            raise ValueError("need one substitution per variable")
        m = subs[0].nvars
        powers: list[list[Polynomial]] = [[Polynomial.constant(m, 1)] for _ in subs]
        out = Polynomial.zero(m)
        for e, c in self.terms.items():
            t = Polynomial.constant(m, c)
            for k, p in enumerate(e):
                while len(powers[k]) <= p:
                    powers[k].append(powers[k][-1] * subs[k])
                if p:
                    t = t * powers[k][p]
            out = out + t
        return out

    def map_terms(self, fn) -> "Polynomial":
        """Rescale each term: ``c x^e -> fn(e) * c x^e``."""
        out = {}
        for e, c in self.terms.items():
            v = c * fn(e)
            if v:
                out[e] = v
        return Polynomial._raw(self.nvars, out)

    # -- printing -----------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _glex_key(t[0]))

    @staticmethod
    def _monomial_str(e) -> str:
        parts = []
        for i, p in enumerate(e, start=1):
            if p == 1:
                parts.append(f"x{i}")
            elif p > 1:
                parts.append(f"x{i}^{p}")
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for k, (e, c) in enumerate(self.sorted_terms()):
            mono = self._monomial_str(e)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if mono:
                body = mono if a == 1 else f"{format_rational(a)}*{mono}"
            else:
                body = format_rational(a)
            if k == 0:
                out.append(f"-{body}" if sign == "-" else body)
            else:
                out.append(f" {sign} {body}")
        return "".join(out)

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self})"

    def is_monomial(self) -> bool:
        return len(self.terms) == 1


def monomials_up_to(nvars: int, max_degree: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree <= max_degree, graded-lex ascending."""
    out = []
    for d in range(max_degree + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for k in combo:
                e[k] += 1
            out.append(tuple(e))
    return out


def _key_int(k) -> int:
    if isinstance(k, str):
        return zlib.crc32(k.encode())
    return int(k)


def make_rng(seed: int, *keys) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, *keys)``.

    String keys are hashed with CRC32, so streams are stable across runs and
    independent of the order in which trials are evaluated.
    """
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *(_key_int(k) for k in keys)])
    return np.random.Generator(np.random.Philox(ss))


def random_polynomial(
    nvars: int,
    max_degree: int,
    coeff_bound: int,
    rng: np.random.Generator,
    max_terms: int | None = 4,
    variables: Iterable[int] | None = None,
) -> Polynomial:
    """Random polynomial with integer coefficients in ``[-coeff_bound, coeff_bound]``.

    ``max_terms`` monomials are drawn without replacement from those of total
    degree <= ``max_degree`` (``None`` means all of them).  When ``variables``
    is given, only those (1-based) coordinates appear.
    """
    if max_degree < 0 or coeff_bound < 1:
        raise ValueError("bounds must be non-negative degree and positive coefficient bound")
    if variables is None:
        monos = monomials_up_to(nvars, max_degree)
    else:
        vs = sorted(set(variables))
        sub = monomials_up_to(len(vs), max_degree)
        monos = []
        for s in sub:
            e = [0] * nvars
            for v, p in zip(vs, s):
                e[v - 1] = p
            monos.append(tuple(e))
    k = len(monos) if max_terms is None else min(max_terms, len(monos))
    picks = rng.choice(len(monos), size=k, replace=False)
    coeffs = rng.integers(-coeff_bound, coeff_bound + 1, size=k)
    return Polynomial(nvars, {monos[int(i)]: int(c) for i, c in zip(picks, coeffs)})
