"""Independent reference for differential forms, written against sympy.

Forms are dense, fully antisymmetric arrays: a k-form is a dict from every
ordered k-tuple of 0-based indices to a sympy expression.  Nothing here
shares code with the package; ``to_dense`` and ``to_sympy`` are the only
bridges.
"""

from itertools import permutations, product

import sympy as sp


def coords(n):
    return sp.symbols(f"x1:{n + 1}")


def perm_sign(p):
    p = list(p)
    sign = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


class Dense:
    def __init__(self, n, k, table=None):
        self.n, self.k = n, k
        self.table = {t: sp.Integer(0) for t in product(range(n), repeat=k)}
        if table:
            for t, c in table.items():
                self.table[t] = sp.expand(c)

    @classmethod
    def basis(cls, n, k, terms):
        """``terms``: iterable of (coefficient, 1-based index tuple of length k)."""
        out = cls(n, k)
        for coeff, idx in terms:
            idx = [i - 1 for i in idx]
            for p in permutations(range(k)):
                key = tuple(idx[q] for q in p)
                out.table[key] = sp.expand(out.table[key] + perm_sign(p) * coeff)
        return out

    def __sub__(self, other):
        return Dense(self.n, self.k, {t: self.table[t] - other.table[t] for t in self.table})

    def __add__(self, other):
        return Dense(self.n, self.k, {t: self.table[t] + other.table[t] for t in self.table})

    def is_zero(self):
        return all(sp.expand(c) == 0 for c in self.table.values())

    def __eq__(self, other):
        return self.k == other.k and (self - other).is_zero()

    def increasing(self):
        """Components on strictly increasing 1-based tuples (nonzero only)."""
        out = {}
        for t, c in self.table.items():
            if list(t) == sorted(set(t)) and sp.expand(c) != 0:
                out[tuple(i + 1 for i in t)] = sp.expand(c)
        return out


def d(a):
    x = coords(a.n)
    out = Dense(a.n, a.k + 1)
    for t in out.table:
        total = 0
        for m in range(a.k + 1):
            rest = t[:m] + t[m + 1:]
            total += (-1) ** m * sp.diff(a.table[rest], x[t[m]])
        out.table[t] = sp.expand(total)
    return out


def contract(v, a):
    """``(i_v a)(w2..wk) = a(v, w2..wk)``; ``v`` is a list of n expressions."""
    out = Dense(a.n, a.k - 1)
    for t in out.table:
        out.table[t] = sp.expand(sum(v[i] * a.table[(i,) + t] for i in range(a.n)))
    return out


def lie(v, a):
    if a.k == 0:
        return contract(v, d(a))
    return contract(v, d(a)) + d(contract(v, a))


def function(n, f):
    return Dense(n, 0, {(): f})


def value(a):
    return sp.expand(a.table[()])


def vf_bracket(u, v, n):
    x = coords(n)
    return [sp.expand(sum(u[j] * sp.diff(v[i], x[j]) - v[j] * sp.diff(u[i], x[j]) for j in range(n))) for i in range(n)]


def hamiltonian_field(omega, alpha):
    """Solve ``d alpha = -i_v omega`` for v with polynomial unknowns of degree <= 3."""
    n = omega.n
    x = coords(n)
    monos = sorted(sp.itermonomials(x, 3), key=sp.default_sort_key)
    unknowns, v = [], []
    for i in range(n):
        cs = sp.symbols(f"c{i}_0:{len(monos)}")
        unknowns.extend(cs)
        v.append(sum(c * m for c, m in zip(cs, monos)))
    residual = d(alpha) + contract(v, omega)
    eqs = []
    for c in residual.table.values():
        eqs.extend(sp.Poly(c, *x).coeffs())
    sol = sp.solve(eqs, unknowns, dict=True)
    assert len(sol) == 1
    return [sp.expand(vi.subs(sol[0]).subs({u: 0 for u in unknowns})) for vi in v]


def homotopy(a):
    """``P(a)(x) = int_0^1 t^(k-1) (i_x a)(tx) dt``."""
    x = coords(a.n)
    t = sp.Symbol("t")
    scaled = Dense(a.n, a.k, {key: c.subs({xi: t * xi for xi in x}, simultaneous=True) for key, c in a.table.items()})
    ia = contract(list(x), scaled)
    out = Dense(a.n, a.k - 1)
    for key, c in ia.table.items():
        out.table[key] = sp.expand(sp.integrate(t ** (a.k - 1) * c, (t, 0, 1)))
    return out


# -- bridges from package objects -------------------------------------------------


def to_sympy(p):
    x = coords(p.nvars)
    total = sp.Integer(0)
    for exps, c in p.terms.items():
        term = sp.Rational(int(c.numerator), int(c.denominator))
        for xi, e in zip(x, exps):
            term *= xi**e
        total += term
    return sp.expand(total)


def to_dense(form):
    return Dense.basis(form.nvars, form.degree, [(to_sympy(p), idx) for idx, p in form.comps.items()])


def field_to_sympy(v):
    return [to_sympy(p) for p in v.comps]


# -- split Courant algebroid on dense data; a section is (field list, Dense 1-form) --


def pairing(e1, e2):
    return value(contract(e1[0], e2[1])) + value(contract(e2[0], e1[1]))


def courant_bracket(omega, e1, e2):
    (v1, a1), (v2, a2) = e1, e2
    n = omega.n
    mixed = value(contract(v1, a2)) - value(contract(v2, a1))
    form = lie(v1, a2) - lie(v2, a1) - d(function(n, sp.Rational(1, 2) * mixed))
    form = form + contract(v2, contract(v1, omega))
    return vf_bracket(v1, v2, n), form


def section(form_or_pair):
    """Bridge a package Section."""
    return field_to_sympy(form_or_pair.v), to_dense(form_or_pair.alpha)
