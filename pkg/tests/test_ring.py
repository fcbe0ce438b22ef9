from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from conftest import polynomials
from twoplectic.ring import Polynomial, format_rational, make_rng, random_polynomial, rational

x1 = Polynomial.var(2, 1)
x2 = Polynomial.var(2, 2)
one = Polynomial.constant(2, 1)


def test_addition_examples():
    assert (x1 + 1) + (-x1) == one
    assert x1 + Polynomial.zero(2) == x1
    half = Polynomial.constant(2, "1/2")
    assert half * x2 + half * x2 == x2


def test_multiplication_examples():
    assert (x1 + 1) * (x1 - 1) == x1 * x1 - 1
    assert x1 * one == x1
    assert x1 * x2 == Polynomial.monomial((1, 1))


def test_partials():
    assert (x1 * x1 * x2).partial(1) == 2 * x1 * x2
    assert x1.partial(2).is_zero()
    assert (x1 * x2 + x1).partial(1) == x2 + 1


def test_evaluate():
    assert (x1 * x1 * x2).evaluate([2, 3]) == 12
    assert Polynomial.constant(2, 5).evaluate(["7/3", -1]) == 5
    assert (x1 - x2).evaluate([1, 1]) == 0


def test_zero_coefficients_are_dropped():
    p = Polynomial(2, {(1, 0): 0, (0, 1): 2})
    assert p.terms == {(0, 1): mpq(2)}
    assert (x1 - x1).terms == {}


def test_rational_coercion():
    assert rational("3/6") == mpq(1, 2)
    assert rational(Fraction(2, 4)) == mpq(1, 2)
    with pytest.raises(TypeError):
        rational(0.5)
    with pytest.raises(ZeroDivisionError):
        rational("1/0")
    assert format_rational(mpq(-3, 6)) == "-1/2"


def test_printing():
    assert str(x1 * x2 - Polynomial.constant(2, "1/2") * x2) == "x1*x2 - 1/2*x2"
    assert str(Polynomial.zero(3)) == "0"


def test_random_polynomial_bounds():
    rng = make_rng(7, "ring", "deg0", 0)
    p = random_polynomial(3, 0, 3, rng, max_terms=None)
    assert p.is_constant()
    for trial in range(30):
        p = random_polynomial(3, 3, 3, make_rng(7, "ring", "deg3", trial), max_terms=4)
        assert all(sum(e) <= 3 for e in p.terms)
        assert all(abs(c) <= 3 and c.denominator == 1 for c in p.terms.values())


def test_random_polynomial_deterministic():
    a = random_polynomial(3, 3, 3, make_rng(11, "s", "i", 4))
    b = random_polynomial(3, 3, 3, make_rng(11, "s", "i", 4))
    c = random_polynomial(3, 3, 3, make_rng(11, "s", "i", 5))
    assert a == b
    assert a != c or a.is_zero()


def test_random_polynomial_restricted_variables():
    for trial in range(20):
        p = random_polynomial(4, 3, 2, make_rng(0, "vars", trial), variables=[2, 4])
        assert all(e[0] == 0 and e[2] == 0 for e in p.terms)


P3 = polynomials(3)


@given(P3, P3, P3)
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert (p + q) + r == p + (q + r)
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == Polynomial.zero(3)


@given(P3, P3, st.integers(1, 3), st.integers(1, 3))
def test_derivative_laws(p, q, i, j):
    assert (p * q).partial(i) == p.partial(i) * q + p * q.partial(i)
    assert p.partial(i).partial(j) == p.partial(j).partial(i)


@given(P3, P3, st.lists(st.fractions(max_denominator=5, min_value=-4, max_value=4), min_size=3, max_size=3))
def test_evaluation_is_a_homomorphism(p, q, pt):
    assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)
    assert (p + q).evaluate(pt) == p.evaluate(pt) + q.evaluate(pt)


@given(P3, st.lists(P3, min_size=3, max_size=3), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_compose_then_evaluate(p, subs, pt):
    inner = [s.evaluate(pt) for s in subs]
    assert p.compose(subs).evaluate(pt) == p.evaluate(inner)
