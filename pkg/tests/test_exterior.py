import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle as O
from conftest import forms, polynomials, vector_fields
from twoplectic.exterior import (
    AffineMap,
    DifferentialForm,
    NotClosedError,
    VectorField,
    dx,
    exterior_derivative,
    form_equal,
    interior_product,
    lie_derivative_form,
    one_form,
    poincare_primitive,
    pullback_form,
    pushforward_vf,
    vf_bracket,
    wedge,
)
from twoplectic.ring import Polynomial


def d(i, n=3):
    return VectorField.coordinate(n, i)


def x(i, n=3):
    return Polynomial.var(n, i)


def test_wedge_examples():
    assert wedge(wedge(dx(3, 1), dx(3, 2)), dx(3, 1)).is_zero()
    assert wedge(dx(3, 2), dx(3, 1)) == -dx(3, 1, 2)
    assert wedge(dx(3, 1, coeff=x(2)), dx(3, 3)) == dx(3, 1, 3, coeff=x(2))


def test_exterior_derivative_examples():
    assert exterior_derivative(dx(3, 3, coeff=x(2))) == dx(3, 2, 3)
    # moving dx4 past three legs costs (-1)^3
    assert exterior_derivative(dx(4, 1, 2, 3, coeff=x(4, 4))) == -dx(4, 1, 2, 3, 4)
    p = x(1) * x(2) * x(3) + x(3) ** 3
    assert exterior_derivative(exterior_derivative(DifferentialForm.function(p))).is_zero()


def test_interior_examples():
    assert interior_product(d(3), dx(3, 1, 2, 3)) == dx(3, 1, 2)
    assert interior_product(VectorField([x(1), x(1) * 0, x(1) * 0]), dx(3, 1)).as_function() == x(1)


def test_lie_and_bracket_examples():
    assert lie_derivative_form(d(1), dx(3, 2, coeff=x(1))) == dx(3, 2)
    assert lie_derivative_form(d(1), dx(3, 1, 2, 3)).is_zero()
    assert vf_bracket(d(1), VectorField([0 * x(1), x(1), 0 * x(1)])) == d(2)
    assert vf_bracket(d(1), d(2)).is_zero()


def test_affine_examples():
    swap = AffineMap.permutation([2, 1])
    assert pullback_form(swap, dx(2, 1)) == dx(2, 2)
    assert pushforward_vf(swap, d(1, 2)) == d(2, 2)
    ident = AffineMap.identity(3)
    a = dx(3, 2, 3, coeff=x(1) * x(2))
    assert pullback_form(ident, a) == a
    assert pushforward_vf(ident, VectorField([x(2), x(3), x(1)])) == VectorField([x(2), x(3), x(1)])
    assert AffineMap.permutation([2, 1, 3]).determinant() == -1


def test_poincare_examples():
    half = Polynomial.constant(3, "1/2")
    assert poincare_primitive(dx(3, 1, 2)) == one_form([-half * x(2), half * x(1), 0 * x(1)])
    with pytest.raises(NotClosedError) as info:
        poincare_primitive(dx(3, 2, coeff=x(1)))
    assert info.value.differential == dx(3, 1, 2)


def test_form_equal():
    assert form_equal(dx(3, 1, 2), -wedge(dx(3, 2), dx(3, 1)))
    assert not form_equal(dx(3, 1), dx(3, 2))
    assert form_equal(dx(3, 1), dx(3, 1) + dx(3, 1, coeff=0))


def test_printing():
    assert str(dx(3, 1, 2, 3)) == "dx1^dx2^dx3"
    assert str(-d(1)) == "-∂1"
    assert str(dx(3, 3, coeff=x(1) + 1)) == "(x1 + 1) dx3"


# -- against the sympy oracle ----------------------------------------------------

oracle_settings = settings(max_examples=15, deadline=None)
small = dict(max_degree=2, max_terms=2)
degrees = st.integers(0, 3)


@oracle_settings
@given(st.data())
def test_d_matches_oracle(data):
    k = data.draw(degrees)
    a = data.draw(forms(3, k))
    assert O.to_dense(exterior_derivative(a)) == O.d(O.to_dense(a))


@oracle_settings
@given(st.data())
def test_interior_matches_oracle(data):
    k = data.draw(st.integers(1, 3))
    a = data.draw(forms(3, k, **small))
    v = data.draw(vector_fields(3, **small))
    assert O.to_dense(interior_product(v, a)) == O.contract(O.field_to_sympy(v), O.to_dense(a))


@oracle_settings
@given(st.data())
def test_wedge_matches_oracle(data):
    # oracle wedge by the shuffle formula on dense arrays
    from itertools import permutations
    from math import factorial

    k, l = data.draw(st.integers(0, 2)), data.draw(st.integers(0, 1))
    a, b = data.draw(forms(3, k, **small)), data.draw(forms(3, l, **small))
    A, B = O.to_dense(a), O.to_dense(b)
    out = O.Dense(3, k + l)
    for t in out.table:
        total = 0
        for p in permutations(range(k + l)):
            u = tuple(t[i] for i in p)
            total += O.perm_sign(p) * A.table[u[:k]] * B.table[u[k:]]
        out.table[t] = total / (factorial(k) * factorial(l))
    assert O.to_dense(wedge(a, b)) == out


@oracle_settings
@given(st.data())
def test_lie_matches_oracle(data):
    k = data.draw(st.integers(0, 2))
    a = data.draw(forms(3, k, **small))
    v = data.draw(vector_fields(3, **small))
    assert O.to_dense(lie_derivative_form(v, a)) == O.lie(O.field_to_sympy(v), O.to_dense(a))


@oracle_settings
@given(vector_fields(3, **small), vector_fields(3, **small))
def test_bracket_matches_oracle(u, v):
    got = O.field_to_sympy(vf_bracket(u, v))
    want = O.vf_bracket(O.field_to_sympy(u), O.field_to_sympy(v), 3)
    assert all((g - w).expand() == 0 for g, w in zip(got, want))


@oracle_settings
@given(st.data())
def test_primitive_matches_oracle(data):
    k = data.draw(st.integers(0, 2))
    b = data.draw(forms(3, k, **small))
    closed = exterior_derivative(b)
    assert O.to_dense(poincare_primitive(closed)) == O.homotopy(O.to_dense(closed))


# -- algebraic laws --------------------------------------------------------------


@given(st.data())
def test_graded_laws(data):
    k, l = data.draw(degrees), data.draw(degrees)
    a, b = data.draw(forms(3, k)), data.draw(forms(3, l))
    da, db = exterior_derivative(a), exterior_derivative(b)
    assert exterior_derivative(da).is_zero()
    sign = -1 if k % 2 else 1
    assert exterior_derivative(wedge(a, b)) == wedge(da, b) + wedge(a, db) * sign
    assert wedge(a, b) == wedge(b, a) * (-1 if k * l % 2 else 1)


@given(st.data())
def test_cartan_laws(data):
    k = data.draw(st.integers(1, 3))
    a = data.draw(forms(3, k, **small))
    u, v = data.draw(vector_fields(3, **small)), data.draw(vector_fields(3, **small))
    if k >= 2:
        assert interior_product(v, interior_product(v, a)).is_zero()
    lhs = interior_product(vf_bracket(u, v), a)
    rhs = lie_derivative_form(u, interior_product(v, a)) - interior_product(v, lie_derivative_form(u, a))
    assert lhs == rhs
    assert lie_derivative_form(v, exterior_derivative(a)) == exterior_derivative(lie_derivative_form(v, a))


@given(st.data())
def test_primitive_inverts_d(data):
    k = data.draw(st.integers(1, 3))
    a = exterior_derivative(data.draw(forms(3, k - 1)))
    assert exterior_derivative(poincare_primitive(a)) == a


def _det3(m):
    a, b, c, d_, e, f, g, h, i = m
    return a * (e * i - f * h) - b * (d_ * i - f * g) + c * (d_ * h - e * g)


affine = st.lists(st.integers(-2, 2), min_size=9, max_size=9).filter(lambda m: _det3(m) != 0)


@given(affine, st.lists(st.integers(-2, 2), min_size=3, max_size=3), st.data())
def test_affine_naturality(m, b, data):
    phi = AffineMap([m[0:3], m[3:6], m[6:9]], b)
    k = data.draw(st.integers(0, 2))
    a = data.draw(forms(3, k, **small))
    assert pullback_form(phi, exterior_derivative(a)) == exterior_derivative(pullback_form(phi, a))
    u, v = data.draw(vector_fields(3, **small)), data.draw(vector_fields(3, **small))
    assert pushforward_vf(phi, vf_bracket(u, v)) == vf_bracket(pushforward_vf(phi, u), pushforward_vf(phi, v))
    if k >= 1:
        lhs = pullback_form(phi, interior_product(pushforward_vf(phi, v), a))
        assert lhs == interior_product(v, pullback_form(phi, a))


def test_constant_coefficient_polynomials_accepted():
    a = DifferentialForm(3, 1, {(2,): 5})
    assert a.component((2,)) == Polynomial.constant(3, 5)
    with pytest.raises(ValueError):
        DifferentialForm(3, 2, {(1,): 1})
    with pytest.raises(ValueError):
        DifferentialForm(3, 1, {(4,): 1})


def test_polynomial_strategy_sanity():
    # keeps the shared strategy honest: it produces non-trivial input
    from hypothesis import find

    assert find(polynomials(3), lambda p: p.degree() == 3)
