"""Evaluate ``show`` expressions such as ``semi_bracket(alpha, beta)``.

An expression is a scenario name (``omega`` is always defined) or a call
of a registered operation on expressions.  Nothing else is accepted.
"""

from __future__ import annotations

import ast
from functools import cached_property
from typing import Any, Callable

from . import courant as cr
from .exterior import (
    DifferentialForm,
    VectorField,
    exterior_derivative,
    interior_product,
    lie_derivative_form,
    poincare_primitive,
    vf_bracket,
    wedge,
)
from .lie2 import EmbeddingHom, hom_phi0, hom_phi1, hom_phi2
from .plectic import (
    HamiltonianPair,
    PlecticStructure,
    b_form,
    check_two_plectic,
    hamiltonian_pair,
    hamiltonian_vector_field,
    jacobiator_JL,
    semi_bracket,
)
from .ring import Polynomial
from .scenario import Scenario

__all__ = ["ShowError", "Evaluator", "evaluate", "OPERATIONS"]


class ShowError(ValueError):
    pass


class Evaluator:
    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.n = scenario.dimension

    @cached_property
    def P(self) -> PlecticStructure:
        return check_two_plectic(self.scenario.omega, self.scenario.sample_points)

    @cached_property
    def C(self) -> cr.CourantStructure:
        return cr.CourantStructure(self.n, self.scenario.omega)

    # -- coercions ------------------------------------------------------------

    def pair(self, x) -> HamiltonianPair:
        if isinstance(x, HamiltonianPair):
            return x
        if isinstance(x, DifferentialForm) and x.degree == 1:
            return hamiltonian_pair(self.P, x)
        raise ShowError(f"expected a Hamiltonian 1-form, got {_kind(x)}")

    def section(self, x) -> cr.Section:
        if isinstance(x, cr.Section):
            return x
        if isinstance(x, VectorField):
            return cr.Section(x, DifferentialForm.zero(self.n, 1))
        if isinstance(x, DifferentialForm) and x.degree == 1:
            return cr.rho_star(x)
        raise ShowError(f"expected a section, got {_kind(x)}")

    def function(self, x) -> Polynomial:
        if isinstance(x, Polynomial):
            return x
        if isinstance(x, DifferentialForm) and x.degree == 0:
            return x.as_function()
        raise ShowError(f"expected a polynomial, got {_kind(x)}")

    def form(self, x) -> DifferentialForm:
        if isinstance(x, DifferentialForm):
            return x
        if isinstance(x, Polynomial):
            return DifferentialForm.function(x)
        if isinstance(x, HamiltonianPair):
            return x.alpha
        raise ShowError(f"expected a differential form, got {_kind(x)}")

    def field(self, x) -> VectorField:
        if isinstance(x, VectorField):
            return x
        raise ShowError(f"expected a vector field, got {_kind(x)}")

    # -- evaluation -----------------------------------------------------------

    def lookup(self, name: str):
        if name == "omega":
            return self.scenario.omega
        try:
            return self.scenario.named_objects[name]
        except KeyError:
            known = ", ".join(["omega", *sorted(self.scenario.named_objects)])
            raise ShowError(f"unknown name {name!r}; defined names: {known}") from None

    def eval_node(self, node: ast.AST):
        if isinstance(node, ast.Name):
            return self.lookup(node.id)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
            name = node.func.id
            if name not in OPERATIONS:
                raise ShowError(f"unknown operation {name!r}; available: {', '.join(sorted(OPERATIONS))}")
            arity, fn = OPERATIONS[name]
            if len(node.args) not in arity:
                raise ShowError(f"{name} takes {' or '.join(map(str, arity))} argument(s), got {len(node.args)}")
            return fn(self, *[self.eval_node(a) for a in node.args])
        raise ShowError(f"unsupported syntax: {ast.unparse(node)!r}")

    def evaluate(self, expr: str):
        try:
            tree = ast.parse(expr.strip(), mode="eval")
        except SyntaxError as exc:
            raise ShowError(f"cannot parse {expr!r}: {exc.msg}") from None
        return self.eval_node(tree.body)


def _kind(x) -> str:
    if isinstance(x, DifferentialForm):
        return f"a {x.degree}-form"
    return type(x).__name__


def _curvature(ev: Evaluator, theta=None):
    A = cr.Connection.zero(ev.n) if theta is None else cr.Connection(ev.form(theta))
    return cr.curvature_three_form(ev.C, A)


def _embedding(ev: Evaluator) -> EmbeddingHom:
    return EmbeddingHom.of(ev.P)


OPERATIONS: dict[str, tuple[tuple[int, ...], Callable[..., Any]]] = {
    "hamiltonian_vector_field": ((1,), lambda ev, a: hamiltonian_vector_field(ev.P, ev.form(a))),
    "semi_bracket": ((2,), lambda ev, a, b: semi_bracket(ev.P, ev.pair(a), ev.pair(b)).alpha),
    "jacobiator_JL": ((3,), lambda ev, a, b, c: jacobiator_JL(ev.P, ev.pair(a), ev.pair(b), ev.pair(c))),
    "b_form": ((2,), lambda ev, a, b: b_form(ev.pair(a), ev.pair(b))),
    "phi0": ((1,), lambda ev, a: hom_phi0(_embedding(ev), ev.pair(a))),
    "phi1": ((1,), lambda ev, f: hom_phi1(_embedding(ev), ev.function(f))),
    "phi2": ((2,), lambda ev, a, b: hom_phi2(_embedding(ev), ev.pair(a), ev.pair(b))),
    "bilinear_form": ((2,), lambda ev, a, b: cr.bilinear_form(ev.section(a), ev.section(b))),
    "standard_bracket": ((2,), lambda ev, a, b: cr.standard_bracket(ev.section(a), ev.section(b))),
    "twisted_bracket": ((2,), lambda ev, a, b: cr.twisted_bracket(ev.C, ev.section(a), ev.section(b))),
    "dorfman": ((2,), lambda ev, a, b: cr.dorfman(ev.C, ev.section(a), ev.section(b))),
    "jacobiator_T": ((3,), lambda ev, a, b, c: cr.jacobiator_T(ev.C, *(ev.section(x) for x in (a, b, c)))),
    "D": ((1,), lambda ev, f: cr.d_operator(ev.function(f))),
    "curvature": ((0, 1), _curvature),
    "adjoint_action": ((2,), lambda ev, s, e: cr.adjoint_action(ev.C, ev.section(s), ev.section(e))),
    "is_symmetry": ((1,), lambda ev, s: cr.is_plectic_symmetry_section(ev.P, ev.section(s))),
    "gauge": ((2,), lambda ev, B, e: cr.gauge_exp_b(ev.form(B), ev.section(e))),
    "d": ((1,), lambda ev, a: exterior_derivative(ev.form(a))),
    "wedge": ((2,), lambda ev, a, b: wedge(ev.form(a), ev.form(b))),
    "interior": ((2,), lambda ev, v, a: interior_product(ev.field(v), ev.form(a))),
    "lie": ((2,), lambda ev, v, a: lie_derivative_form(ev.field(v), ev.form(a))),
    "bracket": ((2,), lambda ev, u, v: vf_bracket(ev.field(u), ev.field(v))),
    "primitive": ((1,), lambda ev, a: poincare_primitive(ev.form(a))),
}


def evaluate(scenario: Scenario, expr: str):
    return Evaluator(scenario).evaluate(expr)
