"""JSON scenario files: structures, named objects and suite selections.

Everything exact: rationals are strings like ``"-3/4"`` or JSON integers,
never floats.

* polynomial: ``[{"coeff": "1/2", "exps": [1, 0, 2]}, ...]``
* form: ``[{"indices": [1, 3], "poly": <polynomial>}, ...]``, or
  ``{"degree": k, "terms": [...]}`` when the list may be empty
* vector field: list of ``dimension`` polynomials
* section: ``{"v": <vector field>, "alpha": <1-form>}``
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

from .courant import Section
from .exterior import DifferentialForm, VectorField
from .ring import Polynomial, Rational, format_rational, rational

__all__ = [
    "ScenarioError",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "parse_polynomial",
    "parse_form",
    "parse_vector_field",
    "parse_section",
    "parse_object",
    "dump_polynomial",
    "dump_form",
    "dump_vector_field",
    "dump_section",
    "dump_object",
    "SUITE_NAMES",
]

SUITE_NAMES = (
    "ring_laws",
    "exterior_calculus",
    "plectic",
    "courant_def21",
    "courant_def22",
    "curvature",
    "lie2_plectic",
    "lie2_courant",
    "embedding",
    "symmetry",
    "symmetry_negative",
    "degeneracy_r4",
)

NamedObject = Union[Polynomial, DifferentialForm, VectorField, Section]


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario; the message says where."""


@dataclass
class Scenario:
    dimension: int
    omega: DifferentialForm
    named_objects: dict[str, NamedObject] = field(default_factory=dict)
    suites: list[str] = field(default_factory=list)
    trials: int = 100
    seed: int = 0
    max_degree: int = 3
    coeff_bound: int = 3
    sample_points: list[tuple[Rational, ...]] = field(default_factory=list)
    source: str = "<memory>"


# -- parsing --------------------------------------------------------------------


def _coeff(x: Any, where: str) -> Rational:
    if isinstance(x, bool) or isinstance(x, float):
        raise ScenarioError(f"{where}: coefficient {x!r} must be an integer or a 'p/q' string")
    try:
        return rational(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ScenarioError(f"{where}: bad rational {x!r} ({exc})") from None


def _nonneg_int(x: Any, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < 0:
        raise ScenarioError(f"{where}: expected a non-negative integer, got {x!r}")
    return x


def parse_polynomial(data: Any, n: int, where: str = "polynomial") -> Polynomial:
    if isinstance(data, (int, str)) and not isinstance(data, bool):
        return Polynomial.constant(n, _coeff(data, where))
    if not isinstance(data, list):
        raise ScenarioError(f"{where}: polynomial must be a list of terms")
    terms: dict[tuple[int, ...], Rational] = {}
    for k, term in enumerate(data):
        w = f"{where}[{k}]"
        if not isinstance(term, dict) or set(term) != {"coeff", "exps"}:
            raise ScenarioError(f"{w}: term must have exactly the keys 'coeff' and 'exps'")
        exps = term["exps"]
        if not isinstance(exps, list) or len(exps) != n:
            raise ScenarioError(f"{w}: 'exps' must list {n} exponents")
        key = tuple(_nonneg_int(e, w) for e in exps)
        terms[key] = terms.get(key, 0) + _coeff(term["coeff"], w)
    return Polynomial(n, terms)


def parse_form(data: Any, n: int, degree: int | None = None, where: str = "form") -> DifferentialForm:
    if isinstance(data, dict):
        if set(data) != {"degree", "terms"}:
            raise ScenarioError(f"{where}: form object needs exactly 'degree' and 'terms'")
        k = _nonneg_int(data["degree"], where)
        if degree is not None and k != degree:
            raise ScenarioError(f"{where}: expected a {degree}-form, got degree {k}")
        degree, data = k, data["terms"]
    if not isinstance(data, list):
        raise ScenarioError(f"{where}: form must be a list of terms")
    comps: dict[tuple[int, ...], Polynomial] = {}
    for k, term in enumerate(data):
        w = f"{where}[{k}]"
        if not isinstance(term, dict) or set(term) != {"indices", "poly"}:
            raise ScenarioError(f"{w}: term must have exactly the keys 'indices' and 'poly'")
        idx = term["indices"]
        if not isinstance(idx, list) or any(isinstance(i, bool) or not isinstance(i, int) for i in idx):
            raise ScenarioError(f"{w}: 'indices' must be a list of integers")
        if any(i < 1 or i > n for i in idx):
            raise ScenarioError(f"{w}: indices {idx} out of range 1..{n}")
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise ScenarioError(f"{w}: indices {idx} must be strictly increasing")
        if degree is None:
            degree = len(idx)
        elif len(idx) != degree:
            raise ScenarioError(f"{w}: {len(idx)} indices in a {degree}-form")
        key = tuple(idx)
        comps[key] = comps.get(key, Polynomial.zero(n)) + parse_polynomial(term["poly"], n, f"{w}.poly")
    if degree is None:
        raise ScenarioError(f"{where}: empty form; use {{'degree': k, 'terms': []}}")
    return DifferentialForm(n, degree, comps)


def parse_vector_field(data: Any, n: int, where: str = "vector field") -> VectorField:
    if not isinstance(data, list) or len(data) != n:
        raise ScenarioError(f"{where}: vector field must list {n} polynomials")
    return VectorField([parse_polynomial(p, n, f"{where}[{i}]") for i, p in enumerate(data)])


def parse_section(data: Any, n: int, where: str = "section") -> Section:
    if not isinstance(data, dict) or set(data) != {"v", "alpha"}:
        raise ScenarioError(f"{where}: section must have exactly the keys 'v' and 'alpha'")
    return Section(
        parse_vector_field(data["v"], n, f"{where}.v"),
        parse_form(data["alpha"], n, 1, f"{where}.alpha"),
    )


def parse_object(data: Any, n: int, where: str = "object") -> NamedObject:
    """Infer the kind of a named object from its shape."""
    if isinstance(data, dict):
        if set(data) == {"v", "alpha"}:
            return parse_section(data, n, where)
        if set(data) == {"degree", "terms"}:
            return parse_form(data, n, where=where)
        raise ScenarioError(f"{where}: cannot tell what object {sorted(data)} describes")
    if isinstance(data, (int, str)) and not isinstance(data, bool):
        return parse_polynomial(data, n, where)
    if isinstance(data, list):
        if not data:
            raise ScenarioError(f"{where}: empty list is ambiguous; wrap forms as {{'degree', 'terms'}}")
        first = data[0]
        if not any(isinstance(x, dict) for x in data):
            return parse_vector_field(data, n, where)
        if isinstance(first, dict) and "indices" in first:
            return parse_form(data, n, where=where)
        if isinstance(first, dict) and "exps" in first:
            return parse_polynomial(data, n, where)
    raise ScenarioError(f"{where}: unrecognised object")


def parse_scenario(doc: Any, source: str = "<memory>") -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError(f"{source}: top level must be a JSON object")
    known = {
        "dimension", "omega", "named_objects", "suites", "trials", "seed",
        "max_degree", "coeff_bound", "sample_points", "description",
    }
    extra = set(doc) - known
    if extra:
        raise ScenarioError(f"{source}: unknown keys {sorted(extra)}")
    if "dimension" not in doc or "omega" not in doc:
        raise ScenarioError(f"{source}: 'dimension' and 'omega' are required")
    n = doc["dimension"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ScenarioError(f"{source}: dimension must be a positive integer")
    omega = parse_form(doc["omega"], n, where="omega")
    if omega.degree != 3:
        raise ScenarioError(f"omega: expected a 3-form, got degree {omega.degree}")
    named = {}
    for name, obj in (doc.get("named_objects") or {}).items():
        if not name.isidentifier():
            raise ScenarioError(f"named_objects: {name!r} is not a valid identifier")
        named[name] = parse_object(obj, n, f"named_objects.{name}")
    suites = doc.get("suites", list(SUITE_NAMES))
    if not isinstance(suites, list) or any(s not in SUITE_NAMES for s in suites):
        raise ScenarioError(f"suites: every entry must be one of {', '.join(SUITE_NAMES)}")
    points = []
    for k, p in enumerate(doc.get("sample_points", [])):
        if not isinstance(p, list) or len(p) != n:
            raise ScenarioError(f"sample_points[{k}]: expected {n} coordinates")
        points.append(tuple(_coeff(x, f"sample_points[{k}]") for x in p))
    trials = doc.get("trials", 100)
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 1:
        raise ScenarioError("trials must be a positive integer")
    coeff_bound = doc.get("coeff_bound", 3)
    if isinstance(coeff_bound, bool) or not isinstance(coeff_bound, int) or coeff_bound < 1:
        raise ScenarioError("coeff_bound must be a positive integer")
    return Scenario(
        dimension=n,
        omega=omega,
        named_objects=named,
        suites=list(suites),
        trials=trials,
        seed=_nonneg_int(doc.get("seed", 0), "seed"),
        max_degree=_nonneg_int(doc.get("max_degree", 3), "max_degree"),
        coeff_bound=coeff_bound,
        sample_points=points,
        source=source,
    )


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario file.

    Closedness and nondegeneracy of omega are checked later, by the suites
    that need them (see ``suites.prepare``).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_scenario(doc, str(path))


def _reject_float(text: str):
    raise ScenarioError(f"floating-point literal {text} is not allowed; write rationals as 'p/q' strings")


# -- dumping --------------------------------------------------------------------


def _dump_coeff(c: Rational) -> str:
    return format_rational(c)


def dump_polynomial(p: Polynomial) -> list:
    return [{"coeff": _dump_coeff(c), "exps": list(e)} for e, c in p.sorted_terms()]


def dump_form(a: DifferentialForm) -> dict:
    terms = [{"indices": list(idx), "poly": dump_polynomial(a.comps[idx])} for idx in sorted(a.comps)]
    return {"degree": a.degree, "terms": terms}


def dump_vector_field(v: VectorField) -> list:
    return [dump_polynomial(p) for p in v.comps]


def dump_section(e: Section) -> dict:
    return {"v": dump_vector_field(e.v), "alpha": dump_form(e.alpha)}


def dump_object(obj: NamedObject):
    if isinstance(obj, Polynomial):
        return dump_polynomial(obj)
    if isinstance(obj, DifferentialForm):
        return dump_form(obj)
    if isinstance(obj, VectorField):
        return dump_vector_field(obj)
    if isinstance(obj, Section):
        return dump_section(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")
