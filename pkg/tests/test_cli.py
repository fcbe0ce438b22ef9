import json
import subprocess
import sys
from importlib import resources

import pytest

from twoplectic.cli import main
from twoplectic.courant import Section
from twoplectic.exterior import DifferentialForm, VectorField, dx
from twoplectic.ring import Polynomial
from twoplectic.scenario import (
    ScenarioError,
    dump_object,
    load_scenario,
    parse_object,
    parse_scenario,
)

SCENARIOS = resources.files("twoplectic") / "scenarios"


def scenario(name):
    return str(SCENARIOS / name)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- scenario files --------------------------------------------------------------


def test_shipped_r3_volume():
    s = load_scenario(scenario("r3_volume.json"))
    assert s.dimension == 3
    assert s.omega == dx(3, 1, 2, 3)
    assert s.named_objects["alpha"] == dx(3, 3, coeff=Polynomial.var(3, 2))


def test_all_shipped_scenarios_parse():
    names = sorted(p.name for p in SCENARIOS.iterdir() if p.name.endswith(".json"))
    assert "bad_degree.json" in names
    for name in names:
        if name == "bad_degree.json":
            with pytest.raises(ScenarioError, match="3-form"):
                load_scenario(scenario(name))
        else:
            load_scenario(scenario(name))


@pytest.mark.parametrize(
    "doc, message",
    [
        ([], "JSON object"),
        ({"dimension": 3}, "required"),
        ({"dimension": 0, "omega": []}, "positive"),
        ({"dimension": 3, "omega": [], "bogus": 1}, "unknown keys"),
        ({"dimension": 3, "omega": {"degree": 3, "terms": []}, "suites": ["nope"]}, "suites"),
        ({"dimension": 3, "omega": {"degree": 3, "terms": []}, "trials": 0}, "trials"),
        ({"dimension": 3, "omega": {"degree": 3, "terms": []}, "sample_points": [[1, 2]]}, "sample_points"),
    ],
)
def test_schema_errors(doc, message):
    with pytest.raises(ScenarioError, match=message):
        parse_scenario(doc)


def test_float_and_syntax_errors(tmp_path):
    p = tmp_path / "f.json"
    p.write_text('{"dimension": 3, "omega": {"degree": 3, "terms": [{"indices": [1,2,3], "poly": 0.5}]}}')
    with pytest.raises(ScenarioError, match="floating-point"):
        load_scenario(p)
    p.write_text('{"dimension": 3,\n "omega": }')
    with pytest.raises(ScenarioError, match="line 2"):
        load_scenario(p)
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "missing.json")


def test_object_round_trip():
    n = 3
    x1, x2 = Polynomial.var(n, 1), Polynomial.var(n, 2)
    objects = [
        x1 * x2 - Polynomial.constant(n, "1/3"),
        DifferentialForm.zero(n, 3),
        dx(n, 2, 3, coeff=x1) + dx(n, 1, 2, coeff="-5/2"),
        VectorField([x2, Polynomial.zero(n), Polynomial.constant(n, 4)]),
        Section(VectorField.coordinate(n, 1), dx(n, 3, coeff=x1)),
    ]
    for obj in objects:
        dumped = json.loads(json.dumps(dump_object(obj)))
        assert parse_object(dumped, n) == obj


# -- show ------------------------------------------------------------------------

SHOW_CASES = [
    ("hamiltonian_vector_field(alpha)", "-∂1"),
    ("semi_bracket(alpha, beta)", "dx3"),
    ("phi0(alpha)", "(-∂1, -x2 dx3)"),
    ("phi2(alpha, beta)", "1/2*x3"),
    ("jacobiator_JL(alpha, beta, gamma)", "1"),
    ("phi1(f)", "-x1"),
    ("D(f)", "(0, dx1)"),
    ("twisted_bracket(e1, e2)", "(0, dx3)"),
    ("curvature()", "dx1^dx2^dx3"),
    ("adjoint_action(s, t)", "(0, -dx2)"),
]


@pytest.mark.parametrize("expr, expected", SHOW_CASES)
def test_show(capsys, expr, expected):
    code, out, _ = run(capsys, "show", "--scenario", scenario("r3_volume.json"), "--expr", expr)
    assert code == 0
    assert out.strip() == expected


def test_show_symmetry_verdicts(capsys):
    _, out, _ = run(capsys, "show", "--scenario", scenario("r3_volume.json"), "--expr", "is_symmetry(s)")
    assert out.startswith("symmetry section")
    _, out, _ = run(capsys, "show", "--scenario", scenario("r3_volume.json"), "--expr", "is_symmetry(t)")
    assert out.strip() == "not a symmetry section; B = -dx1^dx2 + dx2^dx3"


@pytest.mark.parametrize(
    "expr, message",
    [
        ("nothing", "unknown name"),
        ("frobnicate(alpha)", "unknown operation"),
        ("alpha + beta", "unsupported syntax"),
        ("semi_bracket(alpha)", "takes 2"),
        ("bracket(alpha, beta)", "expected a vector field"),
        ("semi_bracket(alpha,", "cannot parse"),
    ],
)
def test_show_errors(capsys, expr, message):
    code, _, err = run(capsys, "show", "--scenario", scenario("r3_volume.json"), "--expr", expr)
    assert code == 2
    assert err.startswith("error: ") and message in err


# -- verify ----------------------------------------------------------------------


def test_verify_text_report(capsys):
    code, out, _ = run(capsys, "verify", "--scenario", scenario("r3_volume.json"), "--suite", "ring_laws", "--trials", "3")
    assert code == 0
    assert out.splitlines()[0] == "== ring_laws: PASS"
    assert out.rstrip().endswith("overall: PASS")


def test_verify_json_report(capsys):
    code, out, _ = run(
        capsys, "verify", "--scenario", scenario("r6_block.json"), "--suite", "plectic", "--trials", "2", "--report", "json"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["overall_pass"] is True
    (suite,) = doc["suites"]
    assert suite["suite"] == "plectic"
    assert doc["settings"]["trials"] == 2 and "jobs" not in doc["settings"]
    assert all(r["trials"] == 2 and r["failures"] == 0 for r in suite["identities"])


def test_negative_fixture_reports_expected_failures(capsys):
    code, out, _ = run(
        capsys, "verify", "--scenario", scenario("symmetry_negative_r3.json"), "--trials", "5", "--report", "json"
    )
    assert code == 0
    results = json.loads(out)["suites"][0]["identities"]
    expected = {r["name"] for r in results if r["expect_failure"]}
    assert expected == {"gauge_preserves_bracket[non-closed B]", "swap_is_automorphism"}
    assert all(r["failures"] > 0 for r in results if r["expect_failure"])


@pytest.mark.parametrize(
    "name, message",
    [
        ("r4_not_closed.json", "not closed"),
        ("r4_degenerate.json", "degenerate"),
        ("bad_degree.json", "3-form"),
    ],
)
def test_verify_rejects_invalid_scenarios(capsys, name, message):
    code, out, err = run(capsys, "verify", "--scenario", scenario(name))
    assert code == 2
    assert out == ""
    assert message in err


def test_same_seed_same_report(capsys):
    argv = ["verify", "--scenario", scenario("e0_r3.json"), "--suite", "courant_def21", "--trials", "3", "--report", "json"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    _, other, _ = run(capsys, *argv, "--seed", "9")
    assert first == second
    assert first != other


def test_bad_arguments(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", "--scenario", scenario("r3_volume.json"), "--trials", "0"])
    assert info.value.code == 2
    capsys.readouterr()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "twoplectic", "show", "--scenario", scenario("r3_volume.json"), "--expr", "d(alpha)"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "dx2^dx3"
