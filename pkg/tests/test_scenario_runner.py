# tests/test_scenario_runner.py
import json
import os

import pytest

from hnets.exceptions import FormatError, ScenarioError
from hnets.formats.scenario_files import parse_scenario
from hnets.processors.scenario_runner import ScenarioRunner, _lookup, _matches, run_scenario
from hnets.utils.config import Config


@pytest.fixture
def runner(fixtures_dir):
    return ScenarioRunner(Config(), base_dir=str(fixtures_dir))


@pytest.mark.parametrize("name", ["topology.scn", "flux_phases.scn", "pauli_gerbe.scn", "fermi_statistics.scn"])
def test_fixture_scenarios_pass(runner, fixtures_dir, name):
    report, code = runner.run_file(os.path.join(fixtures_dir, name))
    assert code == 0, [o for o in report["expectations"] if not o["met"]]
    assert report["passed"] is True


def test_failed_expectation_gives_exit_code_one(runner):
    scenario = parse_scenario("scenario wrong\nstep pi1 spec=circle:6:2\nexpect pi1.abelian_rank 2\n")
    report, code = runner.run(scenario)
    assert code == 1
    assert report["expectations"][0]["actual"] == 1


def test_settings_are_applied(runner):
    scenario = parse_scenario("scenario s\nset tolerance 1e-6\nset seed 5\nstep poset spec=mincircle\n")
    report, code = runner.run(scenario)
    assert code == 0
    assert runner.tolerance == pytest.approx(1e-6)
    assert runner.seed == 5
    assert report["steps"]["poset"]["regions"] == 4


def test_failing_step_names_the_step(runner):
    scenario = parse_scenario("scenario s\nstep stats as=bad sector=nonsense\n")
    with pytest.raises(ScenarioError) as info:
        runner.run(scenario)
    assert "bad" in str(info.value)


def test_format_errors_pass_through(runner):
    with pytest.raises(FormatError):
        runner.run(parse_scenario("scenario s\nstep pi1 spec=sphere:2\n"))
    with pytest.raises(FormatError):
        runner.run_file("no-such-file.scn")


def test_unknown_operation(runner):
    with pytest.raises(ScenarioError):
        runner.run_step("teleport", {})


def test_single_steps(runner):
    assert runner.run_step("group", {"kind": "pauli"})["quotient_order"] == 4
    cocycle = runner.run_step("cocycle", {"file": "flux_third.cocycle"})
    assert cocycle["checks"]["passed"] is True
    bundle = runner.run_step("bundle", {"file": "mincircle_xz.bundle"})
    assert bundle["checks"]["passed"] is True
    assert bundle["holonomy"]["trivial"] is False
    lifts = runner.run_step("gerbe-lifts", {"problem": "circle_x.problem"})
    assert lifts["status"] == "solutions"
    assert lifts["delta_trivial"] is True
    ccs = runner.run_step("ccs", {"chi": "circle_quarter.chi"})
    assert ccs["winding_value"] == "1/4"


def test_cocycle_restrict_and_glue(runner):
    restricted = runner.run_step("cocycle", {"file": "flux_third.cocycle", "action": "restrict", "region": "a0+2"})
    assert restricted["checks"]["passed"] is True
    glued = runner.run_step("cocycle", {"file": "flux_third.cocycle", "action": "glue"})
    assert glued["identity"] is True
    with pytest.raises(ScenarioError):
        runner.run_step("cocycle", {"file": "flux_third.cocycle", "action": "invert"})


def test_lookup_walks_dicts_and_lists():
    result = {"a": {"b": [10, {"c": 3}]}}
    assert _lookup(result, "a.b.1.c") == 3
    assert _lookup(result, "a.b.0") == 10
    assert _lookup(result, "a.x") is None
    assert _lookup(result, "a.b.7") is None


@pytest.mark.parametrize("actual,expected,met", [
    (True, "true", True),
    (False, "true", False),
    (None, "none", True),
    ([-1.0, 0.0], "-1", True),
    ([0.0, 1.0], "i", True),
    ([0.0, 1.0], "1", False),
    (2, "2", True),
    (0.5, "1/2", True),
    (True, "1", False),
    ("1/3", "2/6", True),
    ("empty", "empty", True),
    ("empty", "solutions", False),
])
def test_matches(actual, expected, met):
    assert _matches(actual, expected, 1e-9) is met


def test_net_commutator_step(runner):
    out = runner.run_step("commutator", {"file": "mincircle_xz.bundle", "omega": "w,s,e", "target": "e",
                                         "source": "w", "t": "X", "t_prime": "Z"})
    assert out["anticommute"] is True
    assert out["commute"] is False
    assert out["max_len"] == 6
    assert out["checks"]["passed"] is True
    with pytest.raises(ScenarioError):
        runner.run_step("commutator", {"file": "mincircle_xz.bundle", "omega": "w,s,e"})


def test_run_scenario_function(fixtures_dir, tmp_path):
    report, code = run_scenario(os.path.join(fixtures_dir, "pauli_gerbe.scn"))
    assert code == 0
    assert report["steps"]["torus_lifts"]["status"] == "empty"
    bad = tmp_path / "bad.scn"
    bad.write_text("scenario bad\nstep pi1 spec=mincircle\nexpect nothing.here 1\n")
    with pytest.raises(FormatError) as info:
        run_scenario(str(bad))
    assert info.value.line == 3


def test_reports_are_byte_identical_across_runs(fixtures_dir):
    path = os.path.join(fixtures_dir, "flux_phases.scn")
    first, _ = run_scenario(path)
    second, _ = run_scenario(path)
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)
