# tests/test_main.py
import json
import os

import pytest

from hnets.main import EXIT_ERROR, EXIT_EXPECTATION, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_poset_build_writes_file(capsys, tmp_path):
    path = str(tmp_path / "c.poset")
    code, report = run(capsys, "poset", "build", "--kind", "circle", "--m", "6", "--maxlen", "2", "--out", path)
    assert code == EXIT_OK
    assert report["regions"] == 12
    assert os.path.exists(path)
    code, report = run(capsys, "pi1", path)
    assert code == EXIT_OK
    assert report["abelian_rank"] == 1


def test_product_needs_two_factors(capsys, tmp_path):
    code, report = run(capsys, "poset", "build", "--kind", "product", "--factor", "mincircle",
                       "--out", str(tmp_path / "p.poset"))
    assert code == EXIT_ERROR
    assert report["error"] == "FormatError"


def test_group_make(capsys, tmp_path):
    path = str(tmp_path / "s3.grp")
    code, report = run(capsys, "group", "make", "--kind", "symmetric", "--n", "3", "--out", path)
    assert code == EXIT_OK
    assert report["order"] == 6
    assert report["abelian"] is False
    assert os.path.exists(path)


def test_fixture_commands(capsys, fixtures_dir):
    code, report = run(capsys, "cocycle", "check", os.path.join(fixtures_dir, "flux_third.cocycle"))
    assert code == EXIT_OK
    assert report["checks"]["passed"] is True
    code, report = run(capsys, "gerbe", "lifts", "--problem", os.path.join(fixtures_dir, "pauli_product.problem"))
    assert code == EXIT_OK
    assert report["status"] == "empty"
    code, report = run(capsys, "ccs", "--chi", os.path.join(fixtures_dir, "circle_quarter.chi"))
    assert report["winding_value"] == "1/4"


def test_bundle_commutator(capsys, fixtures_dir):
    code, report = run(capsys, "bundle", "commutator", os.path.join(fixtures_dir, "mincircle_xz.bundle"),
                       "--omega", "w,s,e", "--target", "e", "--source", "w", "--t", "X", "--t-prime", "Z")
    assert code == EXIT_OK
    assert report["anticommute"] is True


def test_lattice_commands(capsys):
    code, report = run(capsys, "stats", "--sites", "5")
    assert code == EXIT_OK
    assert report["phase"] == [-1.0, 0.0]
    code, report = run(capsys, "ab", "--sites", "5", "--theta", "1/2")
    assert report["phase"] == pytest.approx([-1.0, 0.0])


def test_run_scenario(capsys, fixtures_dir, tmp_path):
    code, report = run(capsys, "run", os.path.join(fixtures_dir, "topology.scn"))
    assert code == EXIT_OK
    assert report["scenario"] == "topology"
    failing = tmp_path / "fail.scn"
    failing.write_text("scenario fail\nstep pi1 spec=mincircle\nexpect pi1.trivial true\n")
    code, report = run(capsys, "run", str(failing))
    assert code == EXIT_EXPECTATION
    assert report["passed"] is False


def test_report_can_go_to_a_file(capsys, tmp_path):
    out = tmp_path / "reports" / "pi1.json"
    code, report = run(capsys, "--out", str(out), "pi1", "--skeleton", "full",
                       os.path.join(str(tmp_path), "missing.poset"))
    assert code == EXIT_ERROR
    assert report is None
    assert json.loads(out.read_text())["error"] == "FormatError"


def test_bare_report_name_goes_to_output_dir(capsys, monkeypatch, tmp_path, fixtures_dir):
    monkeypatch.setenv("HNETS_OUTPUT_DIR", str(tmp_path / "reports"))
    code, report = run(capsys, "--out", "topology.json", "pi1", os.path.join(fixtures_dir, "circle6.poset"))
    assert code == EXIT_OK
    assert report is None
    assert json.loads((tmp_path / "reports" / "topology.json").read_text())["abelian_rank"] == 1


def test_invalid_inputs_exit_with_two(capsys, tmp_path):
    bad = tmp_path / "bad.cocycle"
    bad.write_text("poset mincircle\nbogus\n")
    code, report = run(capsys, "cocycle", "check", str(bad))
    assert code == EXIT_ERROR
    assert report["error"] == "FormatError"
    code, report = run(capsys, "twist", "--system", "lattice:five:1")
    assert code == EXIT_ERROR
    code, report = run(capsys, "--tolerance", "-1", "pi1", "x.poset")
    assert code == EXIT_ERROR
    assert report["error"] == "ConfigError"


def test_argument_errors_exit_with_two():
    with pytest.raises(SystemExit) as info:
        main(["stats", "--sector", "quark"])
    assert info.value.code == 2
