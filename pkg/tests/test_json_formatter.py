# tests/test_json_formatter.py
import json
from fractions import Fraction

import numpy as np
import pytest

from hnets.gauge.ccs import c1_class, theta_character
from hnets.models import CheckReport
from hnets.processors.json_formatter import JSONFormatter
from hnets.topology.homotopy import homotopy_engine, trivial_hom


@pytest.fixture
def formatter():
    return JSONFormatter(1e-9)


def failing_report():
    report = CheckReport("cocycle", tolerance=1e-9)
    report.record("b0", 0.0)
    report.record("b1", 0.5, "off by a sign")
    report.fail("b2", "not a unitary")
    return report


def test_format_report(formatter):
    out = formatter.format_report(failing_report())
    assert out["law"] == "cocycle"
    assert out["passed"] is False
    assert out["checked"] == 3
    assert out["failures"] == 2
    assert out["witness"] == "b1"
    assert out["max_residual"] == pytest.approx(0.5)
    assert out["violations"][1]["residual"] == "inf"
    json.dumps(out)


def test_report_lists_get_a_residual_summary(formatter):
    ok = CheckReport("relation")
    ok.record("c", 1e-12)
    out = formatter.format_value([ok, failing_report()])
    assert out["passed"] is False
    assert set(out["laws"]) == {"relation", "cocycle"}
    assert out["summary"]["relation"]["count"] == 1


@pytest.mark.parametrize("value,expected", [
    (Fraction(1, 3), "1/3"),
    (np.int64(4), 4),
    (float("inf"), "inf"),
    (complex(0, 1), [0.0, 1.0]),
    (-1 + 1e-15j, [-1.0, 0.0]),
    (True, True),
    (None, None),
    ({3, 1, 2}, [1, 2, 3]),
])
def test_scalars(formatter, value, expected):
    assert formatter.format_value(value) == expected


def test_matrices(formatter):
    assert formatter.format_value(-np.eye(2)) == {"scalar": [-1.0, 0.0], "dim": 2}
    out = formatter.format_value(np.array([[0, 1], [1, 0]], dtype=complex))
    assert out["shape"] == [2, 2]
    assert out["norm"] == pytest.approx(np.sqrt(2))


def test_regions_sort_by_id_in_dicts(formatter, circle6):
    r0, r6 = circle6.region(0), circle6.region(6)
    out = formatter.format_value({r6: 1, r0: 2})
    assert list(out) == [str(r0), str(r6)]


def test_holonomy_and_ccs(formatter, circle6):
    pres = homotopy_engine(circle6).presentation
    trivial = formatter.format_value(trivial_hom(pres))
    assert trivial["trivial"] is True
    assert trivial["generators"] == pres.rank
    cls = formatter.format_value(c1_class(theta_character(circle6, Fraction(1, 3))))
    assert cls["zero"] is False
    assert any(v != "0/1" for v in cls["values"].values())


def test_phase_summary(formatter):
    out = formatter.phase_summary(np.exp(2j * np.pi / 4))
    assert out["turns"] == "1/4"
    assert out["value"][1] == pytest.approx(1.0)
