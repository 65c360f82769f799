# src/hnets/processors/json_formatter.py

import dataclasses
import logging
import math
from fractions import Fraction
from typing import Any, Dict, Iterable, List

import numpy as np

from hnets.gauge.ccs import CCSClass, DegreeOneClass
from hnets.gauge.gerbekit import LiftClassification
from hnets.models import CheckReport, Region, Simplex1, Simplex2
from hnets.topology.homotopy import HolonomyMorphism
from hnets.utils.calculations import scalar_value, summarize_residuals, unit_phase_fraction

logger = logging.getLogger(__name__)


class JSONFormatter:
    """Formats check reports and computed objects into JSON-ready dicts."""

    def __init__(self, tolerance: float = 1e-9):
        self.tolerance = tolerance
        logger.debug("JSONFormatter initialized.")

    def format_report(self, report: CheckReport) -> Dict[str, Any]:
        return {
            "law": report.law,
            "passed": report.passed,
            "checked": report.checked,
            "failures": report.failures,
            "max_residual": self._float(report.max_residual),
            "mean_residual": self._float(report.mean_residual),
            "tolerance": report.tolerance,
            "witness": report.first_witness,
            "violations": [{"witness": v.witness, "residual": self._float(v.residual), "detail": v.detail}
                           for v in report.violations[:5]],
            "notes": list(report.notes),
        }

    def format_reports(self, reports: Iterable[CheckReport]) -> Dict[str, Any]:
        """Reports keyed by law plus a pandas residual summary."""
        reports = list(reports)
        records = [{"law": r.law, "residual": v} for r in reports
                   for v in ([r.max_residual] if r.checked else [])]
        return {
            "passed": all(r.passed for r in reports),
            "laws": {r.law: self.format_report(r) for r in reports},
            "summary": summarize_residuals(records),
        }

    def format_holonomy(self, chi: HolonomyMorphism) -> Dict[str, Any]:
        out: Dict[str, Any] = {"generators": chi.presentation.rank, "dim": chi.dim}
        if chi.indices is not None:
            out["images"] = [chi.group.label(i) for i in chi.indices]
        if chi.images is not None:
            images = []
            for m in chi.images:
                c = scalar_value(m, self.tolerance)
                images.append(self.format_value(c) if c is not None else {"shape": list(m.shape),
                                                                         "trace": self.format_value(complex(np.trace(m)))})
            out["images"] = images
            out["trivial"] = chi.is_trivial(self.tolerance)
        return out

    def format_lifts(self, result: LiftClassification) -> Dict[str, Any]:
        return {
            "status": result.status,
            "solutions": len(result.solutions),
            "searched": result.searched,
            "bound": result.bound,
            "fixed_pairs": result.fixed,
            "free_pairs": result.free,
        }

    def format_ccs(self, cls: CCSClass) -> Dict[str, Any]:
        return {"values": {k: self.format_value(v) for k, v in cls.as_dict().items()},
                "zero": cls.is_zero(self.tolerance)}

    def format_degree_one(self, result: DegreeOneClass) -> Dict[str, Any]:
        return {"dim": result.dim, "c1": self.format_ccs(result.c1), "torsion": result.torsion}

    def format_value(self, value: Any) -> Any:
        """Generic conversion: complex -> [re, im], Fraction -> 'p/q', arrays summarised."""
        if isinstance(value, CheckReport):
            return self.format_report(value)
        if isinstance(value, HolonomyMorphism):
            return self.format_holonomy(value)
        if isinstance(value, LiftClassification):
            return self.format_lifts(value)
        if isinstance(value, CCSClass):
            return self.format_ccs(value)
        if isinstance(value, DegreeOneClass):
            return self.format_degree_one(value)
        if isinstance(value, (bool, str)) or value is None:
            return value
        if isinstance(value, Fraction):
            return f"{value.numerator}/{value.denominator}"
        if isinstance(value, (int, np.integer)):
            return int(value)
        if isinstance(value, (float, np.floating)):
            return self._float(float(value))
        if isinstance(value, (complex, np.complexfloating)):
            return [self._float(round(value.real, 12) + 0.0), self._float(round(value.imag, 12) + 0.0)]
        if isinstance(value, np.ndarray):
            c = scalar_value(value, self.tolerance) if value.ndim == 2 and value.shape[0] == value.shape[1] else None
            if c is not None:
                return {"scalar": self.format_value(c), "dim": value.shape[0]}
            return {"shape": list(value.shape), "norm": self._float(float(np.linalg.norm(value)))}
        if isinstance(value, (Region, Simplex1, Simplex2)):
            return str(value)
        if dataclasses.is_dataclass(value):
            return {f.name: self.format_value(getattr(value, f.name)) for f in dataclasses.fields(value)}
        if isinstance(value, dict):
            return {str(self._key(k)): self.format_value(v) for k, v in sorted(value.items(), key=self._sort_key)}
        if isinstance(value, (list, tuple, set, frozenset)):
            items = sorted(value, key=str) if isinstance(value, (set, frozenset)) else value
            if items and all(isinstance(v, CheckReport) for v in items):
                return self.format_reports(items)
            return [self.format_value(v) for v in items]
        return str(value)

    def phase_summary(self, phase: complex, max_denominator: int = 10 ** 6) -> Dict[str, Any]:
        return {"value": self.format_value(phase),
                "turns": self.format_value(unit_phase_fraction(phase, max_denominator, self.tolerance))}

    @staticmethod
    def _float(x: float) -> Any:
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x

    @staticmethod
    def _key(k: Any) -> Any:
        return str(k) if isinstance(k, (Region, Simplex1, Simplex2, tuple)) else k

    @staticmethod
    def _sort_key(item) -> List:
        k = item[0]
        if isinstance(k, Region):
            return [0, k.id]
        return [1, str(k)]
