# src/hnets/processors/scenario_runner.py

import logging
import os
from fractions import Fraction
from math import gcd
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from hnets.algebra.netbundle import check_net_commutator, holonomy_of
from hnets.exceptions import FormatError, HnetsError, ScenarioError
from hnets.formats.data_files import (make_group, parse_matrix, read_bundle, read_chi, read_chibar, read_cocycle,
                                      read_problem)
from hnets.formats.poset_files import parse_poset_spec, resolve_region
from hnets.formats.scenario_files import Scenario, read_scenario
from hnets.gauge.ccs import c1_class, ccs_degree_one, check_ccs_homomorphism, theta_character
from hnets.gauge.gerbekit import (LiftProblem, check_cstar_gerbe, check_gerbe_relation, circle_projective_holonomy,
                                  classify_lifts, commutator_obstruction, delta_class_trivial, flavour_family,
                                  gerbe_from_cochain, gerbe_from_projective, pauli_projective_holonomy)
from hnets.gauge.twistkit import (ab_twist, bmt_twist, potential_from_flux, test_equivalence, twist_field_net,
                                  untwisted_system, winding_hom)
from hnets.models import Simplex1
from hnets.processors.json_formatter import JSONFormatter
from hnets.sectors.cocycle_cat import check_cocycle, glue_sections, restrict_cocycle, sector_holonomy
from hnets.sectors.sector_stats import build_lattice_model, check_haag_kastler, run_fermi_statistics
from hnets.topology.homotopy import HomotopyEngine, abelianization, homotopy_engine, standard_loop
from hnets.topology.simplicial import build_path_frame, simplicial_report
from hnets.utils.calculations import distance
from hnets.utils.config import Config

logger = logging.getLogger(__name__)


class ScenarioRunner:
    """Runs single operations or whole scenario files and assembles their JSON reports."""

    def __init__(self, config: Optional[Config] = None, base_dir: str = "."):
        self.config = config or Config()
        self.base_dir = base_dir
        self.tolerance = self.config.tolerance
        self.seed = self.config.seed
        self.search_bound = int(self.config["search_bound"])
        self.max_denominator = int(self.config["max_denominator"])
        self.formatter = JSONFormatter(self.tolerance)
        self.operations: Dict[str, Callable[[Dict[str, str]], Dict[str, Any]]] = {
            "poset": self.op_poset,
            "simplicial": self.op_simplicial,
            "pi1": self.op_pi1,
            "group": self.op_group,
            "bundle": self.op_bundle,
            "commutator": self.op_commutator,
            "cocycle": self.op_cocycle,
            "stats": self.op_stats,
            "haag-kastler": self.op_haag_kastler,
            "twist": self.op_twist,
            "ab": self.op_ab,
            "bmt": self.op_bmt,
            "gerbe-build": self.op_gerbe_build,
            "gerbe-lifts": self.op_gerbe_lifts,
            "ccs": self.op_ccs,
        }
        logger.debug(f"ScenarioRunner initialized with tolerance={self.tolerance}, seed={self.seed}")

    # --- scenarios ------------------------------------------------------------------

    def run_file(self, path: str) -> Tuple[Dict[str, Any], int]:
        scenario = read_scenario(path, known_ops=set(self.operations))
        return self.run(scenario)

    def run(self, scenario: Scenario) -> Tuple[Dict[str, Any], int]:
        """Execute every step in order, then evaluate the expectations; exit code 0 iff all are met."""
        try:
            # 1. Apply scenario settings
            self._apply_settings(scenario.settings)
            self.base_dir = scenario.base_dir

            # 2. Run the steps
            results = {}
            for step in scenario.steps:
                logger.info(f"Scenario {scenario.name!r}: step {step.name} ({step.op})")
                try:
                    results[step.name] = self.run_step(step.op, step.params)
                except FormatError:
                    raise
                except HnetsError as e:
                    raise ScenarioError(f"{scenario.source}:{step.line}: step {step.name!r} failed: {e}",
                                        witness=step.name) from e

            # 3. Check expectations
            outcomes = []
            for exp in scenario.expectations:
                actual = _lookup(results[exp.step], exp.key)
                met = _matches(actual, exp.value, self.tolerance)
                if not met:
                    logger.warning(f"Expectation {exp.step}.{exp.key} = {exp.value} not met (got {actual!r})")
                outcomes.append({"key": f"{exp.step}.{exp.key}", "expected": exp.value,
                                 "actual": actual, "met": met, "line": exp.line})

            all_met = all(o["met"] for o in outcomes)
            report = {
                "scenario": scenario.name,
                "settings": {k: self.formatter.format_value(v) for k, v in sorted(scenario.settings.items())},
                "steps": results,
                "expectations": outcomes,
                "passed": all_met,
            }
            logger.info(f"Scenario {scenario.name!r} finished: {len(outcomes)} expectations, all met={all_met}")
            return report, 0 if all_met else 1
        except Exception as e:
            logger.error(f"Scenario {scenario.name!r} aborted: {e}")
            raise

    def run_step(self, op: str, params: Dict[str, str]) -> Dict[str, Any]:
        if op not in self.operations:
            raise ScenarioError(f"unknown operation {op!r}")
        result = self.operations[op](dict(params))
        return self.formatter.format_value(result)

    def _apply_settings(self, settings: Dict[str, Any]):
        if "tolerance" in settings:
            self.tolerance = float(settings["tolerance"])
            self.formatter = JSONFormatter(self.tolerance)
        if "seed" in settings:
            self.seed = int(settings["seed"])
        if "search_bound" in settings:
            self.search_bound = int(settings["search_bound"])
        if "max_denominator" in settings:
            self.max_denominator = int(settings["max_denominator"])

    # --- parameter helpers --------------------------------------------------------------

    def _path(self, value: str) -> str:
        return value if os.path.isabs(value) else os.path.join(self.base_dir, value)

    def _poset(self, params: Dict[str, str]):
        if "spec" not in params:
            raise ScenarioError("operation needs spec=<poset spec>")
        return parse_poset_spec(params["spec"], self.base_dir)

    def _model(self, params: Dict[str, str], gauge_n: Optional[int] = None):
        sites = int(params.get("sites", self.config["lattice.sites"]))
        n = gauge_n if gauge_n is not None else int(params.get("gauge_n", self.config["lattice.gauge_n"]))
        return build_lattice_model(sites, n, int(params.get("max_len", self.config["lattice.max_len"])))

    def _pole(self, poset, params: Dict[str, str]):
        return resolve_region(poset, params["pole"]) if "pole" in params else poset.regions[0]

    # --- operations ----------------------------------------------------------------

    def op_poset(self, params: Dict[str, str]) -> Dict[str, Any]:
        poset = self._poset(params)
        return {
            "name": poset.name,
            "kind": poset.kind,
            "regions": len(poset),
            "covers": len(poset.covers),
            "strict_pairs": len(poset.strict_pairs()),
            "connected": poset.is_connected(),
            "directed": poset.is_directed(),
            "problems": poset.verify(),
        }

    def op_simplicial(self, params: Dict[str, str]) -> Dict[str, Any]:
        return simplicial_report(self._poset(params))

    def op_pi1(self, params: Dict[str, str]) -> Dict[str, Any]:
        poset = self._poset(params)
        base = resolve_region(poset, params["basepoint"]) if "basepoint" in params else None
        engine = HomotopyEngine(poset, base, params.get("skeleton", self.config["pi1.skeleton"]))
        rank, torsion = abelianization(engine.presentation, engine.reduced)
        return {
            "basepoint": str(engine.basepoint),
            "skeleton": engine.presentation.skeleton,
            "generators": engine.presentation.rank,
            "relations": len(engine.presentation.relations),
            "reduced_generators": len(engine.reduced.generators),
            "reduced_relators": len(engine.reduced.relators),
            "abelian_rank": rank,
            "torsion": torsion,
            "trivial": engine.reduced.is_trivial,
            "free": engine.reduced.is_free,
        }

    def op_group(self, params: Dict[str, str]) -> Dict[str, Any]:
        n = int(params["n"]) if "n" in params else None
        d = int(params["d"]) if "d" in params else None
        data = make_group(params.get("kind", "pauli"), n, d)
        out = {
            "name": data.group.name,
            "order": data.group.order,
            "abelian": data.group.is_abelian(),
            "center": len(data.group.center()),
            "problems": data.group.verify(),
        }
        if data.normalizer is not None:
            quotient = data.normalizer.quotient_group()
            out["normal_order"] = data.normalizer.normal.order
            out["quotient_order"] = quotient.order
            out["quotient_abelian"] = quotient.is_abelian()
        return out

    def op_bundle(self, params: Dict[str, str]) -> Dict[str, Any]:
        nb = read_bundle(self._path(params["file"]))
        frame = build_path_frame(nb.poset, self._pole(nb.poset, params))
        chi = holonomy_of(nb, frame, homotopy_engine(nb.poset).presentation, self.tolerance)
        return {"holonomy": chi, "checks": [nb.verify(self.tolerance)]}

    def op_commutator(self, params: Dict[str, str]) -> Dict[str, Any]:
        """Net commutator of t at target and t_prime at source, over every short path inside omega."""
        nb = read_bundle(self._path(params["file"]))
        for key in ("omega", "target", "source", "t", "t_prime"):
            if key not in params:
                raise ScenarioError(f"commutator needs {key}=...")
        omega = [resolve_region(nb.poset, token) for token in params["omega"].split(",")]
        result = check_net_commutator(
            parse_matrix(params["t"], nb.dim), parse_matrix(params["t_prime"], nb.dim), nb,
            resolve_region(nb.poset, params["target"]), resolve_region(nb.poset, params["source"]), omega,
            path_length_factor=int(self.config["path_length_factor"]), tol=self.tolerance)
        return {"minus": result.minus, "plus": result.plus, "paths": result.paths, "max_len": result.max_len,
                "commute": result.vanishes(tol=self.tolerance),
                "anticommute": result.vanishes(anti=True, tol=self.tolerance),
                "checks": [result.report]}

    def op_cocycle(self, params: Dict[str, str]) -> Dict[str, Any]:
        z = read_cocycle(self._path(params["file"]))
        action = params.get("action", "check")
        if action == "check":
            return {"checks": check_cocycle(z, self.tolerance)}
        if action == "holonomy":
            return {"holonomy": sector_holonomy(z, homotopy_engine(z.poset).presentation, self.tolerance)}
        if action == "restrict":
            region = resolve_region(z.poset, params["region"])
            local = restrict_cocycle(z, region)
            return {"region": str(region), "regions": len(local.poset),
                    "checks": check_cocycle(local.cocycle, self.tolerance)}
        if action == "glue":
            family = {a: restrict_cocycle(z, a) for a in z.poset.regions if z.poset.strictly_below(a)}
            glued = glue_sections(family, z.poset, tol=self.tolerance)
            defect = max((distance(glued(b), z(b)) for b in glued.materialize()), default=0.0)
            return {"regions": len(glued.poset), "defect": defect, "identity": defect < self.tolerance}
        raise ScenarioError(f"unknown cocycle action {action!r}")

    def op_stats(self, params: Dict[str, str]) -> Dict[str, Any]:
        model = self._model(params)
        twist = complex(params["twist"].replace("i", "j")) if "twist" in params else None
        result = run_fermi_statistics(model, params.get("sector", "majorana"), twist, self.tolerance)
        stats = result["statistics"]
        return {
            "sector": result["sector"],
            "phase": stats.phase,
            "turns": stats.fraction,
            "scalar": stats.scalar,
            "uniform": stats.uniform,
            "regions": len(stats.per_region),
            "holonomy": result["holonomy"],
            "checks": result["cocycle"] + result["choice"] + result["symmetry"] + result["conjugate"],
        }

    def op_haag_kastler(self, params: Dict[str, str]) -> Dict[str, Any]:
        return {"checks": check_haag_kastler(self._model(params), self.tolerance)}

    def op_twist(self, params: Dict[str, str]) -> Dict[str, Any]:
        model = self._model(params)
        if "chi" in params:
            chi = winding_hom(model, _winding_image(read_chi(self._path(params["chi"])), model.dim), model.dim)
        else:
            chi = winding_hom(model, model.gauge_unitary(int(params.get("kappa", 1))), model.dim)
        frame = build_path_frame(model.poset, self._pole(model.poset, params))
        base = untwisted_system(model)
        twisted = twist_field_net(base, chi, frame, self.tolerance)
        verdict = test_equivalence(base, twisted, frame, self.tolerance, int(self.config["intertwiner_max_dim"]))
        return {"verdict": verdict.verdict, "obstruction": verdict.obstruction, "checks": twisted.reports}

    def op_ab(self, params: Dict[str, str]) -> Dict[str, Any]:
        theta = Fraction(params.get("theta", "1/2"))
        q = theta.denominator
        gauge_n = int(params["gauge_n"]) if "gauge_n" in params else max(1, q // gcd(2, q))
        model = self._model(params, gauge_n)
        pot = potential_from_flux(model.poset, theta)
        system, phase = ab_twist(model, pot, int(params.get("winding", 1)), self.tolerance)
        return {
            "theta": phase.theta,
            "winding": phase.winding,
            "expected": phase.expected,
            "phase": phase.measured,
            "checks": system.reports,
        }

    def op_bmt(self, params: Dict[str, str]) -> Dict[str, Any]:
        model = self._model(params)
        kappa, winding = int(params.get("kappa", 1)), int(params.get("winding", 1))
        system, report = bmt_twist(model, kappa, winding, tol=self.tolerance)
        return {"gauge_n": model.gauge_n, "phase": complex(np.exp(1j * np.pi * kappa * winding / model.gauge_n)),
                "checks": [report, model.bmt_phase_check(self.tolerance)] + system.reports}

    def _chibar(self, params: Dict[str, str]):
        if "chibar" in params:
            chibar, normalizer = read_chibar(self._path(params["chibar"]))
            return chibar, normalizer, chibar.presentation.poset
        fixture = params.get("fixture", "pauli-product")
        if fixture == "pauli-product":
            return pauli_projective_holonomy()
        if fixture == "pauli-circle":
            return circle_projective_holonomy()
        raise ScenarioError(f"unknown projective fixture {fixture!r}")

    def op_gerbe_build(self, params: Dict[str, str]) -> Dict[str, Any]:
        chibar, normalizer, poset = self._chibar(params)
        frame = build_path_frame(poset, self._pole(poset, params))
        rng = np.random.default_rng(self.seed)
        domain = params.get("domain", "nerve")
        gerbe, lifts = gerbe_from_projective(chibar, frame, normalizer, params.get("lift", "canonical"), rng, domain)
        checks = [check_gerbe_relation(gerbe)]
        if domain == "nerve":
            checks += check_cstar_gerbe(gerbe, flavour_family(gerbe, lifts, normalizer), self.tolerance)
        nontrivial = sum(1 for d in gerbe.delta.values() if d != gerbe.group.identity_index)
        return {"poset": poset.name, "lifts": len(lifts), "deltas": len(gerbe.delta), "nontrivial_deltas": nontrivial,
                "group_bundle": gerbe.is_group_bundle(), "delta_trivial": delta_class_trivial(gerbe),
                "checks": checks}

    def op_gerbe_lifts(self, params: Dict[str, str]) -> Dict[str, Any]:
        bound = int(params.get("bound", self.search_bound))
        rng = np.random.default_rng(self.seed)
        obstruction = None
        if "problem" in params:
            problem = read_problem(self._path(params["problem"]), rng)
        else:
            chibar, normalizer, poset = self._chibar(params)
            frame = build_path_frame(poset, self._pole(poset, params))
            _, lifts = gerbe_from_projective(chibar, frame, normalizer, params.get("lift", "canonical"), rng)
            problem = LiftProblem.from_lifts(poset, normalizer, lifts)
            if params.get("fixture", "pauli-product") == "pauli-product" and "chibar" not in params:
                obstruction = commutator_obstruction(normalizer, normalizer.coset_by_label("X"),
                                                     normalizer.coset_by_label("Z"))
        result = classify_lifts(problem, bound)
        u = {Simplex1(lo, hi, hi): n for (lo, hi), n in problem.u.items()}
        for a in problem.poset.regions:
            u[Simplex1(a, a, a)] = problem.normalizer.ambient.identity_index
        gerbe = gerbe_from_cochain(u, problem.normalizer, problem.poset)
        out = {"lifts": result, "status": result.status, "delta_trivial": delta_class_trivial(gerbe)}
        if obstruction is not None:
            out["commutators"] = [problem.normalizer.ambient.label(c) for c in obstruction.commutators]
            out["commutator_obstructed"] = obstruction.obstructed
        return out

    def op_ccs(self, params: Dict[str, str]) -> Dict[str, Any]:
        if "chi" in params:
            chi = read_chi(self._path(params["chi"]))
        else:
            chi = theta_character(self._poset(params), Fraction(params.get("theta", "0")),
                                  int(params.get("dim", 1)))
        cls = c1_class(chi, self.max_denominator, self.tolerance)
        degree_one = ccs_degree_one(chi, self.max_denominator, self.tolerance)
        engine = homotopy_engine(chi.presentation.poset)
        out = {"class": cls, "degree_one": degree_one, "checks": [check_ccs_homomorphism(cls, self.tolerance)]}
        if engine.reduced.is_free and len(engine.reduced.generators) == 1 and chi.presentation.poset.kind == "circle":
            from_loop = cls.evaluate(standard_loop(chi.presentation.poset))
            out["winding_value"] = from_loop
        return out


def run_scenario(path: str, config: Optional[Config] = None) -> Tuple[Dict[str, Any], int]:
    """Run a scenario file; returns the JSON report and the exit code (0 iff every expectation is met)."""
    return ScenarioRunner(config).run_file(path)


def _winding_image(chi, dim: int) -> np.ndarray:
    """chi on the standard loop of its circle base, widened from a scalar when needed."""
    w = chi.evaluate(standard_loop(chi.presentation.poset))
    if w.shape[0] == dim:
        return w
    if w.shape[0] == 1:
        return w[0, 0] * np.eye(dim, dtype=complex)
    raise ScenarioError(f"holonomy of dimension {w.shape[0]} cannot act on fibres of dimension {dim}")


def _lookup(result: Any, key: str) -> Any:
    node = result
    for part in key.split("."):
        if isinstance(node, dict) and part in node:
            node = node[part]
        elif isinstance(node, list) and part.isdigit() and int(part) < len(node):
            node = node[int(part)]
        else:
            return None
    return node


def _matches(actual: Any, expected: str, tol: float) -> bool:
    """Compare a JSON value with an expectation token: booleans, numbers, p/q, complex or plain text."""
    if expected in ("true", "false"):
        return actual is (expected == "true")
    if expected in ("none", "null"):
        return actual is None
    if isinstance(actual, list) and len(actual) == 2 and all(isinstance(x, (int, float)) for x in actual):
        try:
            value = complex(expected.replace("i", "j"))
        except ValueError:
            return False
        return abs(complex(actual[0], actual[1]) - value) < max(tol, 1e-12) * 10
    if isinstance(actual, bool):
        return False
    if isinstance(actual, (int, float)):
        try:
            return abs(float(actual) - float(Fraction(expected))) < max(tol, 1e-12) * 10
        except ValueError:
            return False
    if isinstance(actual, str) and "/" in actual:
        try:
            return Fraction(actual) == Fraction(expected)
        except ValueError:
            return actual == expected
    return str(actual) == expected
