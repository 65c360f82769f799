# src/hnets/sectors/sector_stats.py

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from hnets.exceptions import ChargeError, GeometryError
from hnets.models import CheckReport, Path, Region, Simplex1
from hnets.sectors.cocycle_cat import Cocycle, CocycleArrow, check_cocycle, evaluate_path, sector_holonomy
from hnets.sectors.lattice import LatticeFieldNet
from hnets.topology.homotopy import edge_windings, homotopy_engine, letter_winding
from hnets.topology.poset_core import Poset
from hnets.topology.simplicial import build_path_frame, enumerate_simplices
from hnets.utils.calculations import (DEFAULT_TOLERANCE, MatrixValidator, conjugate_by, dagger, distance,
                                      scalar_value, unit_phase_fraction)

logger = logging.getLogger(__name__)


def build_lattice_model(sites: int, gauge_n: int = 1, max_len: int = 3) -> LatticeFieldNet:
    return LatticeFieldNet(sites, gauge_n, max_len)


@dataclass
class LocalizedCharge:
    """rho_e = Ad psi_e for a self-adjoint odd unitary psi_e in F_e."""
    region: Region
    implementer: np.ndarray

    def apply(self, t: np.ndarray) -> np.ndarray:
        return conjugate_by(self.implementer, t)


def validate_charge(model: LatticeFieldNet, charge: LocalizedCharge, tol: float = DEFAULT_TOLERANCE):
    psi = charge.implementer
    if not MatrixValidator.validate_unitary(psi, tol):
        raise ChargeError(f"implementer at {charge.region} is not unitary", witness=charge.region)
    if distance(model.parity @ psi @ model.parity, -psi) >= tol:
        raise ChargeError(f"implementer at {charge.region} is not odd", witness=charge.region)
    if not model.field_algebra(charge.region).contains(psi, tol):
        raise ChargeError(f"implementer at {charge.region} is not localized there", witness=charge.region)


def majorana_charges(model: LatticeFieldNet, end: str = "first") -> Dict[Region, LocalizedCharge]:
    """psi_e = c_j at the first (or last) site of every region."""
    if end not in ("first", "last"):
        raise ValueError(f"end must be 'first' or 'last', got {end!r}")
    pick = model.first_site if end == "first" else model.last_site
    return {e: LocalizedCharge(e, model.majorana(pick(e))) for e in model.poset.regions}


class ChargedCocycle:
    """A cocycle together with the implementers psi_e of its charge rho_e = Ad psi_e."""

    def __init__(self, cocycle: Cocycle, implementers: Dict[Region, np.ndarray], name: str = ""):
        self.cocycle = cocycle
        self.implementers = implementers
        self.name = name or cocycle.name

    @classmethod
    def vacuum(cls, poset: Poset, dim: int, algebras=None) -> "ChargedCocycle":
        eye = np.eye(dim, dtype=complex)
        return cls(Cocycle.identity(poset, dim, algebras=algebras), {e: eye for e in poset.regions}, name="ι")

    @property
    def poset(self) -> Poset:
        return self.cocycle.poset

    @property
    def dim(self) -> int:
        return self.cocycle.dim

    def rho(self, e: Region, t: np.ndarray) -> np.ndarray:
        return conjugate_by(self.implementers[e], t)

    def __call__(self, b: Simplex1) -> np.ndarray:
        return self.cocycle(b)

    def on_path(self, path: Path) -> np.ndarray:
        return evaluate_path(self.cocycle, path)

    def __repr__(self) -> str:
        return f"ChargedCocycle({self.name!r})"


def winding_character(poset: Poset, phase: complex):
    """Scalar cocycle b -> phase^(winding of b) on a circle base."""
    engine = homotopy_engine(poset)
    windings = edge_windings(engine)
    pres = engine.presentation
    return lambda b: complex(phase) ** letter_winding(pres, windings, (b, 1))


def charge_cocycle(model: LatticeFieldNet, charges: Dict[Region, LocalizedCharge],
                   twist: Optional[complex] = None, tol: float = DEFAULT_TOLERANCE,
                   name: str = "") -> ChargedCocycle:
    """
    z(b) = psi_{d0 b} psi_{d1 b}*, optionally times the winding character of ``twist``.

    The bilinear is gauge invariant only for the parity gauge group.
    """
    if model.gauge_n != 1:
        raise ChargeError(f"Majorana sectors need the parity gauge group, got Z{2 * model.gauge_n}")
    for e in model.poset.regions:
        if e not in charges:
            raise ChargeError(f"no charge given at {e}", witness=e)
        validate_charge(model, charges[e], tol)
    psi = {e: charges[e].implementer for e in model.poset.regions}
    character = winding_character(model.poset, twist) if twist is not None else None

    def value(b: Simplex1) -> np.ndarray:
        m = psi[b.d0] @ dagger(psi[b.d1])
        return m if character is None else character(b) * m

    cocycle = Cocycle(model.poset, fn=value, dim=model.dim, algebras=model.observable_algebras,
                      name=name or ("majorana" if twist is None else f"majorana*{twist}"))
    logger.info(f"Charge cocycle {cocycle.name!r} on {model.poset.name}")
    return ChargedCocycle(cocycle, psi, cocycle.name)


def charge_pair_check(charged: ChargedCocycle, model: LatticeFieldNet,
                      tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """z(b) rho_{d1 b}(T) = rho_{d0 b}(T) z(b) on observable generators of |b|."""
    report = CheckReport("charge-transport", tolerance=tol)
    for b in enumerate_simplices(charged.poset, 1):
        if b.is_degenerate:
            continue
        zb = charged(b)
        for k, t in enumerate(model.observable_generators(b.support)):
            report.record(f"{b}#{k}", distance(zb @ charged.rho(b.d1, t), charged.rho(b.d0, t) @ zb))
    return report


def charge_localization_check(charged: ChargedCocycle, model: LatticeFieldNet,
                              tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """rho_e acts trivially on R_o for o perp e and maps R_o into itself for o >= e."""
    report = CheckReport("charge-localization", tolerance=tol)
    poset = charged.poset
    for e in poset.regions:
        for o in poset.regions:
            if poset.perp(e, o):
                for k, t in enumerate(model.observable_generators(o)):
                    report.record(f"{e}|{o}#{k}", distance(charged.rho(e, t), t))
            elif poset.leq(e, o):
                algebra = model.observable_algebra(o)
                for k, t in enumerate(model.observable_generators(o)):
                    if algebra.contains(charged.rho(e, t), tol):
                        report.record(f"{e}<{o}#{k}", 0.0)
                    else:
                        report.fail(f"{e}<{o}#{k}", "image leaves R_o")
    return report


# --- tensor structure ---------------------------------------------------------------

def tensor_cocycles(z: ChargedCocycle, w: ChargedCocycle) -> ChargedCocycle:
    """(z x w)(b) = z(b) rho_{d1 b}(w(b)); the charge is rho o sigma, implemented by psi^z psi^w."""
    if z.poset is not w.poset:
        raise ChargeError("cocycles live on different posets")

    def value(b: Simplex1) -> np.ndarray:
        return z(b) @ z.rho(b.d1, w(b))

    implementers = {e: z.implementers[e] @ w.implementers[e] for e in z.poset.regions}
    algebras = z.cocycle.algebras or w.cocycle.algebras
    cocycle = Cocycle(z.poset, fn=value, dim=z.dim, algebras=algebras, name=f"({z.name}x{w.name})")
    return ChargedCocycle(cocycle, implementers, cocycle.name)


def tensor_arrows(t: CocycleArrow, s: CocycleArrow, z: ChargedCocycle) -> CocycleArrow:
    """(t x s)_e = t_e rho_e(s_e) for t in (z, z'), s in (w, w')."""
    components = {e: t[e] @ z.rho(e, s[e]) for e in t.components}
    return CocycleArrow(t.source, t.target, components)


def intertwiner_relation_check(t: CocycleArrow, rho: ChargedCocycle, sigma: ChargedCocycle,
                               model: LatticeFieldNet, tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """sigma_e(T) t_e = t_e rho_e(T) on observable generators, for t in (z_rho, z_sigma)."""
    report = CheckReport("intertwiner-relation", tolerance=tol)
    for e, te in sorted(t.components.items(), key=lambda kv: kv[0].id):
        for k, g in enumerate(model.observable_generators(e)):
            report.record(f"{e}#{k}", distance(sigma.rho(e, g) @ te, te @ rho.rho(e, g)))
    return report


def majorana_transfer_arrow(z: ChargedCocycle, z2: ChargedCocycle) -> CocycleArrow:
    """t_a = psi'_a psi_a* in (z, z') for two implementer families of the same sector."""
    comps = {a: z2.implementers[a] @ dagger(z.implementers[a]) for a in z.poset.regions}
    return CocycleArrow(z.cocycle, z2.cocycle, comps)


# --- the symmetry operator -----------------------------------------------------------

@dataclass
class SymmetryGeometry:
    """Regions o perp o' inside Δᵃ and paths from e to each."""
    ambient: Region
    e: Region
    o: Region
    o_prime: Region
    to_o: Path
    to_o_prime: Path


def admissible_geometries(poset: Poset, e: Region, a: Region) -> List[SymmetryGeometry]:
    """Every ordered pair o perp o' in Δᵃ, with BFS paths from e inside Δᵃ."""
    if not poset.lt(e, a):
        raise GeometryError(f"{e} is not a proper sub-region of {a}", witness=(e, a))
    local = poset.local_poset(a)
    frame = build_path_frame(local, e) if local.is_connected() else None
    found = []
    for o in local.regions:
        for o2 in local.regions:
            if local.perp(o, o2):
                if frame is None:
                    raise GeometryError(f"Δ{a} is not connected", witness=a)
                found.append(SymmetryGeometry(a, e, o, o2, frame.path_to(o), frame.path_to(o2)))
    if not found:
        raise GeometryError(f"no causally disjoint pair of regions below {a}", witness=a)
    return found


def ambient_regions(poset: Poset, e: Region) -> List[Region]:
    """Regions a > e whose Δᵃ holds a causally disjoint pair."""
    result = []
    for a in poset.above(e):
        if a == e:
            continue
        lower = poset.strictly_below(a)
        if any(poset.perp(x, y) for x in lower for y in lower):
            result.append(a)
    return result


def _epsilon(z: ChargedCocycle, w: ChargedCocycle, g: SymmetryGeometry) -> np.ndarray:
    w_p = w.on_path(g.to_o)
    z_p = z.on_path(g.to_o_prime)
    return dagger(w_p) @ dagger(w.rho(g.o, z_p)) @ z_p @ z.rho(g.e, w_p)


def symmetry_operator(z: ChargedCocycle, w: ChargedCocycle, e: Region, a: Optional[Region] = None) -> np.ndarray:
    """
    eps(z, w)_e = w(p_oe)* sigma_o(z(p_o'e))* z(p_o'e) rho_e(w(p_oe)),
    for the first admissible o perp o' below a.
    """
    if a is None:
        ambients = ambient_regions(z.poset, e)
        if not ambients:
            raise GeometryError(f"no region above {e} has causally disjoint sub-regions", witness=e)
        a = ambients[0]
    return _epsilon(z, w, admissible_geometries(z.poset, e, a)[0])


def _record_choices(report: CheckReport, z: ChargedCocycle, w: ChargedCocycle, e: Region, a: Region):
    geometries = admissible_geometries(z.poset, e, a)
    reference = _epsilon(z, w, geometries[0])
    for g in geometries:
        report.record(f"{e}<{a}:{g.o},{g.o_prime}", distance(_epsilon(z, w, g), reference))


def choice_independence_check(z: ChargedCocycle, w: ChargedCocycle, e: Region, a: Region,
                              tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    report = CheckReport("symmetry-choice-independence", tolerance=tol)
    _record_choices(report, z, w, e, a)
    return report


def choice_independence_sweep(z: ChargedCocycle, w: ChargedCocycle,
                              tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """Every admissible o perp o' gives the same eps(z, w)_e, for every e and every ambient a > e."""
    report = CheckReport("symmetry-choice-independence", tolerance=tol)
    pairs = 0
    for e in z.poset.regions:
        for a in ambient_regions(z.poset, e):
            _record_choices(report, z, w, e, a)
            pairs += 1
    report.notes.append(f"{report.checked} geometries over {pairs} (e, a) pairs")
    return report


def verify_symmetry_relations(z: ChargedCocycle, w: ChargedCocycle, v: Optional[ChargedCocycle] = None,
                              arrows: Optional[List[Tuple[CocycleArrow, ChargedCocycle, CocycleArrow, ChargedCocycle]]] = None,
                              tol: float = DEFAULT_TOLERANCE) -> List[CheckReport]:
    """
    The four groups of identities of the symmetry operator, over every ambient
    region a and every e in Δᵃ:

    * eps_{d0 b} (z x w)(b) = (w x z)(b) eps_{d1 b} on Σ₁(Δᵃ)
    * (s x t)_e eps(z, w)_e = eps(z', w')_e (t x s)_e for the given arrows;
      without arrows this group is reported as failed
    * eps(ι, z) = eps(z, ι) = 1 and eps(z, w) eps(w, z) = 1
    * eps(z x w, v)_e = eps(z, v)_e rho_e(eps(w, v)_e)
    """
    poset = z.poset
    v = v or z
    iota = ChargedCocycle.vacuum(poset, z.dim)
    zw, wz = tensor_cocycles(z, w), tensor_cocycles(w, z)
    eye = np.eye(z.dim)
    intertwining = CheckReport("symmetry-intertwining", tolerance=tol)
    naturality = CheckReport("symmetry-naturality", tolerance=tol)
    unit = CheckReport("symmetry-unit-inverse", tolerance=tol)
    coherence = CheckReport("symmetry-tensor-coherence", tolerance=tol)

    for a in poset.regions:
        lower = poset.strictly_below(a)
        if not any(poset.perp(x, y) for x in lower for y in lower):
            continue
        eps = {e: symmetry_operator(z, w, e, a) for e in lower}
        for b in enumerate_simplices(poset.local_poset(a), 1):
            if b.is_degenerate:
                continue
            intertwining.record(f"{b}<{a}", distance(eps[b.d0] @ zw(b), wz(b) @ eps[b.d1]))
        for e in lower:
            unit.record(f"ι,z@{e}<{a}", distance(symmetry_operator(iota, z, e, a), eye))
            unit.record(f"z,ι@{e}<{a}", distance(symmetry_operator(z, iota, e, a), eye))
            unit.record(f"zw.wz@{e}<{a}", distance(eps[e] @ symmetry_operator(w, z, e, a), eye))
            lhs = symmetry_operator(tensor_cocycles(z, w), v, e, a)
            rhs = symmetry_operator(z, v, e, a) @ z.rho(e, symmetry_operator(w, v, e, a))
            coherence.record(f"{e}<{a}", distance(lhs, rhs))
            for t, z2, s, w2 in arrows or ():
                left = tensor_arrows_at(s, w, t, e) @ eps[e]
                right = symmetry_operator(z2, w2, e, a) @ tensor_arrows_at(t, z, s, e)
                naturality.record(f"{e}<{a}", distance(left, right))
    if not naturality.checked:
        naturality.fail("arrows", "no arrows supplied")
    reports = [intertwining, naturality, unit, coherence]
    logger.info("Symmetry relations: " + ", ".join(f"{r.law}={'pass' if r.passed else 'FAIL'}" for r in reports))
    return reports


def tensor_arrows_at(t: CocycleArrow, z: ChargedCocycle, s: CocycleArrow, e: Region) -> np.ndarray:
    return t[e] @ z.rho(e, s[e])


@dataclass
class StatisticsResult:
    phase: complex
    fraction: object
    scalar: bool
    uniform: bool
    per_region: Dict[Region, complex]
    choice: Optional[CheckReport] = None


def statistics_phase(z: ChargedCocycle, tol: float = DEFAULT_TOLERANCE,
                     max_denominator: int = 10 ** 6) -> StatisticsResult:
    """
    eps(z, z)_e at every region that admits it; a scalar for irreducible sectors.

    The value is read from the first ambient region and first geometry; the
    attached choice report compares it against every other admissible choice.
    """
    per_region = {}
    scalar = True
    for e in z.poset.regions:
        ambients = ambient_regions(z.poset, e)
        if not ambients:
            continue
        eps = symmetry_operator(z, z, e, ambients[0])
        c = scalar_value(eps, tol)
        if c is None:
            scalar = False
            c = complex(np.trace(eps) / z.dim)
        per_region[e] = c
    if not per_region:
        raise GeometryError(f"no region of {z.poset.name} admits a symmetry operator")
    values = list(per_region.values())
    phase = values[0]
    uniform = all(abs(c - phase) < tol for c in values)
    fraction = unit_phase_fraction(phase, max_denominator, tol)
    choice = choice_independence_sweep(z, z, tol)
    logger.info(f"Statistics phase of {z.name!r}: {phase:.6f} ({fraction}), scalar={scalar}, uniform={uniform}, "
                f"choice-independent={choice.passed}")
    return StatisticsResult(phase, fraction, scalar, uniform, per_region, choice)


def verify_conjugate(z: ChargedCocycle, zbar: ChargedCocycle, r: CocycleArrow, rbar: CocycleArrow,
                     tol: float = DEFAULT_TOLERANCE) -> List[CheckReport]:
    """
    r in (ι, zbar x z), rbar in (ι, z x zbar) with
    rbar*_e rho_e(r_e) = 1 and r*_e rhobar_e(rbar_e) = 1.
    """
    eye = np.eye(z.dim)
    equations = CheckReport("conjugate-equations", tolerance=tol)
    for e in z.poset.regions:
        equations.record(f"z@{e}", distance(dagger(rbar[e]) @ z.rho(e, r[e]), eye))
        equations.record(f"zbar@{e}", distance(dagger(r[e]) @ zbar.rho(e, rbar[e]), eye))
    arrows = CheckReport("conjugate-arrows", tolerance=tol)
    for arrow, target in ((r, tensor_cocycles(zbar, z)), (rbar, tensor_cocycles(z, zbar))):
        for b in enumerate_simplices(z.poset, 1):
            if not b.is_degenerate:
                arrows.record(b, distance(target(b) @ arrow[b.d1], arrow[b.d0]))
    return [equations, arrows]


def charge_from_cocycle(z: ChargedCocycle, e: Region, o: Region, path: Optional[Path] = None):
    """The charge rho_e(T) = z(p)* T z(p) for a path p: e -> o with o perp e."""
    if not z.poset.perp(e, o):
        raise GeometryError(f"{o} is not causally disjoint from {e}", witness=(e, o))
    if path is None:
        path = build_path_frame(z.poset, e).path_to(o)
    zp = z.on_path(path)
    return lambda t: dagger(zp) @ t @ zp


def compare_charge_from_cocycle(z: ChargedCocycle, model: LatticeFieldNet, e: Region, o: Region,
                                tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """Cocycle-determined charge against Ad psi_e on observables localized away from o."""
    report = CheckReport("charge-from-cocycle", tolerance=tol)
    rho = charge_from_cocycle(z, e, o)
    for x in z.poset.regions:
        if z.poset.perp(x, o):
            for k, t in enumerate(model.observable_generators(x)):
                report.record(f"{x}#{k}", distance(rho(t), z.rho(e, t)))
    return report


def check_haag_kastler(model: LatticeFieldNet, tol: float = DEFAULT_TOLERANCE) -> List[CheckReport]:
    """Isotony, causality, gauge covariance, normal commutation and irreducibility of the finite net."""
    poset = model.poset
    isotony = CheckReport("isotony", tolerance=tol)
    causality = CheckReport("einstein-causality", tolerance=tol)
    covariance = CheckReport("gauge-covariance", tolerance=tol)
    normal = CheckReport("normal-commutation", tolerance=tol)
    irreducible = CheckReport("irreducibility", tolerance=tol)
    v = model.gauge_unitary(1)

    for lo, hi in poset.strict_pairs():
        for k, t in enumerate(model.field_generators(lo)):
            if model.field_algebra(hi).contains(t, tol):
                isotony.record(f"F {lo}<{hi}#{k}", 0.0)
            else:
                isotony.fail(f"F {lo}<{hi}#{k}", "not contained")
    for a in poset.regions:
        for k, t in enumerate(model.field_generators(a)):
            if model.field_algebra(a).contains(conjugate_by(v, t), tol):
                covariance.record(f"{a}#{k}", 0.0)
            else:
                covariance.fail(f"{a}#{k}", "V F_a V* leaves F_a")
        for o in poset.regions:
            if a.id < o.id and poset.perp(a, o):
                for s in model.observable_generators(a):
                    for t in model.observable_generators(o):
                        causality.record(f"{a}|{o}", distance(s @ t, t @ s))
                for s in model.field_generators(a):
                    for t in model.field_generators(o):
                        normal.record(f"{a}|{o}", distance(s @ t, -t @ s))
    constrained = set()
    for a in poset.regions:
        constrained |= set(range(model.sites)) - model.sites_of(a)
    if constrained == set(range(model.sites)):
        irreducible.record("all-sites", 0.0)
        irreducible.notes.append("commutant constraints include both Majoranas of every site")
    else:
        irreducible.fail("sites", f"sites {sorted(set(range(model.sites)) - constrained)} are never constrained")
    return [isotony, causality, covariance, normal, irreducible]


def restriction_preserves_symmetry(z: ChargedCocycle, w: ChargedCocycle,
                                   tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """eps computed below a equals eps computed below a' >= a, for e < a."""
    report = CheckReport("restriction-symmetry", tolerance=tol)
    poset = z.poset
    for e in poset.regions:
        ambients = ambient_regions(poset, e)
        for a in ambients:
            for a2 in ambients:
                if a != a2 and poset.leq(a, a2):
                    report.record(f"{e}<{a}<{a2}",
                                  distance(symmetry_operator(z, w, e, a), symmetry_operator(z, w, e, a2)))
    if not report.checked:
        report.notes.append("no nested ambient regions in this base")
    return report


def sector_cocycle(model: LatticeFieldNet, sector: str = "majorana", end: str = "first",
                   twist: Optional[complex] = None, tol: float = DEFAULT_TOLERANCE) -> ChargedCocycle:
    """The named sector, with Majorana implementers taken at the given end of every region."""
    poset = model.poset
    if sector == "vacuum":
        return ChargedCocycle.vacuum(poset, model.dim, model.observable_algebras)
    if sector in ("majorana", "majorana-square"):
        z = charge_cocycle(model, majorana_charges(model, end), twist=twist, tol=tol)
        return tensor_cocycles(z, z) if sector == "majorana-square" else z
    raise ChargeError(f"unknown sector {sector!r}")


def run_fermi_statistics(model: LatticeFieldNet, sector: str = "majorana", twist: Optional[complex] = None,
                         tol: float = DEFAULT_TOLERANCE) -> Dict:
    """Holonomy, statistics phase, symmetry relations and conjugate check for one sector."""
    poset = model.poset
    # 1. The sector and its copy built from the other end of every region
    z = sector_cocycle(model, sector, "first", twist, tol)
    z_last = sector_cocycle(model, sector, "last", twist, tol)
    transfer = majorana_transfer_arrow(z, z_last)

    # 2. Holonomy and statistics
    engine = homotopy_engine(poset)
    holonomy = sector_holonomy(z.cocycle, engine.presentation, tol)
    stats = statistics_phase(z, tol)

    # 3. Relations of the symmetry operator, naturality along the transfer arrow
    relations = verify_symmetry_relations(z, z, arrows=[(transfer, z_last, transfer, z_last)], tol=tol)
    one = CocycleArrow.identity(ChargedCocycle.vacuum(poset, model.dim).cocycle)
    conjugate = verify_conjugate(z, z, one, one, tol)
    return {
        "sector": sector,
        "cocycle": check_cocycle(z.cocycle, tol),
        "holonomy": holonomy,
        "statistics": stats,
        "choice": [stats.choice],
        "symmetry": relations,
        "conjugate": conjugate,
    }
