# src/hnets/main.py
import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Tuple

from hnets.exceptions import FormatError, HnetsError
from hnets.formats.data_files import make_group, write_group
from hnets.formats.poset_files import parse_poset_spec, write_poset
from hnets.processors.scenario_runner import ScenarioRunner, run_scenario
from hnets.utils.config import Config

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_EXPECTATION, EXIT_ERROR = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hnets", description="Finite models of nets over posets, "
                                     "their sectors, twists and gerbes.")
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("--tolerance", type=float, help="comparison tolerance (max-norm)")
    parser.add_argument("--seed", type=int, help="seed for randomized choices")
    parser.add_argument("--out", dest="report_out", help="write the JSON report here instead of stdout; "
                        "a bare file name goes into the configured output_dir")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    sub = parser.add_subparsers(dest="command", required=True)

    poset = sub.add_parser("poset").add_subparsers(dest="action", required=True)
    build = poset.add_parser("build")
    build.add_argument("--kind", required=True, choices=["circle", "product", "minkowski2d", "diamond"])
    build.add_argument("--m", type=int, default=6)
    build.add_argument("--maxlen", type=int, default=2)
    build.add_argument("--nx", type=int, default=4)
    build.add_argument("--nt", type=int, default=4)
    build.add_argument("--max-size", type=int, default=3)
    build.add_argument("--factor", nargs="+", default=[], help="factor poset specs for --kind product")
    build.add_argument("--out", dest="file_out", required=True)

    simplicial = sub.add_parser("simplicial").add_subparsers(dest="action", required=True)
    simplicial.add_parser("report").add_argument("poset_file")

    pi1 = sub.add_parser("pi1")
    pi1.add_argument("poset_file")
    pi1.add_argument("--basepoint")
    pi1.add_argument("--skeleton", choices=["nerve", "full"])

    group = sub.add_parser("group").add_subparsers(dest="action", required=True)
    make = group.add_parser("make")
    make.add_argument("--kind", required=True, choices=["pauli", "cyclic", "symmetric"])
    make.add_argument("--n", type=int)
    make.add_argument("--d", type=int)
    make.add_argument("--out", dest="file_out", required=True)

    bundle = sub.add_parser("bundle").add_subparsers(dest="action", required=True)
    hol = bundle.add_parser("holonomy")
    hol.add_argument("bundle_file")
    hol.add_argument("--frame-pole")
    comm = bundle.add_parser("commutator")
    comm.add_argument("bundle_file")
    comm.add_argument("--omega", required=True, help="comma-separated regions of the trivialized set")
    comm.add_argument("--target", required=True)
    comm.add_argument("--source", required=True)
    comm.add_argument("--t", required=True, help="operator at the target, e.g. X or \"0 1; 1 0\"")
    comm.add_argument("--t-prime", required=True, help="operator at the source")

    cocycle = sub.add_parser("cocycle")
    cocycle.add_argument("action", choices=["check", "holonomy", "restrict", "glue"])
    cocycle.add_argument("cocycle_file")
    cocycle.add_argument("--region")

    stats = sub.add_parser("stats")
    stats.add_argument("--sites", type=int)
    stats.add_argument("--gauge-n", type=int)
    stats.add_argument("--sector", default="majorana", choices=["majorana", "vacuum", "majorana-square"])
    stats.add_argument("--twist")

    twist = sub.add_parser("twist")
    twist.add_argument("--system", required=True, help="lattice:<sites>:<gauge n>")
    twist.add_argument("--chi")
    twist.add_argument("--kappa", type=int)
    twist.add_argument("--frame-pole")

    ab = sub.add_parser("ab")
    ab.add_argument("--sites", type=int)
    ab.add_argument("--theta", default="1/2")
    ab.add_argument("--winding", type=int, default=1)

    bmt = sub.add_parser("bmt")
    bmt.add_argument("--sites", type=int)
    bmt.add_argument("--gauge-n", type=int, default=1)
    bmt.add_argument("--kappa", type=int, default=1)
    bmt.add_argument("--winding", type=int, default=1)

    gerbe = sub.add_parser("gerbe").add_subparsers(dest="action", required=True)
    gb = gerbe.add_parser("build")
    gb.add_argument("--chibar", required=True)
    gb.add_argument("--frame-pole")
    gb.add_argument("--lift", default="canonical", choices=["canonical", "random"])
    gl = gerbe.add_parser("lifts")
    gl.add_argument("--problem", required=True)
    gl.add_argument("--bound", type=int)

    ccs = sub.add_parser("ccs")
    ccs.add_argument("--chi", required=True)

    run = sub.add_parser("run")
    run.add_argument("scenario_file")
    return parser


def _params(**kwargs) -> Dict[str, str]:
    return {k: str(v) for k, v in kwargs.items() if v is not None}


def _poset_spec(args) -> str:
    if args.kind == "circle":
        return f"circle:{args.m}:{args.maxlen}"
    if args.kind == "minkowski2d":
        return f"minkowski:{args.nx}:{args.nt}:{args.max_size}"
    if args.kind == "diamond":
        return "diamond"
    if len(args.factor) < 2:
        raise FormatError("--kind product needs at least two --factor specs")
    return "product:" + "*".join(f"({f})" if "*" in f else f for f in args.factor)


def dispatch(args, runner: ScenarioRunner) -> Tuple[Dict[str, Any], int]:
    """Run one command; returns the JSON report and the exit code."""
    cmd = args.command
    if cmd == "poset":
        spec = _poset_spec(args)
        write_poset(parse_poset_spec(spec), args.file_out, spec)
        return runner.run_step("poset", {"spec": spec}), EXIT_OK
    if cmd == "simplicial":
        return runner.run_step("simplicial", {"spec": f"file:{args.poset_file}"}), EXIT_OK
    if cmd == "pi1":
        return runner.run_step("pi1", _params(spec=f"file:{args.poset_file}", basepoint=args.basepoint,
                                              skeleton=args.skeleton)), EXIT_OK
    if cmd == "group":
        data = make_group(args.kind, args.n, args.d)
        write_group(data, args.file_out)
        return runner.run_step("group", _params(kind=args.kind, n=args.n, d=args.d)), EXIT_OK
    if cmd == "bundle":
        if args.action == "commutator":
            return runner.run_step("commutator", _params(file=args.bundle_file, omega=args.omega, target=args.target,
                                                         source=args.source, t=args.t, t_prime=args.t_prime)), EXIT_OK
        return runner.run_step("bundle", _params(file=args.bundle_file, pole=args.frame_pole)), EXIT_OK
    if cmd == "cocycle":
        return runner.run_step("cocycle", _params(file=args.cocycle_file, action=args.action,
                                                  region=args.region)), EXIT_OK
    if cmd == "stats":
        return runner.run_step("stats", _params(sites=args.sites, gauge_n=args.gauge_n, sector=args.sector,
                                                twist=args.twist)), EXIT_OK
    if cmd == "twist":
        kind, _, rest = args.system.partition(":")
        parts = rest.split(":")
        if kind != "lattice" or len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise FormatError(f"--system must be lattice:<sites>:<gauge n>, got {args.system!r}")
        return runner.run_step("twist", _params(sites=parts[0], gauge_n=parts[1], chi=args.chi, kappa=args.kappa,
                                                pole=args.frame_pole)), EXIT_OK
    if cmd == "ab":
        return runner.run_step("ab", _params(sites=args.sites, theta=args.theta, winding=args.winding)), EXIT_OK
    if cmd == "bmt":
        return runner.run_step("bmt", _params(sites=args.sites, gauge_n=args.gauge_n, kappa=args.kappa,
                                              winding=args.winding)), EXIT_OK
    if cmd == "gerbe":
        if args.action == "build":
            return runner.run_step("gerbe-build", _params(chibar=args.chibar, pole=args.frame_pole,
                                                          lift=args.lift)), EXIT_OK
        return runner.run_step("gerbe-lifts", _params(problem=args.problem, bound=args.bound)), EXIT_OK
    if cmd == "ccs":
        return runner.run_step("ccs", {"chi": args.chi}), EXIT_OK
    if cmd == "run":
        return run_scenario(args.scenario_file, runner.config)
    raise HnetsError(f"unknown command {cmd!r}")


def _emit(report: Dict[str, Any], out: Optional[str]):
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        os.makedirs(os.path.dirname(os.path.abspath(out)), exist_ok=True)
        with open(out, "w") as f:
            f.write(text + "\n")
        logger.info(f"Report written to {out}")
    else:
        print(text)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    # 1) Load config; command-line flags override it
    try:
        config = Config(args.config, overrides={"tolerance": args.tolerance, "seed": args.seed,
                                                "log_level": args.log_level})
    except ValueError as e:
        logging.basicConfig(format='%(asctime)s %(levelname)s [%(name)s] %(message)s', stream=sys.stderr)
        logger.error(f"Configuration error: {e}")
        _emit({"error": "ConfigError", "message": str(e)}, None)
        return EXIT_ERROR

    # 2) Configure logging globally, on stderr so reports stay clean
    logging.basicConfig(
        level=getattr(logging, str(config["log_level"]).upper(), logging.INFO),
        format='%(asctime)s %(levelname)s [%(name)s] %(message)s',
        stream=sys.stderr,
    )

    if args.report_out and not os.path.isabs(args.report_out) and not os.path.dirname(args.report_out):
        args.report_out = os.path.join(str(config["output_dir"]), args.report_out)

    # 3) Run the command
    runner = ScenarioRunner(config, base_dir=os.getcwd())
    try:
        report, code = dispatch(args, runner)
    except HnetsError as e:
        logger.error(f"{type(e).__name__}: {e}")
        _emit({"error": type(e).__name__, "message": str(e),
               "witness": None if e.witness is None else str(e.witness)}, args.report_out)
        return EXIT_ERROR

    # 4) Emit the report
    _emit(report, args.report_out)
    return code


if __name__ == "__main__":
    sys.exit(main())
