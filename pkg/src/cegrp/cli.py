"""Command-line entry point ``ce-grp``.

Exit codes: 0 on success, 2 when a solution fails validation, 3 when the
instance is infeasible. Malformed input files exit with 1.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .driver import DriverParams, solve
from .exact_oracle import OracleCapError, solve_exact_global
from .harness import ablate, cpu_workers, gap_percent, read_manifest, run_batch, saving_rate, sweep_radius
from .instance import (INSTANCE_SUFFIX, InfeasibleInstanceError, InstanceError, benchmark_instance,
                       generate_instance, load_instance, save_instance)
from .plotting import plot_solution
from .solution import dump_solution, parse_solution, total_distance, validate, validate_points

__all__ = ["main", "build_parser", "load_params", "gap_percent", "saving_rate",
           "EXIT_OK", "EXIT_INVALID", "EXIT_INFEASIBLE"]

EXIT_OK, EXIT_ERROR, EXIT_INVALID, EXIT_INFEASIBLE = 0, 1, 2, 3


def load_params(path=None, **overrides) -> DriverParams:
    """Driver parameters from a JSON file using the table names (MaxIt, lambda, ...)."""
    data = {}
    if path is not None:
        data = json.loads(Path(path).read_text())
        if not isinstance(data, dict):
            raise ValueError(f"{path}: parameters must be a JSON object")
    return DriverParams.from_dict(data, **{k: v for k, v in overrides.items() if v is not None})


def _params(args) -> DriverParams:
    ov = {"seed": getattr(args, "seed", None)}
    if getattr(args, "no_threshold_reincrease", False):
        ov["threshold_reincrease"] = False
    if getattr(args, "no_disks", False):
        ov["use_disks"] = False
    return load_params(getattr(args, "params", None), **ov)


def _instance(path, radius=None):
    inst = load_instance(path)
    return inst if radius is None else inst.with_radius(radius)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _cmd_solve(args) -> int:
    inst = _instance(args.file, args.radius)
    params = _params(args)
    sol, pts, runlog = solve(inst, params)
    out_pts = pts if params.use_disks else None
    report = validate(sol, inst)
    if out_pts is not None:
        report.violations += validate_points(sol, inst, out_pts).violations
    f_p = total_distance(sol, inst, out_pts)
    print(f"{inst.name}: f(P)={f_p:.6f} center={total_distance(sol, inst):.6f} "
          f"vehicles={len(sol.routes)} iterations={len(runlog.iterations)}")
    if args.out:
        out = Path(args.out)
        doc = json.loads(dump_solution(sol, inst, out_pts))
        doc["instance_file"] = str(Path(args.file).resolve())
        if args.radius is not None:
            doc["radius"] = args.radius
        _write(out / f"{inst.name}.solution.json", json.dumps(doc, indent=2) + "\n")
        _write(out / f"{inst.name}.runlog.jsonl", runlog.to_jsonl())
    for v in report.violations:
        print(f"violation: {v.detail}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_INVALID


def _cmd_batch(args) -> int:
    refs = json.loads(Path(args.reference).read_text()) if args.reference else None
    rows = run_batch(read_manifest(args.manifest), _params(args), args.reps, args.seed or 0,
                     cpu_workers(args.workers), args.out, refs)
    for r in rows:
        gap = "" if r.gap is None else f" gap={r.gap:.3f}%"
        val = "" if r.f_P is None else f" f(P)={r.f_P:.6f}"
        print(f"{r.instance} rep={r.rep} {r.status}{val}{gap}")
    if any(r.status == "invalid" for r in rows):
        return EXIT_INVALID
    if rows and all(r.status == "infeasible" for r in rows):
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_sweep(args) -> int:
    radii = [float(x) for x in args.radii.split(",") if x.strip()]
    rows = sweep_radius(_instance(args.file), radii, _params(args), args.reps, args.seed or 0,
                        cpu_workers(args.workers), args.out)
    for r in rows:
        print(f"r={r['radius']:g} best={r['best']:.6f} avg={r['avg']:.6f}")
    return EXIT_OK


def _cmd_ablate(args) -> int:
    files = []
    for item in args.inputs:
        files += read_manifest(item) if not item.endswith(INSTANCE_SUFFIX) else [Path(item)]
    rows = ablate(files, _params(args), args.reps, args.seed or 0, cpu_workers(args.workers), args.out)
    for r in rows:
        print(f"{r['instance']}: with={r['avg_with']:.6f} without={r['avg_without']:.6f} "
              f"saving={r['saving']:.3f}% {r['direction']}")
    n_exp = sum(r["direction"] == "expected" for r in rows)
    print(f"expected direction on {n_exp}/{len(rows)} instances")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    inst = _instance(args.file, args.radius)
    sol, pts, value = solve_exact_global(inst)
    print(f"{inst.name}: optimum f(P)={value:.9f} vehicles={len(sol.routes)}")
    if args.out:
        _write(Path(args.out) / f"{inst.name}.oracle.json", dump_solution(sol, inst, pts))
    return EXIT_OK


def _cmd_validate(args) -> int:
    inst = _instance(args.instance)
    sol, pts, doc = parse_solution(Path(args.solution).read_text())
    report = validate(sol, inst)
    if pts is not None:
        report.violations += validate_points(sol, inst, pts).violations
    if report.ok and "total_distance" in doc:
        f = total_distance(sol, inst, pts)
        if abs(f - float(doc["total_distance"])) > 1e-6 * max(1.0, abs(f)):
            print(f"reported total_distance {doc['total_distance']} differs from recomputed {f}",
                  file=sys.stderr)
            return EXIT_INVALID
    for v in report.violations:
        print(f"{v.kind}: {v.detail}")
    print("valid" if report.ok else f"{len(report.violations)} violation(s)")
    return EXIT_OK if report.ok else EXIT_INVALID


def _cmd_plot(args) -> int:
    sol, pts, doc = parse_solution(Path(args.solution).read_text())
    inst_path = args.instance or doc.get("instance_file")
    if not inst_path:
        print("no instance file given and none recorded in the solution", file=sys.stderr)
        return EXIT_ERROR
    inst = _instance(inst_path, doc.get("radius"))
    out = Path(args.out) if args.out else Path(args.solution).with_suffix(".svg")
    _write(out, plot_solution(sol, pts, inst, title=inst.name))
    print(out)
    return EXIT_OK


def _cmd_generate(args) -> int:
    if args.benchmark:
        radius = 50.0 if args.radius is None else args.radius
        inst = benchmark_instance(args.benchmark, seed=args.seed, radius=radius)
    else:
        radius = 0.0 if args.radius is None else args.radius
        inst = generate_instance(args.seed, args.nodes, args.edges, area=args.area, radius=radius)
    out = Path(args.out) if args.out else Path(inst.name + INSTANCE_SUFFIX)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_instance(inst, out)
    print(out)
    return EXIT_OK


def _search_flags(p, seed=True):
    p.add_argument("--params", help="JSON file with search parameters (MaxIt, it_max, rho, ...)")
    if seed:
        p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-threshold-reincrease", action="store_true",
                   help="never raise the acceptance threshold after repeated rejections")
    p.add_argument("--no-disks", action="store_true", help="visit node centers only")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ce-grp", description="Close-enough general routing solver")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance")
    p.add_argument("file")
    p.add_argument("--radius", type=float, default=None, help="override every node radius")
    _search_flags(p)
    p.add_argument("--out", help="directory for the solution file and run log")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("batch", help="solve every instance of a manifest")
    p.add_argument("manifest")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--reference", help="JSON mapping instance name -> best-known objective")
    p.add_argument("--out", default="batch_out")
    _search_flags(p)
    p.set_defaults(func=_cmd_batch)

    p = sub.add_parser("sweep-radius", help="solve one instance over several node radii")
    p.add_argument("file")
    p.add_argument("--radii", default="10,30,50,70,100")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="sweep_out")
    _search_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("ablate", help="compare runs with and without the threshold re-increase")
    p.add_argument("inputs", nargs="+", help="manifests or instance files")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="ablate_out")
    _search_flags(p)
    p.set_defaults(func=_cmd_ablate)

    p = sub.add_parser("oracle", help="exact optimum of a tiny instance")
    p.add_argument("file")
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("validate", help="check a solution file against an instance")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("plot", help="render a solution file as SVG")
    p.add_argument("solution")
    p.add_argument("--instance", help="instance file (defaults to the one recorded in the solution)")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("generate", help="write a random instance")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--nodes", type=int, default=10)
    p.add_argument("--edges", type=int, default=5)
    p.add_argument("--area", type=float, default=1000.0)
    p.add_argument("--radius", type=float, default=None,
                   help="node radius (default 0, or 50 with --benchmark)")
    p.add_argument("--benchmark", help="shape label such as C1 or C1-4")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_generate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InfeasibleInstanceError as exc:
        print(f"infeasible instance: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InstanceError, OracleCapError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
