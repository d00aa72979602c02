"""Experiment harness: metrics, batch runs, radius sweeps and ablations.

Every run writes its solution file and its RunLog under the output
directory. Rows come back in submission order whatever the worker count.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .driver import DriverParams, solve
from .exact_oracle import solve_exact_global
from .instance import InfeasibleInstanceError, Instance, load_instance
from .solution import dump_solution, total_distance, validate, validate_points

__all__ = [
    "gap_percent",
    "saving_rate",
    "read_manifest",
    "RunRow",
    "run_batch",
    "summarize",
    "write_csv",
    "sweep_radius",
    "ablate",
    "ORACLE_REFERENCE_MAX_TASKS",
]

log = logging.getLogger(__name__)

# instances this small get an exact reference value when none is supplied
ORACLE_REFERENCE_MAX_TASKS = 5


def gap_percent(f_heuristic: float, f_reference: float) -> float:
    if not f_reference > 0:
        raise ValueError("the reference objective must be positive")
    return 100.0 * (f_heuristic - f_reference) / f_reference


def saving_rate(f_without: float, f_with: float) -> float:
    if not f_without > 0:
        raise ValueError("the baseline objective must be positive")
    return 100.0 * (f_without - f_with) / f_without


def read_manifest(path) -> list[Path]:
    """Instance paths from a manifest: a JSON list / ``{"instances": [...]}`` or one path per line.

    Relative paths resolve against the manifest's directory.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        doc = json.loads(text)
        items = doc["instances"] if isinstance(doc, dict) else doc
    else:
        items = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    return [p if p.is_absolute() else path.parent / p for p in map(Path, items)]


@dataclass
class RunRow:
    instance: str
    rep: int
    seed: int
    n_tasks: int
    status: str
    f_P: float | None = None
    f_S: float | None = None
    vehicles: int | None = None
    iterations: int | None = None
    runtime_s: float | None = None
    reference: float | None = None
    gap: float | None = None
    solution_file: str | None = None
    log_file: str | None = None
    error: str | None = None


FIELDS = [f for f in RunRow.__dataclass_fields__]


def _one_run(job):
    inst, params, rep, out_dir = job
    row = RunRow(inst.name, rep, params.seed, inst.n_tasks, "ok")
    t0 = time.perf_counter()
    try:
        sol, pts, runlog = solve(inst, params)
    except InfeasibleInstanceError as exc:
        row.status, row.error = "infeasible", str(exc)
        return row
    except Exception as exc:  # batch keeps going
        row.status, row.error = "error", f"{type(exc).__name__}: {exc}"
        return row
    row.runtime_s = time.perf_counter() - t0
    row.f_P = total_distance(sol, inst, pts)
    row.f_S = total_distance(sol, inst)
    row.vehicles = len(sol.routes)
    row.iterations = len(runlog.iterations)
    report = validate(sol, inst)
    if params.use_disks:
        report.violations += validate_points(sol, inst, pts).violations
    if not report.ok:
        row.status, row.error = "invalid", "; ".join(v.detail for v in report.violations)
    if out_dir is not None:
        stem = f"{inst.name}_rep{rep}"
        sol_path = Path(out_dir) / "solutions" / f"{stem}.json"
        log_path = Path(out_dir) / "logs" / f"{stem}.jsonl"
        sol_path.write_text(dump_solution(sol, inst, pts))
        log_path.write_text(runlog.to_jsonl())
        row.solution_file, row.log_file = str(sol_path), str(log_path)
    return row


def _reference(inst: Instance, references: dict | None, use_oracle: bool):
    if references and inst.name in references:
        return float(references[inst.name])
    if use_oracle and inst.n_tasks <= ORACLE_REFERENCE_MAX_TASKS:
        try:
            return solve_exact_global(inst)[2]
        except InfeasibleInstanceError:
            return None
    return None


def run_batch(instances, params: DriverParams | None = None, repetitions: int = 1,
              base_seed: int = 0, workers: int = 1, out_dir=None,
              references: dict | None = None, oracle_reference: bool = True) -> list[RunRow]:
    """Solve every instance ``repetitions`` times with seeds ``base_seed + rep``.

    ``instances`` holds :class:`Instance` objects or paths. Failures become
    rows with a non-ok status instead of stopping the batch.
    """
    params = params or DriverParams()
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    loaded = []
    for item in instances:
        loaded.append(item if isinstance(item, Instance) else load_instance(item))
    if out_dir is not None:
        for sub in ("solutions", "logs"):
            (Path(out_dir) / sub).mkdir(parents=True, exist_ok=True)
    jobs = [(inst, replace(params, seed=base_seed + rep), rep, out_dir)
            for inst in loaded for rep in range(repetitions)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_one_run, jobs))
    else:
        rows = [_one_run(j) for j in jobs]
    refs = {}
    for inst in loaded:
        refs[inst.name] = _reference(inst, references, oracle_reference)
    for row in rows:
        row.reference = refs.get(row.instance)
        if row.reference and row.f_P is not None:
            row.gap = gap_percent(row.f_P, row.reference)
    if out_dir is not None:
        write_csv(rows, Path(out_dir) / "runs.csv")
        write_csv(summarize(rows), Path(out_dir) / "summary.csv")
        with open(Path(out_dir) / "runs.jsonl", "w") as fh:
            for row in rows:
                fh.write(json.dumps(row.__dict__, sort_keys=True) + "\n")
    return rows


def summarize(rows) -> list[dict]:
    """Best/avg/worst objective per instance, in first-seen order."""
    by: dict[str, list] = {}
    for r in rows:
        by.setdefault(r.instance, []).append(r)
    out = []
    for name, rs in by.items():
        vals = [r.f_P for r in rs if r.f_P is not None]
        ref = rs[0].reference
        item = {"instance": name, "runs": len(rs), "ok": sum(r.status == "ok" for r in rs),
                "best": min(vals) if vals else None,
                "avg": statistics.fmean(vals) if vals else None,
                "worst": max(vals) if vals else None,
                "avg_vehicles": statistics.fmean(r.vehicles for r in rs if r.vehicles) if vals else None,
                "reference": ref}
        item["best_gap"] = gap_percent(item["best"], ref) if ref and vals else None
        item["avg_gap"] = gap_percent(item["avg"], ref) if ref and vals else None
        out.append(item)
    return out


def write_csv(rows, path) -> None:
    rows = [r.__dict__ if isinstance(r, RunRow) else r for r in rows]
    fields = list(rows[0]) if rows else FIELDS
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if v is None else v) for k, v in r.items()})


def sweep_radius(instance: Instance, radii, params: DriverParams | None = None,
                 repetitions: int = 5, base_seed: int = 0, workers: int = 1, out_dir=None) -> list[dict]:
    """Solve ``instance`` at each node radius; one summary row per radius."""
    params = params or DriverParams()
    out = []
    for r in radii:
        inst = replace(instance.with_radius(r), name=f"{instance.name}_r{r:g}")
        sub = None if out_dir is None else Path(out_dir) / f"r{r:g}"
        rows = run_batch([inst], params, repetitions, base_seed, workers, sub, oracle_reference=False)
        vals = [row.f_P for row in rows if row.f_P is not None]
        out.append({"instance": instance.name, "radius": float(r), "runs": len(rows),
                    "best": min(vals) if vals else None,
                    "avg": statistics.fmean(vals) if vals else None,
                    "worst": max(vals) if vals else None})
    if out_dir is not None:
        write_csv(out, Path(out_dir) / "sweep.csv")
    return out


def ablate(instances, params: DriverParams | None = None, repetitions: int = 5,
           base_seed: int = 0, workers: int = 1, out_dir=None) -> list[dict]:
    """Compare the search with and without the threshold re-increase.

    ``direction`` is "expected" when disabling the re-increase gives a worse
    or equal average best objective on that instance.
    """
    params = params or DriverParams()
    res = {}
    for flag in (True, False):
        sub = None if out_dir is None else Path(out_dir) / ("reincrease" if flag else "no_reincrease")
        rows = run_batch(instances, replace(params, threshold_reincrease=flag), repetitions,
                         base_seed, workers, sub, oracle_reference=False)
        res[flag] = summarize(rows)
    out = []
    for on, off in zip(res[True], res[False]):
        item = {"instance": on["instance"], "avg_with": on["avg"], "avg_without": off["avg"],
                "best_with": on["best"], "best_without": off["best"]}
        if on["avg"] is not None and off["avg"] is not None:
            item["saving"] = saving_rate(off["avg"], on["avg"])
            item["direction"] = "expected" if off["avg"] >= on["avg"] else "reversed"
        else:
            item["saving"], item["direction"] = None, "failed"
        out.append(item)
    if out_dir is not None:
        write_csv(out, Path(out_dir) / "ablation.csv")
    return out


def cpu_workers(requested: int | None) -> int:
    if requested is None or requested < 1:
        return max(1, os.cpu_count() or 1)
    return requested
