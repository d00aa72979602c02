"""Adaptive iterated local search around VND and touring-point optimization.

The incumbent is perturbed with intensity ``tau``, improved by VND on node
centers, then scored with optimized representative points. Acceptance uses an
adaptive threshold: a candidate is kept when its disk-aware objective is at
most ``eta`` times the best one found so far.
"""

from __future__ import annotations

import dataclasses
import json
import math
import random
from dataclasses import dataclass, field

from .close_enough import DEFAULT_MAX_ITER, DEFAULT_TOL, PointAssignment, optimize_solution
from .construction import regret_insertion
from .exact_oracle import ROUTE_CAP, refine_route_exact
from .instance import Instance
from .neighborhoods import VNDParams, vnd
from .perturbation import PerturbationConfig, perturb_with_ops
from .solution import EDGE, Solution, total_distance

__all__ = ["DriverParams", "SearchState", "RunLog", "threshold_update",
           "threshold_reincrease", "solve", "polish_orientations", "PARAM_ALIASES"]

# external (table-style) names -> DriverParams fields
PARAM_ALIASES = {"MaxIt": "max_it", "lambda": "lam"}

IMPROVE_EPS = 1e-9
_CACHE_LIMIT = 50_000


@dataclass(frozen=True)
class DriverParams:
    max_it: int = 100
    it_max: int = 30
    rho: int = 10
    tau_min: int = 3
    tau_max: int = 8
    L_max: int = 8
    lam: int = 5
    beta: int = 10
    theta: int = 10
    zeta_min: int = 2
    zeta_max: int = 8
    xi: int = 5
    gamma_max: int = 3
    l_max: int = 200
    point_tol: float = DEFAULT_TOL
    point_max_iter: int = DEFAULT_MAX_ITER
    seed: int = 0
    threshold_reincrease: bool = True
    use_disks: bool = True
    refine: bool = True
    refine_cap: int = ROUTE_CAP
    polish: bool = True

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.type in ("int", "float") and f.name != "seed" and not v > 0:
                raise ValueError(f"parameter {f.name} must be positive, got {v!r}")
        if self.tau_min > self.tau_max:
            raise ValueError("tau_min must not exceed tau_max")
        if self.zeta_min > self.zeta_max:
            raise ValueError("zeta_min must not exceed zeta_max")

    @classmethod
    def from_dict(cls, data: dict, **overrides) -> "DriverParams":
        names = {f.name for f in dataclasses.fields(cls)}
        kw = {}
        for key, value in {**data, **overrides}.items():
            name = PARAM_ALIASES.get(key, key)
            if name not in names:
                raise ValueError(f"unknown parameter {key!r}")
            kw[name] = value
        return cls(**kw)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @property
    def vnd_params(self) -> VNDParams:
        return VNDParams(self.zeta_min, self.zeta_max, self.xi, self.gamma_max, self.l_max)

    @property
    def perturbation(self) -> PerturbationConfig:
        return PerturbationConfig(self.tau_min, self.tau_max, self.lam)


@dataclass
class SearchState:
    S: Solution
    P: PointAssignment
    f_P: float
    S_best: Solution
    P_best: PointAssignment
    f_best: float
    f_S0: float
    tau: int
    unimproved: int = 0
    rejected: int = 0
    improved: int = 0
    noim: int = 0
    alpha1: float = 1.0
    alpha2: float = 1.0
    eta: float = 2.0
    i: int = 0


def threshold_update(state: SearchState) -> float:
    state.alpha1 = state.f_best / state.f_S0
    state.alpha2 = state.improved / state.i
    state.eta = 1.0 + state.alpha1 * state.alpha2
    return state.eta


def threshold_reincrease(state: SearchState, beta: int, enabled: bool = True) -> float:
    if enabled and state.rejected > 0 and state.rejected % beta == 0:
        state.eta += state.alpha1 * state.alpha2
        state.rejected = 0
    return state.eta


@dataclass
class RunLog:
    header: dict
    records: list = field(default_factory=list)
    footer: dict = field(default_factory=dict)

    def to_jsonl(self) -> str:
        lines = [json.dumps({"header": self.header}, sort_keys=True)]
        lines += [json.dumps(r, sort_keys=True) for r in self.records]
        if self.footer:
            lines.append(json.dumps({"footer": self.footer}, sort_keys=True))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "RunLog":
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
        footer = rows.pop()["footer"] if len(rows) > 1 and "footer" in rows[-1] else {}
        return cls(rows[0]["header"], rows[1:], footer)

    @property
    def iterations(self) -> list:
        return [r for r in self.records if r["i"] > 0]


def polish_orientations(solution: Solution, points_of):
    """Flip single edge tasks while that shortens the disk-aware objective.

    The search itself scores orientations on node centers, which can prefer
    the wrong direction of an edge next to a large disk. ``points_of(sol)``
    returns ``(points, total)``. Returns ``(solution, points, total, moves)``.
    """
    pts, f = points_of(solution)
    moves = 0
    improved = True
    while improved:
        improved = False
        for k, route in enumerate(solution.routes):
            for pos, t in enumerate(route):
                if t.kind != EDGE:
                    continue
                routes = list(solution.routes)
                routes[k] = route[:pos] + (t.flipped(),) + route[pos + 1:]
                cand = Solution(tuple(routes))
                c_pts, c_f = points_of(cand)
                if c_f < f - IMPROVE_EPS:
                    solution, pts, f = cand, c_pts, c_f
                    moves += 1
                    improved = True
                    break
            if improved:
                break
    return solution, pts, f, moves


def solve(instance: Instance, params: DriverParams | None = None):
    """Run the search; returns ``(best solution, its points, RunLog)``."""
    params = params or DriverParams()
    rng = random.Random(params.seed)
    work = instance if params.use_disks else instance.with_radius(0.0)
    vp, pc = params.vnd_params, params.perturbation
    cache: dict = {}

    def points_of(sol):
        if len(cache) > _CACHE_LIMIT:
            cache.clear()
        return optimize_solution(sol, work, params.point_tol, params.point_max_iter, cache)

    s0 = regret_insertion(work, params.rho, rng)
    f_s0 = total_distance(s0, work)
    s1 = vnd(s0, work, vp, rng)
    if params.refine:
        s1 = Solution(tuple(refine_route_exact(r, work, params.refine_cap) for r in s1.routes))
    p1, f1 = points_of(s1)
    st = SearchState(S=s1, P=p1, f_P=f1, S_best=s1, P_best=p1, f_best=f1,
                     f_S0=f_s0, tau=params.tau_min)
    log = RunLog({"instance": instance.name, "n_tasks": instance.n_tasks,
                  "params": params.to_dict()})
    log.records.append({"i": 0, "f_S0": f_s0, "f_S": total_distance(s1, work), "f_P": f1,
                        "f_best": f1, "eta": st.eta, "tau": st.tau,
                        "points_converged": p1.converged})

    for i in range(1, params.max_it + 1):
        st.i = i
        cand, ops = perturb_with_ops(st.S, work, st.tau, pc, rng)
        cand = vnd(cand, work, vp, rng)
        p_new, f_new = points_of(cand)
        improved = f_new < st.f_best - IMPROVE_EPS
        if improved:
            st.S_best, st.P_best, st.f_best = cand, p_new, f_new
            st.unimproved, st.noim = 0, 0
            st.improved += 1
        else:
            st.unimproved += 1
            st.rejected += 1
            st.noim += 1
        eta_before = st.eta
        accepted = f_new <= st.eta * st.f_best
        if accepted:
            st.S, st.P, st.f_P = cand, p_new, f_new
            threshold_update(st)
        threshold_reincrease(st, params.beta, params.threshold_reincrease)
        tau_used = st.tau
        if st.noim >= params.L_max:
            st.tau = min(st.tau + 1, params.tau_max)
            st.noim = 0
        elif st.noim == 0:
            st.tau = params.tau_min
        reset = st.unimproved > 0 and st.unimproved % params.theta == 0
        if reset:
            st.S, st.P, st.f_P = st.S_best, st.P_best, st.f_best
        log.records.append({
            "i": i, "f_S": total_distance(cand, work), "f_P": f_new, "f_best": st.f_best,
            "eta_before": eta_before, "eta": st.eta, "tau": tau_used, "tau_next": st.tau,
            "accepted": accepted, "improved": improved, "reset": reset,
            "destroy": ops[0], "repair": ops[1], "n_routes": len(cand.routes),
            "points_converged": p_new.converged,
        })
        if st.unimproved >= params.it_max:
            break

    best, pts, f = st.S_best, st.P_best, st.f_best
    moves = 0
    if params.polish and params.use_disks:
        best, pts, f, moves = polish_orientations(best, points_of)
    log.footer = {"f_search": st.f_best, "f_final": f, "polish_moves": moves}
    return best, pts, log
