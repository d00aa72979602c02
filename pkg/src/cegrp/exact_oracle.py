"""Exact solvers for small cases.

:func:`refine_route_exact` re-sequences the tasks of one route optimally
(center evaluation) with a subset dynamic program. :func:`solve_exact_global`
enumerates every solution of a tiny instance and scores each route with the
touring-point optimizer, so it is exact for the disk-aware objective.
"""

from __future__ import annotations

import itertools
import logging
import math

import numpy as np

from .close_enough import PointAssignment, optimize_points
from .geometry import dist
from .instance import InfeasibleInstanceError, Instance
from .solution import (EDGE, FWD, NODE, REV, RANGE_TOL, Solution, TaskRef, all_tasks,
                       route_length, task_ends, task_service, vertex_sequence)

__all__ = ["ROUTE_CAP", "GLOBAL_CAP", "OracleCapError", "refine_route_exact",
           "solve_exact_global", "best_route_for_tasks"]

log = logging.getLogger(__name__)

ROUTE_CAP = 12
GLOBAL_CAP = 7
ORACLE_TOL = 1e-9


class OracleCapError(ValueError):
    pass


def refine_route_exact(route, instance: Instance, cap: int = ROUTE_CAP) -> tuple:
    """Shortest ordering and orientation of ``route``'s tasks (node centers).

    Routes longer than ``cap`` come back unchanged. The input is also
    returned when the program finds nothing strictly shorter.
    """
    route = tuple(route)
    n = len(route)
    if n == 0:
        return route
    if n > cap:
        log.info("route of %d tasks exceeds the exact refinement cap %d; left unchanged", n, cap)
        return route
    # state s = 2*i + o; node tasks only use o = 0
    K = 2 * n
    opts = []
    for t in route:
        if t.kind == NODE:
            opts.append((TaskRef(NODE, t.id, None), None))
        else:
            opts.append((TaskRef(EDGE, t.id, FWD), TaskRef(EDGE, t.id, REV)))
    ent = np.zeros((K, 2))
    ext = np.zeros((K, 2))
    svc = np.zeros(K)
    valid = np.zeros(K, dtype=bool)
    for i, pair in enumerate(opts):
        for o, t in enumerate(pair):
            if t is None:
                continue
            e, x = task_ends(t, instance)
            ent[2 * i + o], ext[2 * i + o] = e, x
            svc[2 * i + o] = task_service(t, instance)
            valid[2 * i + o] = True
    depot = np.asarray(instance.depot, dtype=float)
    trans = np.sqrt(((ext[:, None, :] - ent[None, :, :]) ** 2).sum(-1)) + svc[None, :]
    trans[:, ~valid] = np.inf
    start = np.sqrt(((ent - depot) ** 2).sum(-1)) + svc
    start[~valid] = np.inf
    back = np.sqrt(((ext - depot) ** 2).sum(-1))

    task_of = np.arange(K) // 2
    bit = 1 << task_of
    full = (1 << n) - 1
    dp = np.full((1 << n, K), np.inf)
    parent = np.full((1 << n, K), -1, dtype=np.int64)
    for s in range(K):
        dp[bit[s], s] = start[s]
    for mask in range(1, full):
        row = dp[mask]
        if not np.isfinite(row).any():
            continue
        cand = row[:, None] + trans
        arg = cand.argmin(axis=0)
        best = cand[arg, np.arange(K)]
        for t in range(K):
            if mask & bit[t] or not np.isfinite(best[t]):
                continue
            nm = mask | bit[t]
            if best[t] < dp[nm, t]:
                dp[nm, t] = best[t]
                parent[nm, t] = arg[t]
    total = dp[full] + back
    s = int(total.argmin())
    if not total[s] < route_length(route, instance) - 1e-12:
        return route
    order, mask = [], full
    while s >= 0:
        order.append(opts[s // 2][s % 2])
        prev = int(parent[mask, s])
        mask ^= int(bit[s])
        s = prev
    return tuple(reversed(order))


def _orientations(task: TaskRef):
    if task.kind == NODE:
        return (TaskRef(NODE, task.id, None),)
    return (TaskRef(EDGE, task.id, FWD), TaskRef(EDGE, task.id, REV))


def _node_radius_sum(route, instance: Instance) -> float:
    return sum(instance.node_by_id[t.id].radius for t in route if t.kind == NODE)


def best_route_for_tasks(tasks, instance: Instance, tol: float = ORACLE_TOL):
    """Best disk-aware route over a fixed task set; ``(value, route, points)``.

    Only orderings whose center length respects the flight range count.
    Returns ``(inf, None, None)`` if none does. A route and its reversal
    have the same value, so only one of each pair is scored.
    """
    tasks = list(tasks)
    L = instance.fleet.L + RANGE_TOL
    r_sum = _node_radius_sum(tasks, instance)
    cands = []
    for perm in itertools.permutations(range(len(tasks))):
        if len(perm) > 1 and perm[0] > perm[-1]:
            continue
        for route in itertools.product(*(_orientations(tasks[i]) for i in perm)):
            c = route_length(route, instance)
            if c <= L:
                cands.append((c - 2.0 * r_sum, c, route))
    cands.sort(key=lambda x: (x[0], x[1]))
    best = (math.inf, None, None)
    for lb, c, route in cands:
        if lb >= best[0]:
            break
        if r_sum == 0:
            v, pts = c, [d.center for d in vertex_sequence(route, instance)]
        else:
            res = optimize_points(vertex_sequence(route, instance), tol=tol)
            v, pts = res.objective, res.points
        if v < best[0] - 1e-12:
            best = (v, route, pts)
    return best


def _partitions(n: int, node_flags, Q: int, max_blocks):
    """Set partitions of range(n) as lists of tuples, blocks capped by Q."""
    blocks: list[list[int]] = []
    counts: list[int] = []

    def rec(i):
        if i == n:
            yield [tuple(b) for b in blocks]
            return
        w = 1 if node_flags[i] else 0
        for k in range(len(blocks)):
            if counts[k] + w <= Q:
                blocks[k].append(i)
                counts[k] += w
                yield from rec(i + 1)
                blocks[k].pop()
                counts[k] -= w
        if max_blocks is None or len(blocks) < max_blocks:
            blocks.append([i])
            counts.append(w)
            yield from rec(i + 1)
            blocks.pop()
            counts.pop()

    yield from rec(0)


def solve_exact_global(instance: Instance, tol: float = ORACLE_TOL, cap: int = GLOBAL_CAP):
    """Globally optimal ``(Solution, PointAssignment, value)`` for a tiny instance."""
    tasks = all_tasks(instance)
    n = len(tasks)
    if n > cap:
        raise OracleCapError(f"instance has {n} tasks; the exact oracle handles at most {cap}")
    flags = [t.kind == NODE for t in tasks]
    cache: dict = {}

    def block(b):
        if b not in cache:
            cache[b] = best_route_for_tasks([tasks[i] for i in b], instance, tol)
        return cache[b]

    best_v, best_p = math.inf, None
    for part in _partitions(n, flags, instance.fleet.Q, instance.fleet.max_vehicles):
        v = 0.0
        for b in part:
            v += block(b)[0]
            if v >= best_v:
                break
        if v < best_v - 1e-12:
            best_v, best_p = v, part
    if best_p is None:
        raise InfeasibleInstanceError("no feasible solution exists within the fleet limits",
                                      [t.key for t in tasks])
    routes, points = [], PointAssignment()
    for b in best_p:
        _, route, pts = block(b)
        routes.append(route)
        points.append(list(pts))
    return Solution(tuple(routes)), points, best_v
