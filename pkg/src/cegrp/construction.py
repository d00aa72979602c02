"""Regret-insertion construction of initial solutions.

Each construction repeatedly appends the task with the largest regret value to
the end of its cheapest route. The regret of a task is the gap between its
second-cheapest and cheapest end-of-route insertion; opening a new route is
always one of the candidates while the fleet allows it.
"""

from __future__ import annotations

import random

from . import _insert as ins
from .instance import InfeasibleInstanceError, Instance
from .solution import Solution, TaskRef, all_tasks, total_distance

__all__ = ["regret_from_costs", "regret_value_endpoint", "regret_insertion"]

INF = float("inf")


def regret_from_costs(costs) -> float:
    """Second-lowest minus lowest cost; ``inf`` when fewer than two are finite."""
    finite = sorted(c for c in costs if c != INF)
    if len(finite) < 2:
        return INF
    return finite[1] - finite[0]


def _end_candidates(task: TaskRef, routes, lengths, instance: Instance):
    """End-insertion options: one per route plus the new-route pseudo-candidate."""
    out = []
    for k, route in enumerate(routes):
        slot = ins.end_slot(route, lengths[k], task, instance)
        out.append((INF, k, None) if slot is None else (slot[0], k, slot[2]))
    if ins.fleet_can_grow(len(routes), instance):
        slot = ins.new_route_slot(task, instance)
        out.append((INF, len(routes), None) if slot is None else (slot[0], len(routes), slot[2]))
    return out


def regret_value_endpoint(task: TaskRef, solution: Solution, instance: Instance) -> float:
    routes = solution.routes
    cands = _end_candidates(task, routes, ins.lengths(routes, instance), instance)
    return regret_from_costs(c[0] for c in cands)


def _construct(instance: Instance, tasks, rng: random.Random) -> Solution:
    routes: list[tuple] = []
    lengths: list[float] = []
    pending = list(tasks)
    # cache of end-insertion candidates per task; only the touched route changes
    cache = {t: _end_candidates(t, routes, lengths, instance) for t in pending}
    while pending:
        best_rv, chosen = -1.0, []
        for t in pending:
            cands = cache[t]
            if all(c[0] == INF for c in cands):
                raise InfeasibleInstanceError(
                    f"{t.kind} {t.id} cannot be inserted into any route within the fleet limits",
                    [t.key])
            rv = regret_from_costs(c[0] for c in cands)
            if rv > best_rv:
                best_rv, chosen = rv, [t]
            elif rv == best_rv:
                chosen.append(t)
        task = chosen[0] if len(chosen) == 1 else rng.choice(chosen)
        cost, k, oriented = min(cache[task], key=lambda c: (c[0], c[1]))
        pending.remove(task)
        del cache[task]
        if k == len(routes):
            routes.append((oriented,))
            lengths.append(cost)
            for t in pending:
                cache[t] = _end_candidates(t, routes, lengths, instance)
        else:
            routes[k] = routes[k] + (oriented,)
            lengths[k] += cost
            for t in pending:
                slot = ins.end_slot(routes[k], lengths[k], t, instance)
                cache[t][k] = (INF, k, None) if slot is None else (slot[0], k, slot[2])
    return Solution(tuple(routes))


def regret_insertion(instance: Instance, rho: int = 10, rng_seed: int | random.Random = 0) -> Solution:
    """Best of ``rho`` regret-insertion constructions (center objective).

    All constructions draw from one random stream, so the result for ``rho``
    is never worse than for any smaller ``rho`` with the same seed.
    """
    if rho < 1:
        raise ValueError("rho must be >= 1")
    bad = instance.unreachable_tasks()
    if bad:
        kind, tid = bad[0]
        raise InfeasibleInstanceError(
            f"{kind} {tid}: depot round trip {instance.round_trip(kind, tid):.3f} "
            f"exceeds flight range L={instance.fleet.L}", bad)
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    tasks = all_tasks(instance)
    best, best_f = None, INF
    for _ in range(rho):
        sol = _construct(instance, tasks, rng)
        f = total_distance(sol, instance)
        if f < best_f:
            best, best_f = sol, f
    return best
