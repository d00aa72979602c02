"""Destroy/repair perturbation with adaptive intensity.

Each attempt pairs one destroy operator with one repair operator, both drawn
uniformly. Destroy operators return ``(partial, removed)``; repair operators
put the removed tasks back and may open new routes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import _insert as ins
from .instance import Instance
from .neighborhoods import RepairError, regret_repair, remove_tasks
from .solution import EDGE, NODE, Solution, route_length, total_distance

__all__ = [
    "PerturbationConfig",
    "DESTROY_OPS",
    "REPAIR_OPS",
    "perturb",
    "perturb_with_ops",
    "destroy_random",
    "destroy_worst",
    "destroy_node",
    "destroy_edge",
    "repair_regret",
    "repair_random",
    "repair_greedy",
]

_KIND_ORDER = {NODE: 0, EDGE: 1}


@dataclass(frozen=True)
class PerturbationConfig:
    tau_min: int = 3
    tau_max: int = 8
    lam: int = 5
    destroy_ops: tuple = ("random", "worst", "node", "edge")
    repair_ops: tuple = ("regret", "random", "greedy")


def _tasks(solution: Solution):
    return [t for r in solution.routes for t in r]


def destroy_random(solution: Solution, tau: int, rng: random.Random):
    tasks = _tasks(solution)
    removed = rng.sample(tasks, min(tau, len(tasks)))
    return remove_tasks(solution, removed), removed


def destroy_worst(solution: Solution, instance: Instance, tau: int):
    """Remove, one at a time, the task whose removal shortens the solution most.

    Ties go to the lower task id (nodes before edges on equal ids).
    """
    routes = [list(r) for r in solution.routes]
    removed = []
    for _ in range(min(tau, sum(len(r) for r in routes))):
        best = None
        for k, r in enumerate(routes):
            base = route_length(r, instance)
            for pos, t in enumerate(r):
                saving = base - route_length(r[:pos] + r[pos + 1:], instance)
                key = (-saving, t.id, _KIND_ORDER[t.kind])
                if best is None or key < best[0]:
                    best = (key, k, pos)
        _, k, pos = best
        removed.append(routes[k].pop(pos))
    return Solution(tuple(tuple(r) for r in routes)), removed


def _destroy_kind(solution: Solution, tau: int, rng: random.Random, kind: str):
    pool = [t for t in _tasks(solution) if t.kind == kind]
    removed = rng.sample(pool, min(tau, len(pool)))
    return remove_tasks(solution, removed), removed


def destroy_node(solution: Solution, tau: int, rng: random.Random):
    return _destroy_kind(solution, tau, rng, NODE)


def destroy_edge(solution: Solution, tau: int, rng: random.Random):
    return _destroy_kind(solution, tau, rng, EDGE)


def repair_regret(partial: Solution, removed, instance: Instance) -> Solution:
    return regret_repair(partial, removed, instance)


def _open_route(routes, lengths, task, instance):
    if not ins.fleet_can_grow(len(routes), instance):
        raise RepairError(f"{task.kind} {task.id} fits no route and the fleet is full")
    slot = ins.new_route_slot(task, instance)
    if slot is None:
        raise RepairError(f"{task.kind} {task.id} exceeds the flight range on its own")
    routes.append((slot[2],))
    lengths.append(slot[0])


def repair_random(partial: Solution, removed, instance: Instance, rng: random.Random) -> Solution:
    """Insert tasks in removal order at a uniformly drawn feasible (route, position).

    Edges take the cheaper feasible orientation at the drawn slot.
    """
    routes = list(partial.routes)
    lengths = ins.lengths(routes, instance)
    for t in removed:
        slots = []
        for k, r in enumerate(routes):
            if not ins.can_take(r, t, instance):
                continue
            for pos in range(len(r) + 1):
                if ins.best_slot(r, lengths[k], t, instance, positions=(pos,)) is not None:
                    slots.append((k, pos))
        if not slots:
            _open_route(routes, lengths, t, instance)
            continue
        k, pos = slots[rng.randrange(len(slots))]
        delta, _, oriented = ins.best_slot(routes[k], lengths[k], t, instance, positions=(pos,))
        routes[k] = ins.insert(routes[k], pos, oriented)
        lengths[k] += delta
    return Solution(tuple(routes))


def repair_greedy(partial: Solution, removed, instance: Instance) -> Solution:
    """Repeatedly make the globally cheapest insertion among the pending tasks.

    Ties prefer the earlier route, then the earlier position, then the task
    removed first. A task with no feasible slot anywhere gets a new route.
    """
    routes = list(partial.routes)
    lengths = ins.lengths(routes, instance)
    pending = list(removed)
    while pending:
        best = None
        for n_p, t in enumerate(pending):
            for k, r in enumerate(routes):
                s = ins.best_slot(r, lengths[k], t, instance)
                if s is None:
                    continue
                key = (s[0], k, s[1], n_p)
                if best is None or key < best[0]:
                    best = (key, s)
        if best is None:
            _open_route(routes, lengths, pending.pop(0), instance)
            continue
        (delta, k, pos, n_p), (_, _, oriented) = best
        pending.pop(n_p)
        routes[k] = ins.insert(routes[k], pos, oriented)
        lengths[k] += delta
    return Solution(tuple(routes))


DESTROY_OPS = ("random", "worst", "node", "edge")
REPAIR_OPS = ("regret", "random", "greedy")


def _destroy(name, solution, instance, tau, rng):
    if name == "random":
        return destroy_random(solution, tau, rng)
    if name == "worst":
        return destroy_worst(solution, instance, tau)
    if name == "node":
        return destroy_node(solution, tau, rng)
    if name == "edge":
        return destroy_edge(solution, tau, rng)
    raise ValueError(f"unknown destroy operator {name!r}")


def _repair(name, partial, removed, instance, rng):
    if name == "regret":
        return repair_regret(partial, removed, instance)
    if name == "random":
        return repair_random(partial, removed, instance, rng)
    if name == "greedy":
        return repair_greedy(partial, removed, instance)
    raise ValueError(f"unknown repair operator {name!r}")


def perturb_with_ops(solution: Solution, instance: Instance, tau: int,
                     config: PerturbationConfig, rng: random.Random):
    """Like :func:`perturb` but also returns the (destroy, repair) names of the last attempt."""
    ops = (None, None)
    for _ in range(config.lam):
        d_name = config.destroy_ops[rng.randrange(len(config.destroy_ops))]
        r_name = config.repair_ops[rng.randrange(len(config.repair_ops))]
        ops = (d_name, r_name)
        partial, removed = _destroy(d_name, solution, instance, tau, rng)
        if not removed:
            continue
        try:
            cand = _repair(r_name, partial, removed, instance, rng)
        except RepairError:
            continue
        if not cand.same_as(solution):
            return cand, ops
    return solution, ops


def perturb(solution: Solution, instance: Instance, tau: int,
            config: PerturbationConfig | None = None, rng: random.Random | None = None) -> Solution:
    config = config or PerturbationConfig()
    rng = rng or random.Random(0)
    return perturb_with_ops(solution, instance, tau, config, rng)[0]
