"""Insertion-cost arithmetic shared by construction and the repair operators.

All costs are center evaluations. ``pos`` is the index the task takes in the
route tuple, so ``pos == len(route)`` means appending before the depot leg.
"""

from __future__ import annotations

import math

from .geometry import dist
from .instance import Instance
from .solution import EDGE, FWD, NODE, REV, RANGE_TOL, TaskRef, route_length, route_node_count, task_ends

INF = float("inf")


def orientations(task: TaskRef) -> tuple[TaskRef, ...]:
    if task.kind == NODE:
        return (TaskRef(NODE, task.id, None),)
    return (TaskRef(EDGE, task.id, FWD), TaskRef(EDGE, task.id, REV))


def _gap_points(route, pos, instance):
    prev = instance.depot if pos == 0 else task_ends(route[pos - 1], instance)[1]
    nxt = instance.depot if pos == len(route) else task_ends(route[pos], instance)[0]
    return prev, nxt


def slot_cost(route, pos: int, task: TaskRef, instance: Instance) -> float:
    """Length increase from putting oriented ``task`` at ``pos``."""
    prev, nxt = _gap_points(route, pos, instance)
    entry, exit_ = task_ends(task, instance)
    service = dist(entry, exit_) if task.kind == EDGE else 0.0
    return dist(prev, entry) + service + dist(exit_, nxt) - dist(prev, nxt)


def can_take(route, task: TaskRef, instance: Instance) -> bool:
    return task.kind != NODE or route_node_count(route) < instance.fleet.Q


def fits_range(length: float, delta: float, instance: Instance) -> bool:
    return length + delta <= instance.fleet.L + RANGE_TOL


def best_slot(route, length: float, task: TaskRef, instance: Instance, positions=None):
    """Cheapest feasible ``(delta, pos, oriented_task)`` or ``None``.

    Ties keep the earliest position, then forward orientation.
    """
    if not can_take(route, task, instance):
        return None
    hypot = math.hypot
    depot = instance.depot
    limit = instance.fleet.L + RANGE_TOL - length
    opts = []
    for t in orientations(task):
        (ex, ey), (xx, xy) = task_ends(t, instance)
        service = hypot(xx - ex, xy - ey) if t.kind == EDGE else 0.0
        opts.append((t, ex, ey, xx, xy, service))
    ends = [task_ends(r, instance) for r in route]
    n = len(route)
    best = None
    for pos in (range(n + 1) if positions is None else positions):
        px, py = depot if pos == 0 else ends[pos - 1][1]
        nx, ny = depot if pos == n else ends[pos][0]
        base = hypot(nx - px, ny - py)
        for t, ex, ey, xx, xy, service in opts:
            d = hypot(ex - px, ey - py) + service + hypot(nx - xx, ny - xy) - base
            if (best is None or d < best[0]) and d <= limit:
                best = (d, pos, t)
    return best


def end_slot(route, length: float, task: TaskRef, instance: Instance):
    """Cheapest feasible append at the end of ``route`` (cheaper orientation)."""
    return best_slot(route, length, task, instance, positions=(len(route),))


def new_route_slot(task: TaskRef, instance: Instance):
    """Feasible ``(cost, 0, oriented_task)`` for a fresh route, or ``None``."""
    return best_slot((), 0.0, task, instance)


def fleet_can_grow(n_routes: int, instance: Instance) -> bool:
    mv = instance.fleet.max_vehicles
    return mv is None or n_routes < mv


def insert(route, pos: int, task: TaskRef) -> tuple:
    return tuple(route[:pos]) + (task,) + tuple(route[pos:])


def lengths(routes, instance: Instance) -> list[float]:
    return [route_length(r, instance) for r in routes]
