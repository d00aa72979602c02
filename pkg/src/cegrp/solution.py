"""Routes, solutions, objective evaluation and the feasibility validator.

A route is a tuple of :class:`TaskRef`; the depot at both ends is implicit,
so every route is one closed walk anchored at the depot and subtours cannot
be expressed. A :class:`Solution` is a tuple of non-empty routes.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .geometry import Disk, Point2, dist
from .instance import Instance

__all__ = [
    "NODE",
    "EDGE",
    "FWD",
    "REV",
    "TaskRef",
    "node_task",
    "edge_task",
    "Route",
    "Solution",
    "Violation",
    "ValidationReport",
    "RANGE_TOL",
    "task_ends",
    "task_service",
    "vertex_sequence",
    "route_length",
    "total_distance",
    "route_node_count",
    "all_tasks",
    "validate",
    "validate_points",
    "POINT_TOL",
    "solution_to_document",
    "parse_solution",
    "dump_solution",
]

NODE, EDGE = "node", "edge"
FWD, REV = "fwd", "rev"

# slack on the flight-range test, keeps float noise from flagging exact fits
RANGE_TOL = 1e-9
# slack on representative points lying inside their disks
POINT_TOL = 1e-7


class TaskRef(NamedTuple):
    kind: str
    id: int
    orientation: str | None = None

    @property
    def key(self) -> tuple[str, int]:
        return (self.kind, self.id)

    def flipped(self) -> "TaskRef":
        if self.kind != EDGE:
            return self
        return TaskRef(EDGE, self.id, REV if self.orientation == FWD else FWD)


def node_task(i: int) -> TaskRef:
    return TaskRef(NODE, i, None)


def edge_task(i: int, orientation: str = FWD) -> TaskRef:
    return TaskRef(EDGE, i, orientation)


Route = tuple  # tuple[TaskRef, ...]


@dataclass(frozen=True)
class Solution:
    routes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "routes", tuple(tuple(r) for r in self.routes if len(r)))

    def canonical(self) -> tuple:
        """Order-independent form, used to compare solutions structurally."""
        return tuple(sorted(self.routes))

    def same_as(self, other: "Solution") -> bool:
        return self.canonical() == other.canonical()

    @property
    def n_tasks(self) -> int:
        return sum(len(r) for r in self.routes)


def all_tasks(instance: Instance) -> list[TaskRef]:
    return [node_task(n.id) for n in instance.nodes] + [edge_task(e.id) for e in instance.edges]


def task_ends(task: TaskRef, instance: Instance) -> tuple[Point2, Point2]:
    """(entry point, exit point) of a task under center evaluation."""
    if task.kind == NODE:
        c = instance.node_by_id[task.id].center
        return c, c
    e = instance.edge_by_id[task.id]
    return (e.a, e.b) if task.orientation == FWD else (e.b, e.a)


def task_service(task: TaskRef, instance: Instance) -> float:
    if task.kind == NODE:
        return 0.0
    return instance.edge_by_id[task.id].length


def _check_task(task: TaskRef, instance: Instance) -> None:
    if task.kind == NODE:
        if task.id not in instance.node_by_id:
            raise KeyError(f"unknown node task {task.id}")
    elif task.kind == EDGE:
        if task.id not in instance.edge_by_id:
            raise KeyError(f"unknown edge task {task.id}")
        if task.orientation not in (FWD, REV):
            raise ValueError(f"edge task {task.id} needs an orientation")
    else:
        raise ValueError(f"unknown task kind {task.kind!r}")


def vertex_sequence(route: Sequence[TaskRef], instance: Instance) -> list[Disk]:
    """Visited-vertex chain of a route: depot, task vertices, depot."""
    depot = Disk(instance.depot, 0.0)
    out = [depot]
    for t in route:
        _check_task(t, instance)
        if t.kind == NODE:
            out.append(instance.node_by_id[t.id].disk)
        else:
            a, b = task_ends(t, instance)
            out.append(Disk(a, 0.0))
            out.append(Disk(b, 0.0))
    out.append(depot)
    return out


def route_length(route: Sequence[TaskRef], instance: Instance, points=None) -> float:
    """Length of a route; node centers are used unless ``points`` is given."""
    if points is None:
        total, prev = 0.0, instance.depot
        for t in route:
            entry, exit_ = task_ends(t, instance)
            total += dist(prev, entry) + (dist(entry, exit_) if t.kind == EDGE else 0.0)
            prev = exit_
        return total + dist(prev, instance.depot)
    n_expected = len(vertex_sequence(route, instance))
    if len(points) != n_expected:
        raise ValueError(f"route has {n_expected} vertices but {len(points)} points were given")
    return sum(dist(points[i], points[i + 1]) for i in range(len(points) - 1))


def total_distance(solution: Solution, instance: Instance, points=None) -> float:
    if points is None:
        return sum(route_length(r, instance) for r in solution.routes)
    if len(points) != len(solution.routes):
        raise ValueError("one point list per route is required")
    return sum(route_length(r, instance, p) for r, p in zip(solution.routes, points))


def route_node_count(route: Iterable[TaskRef]) -> int:
    return sum(1 for t in route if t.kind == NODE)


class Violation(NamedTuple):
    kind: str  # uncovered | duplicate | unknown_task | bad_orientation | capacity | range | fleet
    #            point_count | point_outside (from validate_points)
    route: int | None
    task: tuple | None
    detail: str


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __bool__(self) -> bool:
        return self.ok


def validate(solution: Solution, instance: Instance) -> ValidationReport:
    """Check coverage, capacity, flight range and fleet size; never raises.

    Degree balance and connectivity hold structurally for depot-anchored task
    sequences, so only the remaining constraints are checked.
    """
    report = ValidationReport()
    seen: Counter = Counter()
    known = {("node", n.id) for n in instance.nodes} | {("edge", e.id) for e in instance.edges}
    fleet = instance.fleet
    for k, route in enumerate(solution.routes):
        routable = True
        for t in route:
            if (t.kind, t.id) not in known:
                report.violations.append(Violation("unknown_task", k, (t.kind, t.id),
                                                   f"route {k} references unknown {t.kind} {t.id}"))
                routable = False
                continue
            if t.kind == EDGE and t.orientation not in (FWD, REV):
                report.violations.append(Violation("bad_orientation", k, (t.kind, t.id),
                                                   f"edge {t.id} has orientation {t.orientation!r}"))
                routable = False
            if t.kind == NODE and t.orientation is not None:
                report.violations.append(Violation("bad_orientation", k, (t.kind, t.id),
                                                   f"node {t.id} carries an orientation"))
            seen[(t.kind, t.id)] += 1
        n_nodes = route_node_count(route)
        if n_nodes > fleet.Q:
            report.violations.append(Violation("capacity", k, None,
                                               f"route {k} serves {n_nodes} nodes > Q={fleet.Q}"))
        if routable:
            length = route_length(route, instance)
            if length > fleet.L + RANGE_TOL:
                report.violations.append(Violation("range", k, None,
                                                   f"route {k} length {length:.6f} > L={fleet.L}"))
    for key in sorted(known):
        if seen[key] == 0:
            report.violations.append(Violation("uncovered", None, key, f"{key[0]} {key[1]} is not served"))
        elif seen[key] > 1:
            report.violations.append(Violation("duplicate", None, key,
                                               f"{key[0]} {key[1]} is served {seen[key]} times"))
    if fleet.max_vehicles is not None and len(solution.routes) > fleet.max_vehicles:
        report.violations.append(Violation("fleet", None, None,
                                           f"{len(solution.routes)} routes > max_vehicles={fleet.max_vehicles}"))
    return report


def validate_points(solution: Solution, instance: Instance, points,
                    tol: float = POINT_TOL) -> ValidationReport:
    """Check that ``points`` has one point per visited vertex, each inside its disk.

    Depot and edge-endpoint vertices must match exactly up to ``tol``.
    """
    report = ValidationReport()
    if len(points) != len(solution.routes):
        report.violations.append(Violation("point_count", None, None,
                                           f"{len(points)} point lists for {len(solution.routes)} routes"))
        return report
    for k, (route, pts) in enumerate(zip(solution.routes, points)):
        try:
            seq = vertex_sequence(route, instance)
        except (KeyError, ValueError) as exc:
            report.violations.append(Violation("unknown_task", k, None, str(exc)))
            continue
        if len(seq) != len(pts):
            report.violations.append(Violation("point_count", k, None,
                                               f"route {k} has {len(seq)} vertices but {len(pts)} points"))
            continue
        for j, (disk, p) in enumerate(zip(seq, pts)):
            gap = dist(p, disk.center) - disk.radius
            if gap > tol:
                report.violations.append(Violation("point_outside", k, None,
                                                   f"route {k} vertex {j} lies {gap:.3g} outside its disk"))
    return report


def solution_to_document(solution: Solution, instance: Instance, points=None) -> dict:
    routes = []
    for k, route in enumerate(solution.routes):
        tasks = []
        for t in route:
            item = {"kind": t.kind, "id": t.id}
            if t.kind == EDGE:
                item["orientation"] = t.orientation
            tasks.append(item)
        entry = {"tasks": tasks}
        if points is not None:
            entry["points"] = [[float(p[0]), float(p[1])] for p in points[k]]
        routes.append(entry)
    return {
        "instance": instance.name,
        "routes": routes,
        "total_distance": total_distance(solution, instance, points),
    }


def dump_solution(solution: Solution, instance: Instance, points=None) -> str:
    return json.dumps(solution_to_document(solution, instance, points), indent=2) + "\n"


def parse_solution(document) -> tuple[Solution, list | None, dict]:
    """Read a solution document; returns ``(solution, points or None, raw doc)``."""
    doc = json.loads(document) if isinstance(document, (str, bytes)) else document
    routes, points, have_points = [], [], True
    for r in doc["routes"]:
        route = []
        for t in r["tasks"]:
            if t["kind"] == EDGE:
                route.append(TaskRef(EDGE, int(t["id"]), t.get("orientation", FWD)))
            else:
                route.append(TaskRef(t["kind"], int(t["id"]), None))
        routes.append(tuple(route))
        if "points" in r:
            points.append([Point2(float(x), float(y)) for x, y in r["points"]])
        else:
            have_points = False
    return Solution(tuple(routes)), (points if have_points and routes else None), doc
