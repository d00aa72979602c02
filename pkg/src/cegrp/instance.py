"""Problem instances: data model, JSON format and a seeded generator."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Mapping

import numpy as np

from .geometry import Disk, Point2, dist

__all__ = [
    "RequiredNode",
    "RequiredEdge",
    "FleetSpec",
    "Instance",
    "InstanceError",
    "InfeasibleInstanceError",
    "parse_instance",
    "load_instance",
    "instance_to_document",
    "dump_instance",
    "save_instance",
    "canonical",
    "generate_instance",
    "benchmark_instance",
    "BENCHMARK_SHAPES",
    "INSTANCE_SUFFIX",
]

INSTANCE_SUFFIX = ".cegrp.json"


class InstanceError(ValueError):
    """Malformed instance document; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class InfeasibleInstanceError(RuntimeError):
    """A task cannot be served by any vehicle within the fleet limits."""

    def __init__(self, message: str, tasks=()):
        self.tasks = list(tasks)
        super().__init__(message)


@dataclass(frozen=True)
class RequiredNode:
    id: int
    center: Point2
    radius: float = 0.0

    @property
    def disk(self) -> Disk:
        return Disk(self.center, self.radius)


@dataclass(frozen=True)
class RequiredEdge:
    id: int
    a: Point2
    b: Point2

    @property
    def length(self) -> float:
        return dist(self.a, self.b)


@dataclass(frozen=True)
class FleetSpec:
    L: float
    Q: int
    max_vehicles: int | None = None


@dataclass(frozen=True)
class Instance:
    name: str
    depot: Point2
    nodes: tuple[RequiredNode, ...]
    edges: tuple[RequiredEdge, ...]
    fleet: FleetSpec
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)

    @cached_property
    def node_by_id(self) -> dict[int, RequiredNode]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def edge_by_id(self) -> dict[int, RequiredEdge]:
        return {e.id: e for e in self.edges}

    @property
    def n_tasks(self) -> int:
        return len(self.nodes) + len(self.edges)

    def with_radius(self, radius: float) -> "Instance":
        """Copy with every node disk set to ``radius``."""
        nodes = tuple(replace(n, radius=float(radius)) for n in self.nodes)
        return replace(self, nodes=nodes)

    def round_trip(self, kind: str, task_id: int) -> float:
        if kind == "node":
            return 2.0 * dist(self.depot, self.node_by_id[task_id].center)
        e = self.edge_by_id[task_id]
        return dist(self.depot, e.a) + e.length + dist(e.b, self.depot)

    def unreachable_tasks(self) -> list[tuple[str, int]]:
        """Tasks whose depot round trip alone exceeds the flight range."""
        out = [("node", n.id) for n in self.nodes
               if self.round_trip("node", n.id) > self.fleet.L + 1e-9]
        out += [("edge", e.id) for e in self.edges
                if self.round_trip("edge", e.id) > self.fleet.L + 1e-9]
        return out

    @property
    def is_feasible(self) -> bool:
        return not self.unreachable_tasks()


def _point(value, path: str) -> Point2:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise InstanceError(path, "expected [x, y]")
    out = []
    for k, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InstanceError(f"{path}[{k}]", "expected a number")
        if not math.isfinite(v):
            raise InstanceError(f"{path}[{k}]", "non-finite coordinate")
        out.append(float(v))
    return Point2(*out)


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceError(path, "expected an integer")
    return value


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceError(path, "expected a number")
    if not math.isfinite(value):
        raise InstanceError(path, "non-finite value")
    return float(value)


def _require(doc: Mapping, key: str, path: str):
    if not isinstance(doc, Mapping):
        raise InstanceError(path, "expected an object")
    if key not in doc:
        raise InstanceError(f"{path}.{key}" if path else key, "missing required key")
    return doc[key]


def parse_instance(document: str | bytes | Mapping) -> Instance:
    """Build a validated :class:`Instance` from a JSON document or a parsed dict."""
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise InstanceError("$", f"invalid JSON ({exc.msg})") from exc
    else:
        doc = document
    if not isinstance(doc, Mapping):
        raise InstanceError("$", "expected an object")

    name = _require(doc, "name", "")
    if not isinstance(name, str):
        raise InstanceError("name", "expected a string")
    depot = _point(_require(doc, "depot", ""), "depot")

    raw_nodes = _require(doc, "nodes", "")
    if not isinstance(raw_nodes, list):
        raise InstanceError("nodes", "expected a list")
    nodes, seen = [], set()
    for k, item in enumerate(raw_nodes):
        path = f"nodes[{k}]"
        nid = _int(_require(item, "id", path), f"{path}.id")
        if nid in seen:
            raise InstanceError(f"{path}.id", f"duplicate node id {nid}")
        seen.add(nid)
        center = _point(_require(item, "center", path), f"{path}.center")
        radius = _number(_require(item, "radius", path), f"{path}.radius")
        if radius < 0:
            raise InstanceError(f"{path}.radius", "radius must be >= 0")
        nodes.append(RequiredNode(nid, center, radius))

    raw_edges = _require(doc, "edges", "")
    if not isinstance(raw_edges, list):
        raise InstanceError("edges", "expected a list")
    edges, seen = [], set()
    for k, item in enumerate(raw_edges):
        path = f"edges[{k}]"
        eid = _int(_require(item, "id", path), f"{path}.id")
        if eid in seen:
            raise InstanceError(f"{path}.id", f"duplicate edge id {eid}")
        seen.add(eid)
        a = _point(_require(item, "a", path), f"{path}.a")
        b = _point(_require(item, "b", path), f"{path}.b")
        if dist(a, b) <= 0.0:
            raise InstanceError(path, "zero-length edge")
        edges.append(RequiredEdge(eid, a, b))

    raw_fleet = _require(doc, "fleet", "")
    L = _number(_require(raw_fleet, "L", "fleet"), "fleet.L")
    if L <= 0:
        raise InstanceError("fleet.L", "flight range must be > 0")
    Q = _int(_require(raw_fleet, "Q", "fleet"), "fleet.Q")
    if Q < 1:
        raise InstanceError("fleet.Q", "capacity must be >= 1")
    mv = _require(raw_fleet, "max_vehicles", "fleet")
    if mv is not None:
        mv = _int(mv, "fleet.max_vehicles")
        if mv < 1:
            raise InstanceError("fleet.max_vehicles", "must be >= 1 or null")

    if not nodes and not edges:
        raise InstanceError("$", "instance has no tasks")
    return Instance(name, depot, tuple(nodes), tuple(edges), FleetSpec(L, Q, mv))


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def instance_to_document(instance: Instance) -> dict:
    return {
        "name": instance.name,
        "depot": [instance.depot.x, instance.depot.y],
        "nodes": [{"id": n.id, "center": [n.center.x, n.center.y], "radius": n.radius}
                  for n in instance.nodes],
        "edges": [{"id": e.id, "a": [e.a.x, e.a.y], "b": [e.b.x, e.b.y]}
                  for e in instance.edges],
        "fleet": {"L": instance.fleet.L, "Q": instance.fleet.Q,
                  "max_vehicles": instance.fleet.max_vehicles},
    }


def canonical(document: str | Mapping) -> str:
    """Canonical text form of an instance document (re-parsed, floats normalised)."""
    return dump_instance(parse_instance(document))


def dump_instance(instance: Instance) -> str:
    return json.dumps(instance_to_document(instance), indent=2) + "\n"


def save_instance(instance: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_instance(instance))


def generate_instance(seed: int, n_nodes: int, n_edges: int, area: float = 1000.0,
                      radius: float = 0.0, fleet: FleetSpec | None = None,
                      name: str | None = None) -> Instance:
    """Random instance in the square ``[0, area]^2`` with the depot at its centre.

    Nodes are uniform in the square. Each edge starts at a uniform point, takes
    a uniform heading and a length uniform in ``[0.05, 0.4] * area``; headings
    that leave the square are redrawn.
    """
    if n_nodes < 0 or n_edges < 0 or n_nodes + n_edges < 1:
        raise ValueError("need n_nodes, n_edges >= 0 and at least one task")
    rng = np.random.default_rng(seed)
    if fleet is None:
        fleet = FleetSpec(L=4.0 * area, Q=max(1, n_nodes))
    depot = Point2(area / 2.0, area / 2.0)
    nodes = tuple(
        RequiredNode(i + 1, Point2(*map(float, rng.uniform(0.0, area, 2))), float(radius))
        for i in range(n_nodes)
    )
    edges = []
    for j in range(n_edges):
        while True:
            a = rng.uniform(0.0, area, 2)
            length = rng.uniform(0.05 * area, 0.4 * area)
            heading = rng.uniform(0.0, 2.0 * math.pi)
            b = a + length * np.array([math.cos(heading), math.sin(heading)])
            if (b >= 0.0).all() and (b <= area).all():
                break
        edges.append(RequiredEdge(n_nodes + j + 1, Point2(*map(float, a)), Point2(*map(float, b))))
    if name is None:
        name = f"gen_s{seed}_n{n_nodes}_e{n_edges}"
    return Instance(name, depot, nodes, tuple(edges), fleet,
                    meta={"seed": seed, "area": area})


# (N_v, N_e, [(L, Q) for sub-instances 1..5]) per basic instance C1..C30
BENCHMARK_SHAPES: dict[str, tuple[int, int, tuple[tuple[int, int], ...]]] = {
    "C1": (6, 15, ((3000, 4), (2000, 3), (1600, 2), (1500, 2), (1300, 2))),
    "C2": (7, 21, ((4000, 4), (3500, 3), (3000, 2), (2000, 2), (1800, 2))),
    "C3": (5, 14, ((4000, 3), (3000, 2), (2000, 2), (1800, 2), (1700, 1))),
    "C4": (8, 23, ((4000, 5), (3500, 3), (3000, 2), (2000, 2), (1800, 2))),
    "C5": (6, 16, ((4000, 4), (2700, 3), (2200, 2), (1900, 2), (1800, 2))),
    "C6": (10, 41, ((7000, 7), (6000, 5), (4000, 4), (3500, 3), (3000, 3))),
    "C7": (10, 29, ((7000, 6), (6000, 4), (3500, 3), (2800, 3), (2700, 2))),
    "C8": (12, 36, ((7000, 7), (5000, 5), (3500, 4), (3000, 3), (2500, 3))),
    "C9": (11, 27, ((7000, 6), (6000, 4), (3500, 3), (2800, 3), (2700, 2))),
    "C10": (12, 49, ((8000, 7), (6000, 5), (4500, 4), (4000, 3), (3500, 3))),
    "C11": (7, 26, ((6000, 4), (4000, 3), (3500, 2), (3000, 2), (2500, 2))),
    "C12": (13, 20, ((5000, 7), (3100, 5), (3000, 4), (2500, 3), (2000, 3))),
    "C13": (6, 38, ((7000, 4), (4500, 3), (4000, 2), (3000, 2), (2800, 2))),
    "C14": (13, 28, ((7000, 7), (4500, 5), (4000, 4), (3000, 3), (2800, 3))),
    "C15": (7, 53, ((9000, 4), (7500, 3), (6000, 2), (4500, 2), (3500, 2))),
    "C16": (12, 36, ((7200, 7), (5200, 5), (4200, 4), (3500, 3), (3300, 3))),
    "C17": (8, 48, ((7500, 5), (6500, 3), (5000, 3), (4000, 2), (3200, 2))),
    "C18": (14, 28, ((5500, 8), (4000, 5), (3500, 4), (2800, 3), (2500, 3))),
    "C19": (7, 63, ((9000, 4), (7000, 3), (6000, 3), (4000, 2), (3500, 2))),
    "C20": (14, 33, ((7500, 8), (5500, 5), (5000, 4), (4000, 3), (3000, 3))),
    "C21": (9, 54, ((9500, 5), (7000, 5), (6000, 3), (5000, 2), (4000, 2))),
    "C22": (16, 43, ((8000, 9), (6500, 6), (5500, 5), (4000, 4), (3500, 3))),
    "C23": (9, 70, ((11000, 5), (8000, 4), (6500, 3), (6000, 3), (4500, 2))),
    "C24": (16, 40, ((7600, 9), (6000, 6), (4500, 5), (4000, 4), (3400, 3))),
    "C25": (10, 73, ((11000, 6), (8000, 4), (6500, 3), (5000, 2), (4500, 2))),
    "C26": (19, 27, ((7000, 10), (5000, 7), (4000, 5), (3500, 4), (3100, 4))),
    "C27": (10, 76, ((12000, 6), (10000, 4), (7500, 3), (6000, 2), (5000, 2))),
    "C28": (19, 37, ((10000, 10), (8000, 7), (5500, 5), (4000, 4), (3500, 4))),
    "C29": (10, 84, ((14000, 6), (12000, 4), (8000, 3), (6000, 2), (5000, 2))),
    "C30": (20, 61, ((14000, 11), (12000, 7), (8000, 6), (6000, 5), (5000, 4))),
}


def benchmark_instance(label: str, seed: int = 1, radius: float = 50.0,
                       area: float = 600.0) -> Instance:
    """Generated instance with the node/edge counts and fleet limits of ``label``.

    ``label`` is a basic instance ("C1") or a sub-instance ("C1-4"); a basic
    label uses its first sub-instance's fleet. Coordinates are synthetic.
    """
    base, _, sub = label.partition("-")
    if base not in BENCHMARK_SHAPES:
        raise KeyError(f"unknown benchmark label {label!r}")
    n_v, n_e, fleets = BENCHMARK_SHAPES[base]
    k = int(sub) if sub else 1
    if not 1 <= k <= len(fleets):
        raise KeyError(f"unknown sub-instance in {label!r}")
    L, Q = fleets[k - 1]
    return generate_instance(seed, n_v, n_e, area=area, radius=radius,
                             fleet=FleetSpec(float(L), Q, None),
                             name=f"{base}-{k}_s{seed}")
