import copy
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cegrp.instance import (BENCHMARK_SHAPES, FleetSpec, InstanceError, benchmark_instance, canonical,
                            dump_instance, generate_instance, load_instance, parse_instance, save_instance)

MINIMAL = {
    "name": "mini",
    "depot": [0, 0],
    "nodes": [{"id": 1, "center": [3, 4], "radius": 0}],
    "edges": [],
    "fleet": {"L": 100, "Q": 1, "max_vehicles": None},
}


def test_minimal_document():
    inst = parse_instance(MINIMAL)
    assert inst.n_tasks == 1
    assert inst.nodes[0].center == (3.0, 4.0)
    assert inst.fleet == FleetSpec(100.0, 1, None)
    assert inst.is_feasible


def _broken(**changes):
    doc = copy.deepcopy(MINIMAL)
    for path, value in changes.items():
        target = doc
        keys = path.split("__")
        for k in keys[:-1]:
            target = target[int(k)] if k.isdigit() else target[k]
        target[keys[-1]] = value
    return doc


@pytest.mark.parametrize("doc,path,fragment", [
    (_broken(edges=[{"id": 2, "a": [1, 1], "b": [1, 1]}]), "edges[0]", "zero-length edge"),
    (_broken(nodes=[{"id": 1, "center": [0, 0], "radius": 0}, {"id": 1, "center": [1, 0], "radius": 0}]),
     "nodes[1].id", "duplicate"),
    (_broken(nodes__0__center=[float("nan"), 0]), "nodes[0].center[0]", "non-finite"),
    (_broken(nodes__0__radius=-1), "nodes[0].radius", ">= 0"),
    (_broken(fleet__L=0), "fleet.L", "> 0"),
    (_broken(fleet__Q=0), "fleet.Q", ">= 1"),
    (_broken(fleet__max_vehicles=0), "fleet.max_vehicles", ">= 1"),
    (_broken(depot=[1]), "depot", "[x, y]"),
    (_broken(nodes=[]), "$", "no tasks"),
])
def test_parse_errors_name_the_field(doc, path, fragment):
    with pytest.raises(InstanceError) as info:
        parse_instance(doc)
    assert info.value.path == path
    assert fragment in str(info.value)


def test_missing_key_reported():
    doc = copy.deepcopy(MINIMAL)
    del doc["fleet"]["Q"]
    with pytest.raises(InstanceError) as info:
        parse_instance(doc)
    assert info.value.path == "fleet.Q"
    with pytest.raises(InstanceError):
        parse_instance("{not json")


def test_round_trip_is_canonical(tmp_path):
    inst = generate_instance(4, 3, 2, radius=5)
    text = dump_instance(inst)
    assert canonical(json.loads(text)) == text
    assert canonical(MINIMAL) == dump_instance(parse_instance(MINIMAL))
    path = tmp_path / "x.cegrp.json"
    save_instance(inst, path)
    back = load_instance(path)
    assert back == inst


def test_generator_matches_shape_and_is_deterministic():
    n_v, n_e, _ = BENCHMARK_SHAPES["C1"]
    assert (n_v, n_e) == (6, 15)
    a = generate_instance(1, 6, 15)
    b = generate_instance(1, 6, 15)
    assert dump_instance(a) == dump_instance(b)
    assert len(a.nodes) == 6 and len(a.edges) == 15
    assert dump_instance(generate_instance(2, 6, 15)) != dump_instance(a)


def test_generator_pure_arc_instance():
    inst = generate_instance(3, 0, 1)
    assert inst.n_tasks == 1 and not inst.nodes
    assert parse_instance(json.loads(dump_instance(inst))) == inst


@settings(max_examples=40)
@given(st.integers(0, 10_000), st.integers(0, 6), st.integers(0, 6), st.floats(0, 80))
def test_generated_instances_are_valid(seed, n_nodes, n_edges, radius):
    if n_nodes + n_edges == 0:
        with pytest.raises(ValueError):
            generate_instance(seed, n_nodes, n_edges)
        return
    area = 1000.0
    inst = generate_instance(seed, n_nodes, n_edges, area=area, radius=radius)
    assert inst.depot == (area / 2, area / 2)
    for n in inst.nodes:
        assert 0 <= n.center.x <= area and 0 <= n.center.y <= area
        assert n.radius == radius
    for e in inst.edges:
        assert 0.05 * area - 1e-9 <= e.length <= 0.4 * area + 1e-9
        for p in (e.a, e.b):
            assert 0 <= p.x <= area and 0 <= p.y <= area
    assert parse_instance(json.loads(dump_instance(inst))) == inst


def test_benchmark_labels():
    inst = benchmark_instance("C1-4", seed=1)
    assert (len(inst.nodes), len(inst.edges)) == (6, 15)
    assert inst.fleet.L == 1500 and inst.fleet.Q == 2
    assert all(n.radius == 50 for n in inst.nodes)
    assert benchmark_instance("C2").fleet.L == 4000
    with pytest.raises(KeyError):
        benchmark_instance("C99")
    with pytest.raises(KeyError):
        benchmark_instance("C1-9")


def test_unreachable_tasks_flagged():
    doc = _broken(fleet__L=9.0)
    inst = parse_instance(doc)
    assert inst.unreachable_tasks() == [("node", 1)]
    assert not inst.is_feasible
    assert inst.with_radius(2.0).nodes[0].radius == 2.0
