import math
import random

import pytest

from cegrp.close_enough import chain_length, optimize_points
from cegrp.exact_oracle import OracleCapError, refine_route_exact, solve_exact_global
from cegrp.geometry import dist
from cegrp.instance import InfeasibleInstanceError, generate_instance
from cegrp.solution import (Solution, all_tasks, edge_task, node_task, route_length, total_distance, validate,
                            validate_points)

from conftest import make_instance
from oracles import brute_global, brute_route_center, grid_touring_oracle


def _random_route(rng, inst, n):
    tasks = all_tasks(inst)
    rng.shuffle(tasks)
    return tuple(t.flipped() if rng.random() < 0.5 else t for t in tasks[:n])


def test_refine_matches_enumeration():
    rng = random.Random(8)
    for k in range(60):
        n = rng.randint(1, 6)
        inst = generate_instance(100 + k, rng.randint(0, n), n)
        route = _random_route(rng, inst, n)
        out = refine_route_exact(route, inst)
        assert sorted(t.key for t in out) == sorted(t.key for t in route)
        assert route_length(out, inst) == pytest.approx(brute_route_center(route, inst), abs=1e-9)


def test_refine_examples():
    # a lone edge costs the same either way round, so the input is kept
    inst = make_instance(edges=[((10, 0), (1, 0))])
    assert refine_route_exact((edge_task(1, "rev"),), inst) == (edge_task(1, "rev"),)
    assert refine_route_exact((), inst) == ()
    inst = make_instance(nodes=[(10, 1, 0)], edges=[((10, 0), (2, 0))])
    out = refine_route_exact((node_task(1), edge_task(2, "rev")), inst)
    assert route_length(out, inst) == pytest.approx(11 + math.hypot(10, 1), abs=1e-9)
    assert route_length(out, inst) < route_length((node_task(1), edge_task(2, "rev")), inst)
    inst = generate_instance(4, 3, 0)
    best = refine_route_exact(tuple(node_task(i) for i in (1, 2, 3)), inst)
    assert refine_route_exact(best, inst) == best
    big = generate_instance(5, 13, 0)
    route = tuple(node_task(i) for i in range(1, 14))
    assert refine_route_exact(route, big) == route


def test_single_node_closed_form():
    for r in (0, 2, 5, 7):
        inst = make_instance(nodes=[(3, 4, r)])
        sol, pts, v = solve_exact_global(inst)
        assert v == pytest.approx(2 * max(0.0, 5 - r), abs=1e-7)
        assert sol.routes == ((node_task(1),),)
        assert validate_points(sol, inst, pts).ok


def test_coincident_nodes_share_a_route():
    inst = make_instance(nodes=[(6, 8, 0), (6, 8, 0)], Q=2)
    sol, _, v = solve_exact_global(inst)
    assert len(sol.routes) == 1
    assert v == pytest.approx(20)


def test_global_matches_brute_force_center():
    rng = random.Random(1)
    for k in range(15):
        nn, ne = rng.randint(0, 3), rng.randint(0, 2)
        if nn + ne == 0:
            continue
        inst = generate_instance(200 + k, nn, ne)
        inst = inst.with_radius(0)
        sol, pts, v = solve_exact_global(inst)
        assert validate(sol, inst).ok
        assert total_distance(sol, inst) == pytest.approx(v, abs=1e-9)
        ref = brute_global(inst, lambda disks: chain_length([c for c, _ in disks]))
        assert v == pytest.approx(ref, abs=1e-9)


def test_global_matches_brute_force_with_disks():
    rng = random.Random(2)
    for k in range(10):
        inst = generate_instance(300 + k, rng.randint(1, 3), rng.randint(0, 1), radius=50)
        sol, pts, v = solve_exact_global(inst)
        assert validate(sol, inst).ok and validate_points(sol, inst, pts).ok
        assert total_distance(sol, inst, pts) == pytest.approx(v, abs=1e-9)
        ref = brute_global(inst, lambda disks: optimize_points(disks, tol=1e-9).objective)
        assert v == pytest.approx(ref, abs=1e-7)


def test_global_against_grid_touring():
    # independent of the library's touring solver altogether
    inst = generate_instance(77, 2, 1, radius=60)
    _, _, v = solve_exact_global(inst)
    ref = brute_global(inst, lambda disks: grid_touring_oracle(disks)[0])
    assert v <= ref + 1e-9
    assert v == pytest.approx(ref, abs=1e-4)


def test_caps_and_infeasible():
    with pytest.raises(OracleCapError):
        solve_exact_global(generate_instance(1, 5, 3))
    inst = make_instance(nodes=[(3, 4, 0), (-3, 4, 0)], Q=1, max_vehicles=1)
    with pytest.raises(InfeasibleInstanceError):
        solve_exact_global(inst)


def test_range_limit_respected():
    # together the two nodes exceed L, so the optimum needs two routes
    inst = make_instance(nodes=[(10, 0, 0), (-10, 0, 0)], L=25)
    sol, _, v = solve_exact_global(inst)
    assert len(sol.routes) == 2 and v == pytest.approx(40)
    assert math.isclose(dist((0, 0), (10, 0)), 10)
