"""Independent reference solvers used only by the tests.

None of these share code paths with the library's optimizers: the touring
oracle is a grid dynamic program with zooming, and the enumerators walk the
search space in a different order than the exact oracle does.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from cegrp.solution import EDGE, FWD, NODE, REV, TaskRef, all_tasks


def _disk_grid(center, radius, around=None, half=None, n=41, n_ring=720):
    """Grid points of a disk (optionally a square window of it) plus boundary samples."""
    cx, cy = center
    if radius <= 0:
        return np.array([[cx, cy]])
    if around is None:
        ax, ay, half = cx, cy, radius
        th = np.linspace(0, 2 * np.pi, n_ring, endpoint=False)
    else:
        ax, ay = around
        t0 = math.atan2(ay - cy, ax - cx)
        w = min(math.pi, 2.0 * half / radius)
        th = t0 + np.linspace(-w, w, n)
    g = np.linspace(-half, half, n)
    X, Y = np.meshgrid(ax + g, ay + g)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    pts = pts[np.hypot(pts[:, 0] - cx, pts[:, 1] - cy) <= radius]
    ring = np.column_stack([cx + radius * np.cos(th), cy + radius * np.sin(th)])
    out = np.vstack([pts, ring])
    return out


def _chain_dp(grids):
    cost = np.zeros(len(grids[0]))
    back = []
    for k in range(1, len(grids)):
        d = np.hypot(grids[k - 1][:, None, 0] - grids[k][None, :, 0],
                     grids[k - 1][:, None, 1] - grids[k][None, :, 1])
        tot = cost[:, None] + d
        arg = tot.argmin(axis=0)
        cost = tot[arg, np.arange(len(grids[k]))]
        back.append(arg)
    j = int(cost.argmin())
    best = float(cost[j])
    choice = [j]
    for arg in reversed(back):
        j = int(arg[j])
        choice.append(j)
    choice.reverse()
    return best, [grids[k][choice[k]] for k in range(len(grids))]


def grid_touring_oracle(disks, rounds=10, n=25):
    """Shortest chain through ``disks`` via grid DP, zooming around the incumbent.

    Every evaluated configuration is feasible, so the value is an upper
    bound that tightens as the windows shrink.
    """
    grids = [_disk_grid(c, r, n=31, n_ring=360) for c, r in disks]
    best, pts = _chain_dp(grids)
    half = [r for _, r in disks]
    for _ in range(rounds):
        half = [h * 0.3 for h in half]
        grids = [_disk_grid(c, r, around=p, half=max(h, 1e-12), n=n, n_ring=n)
                 for (c, r), p, h in zip(disks, pts, half)]
        val, new_pts = _chain_dp(grids)
        if val <= best:
            best, pts = val, new_pts
    return best, pts


def _orient(t):
    if t.kind == NODE:
        return (TaskRef(NODE, t.id, None),)
    return (TaskRef(EDGE, t.id, FWD), TaskRef(EDGE, t.id, REV))


def all_sequencings(tasks):
    """Every ordering and orientation of ``tasks`` (no symmetry reduction)."""
    for perm in itertools.permutations(tasks):
        yield from itertools.product(*(_orient(t) for t in perm))


def center_length(route, instance):
    prev = instance.depot
    total = 0.0
    for t in route:
        if t.kind == NODE:
            c = instance.node_by_id[t.id].center
            total += math.dist(prev, c)
            prev = c
        else:
            e = instance.edge_by_id[t.id]
            a, b = (e.a, e.b) if t.orientation == FWD else (e.b, e.a)
            total += math.dist(prev, a) + math.dist(a, b)
            prev = b
    return total + math.dist(prev, instance.depot)


def brute_route_center(tasks, instance):
    return min(center_length(r, instance) for r in all_sequencings(tasks))


def _route_disks(route, instance):
    out = [(instance.depot, 0.0)]
    for t in route:
        if t.kind == NODE:
            n = instance.node_by_id[t.id]
            out.append((n.center, n.radius))
        else:
            e = instance.edge_by_id[t.id]
            a, b = (e.a, e.b) if t.orientation == FWD else (e.b, e.a)
            out += [(a, 0.0), (b, 0.0)]
    out.append((instance.depot, 0.0))
    return out


def brute_global(instance, touring):
    """Global optimum by giant-tour permutations plus split points.

    ``touring(disks) -> value`` scores one route. Routes must respect Q and
    the center-evaluated range L; the fleet cap bounds the number of routes.
    """
    tasks = all_tasks(instance)
    n = len(tasks)
    Q, L = instance.fleet.Q, instance.fleet.L + 1e-9
    mv = instance.fleet.max_vehicles
    cache = {}

    def score(route):
        if route not in cache:
            if sum(t.kind == NODE for t in route) > Q or center_length(route, instance) > L:
                cache[route] = math.inf
            else:
                cache[route] = touring(_route_disks(route, instance))
        return cache[route]

    best = math.inf
    for seq in all_sequencings(tasks):
        for cuts in itertools.product((0, 1), repeat=n - 1):
            routes, cur = [], [seq[0]]
            for t, c in zip(seq[1:], cuts):
                if c:
                    routes.append(tuple(cur))
                    cur = []
                cur.append(t)
            routes.append(tuple(cur))
            if mv is not None and len(routes) > mv:
                continue
            best = min(best, sum(score(r) for r in routes))
    return best
