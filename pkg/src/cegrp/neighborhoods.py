"""Variable neighborhood descent over the general-routing representation.

Five neighborhoods are explored in a fixed order: intra-route 2-opt, flipping
a required edge, a randomized destroy/regret-repair probe, relocating a chain
of consecutive tasks into another route, and exchanging chains between two
routes. Every move is evaluated with node centers; disks play no part here.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import _insert as ins
from .geometry import dist
from .instance import Instance
from .solution import EDGE, RANGE_TOL, Solution, TaskRef, route_length, route_node_count, task_ends, total_distance

__all__ = [
    "IMPROVEMENT_EPS",
    "NEIGHBORHOODS",
    "RepairError",
    "VNDParams",
    "vnd",
    "two_opt_best",
    "flip_first",
    "destroy_repair_probe",
    "regret_repair",
    "remove_tasks",
    "chain_insert",
    "chain_exchange",
]

IMPROVEMENT_EPS = 1e-9
INF = float("inf")

NEIGHBORHOODS = ("two_opt", "flip", "destroy_repair", "chain_insert", "chain_exchange")


class RepairError(RuntimeError):
    """A removed task fits no route and the fleet cap forbids opening one."""


@dataclass(frozen=True)
class VNDParams:
    zeta_min: int = 2
    zeta_max: int = 8
    xi: int = 5
    gamma_max: int = 3
    l_max: int = 200


class _RouteView:
    """Entry/exit points and prefix sums of one route, for O(1) chain costs."""

    __slots__ = ("route", "E", "X", "ps", "pg", "length", "nodes")

    def __init__(self, route, instance: Instance):
        self.route = route
        ends = [task_ends(t, instance) for t in route]
        self.E = [e for e, _ in ends]
        self.X = [x for _, x in ends]
        ps, pg = [0.0], [0.0]
        for i, t in enumerate(route):
            ps.append(ps[-1] + (dist(self.E[i], self.X[i]) if t.kind == EDGE else 0.0))
            if i + 1 < len(route):
                pg.append(pg[-1] + dist(self.X[i], ends[i + 1][0]))
        self.ps, self.pg = ps, pg
        d = instance.depot
        self.length = (dist(d, self.E[0]) + ps[-1] + pg[-1] + dist(self.X[-1], d)) if route else 0.0
        self.nodes = route_node_count(route)

    def internal(self, s: int, e: int) -> float:
        """Cost of tasks s..e inclusive and the legs between them."""
        return self.ps[e + 1] - self.ps[s] + self.pg[e] - self.pg[s]

    def before(self, pos: int, depot):
        return depot if pos == 0 else self.X[pos - 1]

    def after(self, pos: int, depot):
        return depot if pos >= len(self.route) else self.E[pos]


def _views(solution: Solution, instance: Instance):
    return [_RouteView(r, instance) for r in solution.routes]


def _replace(solution: Solution, changes: dict) -> Solution:
    routes = [changes.get(k, r) for k, r in enumerate(solution.routes)]
    return Solution(tuple(routes))


def two_opt_best(solution: Solution, instance: Instance) -> Solution | None:
    """Best improving segment reversal within a route.

    Only the two free-flight legs bounding the segment are exchanged; edge
    tasks inside the segment have their orientation flipped.
    """
    depot = instance.depot
    best = (-IMPROVEMENT_EPS, None)
    for k, v in enumerate(_views(solution, instance)):
        n = len(v.route)
        if n < 2:
            continue
        for i in range(n):
            p = v.before(i, depot)
            ei = v.E[i]
            base_i = dist(p, ei)
            for j in range(i + 1, n + 1):
                q = v.after(j, depot)
                xj = v.X[j - 1]
                delta = dist(p, xj) + dist(ei, q) - base_i - dist(xj, q)
                if delta < best[0]:
                    best = (delta, (k, i, j))
    if best[1] is None:
        return None
    k, i, j = best[1]
    r = solution.routes[k]
    seg = tuple(t.flipped() for t in reversed(r[i:j]))
    return _replace(solution, {k: r[:i] + seg + r[j:]})


def flip_first(solution: Solution, instance: Instance) -> Solution | None:
    """First improving reversal of a single required edge, scanning edge ids."""
    where = {}
    for k, r in enumerate(solution.routes):
        for pos, t in enumerate(r):
            if t.kind == EDGE:
                where[t.id] = (k, pos)
    depot = instance.depot
    for eid in sorted(where):
        k, pos = where[eid]
        r = solution.routes[k]
        p = depot if pos == 0 else task_ends(r[pos - 1], instance)[1]
        q = depot if pos == len(r) - 1 else task_ends(r[pos + 1], instance)[0]
        e, x = task_ends(r[pos], instance)
        delta = dist(p, x) + dist(e, q) - dist(p, e) - dist(x, q)
        if delta < -IMPROVEMENT_EPS:
            return _replace(solution, {k: r[:pos] + (r[pos].flipped(),) + r[pos + 1:]})
    return None


def remove_tasks(solution: Solution, removed) -> Solution:
    keys = {t.key for t in removed}
    return Solution(tuple(tuple(t for t in r if t.key not in keys) for r in solution.routes))


def regret_repair(partial: Solution, removed, instance: Instance) -> Solution:
    """Reinsert ``removed`` by regret over best-position insertion costs.

    The task whose second-best route is most expensive relative to its best
    goes first; it lands at its cheapest position. A task that fits no
    existing route opens a new one.
    """
    routes = list(partial.routes)
    lengths = ins.lengths(routes, instance)
    pending = list(removed)
    # best slot of each pending task in each route; only the touched route changes
    slots = {t: [ins.best_slot(r, lengths[k], t, instance) for k, r in enumerate(routes)]
             for t in pending}
    while pending:
        pick = None  # (rv, index in pending, slot, route index)
        for n_p, t in enumerate(pending):
            opts = sorted((s[0], k) for k, s in enumerate(slots[t]) if s is not None)
            if not opts:
                if not ins.fleet_can_grow(len(routes), instance):
                    raise RepairError(f"{t.kind} {t.id} fits no route and the fleet is full")
                s = ins.new_route_slot(t, instance)
                if s is None:
                    raise RepairError(f"{t.kind} {t.id} exceeds the flight range on its own")
                rv, choice = INF, (s, len(routes))
            else:
                rv = INF if len(opts) < 2 else opts[1][0] - opts[0][0]
                k = opts[0][1]
                choice = (slots[t][k], k)
            if pick is None or rv > pick[0]:
                pick = (rv, n_p, choice[0], choice[1])
        _, n_p, (delta, pos, oriented), k = pick
        del slots[pending.pop(n_p)]
        if k == len(routes):
            routes.append((oriented,))
            lengths.append(delta)
            for t in pending:
                slots[t].append(None)
        else:
            routes[k] = ins.insert(routes[k], pos, oriented)
            lengths[k] += delta
        for t in pending:
            slots[t][k] = ins.best_slot(routes[k], lengths[k], t, instance)
    return Solution(tuple(routes))


def destroy_repair_probe(solution: Solution, instance: Instance, zeta_min: int = 2,
                         zeta_max: int = 8, xi: int = 5,
                         rng: random.Random | None = None) -> Solution | None:
    rng = rng or random.Random(0)
    tasks = [t for r in solution.routes for t in r]
    if not tasks:
        return None
    current = total_distance(solution, instance)
    for _ in range(xi):
        zeta = min(rng.randint(zeta_min, zeta_max), len(tasks))
        removed = rng.sample(tasks, zeta)
        try:
            cand = regret_repair(remove_tasks(solution, removed), removed, instance)
        except RepairError:
            continue
        if total_distance(cand, instance) < current - IMPROVEMENT_EPS:
            return cand
    return None


def chain_insert(solution: Solution, instance: Instance, gamma_max: int = 3) -> Solution | None:
    """Relocate a chain of consecutive tasks into another route.

    Chain length grows from 1 to ``gamma_max``; the first length admitting an
    improvement returns its best move.
    """
    views = _views(solution, instance)
    if len(views) < 2:
        return None
    depot = instance.depot
    Q, L = instance.fleet.Q, instance.fleet.L + RANGE_TOL
    for g in range(1, gamma_max + 1):
        best = (-IMPROVEMENT_EPS, None)
        for a, va in enumerate(views):
            n = len(va.route)
            for s in range(n - g + 1):
                e = s + g - 1
                chain = va.route[s:e + 1]
                c_nodes = route_node_count(chain)
                internal = va.internal(s, e)
                ce, cx = va.E[s], va.X[e]
                p, q = va.before(s, depot), va.after(e + 1, depot)
                removal = dist(p, q) - dist(p, ce) - internal - dist(cx, q)
                for b, vb in enumerate(views):
                    if b == a or vb.nodes + c_nodes > Q:
                        continue
                    for pos in range(len(vb.route) + 1):
                        u, w = vb.before(pos, depot), vb.after(pos, depot)
                        add = dist(u, ce) + internal + dist(cx, w) - dist(u, w)
                        delta = removal + add
                        if delta < best[0] and vb.length + add <= L:
                            best = (delta, (a, s, e, b, pos))
        if best[1] is not None:
            a, s, e, b, pos = best[1]
            ra, rb = solution.routes[a], solution.routes[b]
            return _replace(solution, {a: ra[:s] + ra[e + 1:], b: rb[:pos] + ra[s:e + 1] + rb[pos:]})
    return None


def chain_exchange(solution: Solution, instance: Instance, gamma_max: int = 3) -> Solution | None:
    """Swap a chain of one route with a chain of another, keeping internal order."""
    views = _views(solution, instance)
    if len(views) < 2:
        return None
    depot = instance.depot
    Q, L = instance.fleet.Q, instance.fleet.L + RANGE_TOL
    # per route: chains by length -> (s, e, entry, exit, internal, nodes, p, q)
    chains = []
    for v in views:
        by_len = {}
        n = len(v.route)
        for g in range(1, gamma_max + 1):
            by_len[g] = [
                (s, s + g - 1, v.E[s], v.X[s + g - 1], v.internal(s, s + g - 1),
                 route_node_count(v.route[s:s + g]), v.before(s, depot), v.after(s + g, depot))
                for s in range(n - g + 1)
            ]
        chains.append(by_len)
    for g1 in range(1, gamma_max + 1):
        for g2 in range(1, gamma_max + 1):
            best = (-IMPROVEMENT_EPS, None)
            for a, va in enumerate(views):
                for b, vb in enumerate(views):
                    if a == b or (g1 == g2 and b < a):
                        continue
                    for c1 in chains[a][g1]:
                        s1, e1, E1, X1, I1, n1, p1, q1 = c1
                        old_a = dist(p1, E1) + I1 + dist(X1, q1)
                        for c2 in chains[b][g2]:
                            s2, e2, E2, X2, I2, n2, p2, q2 = c2
                            if va.nodes - n1 + n2 > Q or vb.nodes - n2 + n1 > Q:
                                continue
                            da = dist(p1, E2) + I2 + dist(X2, q1) - old_a
                            db = dist(p2, E1) + I1 + dist(X1, q2) - (dist(p2, E2) + I2 + dist(X2, q2))
                            delta = da + db
                            if delta < best[0] and va.length + da <= L and vb.length + db <= L:
                                best = (delta, (a, s1, e1, b, s2, e2))
            if best[1] is not None:
                a, s1, e1, b, s2, e2 = best[1]
                ra, rb = solution.routes[a], solution.routes[b]
                return _replace(solution, {a: ra[:s1] + rb[s2:e2 + 1] + ra[e1 + 1:],
                                           b: rb[:s2] + ra[s1:e1 + 1] + rb[e2 + 1:]})
    return None


def vnd(start: Solution, instance: Instance, params: VNDParams | None = None,
        rng: random.Random | None = None, trace: list | None = None) -> Solution:
    """Descend through the five neighborhoods, restarting at the first on success."""
    params = params or VNDParams()
    rng = rng or random.Random(0)
    ops = (
        lambda s: two_opt_best(s, instance),
        lambda s: flip_first(s, instance),
        lambda s: destroy_repair_probe(s, instance, params.zeta_min, params.zeta_max, params.xi, rng),
        lambda s: chain_insert(s, instance, params.gamma_max),
        lambda s: chain_exchange(s, instance, params.gamma_max),
    )
    best, f_best = start, total_distance(start, instance)
    mu = 0
    for _ in range(params.l_max):
        if mu >= len(ops):
            break
        cand = ops[mu](best)
        f_cand = INF if cand is None else total_distance(cand, instance)
        if f_cand < f_best - IMPROVEMENT_EPS:
            if trace is not None:
                trace.append((NEIGHBORHOODS[mu], f_cand))
            best, f_best, mu = cand, f_cand, 0
        else:
            mu += 1
    return best
