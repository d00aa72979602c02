"""Representative-point selection for routes with a fixed visiting order.

Given the chain of disks a route visits (zero-radius disks are fixed points,
the depot sits at both ends), choose one point per disk so the polyline
through them is as short as possible. The problem is convex.

The main solver is cyclic coordinate descent: every free point is moved to
its exact optimum given its two neighbours (:func:`best_point_on_disk`).
Coordinate descent can stall where two consecutive points coincide, since
the objective is not differentiable there, so each result is checked
against a Lagrangian lower bound. Chains that cannot be certified that way
are re-solved with a small log-barrier interior-point method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import Disk, Point2, best_point_in_disks, best_point_on_disk, dist, project_to_disk
from .instance import Instance
from .solution import Solution, total_distance, vertex_sequence

__all__ = [
    "TouringResult",
    "PointAssignment",
    "chain_length",
    "dual_bound",
    "optimize_points",
    "optimize_solution",
    "DEFAULT_TOL",
    "DEFAULT_MAX_ITER",
]

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 1000
_ZERO_LEG = 1e-12


@dataclass
class TouringResult:
    points: list
    objective: float
    iterations: int
    converged: bool
    gap: float = math.inf
    trace: list = field(default_factory=list)
    method: str = "cd"


class PointAssignment(list):
    """Per-route point lists; ``converged`` is False if any route was not certified."""

    converged: bool = True


def chain_length(points: Sequence) -> float:
    return sum(dist(points[i], points[i + 1]) for i in range(len(points) - 1))


def _leg_duals(points, disks):
    """Unit leg directions; ``None`` for zero legs touching a free point."""
    ys, unknown = [], []
    for i in range(len(points) - 1):
        dx = points[i + 1][0] - points[i][0]
        dy = points[i + 1][1] - points[i][1]
        n = math.hypot(dx, dy)
        if n > _ZERO_LEG * (1.0 + abs(points[i][0]) + abs(points[i][1])):
            ys.append((dx / n, dy / n))
        else:
            ys.append((0.0, 0.0))
            if disks[i].radius > 0 or disks[i + 1].radius > 0:
                unknown.append(i)
    return ys, unknown


def _term(j, ys, disks) -> float:
    # min over disk j of p . (y_{j-1} - y_j)
    m = len(disks)
    wx = (ys[j - 1][0] if j > 0 else 0.0) - (ys[j][0] if j < m - 1 else 0.0)
    wy = (ys[j - 1][1] if j > 0 else 0.0) - (ys[j][1] if j < m - 1 else 0.0)
    (cx, cy), r = disks[j]
    return cx * wx + cy * wy - r * math.hypot(wx, wy)


def _lower_bound(ys, disks) -> float:
    return sum(_term(j, ys, disks) for j in range(len(disks)))


def _zero_runs(unknown):
    runs, cur = [], []
    for i in unknown:
        if cur and i == cur[-1] + 1:
            cur.append(i)
        else:
            if cur:
                runs.append(cur)
            cur = [i]
    if cur:
        runs.append(cur)
    return runs


def _fill_runs(ys, unknown, points, disks):
    """Multipliers for runs of zero-length legs from the optimality conditions.

    All points of a run share one location q. Each free disk j in the run
    absorbs a multiplier jump along the direction from q to its center, so
    the jumps must add up to ``y_in - y_out``. Two active disks suffice in
    the plane; every pair and every single jump is tried and the best
    resulting bound is kept.
    """
    n_legs = len(ys)
    for run in _zero_runs(unknown):
        i0, i1 = run[0], run[-1]
        if i0 == 0 or i1 == n_legs - 1:
            continue
        y_in, y_out = ys[i0 - 1], ys[i1 + 1]
        pts = range(i0, i1 + 2)
        fixed = [j for j in pts if disks[j].radius <= 0]
        if fixed:
            for i in run:
                ys[i] = y_in if i < fixed[0] else y_out
            continue
        q = points[i0]
        active, dirs = [], {}
        for j in pts:
            (cx, cy), r = disks[j]
            n = math.hypot(cx - q[0], cy - q[1])
            if n > 0 and n >= r * (1.0 - 1e-7):
                active.append(j)
                dirs[j] = ((cx - q[0]) / n, (cy - q[1]) / n)
        rx, ry = y_in[0] - y_out[0], y_in[1] - y_out[1]
        # a single jump at any point of the run; any choice stays dual-feasible
        options = [(a, a, None) for a in pts]
        for k, a in enumerate(active):
            for b in active[k + 1:]:
                (ax, ay), (bx, by) = dirs[a], dirs[b]
                det = ax * by - ay * bx
                if abs(det) < 1e-12:
                    continue
                ma = (rx * by - ry * bx) / det
                mb = (ax * ry - ay * rx) / det
                if ma < -1e-12 or mb < -1e-12:
                    continue
                mid = (y_in[0] - ma * ax, y_in[1] - ma * ay)
                n = math.hypot(*mid)
                if n > 1.0:
                    mid = (mid[0] / n, mid[1] / n)
                options.append((a, b, mid))
        best, best_ys = None, None
        for a, b, mid in options:
            for i in run:
                ys[i] = y_in if i < a else (mid if i < b else y_out)
            v = sum(_term(j, ys, disks) for j in pts)
            if best is None or v > best:
                best, best_ys = v, [ys[i] for i in run]
        if best_ys is None:
            for i in run:
                ys[i] = (0.0, 0.0)
        else:
            for i, y in zip(run, best_ys):
                ys[i] = y


def dual_bound(points: Sequence, disks: Sequence[Disk], rounds: int = 6) -> float:
    """Lower bound on the optimal chain length built from ``points``.

    Unit vectors along the legs are dual-feasible. Near tangencies and at
    zero-length legs they are loose, so each leg multiplier is greedily
    replaced by a neighbour's (or their normalised mean) whenever that
    raises the bound.
    """
    ys, unknown = _leg_duals(points, disks)
    if unknown:
        _fill_runs(ys, unknown, points, disks)
    lb = _lower_bound(ys, disks)
    n_legs = len(ys)
    for _ in range(rounds):
        moved = False
        for i in range(n_legs):
            left = ys[i - 1] if i > 0 else None
            right = ys[i + 1] if i + 1 < n_legs else None
            cands = [c for c in (left, right) if c is not None]
            if left is not None and right is not None:
                sx, sy = left[0] + right[0], left[1] + right[1]
                n = math.hypot(sx, sy)
                if n > 0:
                    cands.append((sx / n, sy / n))
            cands.append((0.0, 0.0))
            keep = ys[i]
            base = _term(i, ys, disks) + _term(i + 1, ys, disks)
            best = base
            for c in cands:
                ys[i] = c
                v = _term(i, ys, disks) + _term(i + 1, ys, disks)
                if v > best + 1e-15:
                    best, keep = v, c
            ys[i] = keep
            if best > base:
                lb += best - base
                moved = True
        if not moved:
            break
    return lb


def _coincident_runs(points, free, scale):
    """Maximal runs (>= 2) of consecutive free indices sharing one location."""
    eps = 1e-9 * scale
    free_set = set(free)
    runs, cur = [], []
    for j in free:
        if cur and j == cur[-1] + 1 and dist(points[j], points[cur[-1]]) <= eps:
            cur.append(j)
        else:
            if len(cur) > 1:
                runs.append(cur)
            cur = [j]
    if len(cur) > 1:
        runs.append(cur)
    return [r for r in runs if all(j in free_set for j in r)]


def _cd_passes(points, disks, free, tol, max_iter, trace):
    """Cyclic descent: single-point moves, then joint moves of coincident runs.

    A point only moves when that strictly shortens the chain, so the
    objective is non-increasing over passes.
    """
    obj = chain_length(points)
    trace.append(obj)
    scale = 1.0 + max(abs(c) for d in disks for c in d.center)
    it = 0
    while it < max_iter:
        it += 1
        for j in free:
            a, b, p = points[j - 1], points[j + 1], points[j]
            local = dist(a, p) + dist(p, b)
            q, v = best_point_on_disk(a, b, disks[j])
            if v < local:
                points[j] = q
        for run in _coincident_runs(points, free, scale):
            a, b = points[run[0] - 1], points[run[-1] + 1]
            local = dist(a, points[run[0]]) + dist(points[run[-1]], b)
            found = best_point_in_disks(a, b, [disks[j] for j in run])
            if found is not None and found[1] < local - 1e-12 * scale:
                for j in run:
                    points[j] = project_to_disk(found[0], disks[j])
        new = chain_length(points)
        trace.append(new)
        if obj - new < tol:
            obj = new
            return obj, it, True
        obj = new
    return obj, it, False


def _barrier_solve(disks, gap_tol: float, mu: float = 20.0):
    """Interior-point solve of the touring program; returns (free points, lower bound).

    Variables are the free points plus one epigraph variable ``t`` per leg
    touching a free point, with ``t >= |leg|`` and points kept inside their
    disks by log barriers.
    """
    m = len(disks)
    free = [j for j in range(1, m - 1) if disks[j].radius > 0]
    col = {j: 2 * k for k, j in enumerate(free)}
    legs = [i for i in range(m - 1) if i in col or (i + 1) in col]
    nx, nt = 2 * len(free), len(legs)
    n = nx + nt
    centers = np.array([d.center for d in disks], dtype=float)
    radii = np.array([d.radius for d in disks], dtype=float)

    # rows 3k, 3k+1, 3k+2 of M z + c give (t_k, delta_k) for leg k
    M = np.zeros((3 * nt, n))
    c = np.zeros(3 * nt)
    for k, i in enumerate(legs):
        M[3 * k, nx + k] = 1.0
        for j, sign in ((i + 1, 1.0), (i, -1.0)):
            if j in col:
                M[3 * k + 1, col[j]] = sign
                M[3 * k + 2, col[j] + 1] = sign
            else:
                c[3 * k + 1:3 * k + 3] += sign * centers[j]
    Mr = M.reshape(nt, 3, n)
    fc = np.array([centers[j] for j in free]).reshape(-1, 2)
    fr2 = radii[free] ** 2
    sig = np.array([1.0, -1.0, -1.0])

    scale = max(1.0, float(np.abs(centers).max()))
    z = np.zeros(n)
    z[:nx] = fc.ravel()
    w = (M @ z + c).reshape(nt, 3)
    z[nx:] = np.hypot(w[:, 1], w[:, 2]) + 1e-2 * scale
    nu = 2.0 * (nt + len(free))

    def parts(z):
        w = (M @ z + c).reshape(nt, 3)
        u = (w * w) @ sig
        off = z[:nx].reshape(-1, 2) - fc
        v = fr2 - (off * off).sum(1)
        return w, u, off, v

    def value(z, s):
        w, u, off, v = parts(z)
        if (u <= 0).any() or (w[:, 0] <= 0).any() or (v <= 0).any():
            return math.inf
        return s * w[:, 0].sum() - np.log(u).sum() - np.log(v).sum()

    s = nu / max(z[nx:].sum(), 1e-9)
    eye2 = np.eye(2)
    while True:
        for _ in range(100):
            w, u, off, v = parts(z)
            gu = 2.0 * w * sig  # gradient of u in (t, delta)
            gw = -gu / u[:, None]
            gw[:, 0] += s
            g = M.T @ gw.ravel()
            B = -np.diag(2.0 * sig)[None, :, :] / u[:, None, None] + \
                gu[:, :, None] * gu[:, None, :] / (u * u)[:, None, None]
            H = Mr.reshape(3 * nt, n).T @ np.einsum("kab,kbn->kan", B, Mr).reshape(3 * nt, n)
            if nx:
                g[:nx] += (2.0 * off / v[:, None]).ravel()
                blk = (2.0 / v)[:, None, None] * eye2 + \
                    4.0 * off[:, :, None] * off[:, None, :] / (v * v)[:, None, None]
                for k in range(len(free)):
                    H[2 * k:2 * k + 2, 2 * k:2 * k + 2] += blk[k]
            try:
                dz = -np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                dz = -np.linalg.lstsq(H, g, rcond=None)[0]
            dec = -float(g @ dz)
            if dec / 2.0 <= 1e-10:
                break
            f0, step = value(z, s), 1.0
            while step > 1e-12:
                f1 = value(z + step * dz, s)
                if f1 <= f0 - 0.25 * step * dec:
                    break
                step *= 0.5
            else:
                break
            z = z + step * dz
        if nu / s <= gap_tol:
            break
        s *= mu
    pts = z[:nx].reshape(-1, 2)
    fixed_legs = sum(dist(disks[i].center, disks[i + 1].center)
                     for i in range(m - 1) if i not in col and (i + 1) not in col)
    lower = float(z[nx:].sum()) + fixed_legs - nu / s
    return {j: Point2(float(pts[k, 0]), float(pts[k, 1])) for k, j in enumerate(free)}, lower


def optimize_points(problem: Sequence[Disk], tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER) -> TouringResult:
    """Shortest chain through ``problem``'s disks, in order.

    ``converged`` is True when the returned objective is certified to be
    within ``tol`` of the optimum (``gap`` holds the certified bound).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    disks = [Disk(Point2(float(d[0][0]), float(d[0][1])), float(d[1])) for d in problem]
    if len(disks) < 2:
        raise ValueError("a touring problem needs at least two vertices")
    points = [d.center for d in disks]
    free = [j for j in range(1, len(disks) - 1) if disks[j].radius > 0]
    # endpoints are fixed even if given a radius
    trace: list = []
    if not free:
        obj = chain_length(points)
        return TouringResult(points, obj, 0, True, 0.0, [obj], "fixed")

    obj, it, _ = _cd_passes(points, disks, free, tol, max_iter, trace)
    cert = tol + 1e-12 * obj
    gap = obj - dual_bound(points, disks, rounds=0)
    if gap > cert:
        gap = obj - dual_bound(points, disks)
    if gap <= cert:
        return TouringResult(points, obj, it, True, max(gap, 0.0), trace, "cd")

    found, lower = _barrier_solve(disks, gap_tol=0.5 * tol)
    cand = list(points)
    for j, p in found.items():
        cand[j] = project_to_disk(p, disks[j])
    cand_obj, extra, _ = _cd_passes(cand, disks, free, tol, max_iter, [])
    method = "cd"
    if cand_obj < obj:
        points, obj, method = cand, cand_obj, "barrier"
        trace.append(obj)
    gap = float(obj - max(lower, dual_bound(points, disks)))
    return TouringResult(points, obj, it + extra, bool(gap <= cert), max(gap, 0.0), trace, method)


def optimize_solution(solution: Solution, instance: Instance, tol: float = DEFAULT_TOL,
                      max_iter: int = DEFAULT_MAX_ITER, cache: dict | None = None):
    """Optimise every route independently; returns ``(points, total)``.

    ``cache`` maps a route tuple to its :class:`TouringResult` so unchanged
    routes are not re-solved across calls.
    """
    points = PointAssignment()
    total = 0.0
    for route in solution.routes:
        res = None if cache is None else cache.get(route)
        if res is None:
            res = optimize_points(vertex_sequence(route, instance), tol, max_iter)
            if cache is not None:
                cache[route] = res
        points.append(list(res.points))
        total += res.objective
        if not res.converged:
            points.converged = False
    return points, total
