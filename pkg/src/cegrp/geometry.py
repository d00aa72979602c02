"""Planar Euclidean primitives used throughout the solver.

Points and disks are plain named tuples so they unpack cheaply in the hot
loops of the local search and the touring optimizer.
"""

from __future__ import annotations

import math
from typing import NamedTuple

__all__ = [
    "Point2",
    "Disk",
    "dist",
    "project_to_disk",
    "segment_hits_disk",
    "best_point_on_disk",
    "best_point_in_disks",
    "OBJ_TOL",
    "GEOM_TOL",
]

OBJ_TOL = 1e-9
GEOM_TOL = 1e-12

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_N_ANGLE_SAMPLES = 48


class Point2(NamedTuple):
    x: float
    y: float


class Disk(NamedTuple):
    center: Point2
    radius: float = 0.0


def dist(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def project_to_disk(p, d: Disk) -> Point2:
    """Closest point of ``d`` to ``p`` (``p`` itself when already inside)."""
    (cx, cy), r = d
    dx, dy = p[0] - cx, p[1] - cy
    n = math.hypot(dx, dy)
    if n <= r:
        return Point2(float(p[0]), float(p[1]))
    if n == 0.0:
        return Point2(cx, cy)
    s = r / n
    return Point2(cx + dx * s, cy + dy * s)


def segment_hits_disk(a, b, d: Disk, tol: float = GEOM_TOL) -> bool:
    (cx, cy), r = d
    abx, aby = b[0] - a[0], b[1] - a[1]
    l2 = abx * abx + aby * aby
    if l2 == 0.0:
        return math.hypot(a[0] - cx, a[1] - cy) <= r + tol
    t = ((cx - a[0]) * abx + (cy - a[1]) * aby) / l2
    t = min(1.0, max(0.0, t))
    return math.hypot(a[0] + t * abx - cx, a[1] + t * aby - cy) <= r + tol


def _entry_point(a, b, d: Disk) -> Point2:
    # first point of segment a->b inside d; caller guarantees the segment hits d
    (cx, cy), r = d
    if math.hypot(a[0] - cx, a[1] - cy) <= r:
        return Point2(float(a[0]), float(a[1]))
    abx, aby = b[0] - a[0], b[1] - a[1]
    acx, acy = a[0] - cx, a[1] - cy
    qa = abx * abx + aby * aby
    qb = 2.0 * (abx * acx + aby * acy)
    qc = acx * acx + acy * acy - r * r
    disc = max(0.0, qb * qb - 4.0 * qa * qc)
    s = (-qb - math.sqrt(disc)) / (2.0 * qa)
    s = min(1.0, max(0.0, s))
    return project_to_disk((a[0] + s * abx, a[1] + s * aby), d)


def best_point_on_disk(a, b, d: Disk) -> tuple[Point2, float]:
    """Point ``p`` in ``d`` minimising ``dist(a, p) + dist(p, b)``.

    Returns ``(p, value)``. When the segment a-b meets the disk every point of
    the chord is optimal and the one nearest ``a`` is returned. Otherwise the
    optimum lies on the circle; the boundary angle is located by a coarse scan
    followed by golden-section refinement.
    """
    (cx, cy), r = d
    if r <= 0.0:
        c = Point2(cx, cy)
        return c, dist(a, c) + dist(c, b)
    if a[0] == b[0] and a[1] == b[1]:
        p = project_to_disk(a, d)
        return p, 2.0 * dist(a, p)
    if segment_hits_disk(a, b, d):
        p = _entry_point(a, b, d)
        return p, dist(a, p) + dist(p, b)

    ax, ay, bx, by = a[0], a[1], b[0], b[1]

    def f(theta: float) -> float:
        px = cx + r * math.cos(theta)
        py = cy + r * math.sin(theta)
        return math.hypot(ax - px, ay - py) + math.hypot(bx - px, by - py)

    step = 2.0 * math.pi / _N_ANGLE_SAMPLES
    # start the scan at the bisector of the directions to a and b
    ua = math.atan2(ay - cy, ax - cx)
    ub = math.atan2(by - cy, bx - cx)
    mid = ua + 0.5 * math.remainder(ub - ua, 2.0 * math.pi)
    best_k, best_v = 0, f(mid)
    for k in range(1, _N_ANGLE_SAMPLES):
        v = f(mid + k * step)
        if v < best_v:
            best_k, best_v = k, v
    lo = mid + (best_k - 1) * step
    hi = mid + (best_k + 1) * step
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > 1e-11:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
    theta = 0.5 * (lo + hi)
    p = Point2(cx + r * math.cos(theta), cy + r * math.sin(theta))
    v = dist(a, p) + dist(p, b)
    if best_v < v:
        theta = mid + best_k * step
        p = Point2(cx + r * math.cos(theta), cy + r * math.sin(theta))
        v = dist(a, p) + dist(p, b)
    return p, v


def _segment_interval(a, b, d: Disk):
    # parameter range [lo, hi] of a + s(b - a), s in [0, 1], lying in d; None if empty
    (cx, cy), r = d
    abx, aby = b[0] - a[0], b[1] - a[1]
    acx, acy = a[0] - cx, a[1] - cy
    qa = abx * abx + aby * aby
    qb = 2.0 * (abx * acx + aby * acy)
    qc = acx * acx + acy * acy - r * r
    if qa == 0.0:
        return (0.0, 1.0) if qc <= 0.0 else None
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    lo, hi = max(0.0, (-qb - sq) / (2.0 * qa)), min(1.0, (-qb + sq) / (2.0 * qa))
    return (lo, hi) if lo <= hi else None


def _circle_crossings(d1: Disk, d2: Disk):
    (x1, y1), r1 = d1
    (x2, y2), r2 = d2
    dx, dy = x2 - x1, y2 - y1
    n = math.hypot(dx, dy)
    if n == 0.0 or n > r1 + r2 or n < abs(r1 - r2):
        return []
    k = (r1 * r1 - r2 * r2 + n * n) / (2.0 * n)
    h = math.sqrt(max(0.0, r1 * r1 - k * k))
    mx, my = x1 + k * dx / n, y1 + k * dy / n
    return [Point2(mx - h * dy / n, my + h * dx / n), Point2(mx + h * dy / n, my - h * dx / n)]


def best_point_in_disks(a, b, disks, tol: float = 1e-9):
    """Point in the intersection of ``disks`` minimising ``dist(a, p) + dist(p, b)``.

    Returns ``(p, value)``, or ``None`` when the intersection is empty. The
    optimum is on the segment a-b if that meets the intersection, else it is
    either a single disk's optimum lying in all the others or a crossing
    point of two circles.
    """
    disks = list(disks)
    if len(disks) == 1:
        return best_point_on_disk(a, b, disks[0])

    def inside(p):
        return all(math.hypot(p[0] - c[0], p[1] - c[1]) <= r + tol for c, r in disks)

    lo, hi = 0.0, 1.0
    for d in disks:
        iv = _segment_interval(a, b, d)
        if iv is None:
            lo, hi = 1.0, 0.0
            break
        lo, hi = max(lo, iv[0]), min(hi, iv[1])
    if lo <= hi:
        p = Point2(a[0] + lo * (b[0] - a[0]), a[1] + lo * (b[1] - a[1]))
        if inside(p):
            return p, dist(a, p) + dist(p, b)
    best = None
    cands = [best_point_on_disk(a, b, d)[0] for d in disks]
    for i in range(len(disks)):
        for j in range(i + 1, len(disks)):
            cands.extend(_circle_crossings(disks[i], disks[j]))
    for p in cands:
        if inside(p):
            v = dist(a, p) + dist(p, b)
            if best is None or v < best[1]:
                best = (p, v)
    return best
