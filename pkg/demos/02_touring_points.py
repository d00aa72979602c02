"""
Touring points for a fixed visiting order
=========================================

With the order of a route fixed, only the point inside each disk is free.
The chain below leaves the depot, crosses three disks and comes back.
"""

from cegrp import Disk, optimize_points
from cegrp.close_enough import chain_length, dual_bound

depot = Disk((0.0, 0.0), 0.0)
chain = [depot, Disk((6.0, 1.0), 1.5), Disk((9.0, 4.0), 2.0), Disk((4.0, 7.0), 1.0), depot]

centers = chain_length([d.center for d in chain])
res = optimize_points(chain)
print(f"through centers: {centers:.6f}")
print(f"optimized:       {res.objective:.6f}  ({res.method}, {res.iterations} passes)")

# the result comes with a lower bound; the gap certifies optimality
print(f"lower bound:     {dual_bound(res.points, chain):.6f}  gap {res.gap:.1e}  converged={res.converged}")
for d, p in zip(chain, res.points):
    print(f"  center {tuple(d.center)} r={d.radius:<4} -> ({p[0]:.4f}, {p[1]:.4f})")

# the descent never goes uphill
print("trace:", " ".join(f"{v:.4f}" for v in res.trace))
