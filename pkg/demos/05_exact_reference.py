"""
Exact reference on a tiny instance
==================================

Instances with up to seven tasks can be solved exactly by enumerating task
partitions and route orders. This gives a yardstick for the heuristic.
"""

from cegrp import DriverParams, FleetSpec, generate_instance, solve, solve_exact_global, total_distance
from cegrp.harness import gap_percent

inst = generate_instance(3, 3, 2, radius=50.0, fleet=FleetSpec(3000.0, 2, None))
sol_opt, pts_opt, opt = solve_exact_global(inst)
print(f"optimum {opt:.4f} with {len(sol_opt.routes)} routes")

for seed in range(3):
    sol, pts, _ = solve(inst, DriverParams(seed=seed))
    f = total_distance(sol, inst, pts)
    print(f"seed {seed}: {f:.4f}  gap {gap_percent(f, opt):+.2e}%")
