"""
Solving one instance
====================

Build an instance with the shape of benchmark C1-4 (6 required nodes with
radius 50, 15 required edges, range 1500, capacity 2), solve it, and compare
the disk-aware distance with the distance through node centers.
"""

from pathlib import Path

from cegrp import DriverParams, benchmark_instance, plot_solution, solve, total_distance, validate

inst = benchmark_instance("C1-4", seed=1)
print(inst.name, "-", len(inst.nodes), "nodes,", len(inst.edges), "edges")

# the search works on node centers and re-scores every candidate with
# optimized touring points; the same seed always gives the same run
sol, points, runlog = solve(inst, DriverParams(seed=0))

f_points = total_distance(sol, inst, points)
f_centers = total_distance(sol, inst)
print(f"vehicles: {len(sol.routes)}")
print(f"distance with touring points: {f_points:.2f}")
print(f"same routes through node centers: {f_centers:.2f}")
print(f"iterations: {len(runlog.iterations)}, valid: {validate(sol, inst).ok}")

# each route is a list of tasks; edges carry the direction they are flown in
for k, route in enumerate(sol.routes):
    print(k, " ".join(f"{t.kind[0]}{t.id}" + ("" if t.orientation is None else f"({t.orientation})")
                      for t in route))

out = Path("quickstart.svg")
out.write_text(plot_solution(sol, points, inst, title=inst.name))
print("wrote", out)
