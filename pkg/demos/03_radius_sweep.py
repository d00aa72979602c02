"""
Effect of the node radius
=========================

Solve one instance at several radii. A larger disk contains the smaller one,
so the best distance found should not go up as the radius grows.
"""

from cegrp import DriverParams, FleetSpec, generate_instance
from cegrp.harness import sweep_radius

inst = generate_instance(7, 10, 5, fleet=FleetSpec(3000.0, 3, None))
rows = sweep_radius(inst, [0, 10, 30, 50, 70, 100], DriverParams(), repetitions=3)

print(f"{'r':>5} {'best':>10} {'avg':>10}")
for r in rows:
    print(f"{r['radius']:>5g} {r['best']:>10.2f} {r['avg']:>10.2f}")

base = rows[0]["best"]
print(f"r=100 saves {100 * (base - rows[-1]['best']) / base:.1f}% over visiting centers")
