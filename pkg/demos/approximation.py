"""
Refining walls and approximating weights
========================================

Splitting a wall into a chain of thinner walls leaves every distance alone.
Rounding weights down to multiples of 1/n moves them by a bounded amount.
"""

from medianite import refine, xt_pocset
from medianite.refine import approximation_check, deformation_bound_check, subdivision_isometry_check
from medianite.verify import oracle_sweep

p = xt_pocset(0.3)

# cut every wall in half
r = refine(p, {i: [w / 2, w / 2] for i, w in enumerate(p.weights)})
print(r.source.n_walls, "walls after refining;", subdivision_isometry_check(r).status)

# rational approximations: the deviation stays under n_walls / n
for row in approximation_check(p, (2, 4, 8, 16)).details["sweep"]:
    print(f"n={row['n']:2d}  deviation {row['max_deviation']:.3f}  bound {row['bound']:.3f}  dropped {row['dropped']}")

# changing t moves distances by at most the total weight change
rep = deformation_bound_check(p, xt_pocset(0.3).weights, xt_pocset(0.35).weights)
print("deformation:", rep.details["max_deviation"], "<=", rep.bound)

# the closed form agrees with shortest paths through cube diagonals
print(oracle_sweep(p, (8, 16), weighted=True).details["sweep"])
