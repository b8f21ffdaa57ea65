"""
Balls, convexity and intersection
=================================

In the cube, l-infinity balls intersect when they pairwise do.  l1 balls
do not, and the search reports which families fail.
"""

from medianite import transverse_pocset
from medianite.verify import check_dagger, helly_sweep, hyperconvexity_check, metric_from_pocset

cube = transverse_pocset(3)

print("linf balls are l1-convex:", check_dagger(cube).status)
print("linf hyperconvex:", hyperconvexity_check(metric_from_pocset(cube, "linf")).status)

rep = hyperconvexity_check(metric_from_pocset(cube, "l1"))
print("l1 hyperconvex:", rep.status)
print("first failing family:", rep.witness)
print(len(rep.details["counterexamples"]), "failing families of that size")

print("Helly for halfspace pairs:", helly_sweep(cube).status)
