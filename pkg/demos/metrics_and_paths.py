"""
Distances, medians and normal cube paths
========================================

l1 adds up the weights of the walls between two vertices.  l-infinity keeps
only the heaviest chain of such walls.
"""

import numpy as np

from medianite import Ultrafilter, transverse_pocset
from medianite.metrics import distance_matrix, normal_cube_path
from medianite.metrics import linf_distance_vertices, median_vertices
from medianite.pocset import linear_pocset, wedge_sum

U = Ultrafilter.from_string

cube = transverse_pocset(3)
print("l1 across the cube:", distance_matrix(cube, "l1").max())
print("linf across the cube:", distance_matrix(cube, "linf").max())

# the median takes the majority side on every wall
print(median_vertices(cube, U("+++"), U("+--"), U("-+-")))

# with unit weights the normal cube path is an l-infinity geodesic
path = normal_cube_path(cube, U("+++"), U("---"))
print("steps:", path.n_steps, "l1 length:", path.length_l1)

# a heavy wall breaks that: the first step flips it together with a1 and pays
# its full weight, then a2 still costs one more
grid = wedge_sum(linear_pocset(2), linear_pocset(1, prefix="b")).with_weights([1.0, 1.0, 2.0])
path = normal_cube_path(grid, U("+++"), U("---"))
print("path length", path.length_linf, "vs distance", linf_distance_vertices(grid, U("+++"), U("---")))

D = distance_matrix(grid, "linf")
np.set_printoptions(precision=2)
print(D)
