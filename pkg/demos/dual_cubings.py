"""
Poc sets and their dual cubings
===============================

A poc set lists walls and how their sides nest.  Its dual is the graph of
coherent orientations, joined when they differ on one wall.
"""

import networkx as nx

from medianite import build_cubing, enumerate_ultrafilters, linear_pocset, transverse_pocset, tree_pocset
from medianite.pocset import wedge_sum

# a chain of three walls dualizes to a path with four vertices
chain = linear_pocset(3)
print([str(u) for u in enumerate_ultrafilters(chain)])

# three pairwise transverse walls give the 3-cube
cube = build_cubing(transverse_pocset(3))
print(len(cube.vertices), "vertices,", len(cube.edges), "edges")

# a tree is recovered from the walls its edges cut out
star = tree_pocset([("hub", "x"), ("hub", "y"), ("hub", "z")])
g = build_cubing(star)
print("star degree sequence:", sorted(g.degree(i) for i in range(len(g.vertices))))

# the wedge sum of two poc sets dualizes to the product of the duals
grid = wedge_sum(linear_pocset(2), linear_pocset(1, prefix="b"))
h = nx.Graph([(i, j) for i, j, _ in build_cubing(grid).edges])
print("2x1 grid is a ladder:", nx.is_isomorphic(h, nx.ladder_graph(3)))

print(build_cubing(linear_pocset(2)).to_dot())
