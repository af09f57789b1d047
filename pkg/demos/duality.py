"""
Poc-sets and their dual median graphs
=====================================

Build a few small poc-sets, look at their duals, and recover each poc-set
from the halfspaces of its graph.
"""

from pocmem import build_dual, catalog, close_order, halfspace_pocset, median

# three questions with no relations: the dual is a 3-cube
cube = build_dual(catalog.cube(3))
print("cube:", len(cube.vertices), "vertices,", len(cube.edges), "edges")

# a chain of nested questions gives a path, a pompom gives a star
for name, p in [("chain", catalog.chain(4)), ("pompom", catalog.pompom(4))]:
    g = build_dual(p)
    print(name, "is a tree:", g.is_tree(), "with", len(g.vertices), "vertices")

# relations are closed under complement and transitivity on the way in
p = close_order(["a", "b", "c"], [("a", "b"), ("b", "c*")])
print(p)
print("a < c* follows:", p.lt("a", "c*"))

g = build_dual(p)
for v in g.vertices:
    print(sorted(g.selection(v)))

# the median of three vertices is their majority vote
u, v, w = g.vertices[0], g.vertices[1], g.vertices[-1]
print("median:", sorted(g.selection(median(g, u, v, w))))

# halfspaces ordered by inclusion give back the poc-set
print("roundtrip:", halfspace_pocset(g).order == p.order)
print(g.to_dot())
