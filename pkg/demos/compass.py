"""
The compass
===========

Four arc sensors around a circle.  How much of the dual graph can actually
occur depends on how wide the arcs are.
"""

from pocmem import build_dual, catalog, objective_excitation, pi_x, visible_graph
from pocmem.realization import compass, compass_atom, consistent_vertices

g = build_dual(catalog.compass())
print("dual:", len(g.vertices), "vertices,", len(g.edges), "edges")
center = g.vertex({"n*", "s*", "w*", "e*"})

for eps in (60, 30):
    r = compass(eps)
    seen = consistent_vertices(r, g)
    vg = visible_graph(r)
    print(f"\nhalf-width {eps} degrees")
    print("  consistent vertices:", len(seen), " center consistent:", center in seen)
    print("  visible graph degrees:", sorted(vg.degrees()))
    for angle in (0, 45, 90):
        print(f"  needle at {angle:3d}:", sorted(pi_x(r, compass_atom(angle))))

# objective weights: the chance of seeing each answer profile
p = objective_excitation(compass(30), g)
for v in g.vertices:
    if p[v]:
        print(sorted(g.selection(v)), p[v])
