"""
Forgetting unlikely corners
===========================

When an observer sees that two answers never occur together, it can commit
to that by degenerating the corner.  Weights follow along the dual map, and
the move log can be audited afterwards.
"""

from pocmem import (
    MoveLog,
    Observer,
    apply_degeneration,
    apply_expansion,
    audit_postulate,
    build_dual,
    catalog,
    degenerate,
    degeneration_candidates,
)
from pocmem.realization import compass

# the square collapses to a path
p, r = degenerate(catalog.cube(2), "a1", "a2*")
print(p, "->", len(build_dual(p).vertices), "vertices")
print("r°:", r.dual())

# an observer of the narrow compass never sees two sensors at once
o = Observer.objective(compass(30), 0)
log = MoveLog.start(o)
for c in degeneration_candidates(o, 0.05):
    print("candidate corner:", c.a, c.b)

for a, b in [("n", "w"), ("n", "e"), ("s", "w"), ("s", "e")]:
    o, move = apply_degeneration(o, a, b)
    log.append(move, o)
    print(f"degenerate ({a}, {b}):", len(o.graph.vertices), "vertices, kept", move.transport_summary()["massKept"])

print("the dual is now a tree:", o.graph.is_tree())

# undo part of it by adding a new question
o, move = apply_expansion(o, "z")
log.append(move, o)
print("audit:", audit_postulate(log))
