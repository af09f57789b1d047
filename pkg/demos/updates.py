"""
Updating the current guess
==========================

An observation excites everything above it; contradicted beliefs are flipped.
With a limited budget the excitation fades, and repeating the observation
finishes the job.
"""

from pocmem import HopBudget, Observer, catalog, coherence_check, update_dissipative, update_idealized
from pocmem.observer import ChargeBudget

o = Observer.uniform(catalog.compass(), {"n", "s*", "w*", "e*"})
new, report = update_idealized(o, "s")
print("after seeing s:", sorted(new.epsilon))
print("flipped:", report.removed, "->", report.flags)

# a chain b1 < b2 < b3 with every answer negative
chain = Observer.uniform(catalog.chain(3), {"b1*", "b2*", "b3*"})
print("\nidealized:", sorted(update_idealized(chain, "b1")[0].epsilon))

cur = chain
for step in range(3):
    cur, report = update_dissipative(cur, "b1", HopBudget(1))
    print(f"hop budget 1, pass {step}:", sorted(cur.epsilon), "conflicts:", coherence_check(cur))

# charge that halves at each paid step and dies below 0.2
five = Observer.uniform(catalog.chain(5), {f"b{i}*" for i in range(1, 6)})
print("\ncharge:", sorted(update_dissipative(five, "b1", ChargeBudget(0.5, 0.2))[0].epsilon))
