"""
Reasoning about records in time
===============================

Propositions are built from atoms ``E(n, t)`` ("the record reads n at time
t") with ``!``, ``&`` and ``|``.  Past atoms are checked against the
remembered record; future atoms get graded truth values.
"""

# %%
import math

from relstate import IdealMeasurementModel, Perspective, disjoint_histories, evaluate, parse

im = IdealMeasurementModel((math.sqrt(0.2), math.sqrt(0.3), math.sqrt(0.5)))
p = Perspective(im.factorization, N=0, t0=0.0, record={-1.0: 0, 0.0: 0})
psi, H = im.initial_state(), im.hamiltonian

for text in [
    "E(0,-1.0)",
    "E(2,-1.0)",
    "E(2,1.0)",
    "!E(2,1.0)",
    "E(1,1.0) | E(2,1.0) | E(3,1.0)",
    # the coupling keeps running after T, so by 2T the record swings back to ready
    "E(3,1.0) & E(0,2.0)",
]:
    print(f"{evaluate(text, psi, H, p):.6f}  {text}")

# %%
# Internally a proposition is refined into disjoint histories.
for h in disjoint_histories(parse("!(E(1,1.0) | E(2,1.0))"), 4):
    print(h.as_dict())
