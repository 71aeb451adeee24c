"""
Watching a decaying cat
=======================

An observer keeps a running record of a cat that can die at any moment.
Splitting the universal state along the observer's record gives one branch
per possible record, and the live branch fades as exp(-2 gamma t).
"""

# %%
# Build the model.  The observer has one "alive" record plus one record per
# time bin in which the death could have been seen.
import math

import numpy as np

from relstate import CatModel, decompose, relative_state

cat = CatModel(gamma=0.5, bins=10, t_max=2.0)
print("observer records:", cat.dim_observer, " total dim:", cat.dim)

# %%
# Branch weights over the grid.  The dead weight is spread over the bins
# that have already elapsed.
for t in cat.grid:
    d = decompose(cat.state_at(t), cat.factorization, time=t)
    alive = d.weights[0]
    print(f"t={t:4.1f}  alive={alive:.6f}  exp(-t)={math.exp(-t):.6f}  dead={d.weights[1:].sum():.6f}")

# %%
# Relative to the "alive" record the cat is certainly alive, and relative to
# "died in bin 3" it is certainly dead.
d = decompose(cat.state_at(1.0), cat.factorization)
print("given 'alive':      ", np.round(relative_state(d, 0).amplitudes, 12))
print("given 'died in 3':  ", np.round(relative_state(d, 3).amplitudes, 12))

# %%
# The branch table can be exported as CSV.
print(d.to_csv())
