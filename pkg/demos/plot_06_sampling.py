"""
Sampling a single record
========================

A sampler walks forward through the grid, drawing each next record from
the future truth table of the current one.  Across many seeds the fraction
of records still reading "alive" follows exp(-2 gamma t).
"""

# %%
import math

import numpy as np

from relstate import CatModel, RecordSampler

cat = CatModel(gamma=0.5, bins=10, t_max=2.0)
sampler = RecordSampler(cat.initial_state(), cat, cat.factorization, cat.bin_edges)

one = sampler.sample(seed=3)
print("one trajectory:", [one.record[t] for t in cat.bin_edges])

# %%
records = np.array([[sampler.sample(s).record[t] for t in cat.bin_edges] for s in range(2000)])
for k, t in enumerate(cat.bin_edges):
    print(f"t={t:3.1f}  alive fraction={np.mean(records[:, k] == 0):.3f}  exp(-t)={math.exp(-t):.3f}")
