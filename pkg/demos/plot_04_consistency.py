"""
When future truth values fail to add up
=======================================

For a generic Hamiltonian the values over all future records sum to less
than one.  The gap, called the consistency defect here, vanishes when each
branch evolves into a state parallel to what the record at t0 alone
would produce.
"""

# %%
import numpy as np

from relstate import (
    Factorization,
    Perspective,
    consistency_defect,
    future_truth_table,
    random_consistent_model,
    random_hermitian,
    random_state,
)

rng = np.random.default_rng(11)

# %%
# Generic dynamics: strictly sub-additive.
f = Factorization(4, 2)
psi, H = random_state(rng, 8), random_hermitian(rng, 8)
p = Perspective(f, N=1, t0=0.0)
table = future_truth_table(psi, H, p, 1.0)
print("generic: ", np.round([v for _, v in table], 4), " sum", round(sum(v for _, v in table), 4))

# %%
# A constructed consistent model: the values add to one.
cm = random_consistent_model(rng, 4, 2, N=1, dt=1.0)
q = Perspective(cm.factorization, cm.N, 0.0)
table = future_truth_table(cm.psi0, cm.H, q, cm.dt)
print("consistent:", np.round([v for _, v in table], 4), " defect", consistency_defect(cm.psi0, cm.H, q, cm.dt))
