"""
One observer, many branches
===========================

Branching does not multiply observers.  The observer number operator sums
the record projectors, so every state is an eigenstate with eigenvalue 1.
"""

# %%
import numpy as np

from relstate import Factorization, decompose, evolve, observer_count, random_hermitian, random_state

rng = np.random.default_rng(7)
f = Factorization(4, 3)
psi = random_state(rng, f.dim)
H = random_hermitian(rng, f.dim)

# %%
# Weights move around under evolution, but the count stays put.
for t in (0.0, 0.5, 1.0, 2.0):
    s = evolve(psi, H, 0.0, t)
    mean, var = observer_count(s, f)
    print(f"t={t:3.1f}  weights={np.round(decompose(s, f).weights, 4)}  count=({mean:.12f}, {var:.1e})")
