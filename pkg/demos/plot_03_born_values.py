"""
Truth values after an ideal measurement
=======================================

A ready observer measures a system in the state sum_k c_k |s_k>.  From the
ready perspective, the truth value of "I will see outcome k" is |c_k|^2.
"""

# %%
import math

from relstate import IdealMeasurementModel, Perspective, consistency_defect, future_truth_table

im = IdealMeasurementModel((math.sqrt(0.25), math.sqrt(0.75)), T=1.0)
ready = Perspective(im.factorization, N=0, t0=0.0)

# %%
# Halfway through the interaction, the ready record still carries weight.
# After T the record is complete and the values are the squared amplitudes.
for t in (0.25, 0.5, 1.0):
    table = future_truth_table(im.initial_state(), im.hamiltonian, ready, t)
    defect = consistency_defect(im.initial_state(), im.hamiltonian, ready, t)
    print(f"t={t:4.2f}  " + "  ".join(f"m={m}: {v:.6f}" for m, v in table) + f"  defect={defect:.1e}")
