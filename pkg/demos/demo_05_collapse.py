"""
Collapsing curves for different ranges
======================================

With R = z - 1, plotting eta against R**beta * ln(sigma) puts the curves
for all ranges on top of the z=2 curve for a suitable beta.
"""

import numpy as np

from adhocnet.analysis import collapse_objective, find_beta
from adhocnet.ensemble import ExperimentPlan, run_connectivity_sweep

plan = ExperimentPlan(L=50, z_list=(2, 3, 4, 5), realizations=40, seed=2008)
curves = run_connectivity_sweep(plan)

res = find_beta(curves)
print(f"beta = {res.beta:.3f}, mean squared mismatch {res.residual:.2e}")

# the objective over part of the scan grid
for beta in np.arange(-1.0, 0.01, 0.25):
    print(f"  beta={beta:+.2f}: {collapse_objective(beta, curves):.2e}")

# the alternative coordinate ln(R**beta sigma) shifts curves instead of scaling
alt = find_beta(curves, interval=(-1.5, 2.0), variable="shift")
print(f"shift variable: beta = {alt.beta:.3f}, mismatch {alt.residual:.2e}")
