"""
Degree, clustering and neighbour degree
=======================================

Only realizations where eta reaches the threshold are kept.  Their nodes
are pooled per degree k to give p(k), the clustering C(k) and the mean
neighbour degree knn(k).
"""

from adhocnet.analysis import check_knn_linearity
from adhocnet.ensemble import ExperimentPlan, run_metrics

# full occupation at z=2: every node has 18 neighbours and 81 of the
# 153 neighbour pairs are linked
t = run_metrics(ExperimentPlan(L=20, z_list=(2,), realizations=1), 1.0, 2)
print("full lattice:", t.distribution.p, t.clustering, t.knn)

# a connected network at z=2
plan = ExperimentPlan(L=60, z_list=(2,), realizations=30, seed=2008)
t = run_metrics(plan, 0.37, 2, eta_threshold=0.999)
print(f"accepted {t.realizations} of {t.attempts} realizations")
print(f"<k> = {t.mean_degree:.3f}  (3 z (z+1) sigma = {18 * 0.37:.3f})")
print("k_c =", t.k_c)
level, spread = t.clustering_plateau(4, t.k_c)
print(f"C(k) plateau {level:.3f}, largest deviation {spread:.3f}")
for k in range(2, t.k_c + 1, 3):
    print(f"  k={k:2d}: p={t.distribution.p.get(k, 0):.4f}  C={t.clustering.get(k, float('nan')):.3f}"
          f"  knn={t.knn.get(k, float('nan')):.2f}")
fit = check_knn_linearity(t)
print(f"knn(k) ~ {fit.b:.2f} + {fit.slope:.3f} k  (r2 = {fit.r_squared:.4f})")
