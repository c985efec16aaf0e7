"""Connectivity of mobile ad hoc networks on a periodic triangular lattice.

Nodes perform an exclusion random walk on an ``L x L`` triangular lattice and
communicate with every node within hex distance ``z``.  The package measures
the global connectivity ``eta`` (largest-component fraction) against site
occupancy ``sigma``, fits the logistic connectivity law, performs the scaling
collapse across ranges and tabulates degree, clustering and degree-degree
correlations of the resulting networks.
"""

from .analysis import (CollapseResult, KnnLinearity, LogisticFit, check_knn_linearity,
                       collapse_objective, empirical_crossing, estimate_sigma_c, find_beta,
                       fit_logistic, sigma_at_level)
from .connectivity import (ComponentReport, components_burning, components_unionfind,
                           connectivity_sample)
from .dynamics import (Configuration, RngStream, load_sites, occupancy, random_placement,
                       save_sites, step, warm_up)
from .ensemble import (ConnectivityCurve, CurveFragment, CurvePoint, ExperimentPlan, merge,
                       run_connectivity_sweep, run_metrics)
from .errors import AdhocNetError
from .lattice import LatticeConfig, NeighborhoodTable, SiteCoord, hex_distance, neighborhood_offsets, wrap
from .netmetrics import (DegreeDistribution, MetricsTable, clustering_by_degree, cutoff_degree,
                         degree_sequence, knn_by_degree, mean_degree, pooled_distribution)

__version__ = "0.1.0"
