import numpy as np
import pytest

from adhocnet.connectivity import components_burning
from adhocnet.ensemble import (CurveFragment, ExperimentPlan, connectivity_fragment, merge,
                               realization, run_connectivity_sweep, run_metrics,
                               transition_grid)
from adhocnet.errors import InfeasibleError, InvalidPlanError, MergeConflictError
from adhocnet.netmetrics import MetricsTable, node_metrics
from oracles import reachability_components


def test_plan_validation():
    with pytest.raises(InvalidPlanError):
        ExperimentPlan(L=8, z_list=(4,))
    with pytest.raises(InvalidPlanError):
        ExperimentPlan(sigma_grid=(0.2, 0.1))
    with pytest.raises(InvalidPlanError):
        ExperimentPlan(sigma_grid=(0.0, 0.1))
    with pytest.raises(InvalidPlanError):
        ExperimentPlan(realizations=0)
    with pytest.raises(InvalidPlanError):
        ExperimentPlan(mode="sometimes")
    assert ExperimentPlan(L=30).warmup == 30
    assert ExperimentPlan(L=30, warmup_steps=0).warmup == 0


def test_full_lattice_curve():
    plan = ExperimentPlan(L=12, z_list=(1, 3), sigma_grid=(1.0,), realizations=5)
    for curve in run_connectivity_sweep(plan, workers=1):
        (pt,) = curve.points
        assert pt.eta_mean == 1.0 and pt.eta_stderr == 0.0 and pt.realizations == 5
        assert pt.p_global == 1.0


def test_ensemble_matches_oracle(bfs12):
    plan = ExperimentPlan(L=12, z_list=(2,), sigma_grid=(0.05,), realizations=200, seed=3)
    pt = connectivity_fragment(plan, 2, 0.05, workers=1).point()
    fractions = []
    for r in range(200):
        config = realization(12, 2, 0.05, 3, r, plan.warmup)
        sizes = reachability_components(config.positions, 12, 2, bfs12)
        fractions.append(1.0 if config.n0 <= 1 else sizes[0] / config.n0)
    assert pt.realizations == 200
    assert pt.eta_mean == pytest.approx(np.mean(fractions), abs=1e-15)


def test_block_merge_equals_monolithic():
    plan = ExperimentPlan(L=20, z_list=(2,), realizations=300, seed=9)
    whole = connectivity_fragment(plan, 2, 0.15, workers=1)
    blocks = [connectivity_fragment(plan, 2, 0.15, range(i, i + 75), workers=1)
              for i in range(0, 300, 75)]
    assert merge(blocks).point() == whole.point()
    assert merge(blocks[::-1]).point() == whole.point()
    a, b = blocks[0], blocks[1]
    assert merge([a, b]).point() == merge([b, a]).point()
    empty = CurveFragment(2, 0.15, 20)
    assert merge([a, empty]).samples == a.samples


def test_merge_conflicts():
    a = CurveFragment(2, 0.1, 20, {0: (3, 5)})
    with pytest.raises(MergeConflictError):
        merge([a, CurveFragment(3, 0.1, 20)])
    with pytest.raises(MergeConflictError):
        merge([a, CurveFragment(2, 0.1, 20, {0: (4, 5)})])
    with pytest.raises(MergeConflictError):
        merge([a, MetricsTable(2, 0.1, 20)])
    with pytest.raises(MergeConflictError):
        merge([])


def test_metrics_table_merge_is_order_free():
    plan = ExperimentPlan(L=20, z_list=(2,), realizations=6, seed=1)
    t = run_metrics(plan, 0.4, 2, eta_threshold=0.0, workers=1)
    parts = []
    for r in range(6):
        p = MetricsTable(2, 0.4, 20, threshold=0.0, realizations=1, attempts=1)
        p.add_nodes(*node_metrics(realization(20, 2, 0.4, 1, r, plan.warmup)))
        parts.append(p)
    fwd, back = merge(parts), merge(parts[::-1])
    assert np.array_equal(fwd.counts, t.counts) and np.array_equal(back.counts, t.counts)
    assert np.array_equal(fwd.closed, back.closed) and np.array_equal(fwd.nbr_deg, back.nbr_deg)
    assert fwd.clustering == back.clustering == t.clustering
    with pytest.raises(MergeConflictError):
        merge([t, MetricsTable(2, 0.4, 20, threshold=0.5)])


def test_worker_count_does_not_change_results():
    plan = ExperimentPlan(L=24, z_list=(2,), sigma_grid=(0.1, 0.2), realizations=24, seed=5)
    one = run_connectivity_sweep(plan, workers=1)
    two = run_connectivity_sweep(plan, workers=2)
    assert one == two
    m1 = run_metrics(plan, 0.3, 2, eta_threshold=0.9, workers=1)
    m2 = run_metrics(plan, 0.3, 2, eta_threshold=0.9, workers=2)
    assert np.array_equal(m1.counts, m2.counts) and m1.attempts == m2.attempts


def test_metrics_full_lattice():
    plan = ExperimentPlan(L=10, z_list=(2,), realizations=3)
    t = run_metrics(plan, 1.0, 2, workers=1)
    assert t.distribution.p == {18: 1.0}
    assert t.clustering == {18: 81 / 153}
    assert t.knn == {18: 18.0}
    assert t.acceptance_rate == 1.0


def test_metrics_without_filter():
    plan = ExperimentPlan(L=20, z_list=(1,), realizations=10)
    t = run_metrics(plan, 0.05, 1, eta_threshold=0.0, workers=1)
    assert t.acceptance_rate == 1.0 and t.attempts == 10


def test_metrics_infeasible():
    plan = ExperimentPlan(L=20, z_list=(1,), realizations=2)
    with pytest.raises(InfeasibleError) as err:
        run_metrics(plan, 0.02, 1, eta_threshold=1.0, workers=1)
    assert "acceptance rate" in str(err.value)
    assert err.value.acceptance_rate < 0.01


def test_metrics_threshold_range():
    with pytest.raises(InvalidPlanError):
        run_metrics(ExperimentPlan(L=10, z_list=(1,)), 0.5, 1, eta_threshold=1.5)


def test_trajectory_mode_is_deterministic():
    plan = ExperimentPlan(L=20, z_list=(2,), sigma_grid=(0.15,), realizations=30,
                          mode="trajectory", trajectory_stride=2, seed=4)
    a = run_connectivity_sweep(plan, workers=1)
    assert a == run_connectivity_sweep(plan, workers=1)
    assert 0.0 <= a[0].points[0].eta_mean <= 1.0
    t = run_metrics(plan, 0.5, 2, eta_threshold=0.9, workers=1)
    assert t.realizations == 30


def test_transition_grid_brackets_transition():
    plan = ExperimentPlan(L=40, z_list=(2,), realizations=20, coarse_realizations=10, seed=2)
    grid = transition_grid(plan, 2, workers=1)
    assert list(grid) == sorted(set(grid))
    n0 = [round(s * 1600) for s in grid]
    assert len(set(n0)) == len(n0)
    lo = connectivity_fragment(plan, 2, grid[0], workers=1).point().eta_mean
    hi = connectivity_fragment(plan, 2, grid[-1], workers=1).point().eta_mean
    assert lo < 0.2 and hi > 0.95


def test_monotone_and_range_ordered():
    grid = tuple(np.round(np.geomspace(0.03, 0.5, 12), 5))
    plan = ExperimentPlan(L=40, z_list=(2, 3), sigma_grid=grid, realizations=60, seed=11)
    c2, c3 = run_connectivity_sweep(plan, workers=1)
    for c in (c2, c3):
        assert np.all((c.eta >= 0) & (c.eta <= 1)) and np.all(c.stderr >= 0)
        tol = 2 * np.hypot(c.stderr[1:], c.stderr[:-1])
        assert np.all(np.diff(c.eta) >= -tol)
    assert np.all(c3.eta >= c2.eta - 2 * np.hypot(c2.stderr, c3.stderr))


def test_realization_matches_components_directly():
    config = realization(16, 2, 0.2, 0, 7)
    again = realization(16, 2, 0.2, 0, 7)
    assert np.array_equal(config.positions, again.positions)
    assert components_burning(config).sizes == components_burning(again).sizes
