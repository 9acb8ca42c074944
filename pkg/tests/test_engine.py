"""Fixed-point engine: the quadratic map, the iteration, the partition."""

import numpy as np
import pytest

from nspicard import Domain, make_grid
from nspicard.engine import (HolderBudget, apply_g, forcing_potentials,
                             g_parts, holder_estimate, lift_h2,
                             partition_domain, picard)
from nspicard.fields import NineField
from nspicard.presets import make_forcing
from nspicard.wtables import TableContext

MU, TAU = 0.7, 1.3


@pytest.fixture(scope="module")
def setup():
    dom = Domain.single((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0), T=0.5)
    grid = make_grid(dom, counts=(6, 9, 9, 9))
    ctx = TableContext(grid, dom, MU, TAU, cells=(8, 8, 8),
                       legendre_order=8, hermite_order=6)
    return dom, grid, ctx


def test_budget_validation():
    with pytest.raises(ValueError):
        HolderBudget(M=0.0, C=2.0, C1=0.5)
    with pytest.raises(ValueError):
        HolderBudget(M=1.0, C=2.0, C1=0.5, alpha=1.0)
    with pytest.raises(ValueError):
        HolderBudget(M=1.0, C=0.5, C1=0.5)   # needs C >= 2 C1
    HolderBudget(M=1.0, C=1.0, C1=0.0)


def test_zero_forcing_converges_immediately(setup):
    dom, grid, ctx = setup
    forcing = make_forcing("zero", dom)
    budget = HolderBudget(M=1.0, C=2.0, C1=0.5)
    h, trace = picard(forcing, ctx, budget, max_iter=10)
    assert trace.status == "converged"
    assert len(trace.records) == 1
    assert trace.records[0].delta == 0.0
    assert h.sup_norm() == 0.0


def test_quadratic_scaling_identity(setup):
    # g(2h) - 2 g(h) + S - 2 Q == 0 for the decomposition g = S + L + Q
    dom, grid, ctx = setup
    forcing = make_forcing("gaussian-bump", dom, amplitude=0.4)
    w1 = forcing_potentials(forcing, ctx)
    rng = np.random.default_rng(0)
    h = NineField(grid, rng.normal(
        scale=0.1, size=(9, len(grid.times)) + grid.spatial_shape()))
    h2 = NineField(grid, 2.0 * h.values)
    g1 = apply_g(h, w1, ctx)
    g2 = apply_g(h2, w1, ctx)
    S, L, Q = g_parts(h, w1, ctx)
    resid = g2.values - 2.0 * g1.values + S.values - 2.0 * Q.values
    scale = max(np.abs(g1.values).max(), 1.0)
    assert np.abs(resid).max() < 1e-8 * scale
    # and the decomposition itself reassembles the map
    total = S.values + L.values + Q.values
    assert np.abs(total - g1.values).max() < 1e-10 * scale


def test_holder_estimate_basics(setup):
    dom, grid, ctx = setup
    zero = NineField.zeros(grid)
    sup, hold = holder_estimate(zero, 0.5, np.random.default_rng(0))
    assert sup == 0.0 and hold == 0.0
    with pytest.raises(ValueError):
        holder_estimate(zero, 1.5, np.random.default_rng(0))
    with pytest.raises(ValueError):
        holder_estimate(zero, 0.5, np.random.default_rng(0), pairs=10)
    # deterministic for a fixed seed
    field = NineField(grid, np.random.default_rng(3).normal(
        size=(9, len(grid.times)) + grid.spatial_shape()))
    a = holder_estimate(field, 0.5, np.random.default_rng(11))
    b = holder_estimate(field, 0.5, np.random.default_rng(11))
    assert a == b
    assert a[0] > 0.0 and a[1] > 0.0


def test_geometric_contraction_at_moderate_amplitude(setup):
    dom, grid, ctx = setup
    forcing = make_forcing("gaussian-bump", dom, amplitude=100.0)
    budget = HolderBudget(M=500.0, C=1000.0, C1=250.0)
    w1 = forcing_potentials(forcing, ctx)
    h, trace = picard(forcing, ctx, budget, max_iter=30, w1=w1)
    assert trace.status == "converged"
    ratios = trace.ratios()
    assert len(ratios) >= 6
    tail = ratios[1:6]
    assert max(tail) < 1.0
    assert min(tail) > 0.05


def test_divergence_detector(setup):
    dom, grid, ctx = setup
    forcing = make_forcing("gaussian-bump", dom, amplitude=1000.0)
    budget = HolderBudget(M=500.0, C=1000.0, C1=250.0)
    h, trace = picard(forcing, ctx, budget, max_iter=30)
    assert trace.status == "diverged"
    assert len(trace.records) < 30
    deltas = trace.deltas
    assert deltas[-1] > deltas[-2] > deltas[-3]


def test_budget_violation_reported(setup):
    dom, grid, ctx = setup
    forcing = make_forcing("gaussian-bump", dom, amplitude=0.05)
    budget = HolderBudget(M=1e-9, C=1.0, C1=0.0)
    h, trace = picard(forcing, ctx, budget, max_iter=10)
    assert trace.status == "budget-violated"
    assert not trace.records[-1].in_omega


def test_lift_consistency(setup):
    dom, grid, ctx = setup
    rng = np.random.default_rng(5)
    h = NineField(grid, rng.normal(
        size=(9, len(grid.times)) + grid.spatial_shape()))
    lifted = lift_h2(h, ctx)
    assert lifted.shape == h.values.shape
    assert np.isfinite(lifted).all()


# ---------------------------------------------------------------------------
# domain partition
# ---------------------------------------------------------------------------

BUDGET = HolderBudget(M=1.0, C=2.0, C1=0.5)


def test_partition_splits_once_at_the_crossover():
    dom = Domain.single((-0.1, -0.1, -0.1), (0.1, 0.1, 0.1), T=0.1)
    res = partition_domain(dom, 0.1, 4.0, BUDGET, max_depth=3,
                           epsilon_trunc=0.1 / 3)
    assert res.ok
    assert res.depth_used == 1
    assert len(res.domain.boxes) == 8
    assert len(res.reports) == 8
    assert all(r.all_ok for r in res.reports)


def test_partition_keeps_passing_domain_whole():
    dom = Domain.single((-0.05, -0.05, -0.05), (0.05, 0.05, 0.05), T=0.1)
    res = partition_domain(dom, 0.1, 4.0, BUDGET, max_depth=3,
                           epsilon_trunc=0.1 / 3)
    assert res.ok
    assert res.depth_used == 0
    assert len(res.domain.boxes) == 1


def test_partition_reports_failure_at_zero_depth():
    dom = Domain.single((-0.1, -0.1, -0.1), (0.1, 0.1, 0.1), T=0.1)
    res = partition_domain(dom, 0.1, 4.0, BUDGET, max_depth=0,
                           epsilon_trunc=0.1 / 3)
    assert not res.ok
    assert res.worst is not None
    assert res.worst_margin() > 0.0
