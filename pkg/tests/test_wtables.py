"""Velocity/pressure tables from forcing and from advection products.

Two closed-form families pin the sign structure independently of any
internal convention:

* divergence-free forcing: the table's velocity reduces exactly to the
  plain source-driven heat lift of each component, and the pressure
  vanishes;
* pure-gradient forcing F = grad(phi): the velocity vanishes identically
  and the pressure is phi / tau (advection products, entering the balance
  with the opposite sign, give -phi / tau).
"""

import numpy as np
import pytest

from nspicard import Domain, make_grid
from nspicard.fields import ScalarField
from nspicard.heat import HeatPropagator
from nspicard.wtables import (LIFT_MULTI_INDICES, PATTERN_POSITIONS,
                              PRESSURE_POSITION, SupportError, TableContext,
                              TIME_POSITIONS)

MU, TAU = 0.5, 1.25


def _bump(pts, radius=0.75, power=4):
    r2 = (np.atleast_2d(pts) ** 2).sum(axis=1) / radius ** 2
    out = np.zeros(len(np.atleast_2d(pts)))
    m = r2 < 1.0
    out[m] = (1.0 - r2[m]) ** power
    return out


def _bump_grad(pts, axis, radius=0.75, power=4):
    pts = np.atleast_2d(pts)
    r2 = (pts ** 2).sum(axis=1) / radius ** 2
    out = np.zeros(len(pts))
    m = r2 < 1.0
    out[m] = (-2.0 * power * pts[m, axis] / radius ** 2
              * (1.0 - r2[m]) ** (power - 1))
    return out


@pytest.fixture(scope="module")
def setup():
    dom = Domain.single((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0), T=0.2)
    grid = make_grid(dom, counts=(4, 11, 11, 11))
    ctx = TableContext(grid, dom, MU, TAU, cells=(10, 10, 10),
                       legendre_order=8, hermite_order=6)
    return dom, grid, ctx


def test_structure_tables():
    assert set(PATTERN_POSITIONS) == {1, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15}
    assert PRESSURE_POSITION == 16
    assert TIME_POSITIONS == (2, 3, 4)
    # six second-order and ten third-order spatial multi-indices
    assert len(LIFT_MULTI_INDICES) == 16
    assert all(2 <= sum(m) <= 3 for m in LIFT_MULTI_INDICES)
    assert len(set(LIFT_MULTI_INDICES)) == 16


def test_support_guard(setup):
    dom, grid, ctx = setup
    wide = ScalarField(lambda t, pts: np.ones(len(np.atleast_2d(pts))),
                       support=dom)
    zero = ScalarField.constant(0.0, support=dom)
    with pytest.raises(SupportError):
        ctx.check_support((wide, zero, zero))
    inside = ScalarField(lambda t, pts: _bump(pts), support=dom)
    ctx.check_support((inside, zero, zero))


def test_divergence_free_forcing_reduces_to_heat_lift(setup):
    dom, grid, ctx = setup
    # F = curl(0, 0, psi) = (d2 psi, -d1 psi, 0): exactly divergence-free
    F1 = ScalarField(lambda t, pts: _bump_grad(pts, 1), support=dom)
    F2 = ScalarField(lambda t, pts: -_bump_grad(pts, 0), support=dom)
    F3 = ScalarField.constant(0.0, support=dom)
    forcing = (F1, F2, F3)
    w1 = ctx.forcing_table(forcing)

    prop = HeatPropagator(MU, legendre_order=8, hermite_order=6)
    pts = grid.spatial_points()
    t = grid.times[-1]
    for pos, F in ((7, F1), (11, F2)):
        ref = prop.propagate_points(F, t, pts).reshape(grid.spatial_shape())
        got = w1.field(pos)[-1]
        assert np.abs(got - ref).max() < 0.15 * np.abs(ref).max()

    # u3 stays numerically silent and so does the pressure
    u_scale = np.abs(w1.field(7)).max()
    assert np.abs(w1.field(15)).max() < 0.05 * u_scale
    p_scale = np.abs(_bump(grid.spatial_points())).max() / TAU
    assert np.abs(w1.field(16)).max() < 0.05 * p_scale


def test_divergence_free_velocity_field(setup):
    dom, grid, ctx = setup
    F1 = ScalarField(lambda t, pts: _bump_grad(pts, 1), support=dom)
    F2 = ScalarField(lambda t, pts: -_bump_grad(pts, 0), support=dom)
    F3 = ScalarField.constant(0.0, support=dom)
    w1 = ctx.forcing_table((F1, F2, F3))
    div = sum(np.gradient(w1.field(pos), grid.dx[k], axis=1 + k,
                          edge_order=2)
              for k, pos in enumerate((7, 11, 15)))
    assert np.abs(div).max() < 0.1 * np.abs(w1.field(7)).max() / grid.dx[0]


def test_gradient_forcing_is_absorbed_by_pressure(setup):
    dom, grid, ctx = setup
    forcing = tuple(
        ScalarField(lambda t, pts, a=a: _bump_grad(pts, a), support=dom)
        for a in range(3))
    w1 = ctx.forcing_table(forcing)

    pts = grid.spatial_points()
    phi = _bump(pts).reshape(grid.spatial_shape())
    p_target = phi / TAU
    p_err = np.abs(w1.field(16)[-1] - p_target).max()
    # a sign error would read 2x the target scale; discretization sits
    # around eight percent here
    assert p_err < 0.12 * np.abs(p_target).max()

    # velocity scale that a sign error would produce: the heat lift of F1
    prop = HeatPropagator(MU, legendre_order=8, hermite_order=6)
    lift = prop.propagate_points(forcing[0], grid.times[-1], pts)
    u_scale = np.abs(lift).max()
    for pos in (7, 11, 15):
        assert np.abs(w1.field(pos)).max() < 0.08 * u_scale


def test_product_table_flips_the_gradient_sign(setup):
    dom, _, _ = setup
    # the gridded-product path converges about first order on this steep
    # bump (26% at 11^3, 9% at 19^3); a finer lattice keeps the check
    # meaningful while a sign error would still read as ~200%
    grid = make_grid(dom, counts=(4, 15, 15, 15))
    ctx = TableContext(grid, dom, MU, TAU, cells=(14, 14, 14),
                       legendre_order=8, hermite_order=6)
    pts = grid.spatial_points()
    nt = len(grid.times)
    grad = np.stack([
        np.broadcast_to(
            _bump_grad(pts, a).reshape(grid.spatial_shape()),
            (nt,) + grid.spatial_shape()).copy()
        for a in range(3)
    ])
    w2 = ctx.product_table(grad)
    phi = _bump(pts).reshape(grid.spatial_shape())
    p_target = -phi / TAU
    assert np.abs(w2.field(16)[-1] - p_target).max() < \
        0.2 * np.abs(phi).max() / TAU

    prop = HeatPropagator(MU, legendre_order=8, hermite_order=6)
    f0 = ScalarField(lambda t, q: _bump_grad(q, 0), support=dom)
    u_scale = np.abs(
        prop.propagate_points(f0, grid.times[-1], pts)).max()
    for pos in (7, 11, 15):
        assert np.abs(w2.field(pos)).max() < 0.08 * u_scale


def test_zero_products_give_zero_table(setup):
    dom, grid, ctx = setup
    zeros = np.zeros((3, len(grid.times)) + grid.spatial_shape())
    w2 = ctx.product_table(zeros)
    for pos in w2.positions:
        assert np.abs(w2.field(pos)).max() == 0.0


def test_lift_nine_zero_and_shape(setup):
    dom, grid, ctx = setup
    nine = np.zeros((9, len(grid.times)) + grid.spatial_shape())
    out = ctx.lift_nine(nine)
    assert out.shape == nine.shape
    assert np.abs(out).max() == 0.0


def test_verification_mode_adds_time_slots(setup):
    dom, grid, ctx = setup
    F1 = ScalarField(lambda t, pts: _bump(pts), support=dom)
    zero = ScalarField.constant(0.0, support=dom)
    plain = ctx.forcing_table((F1, zero, zero))
    full = ctx.forcing_table((F1, zero, zero), verification=True)
    for pos in TIME_POSITIONS:
        assert pos not in plain.positions
        assert pos in full.positions
    # the time slot should track a finite difference of the value slot
    fd = np.gradient(full.field(7), grid.dt, axis=0, edge_order=2)
    assert np.abs(full.field(2) - fd).max() < 1e-12


def test_combined_adds_fields(setup):
    dom, grid, ctx = setup
    F1 = ScalarField(lambda t, pts: _bump(pts), support=dom)
    zero = ScalarField.constant(0.0, support=dom)
    w1 = ctx.forcing_table((F1, zero, zero))
    nine = np.zeros((3, len(grid.times)) + grid.spatial_shape())
    w2 = ctx.product_table(nine)
    for pos in (7, 16):
        np.testing.assert_allclose(w1.combined(w2, pos),
                                   w1.field(pos), atol=0.0)
    assert w1.sup_norm() > 0.0
