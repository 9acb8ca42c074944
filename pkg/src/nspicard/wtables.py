"""Derivative tables of the two lifted solution parts.

The frequency-domain solution splits into a forcing part and a product
part; inverting both through the double lift (Newtonian potential, then
heat propagation) expresses every velocity component and its first
derivatives as second/third derivative combinations of three lifted scalar
fields.  The combination is one fixed pattern

    P_k(G) = d_k div G - lap G_k
           = sum_{m != k} (d_k d_m G_m - d_m^2 G_k)

applied with opposite signs to the two parts:

* W1 (forcing): entries are ``-P`` of the heat-lifted forcing potentials,
* W2 (products): entries are ``+P`` of the heat-lifted group potentials,

matching the opposite signs with which forcing and advection enter the
momentum balance.  The pressure entry needs no heat lift at all: it is
``(+/-)(1/tau) div`` of the underlying Newtonian potentials.

Table positions follow the sixteen-component carrier: velocities at
7/11/15, their x-derivatives at 1, 5, 6, 8, 9, 10, 12, 13, 14, pressure at
16.  The time-derivative positions 2, 3, 4 are never consumed by the
iteration map or the reconstruction; they are filled by finite differences
in time only when a verification table is requested.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import interpolation_matrix, time_slice
from .heat import GridHeatContext
from .potential import PotentialQuadrature, potential_matrix

#: position -> (pattern component, extra derivative applied to the pattern)
PATTERN_POSITIONS = {
    1: (1, (1, 0, 0)),
    5: (1, (0, 1, 0)), 6: (1, (0, 0, 1)), 7: (1, (0, 0, 0)),
    8: (2, (1, 0, 0)), 9: (2, (0, 1, 0)), 10: (2, (0, 0, 1)), 11: (2, (0, 0, 0)),
    12: (3, (1, 0, 0)), 13: (3, (0, 1, 0)), 14: (3, (0, 0, 1)), 15: (3, (0, 0, 0)),
}

PRESSURE_POSITION = 16
TIME_POSITIONS = (2, 3, 4)

#: all lift derivatives any pattern entry can consume (orders 2 and 3)
LIFT_MULTI_INDICES = tuple(
    (a1, a2, a3)
    for a1 in range(4) for a2 in range(4) for a3 in range(4)
    if sum((a1, a2, a3)) in (2, 3)
)


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _unit(k):
    e = [0, 0, 0]
    e[k - 1] = 1
    return tuple(e)


def pattern_terms(pos):
    """Signed lift-derivative terms of one table position.

    Returns a list of (component 1..3, multi-index, coefficient) whose sum
    over the lifted fields gives the +P convention entry at ``pos``.
    """
    k, extra = PATTERN_POSITIONS[pos]
    terms = []
    for m in (1, 2, 3):
        if m == k:
            continue
        terms.append((m, _add(extra, _add(_unit(k), _unit(m))), 1.0))
        terms.append((k, _add(extra, _add(_unit(m), _unit(m))), -1.0))
    return terms


@dataclass
class WTable:
    """One assembled table: position -> field over the space-time grid."""

    grid: object
    entries: dict
    sign: float
    label: str

    def field(self, pos):
        return self.entries[pos]

    @property
    def positions(self):
        return sorted(self.entries)

    def sup_norm(self):
        return max(float(np.max(np.abs(v))) for v in self.entries.values())

    def combined(self, other, pos):
        return self.entries[pos] + other.entries[pos]


class W1Table(WTable):
    """Forcing-derived table (the iteration-independent part)."""


class W2Table(WTable):
    """Product-derived table (rebuilt every iteration)."""


class SupportError(ValueError):
    """Raised when data claimed compactly supported is nonzero on the edge."""


class TableContext:
    """Shared quadrature state for building tables on one grid/domain pair.

    Holds the potential quadrature (cell centers, kernel matrices for value
    and gradient at the grid points), the interpolation matrix from grid
    samples to cell centers, and the cached heat-smear machinery.  Building
    it is the expensive step; both tables and every Picard iteration reuse
    one instance.
    """

    def __init__(self, grid, domain, mu, tau, cells=(10, 10, 10),
                 legendre_order=16, hermite_order=10):
        self.grid = grid
        self.domain = domain
        self.mu = float(mu)
        self.tau = float(tau)
        self.quad = PotentialQuadrature(domain, cells)
        pts = grid.spatial_points()
        self.kernel_val = potential_matrix(self.quad, pts, (0, 0, 0))
        self.kernel_grad = [
            potential_matrix(self.quad, pts, d)
            for d in ((1, 0, 0), (0, 1, 0), (0, 0, 1))
        ]
        self.to_centers = interpolation_matrix(grid.axes, self.quad.centers)
        self.heat = GridHeatContext(grid, mu, legendre_order, hermite_order)

    # -- density plumbing ------------------------------------------------
    def _grid_potential(self, center_values):
        return (self.kernel_val @ center_values).reshape(
            self.grid.spatial_shape())

    def check_support(self, forcing, rtol=1e-8):
        """Reject forcing that does not vanish on the spatial boundary."""
        pts = self.grid.spatial_points()
        shape = self.grid.spatial_shape()
        mask = np.zeros(shape, dtype=bool)
        for ax in range(3):
            idx = [slice(None)] * 3
            for edge in (0, -1):
                idx[ax] = edge
                mask[tuple(idx)] = True
        mask = mask.ravel()
        for t in self.grid.times[:: max(1, len(self.grid.times) // 4)]:
            for Fc in forcing:
                vals = np.asarray(Fc(t, pts), dtype=float)
                scale = max(1.0, float(np.max(np.abs(vals))))
                worst = float(np.max(np.abs(vals[mask])))
                if worst > rtol * scale:
                    raise SupportError(
                        f"forcing reaches {worst:.3g} on the spatial "
                        "boundary; compact support is required"
                    )

    # -- table assembly --------------------------------------------------
    def _assemble(self, potential_at, pot_div_at_output, sign, label, cls,
                  verification=False):
        """Build one table.

        ``potential_at(c, tau)`` returns the c-th (1-based) underlying
        potential sampled on the spatial grid at time ``tau``;
        ``pot_div_at_output(i)`` the divergence of the potential triple at
        output time index i.  ``sign`` is the pattern sign (+1 or -1).
        """
        g = self.grid
        nt = g.shape[0]
        entries = {
            pos: np.zeros(g.shape) for pos in PATTERN_POSITIONS
        }
        entries[PRESSURE_POSITION] = np.zeros(g.shape)
        for i, t in enumerate(g.times):
            derivs = {
                c: self.heat.derivatives_at_time(
                    t, lambda tau, c=c: potential_at(c, tau),
                    LIFT_MULTI_INDICES)
                for c in (1, 2, 3)
            }
            for pos in PATTERN_POSITIONS:
                acc = entries[pos][i]
                for c, multi, coeff in pattern_terms(pos):
                    acc += (sign * coeff) * derivs[c][multi]
            entries[PRESSURE_POSITION][i] = (
                (-sign / self.tau) * pot_div_at_output(i))
        if verification:
            for pos, vel in zip(TIME_POSITIONS, (7, 11, 15)):
                entries[pos] = np.gradient(
                    entries[vel], g.dt, axis=0, edge_order=2)
        return cls(grid=g, entries=entries, sign=sign, label=label)

    def forcing_table(self, forcing, verification=False):
        """W1 from three forcing component fields (closures)."""
        self.check_support(forcing)
        centers = self.quad.centers

        def potential_at(c, tau):
            return self._grid_potential(
                np.asarray(forcing[c - 1](tau, centers), dtype=float))

        def pot_div(i):
            t = self.grid.times[i]
            out = np.zeros(self.grid.spatial_shape())
            for c in (1, 2, 3):
                dens = np.asarray(forcing[c - 1](t, centers), dtype=float)
                out += (self.kernel_grad[c - 1] @ dens).reshape(out.shape)
            return out

        return self._assemble(potential_at, pot_div, sign=-1.0,
                              label="forcing", cls=W1Table,
                              verification=verification)

    def product_table(self, group_values, verification=False):
        """W2 from the three momentum-group sums of the product fields.

        ``group_values`` has shape (3, nt, n1, n2, n3): per group, grid
        samples over the output times (linearly interpolated to quadrature
        times).
        """
        group_values = np.asarray(group_values, dtype=float)
        if group_values.shape != (3,) + self.grid.shape:
            raise ValueError("group fields must match the grid")
        times = self.grid.times

        def density_at_centers(c, tau):
            sl = time_slice(times, group_values[c - 1], tau)
            return self.to_centers @ sl.ravel()

        def potential_at(c, tau):
            return self._grid_potential(density_at_centers(c, tau))

        def pot_div(i):
            out = np.zeros(self.grid.spatial_shape())
            for c in (1, 2, 3):
                dens = self.to_centers @ group_values[c - 1, i].ravel()
                out += (self.kernel_grad[c - 1] @ dens).reshape(out.shape)
            return out

        return self._assemble(potential_at, pot_div, sign=+1.0,
                              label="products", cls=W2Table,
                              verification=verification)

    def lift_nine(self, nine_values):
        """The nine heat-of-potential lifts themselves (no derivatives).

        Used by diagnostics and the lift-norm checks; the table assembly
        works with the three group sums instead (the lift is linear).
        """
        nine_values = np.asarray(nine_values, dtype=float)
        out = np.zeros_like(nine_values)
        times = self.grid.times
        for j in range(9):
            def potential_at(tau, j=j):
                sl = time_slice(times, nine_values[j], tau)
                return self._grid_potential(self.to_centers @ sl.ravel())
            for i, t in enumerate(times):
                out[j, i] = self.heat.derivatives_at_time(
                    t, potential_at, [(0, 0, 0)])[(0, 0, 0)]
        return out
