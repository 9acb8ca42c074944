"""Scalar fields on the space-time box and finite-difference helpers.

Fields follow the indicator convention: evaluation outside the space-time
support returns exactly 0.  A field is backed either by an analytic closure
or by grid samples with multilinear interpolation.
"""

from __future__ import annotations

import numpy as np


class ScalarField:
    """Scalar function of (t, x) with zero extension outside its support.

    Parameters
    ----------
    fn : callable
        ``fn(t, pts) -> (n,)`` with ``t`` scalar and ``pts`` an (n, 3) array.
    support : Domain or None
        Spatial support (plus the [0, T] time window).  ``None`` disables
        truncation entirely (used by oracle fixtures that need a source on
        all of space).
    """

    def __init__(self, fn, support=None, name=""):
        self._fn = fn
        self.support = support
        self.name = name

    def __call__(self, t, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.support is None:
            return np.asarray(self._fn(t, pts), dtype=float)
        out = np.zeros(len(pts))
        if t < 0.0 or t > self.support.T:
            return out
        inside = self.support.contains_space(pts)
        if np.any(inside):
            out[inside] = self._fn(t, pts[inside])
        return out

    @classmethod
    def from_grid(cls, grid, values, support=None, name=""):
        """Multilinear interpolation of samples on a tensor grid."""
        values = np.asarray(values, dtype=float)
        if values.shape != grid.shape:
            raise ValueError(
                f"sample shape {values.shape} does not match grid {grid.shape}"
            )

        def fn(t, pts):
            vt = time_slice(grid.times, values, t)
            M = interpolation_matrix(grid.axes, pts)
            return M @ vt.ravel()

        f = cls(fn, support=support, name=name)
        f.grid = grid
        f.values = values
        return f

    @classmethod
    def constant(cls, c, support=None, name="const"):
        return cls(lambda t, pts: np.full(len(pts), float(c)),
                   support=support, name=name)


def time_slice(times, values, t):
    """Linear-in-time slice of (nt, ...) samples at an arbitrary time."""
    t = float(np.clip(t, times[0], times[-1]))
    j = int(np.clip(np.searchsorted(times, t) - 1, 0, len(times) - 2))
    dt = times[j + 1] - times[j]
    g = (t - times[j]) / dt
    return (1.0 - g) * values[j] + g * values[j + 1]


def interpolation_matrix(axes, pts):
    """Dense trilinear interpolation matrix from grid samples to points.

    Rows correspond to evaluation points, columns to raveled (C-order) grid
    samples.  Points outside the grid are clamped to the boundary (callers
    apply the support convention separately).
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    n = [len(a) for a in axes]
    idx, frac = [], []
    for d, a in enumerate(axes):
        h = a[1] - a[0]
        s = (pts[:, d] - a[0]) / h
        i = np.clip(np.floor(s).astype(int), 0, n[d] - 2)
        idx.append(i)
        frac.append(np.clip(s - i, 0.0, 1.0))
    M = np.zeros((len(pts), n[0] * n[1] * n[2]))
    rows = np.arange(len(pts))
    for c0 in (0, 1):
        w0 = frac[0] if c0 else 1.0 - frac[0]
        for c1 in (0, 1):
            w1 = frac[1] if c1 else 1.0 - frac[1]
            for c2 in (0, 1):
                w2 = frac[2] if c2 else 1.0 - frac[2]
                cols = ((idx[0] + c0) * n[1] + idx[1] + c1) * n[2] + idx[2] + c2
                M[rows, cols] += w0 * w1 * w2
    return M


# ---------------------------------------------------------------------------
# Finite-difference stencils (shared by every residual validator)
# ---------------------------------------------------------------------------

def first_diff(values, h, axis):
    """Second-order first derivative: central interior, one-sided at faces."""
    return np.gradient(values, h, axis=axis, edge_order=2)


def second_diff(values, h, axis):
    """Second-order second derivative along one axis.

    Central three-point stencil in the interior and the one-sided four-point
    stencil (2, -5, 4, -1)/h^2 at the two faces, itself second order.
    """
    v = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    if v.shape[0] < 4:
        raise ValueError("second-difference stencil needs >= 4 points")
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h**2
    out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h**2
    out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / h**2
    return np.moveaxis(out, 0, axis)


def laplacian(values, dx, spatial_axes=(1, 2, 3)):
    """Spatial Laplacian of grid samples via ``second_diff`` per axis."""
    out = np.zeros_like(np.asarray(values, dtype=float))
    for h, axis in zip(dx, spatial_axes):
        out += second_diff(values, h, axis)
    return out


class NineField:
    """Nine scalar components sampled on a common space-time grid."""

    def __init__(self, grid, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (9,) + grid.shape:
            raise ValueError(
                f"expected shape {(9,) + grid.shape}, got {values.shape}"
            )
        self.grid = grid
        self.values = values

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((9,) + grid.shape))

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    def component_sums(self):
        """The three momentum-grouped sums (1+2+3, 4+5+6, 7+8+9)."""
        v = self.values
        return (v[0] + v[1] + v[2], v[3] + v[4] + v[5], v[6] + v[7] + v[8])

    def copy(self):
        return NineField(self.grid, self.values.copy())
