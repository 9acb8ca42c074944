"""Newtonian volume potential over a box-union domain.

The potential of a density h supported on the spatial domain K is

    v(x0) = -(1/4 pi) * integral_K h(x) / |x - x0| dx,

so that (in the interior, for Hoelder densities) ``laplacian v = h``.

Quadrature is midpoint over a cell decomposition of each box.  When the
evaluation point lies inside a cell the 1/r kernel is integrated exactly
over the equal-volume sphere centred at the evaluation point: a cell of
volume V contributes ``h(center) * (1/4 pi) * 2 pi R_c^2`` with
``R_c = (3 V / 4 pi)^(1/3)``.  First derivatives use the differentiated
kernel; over the singular cell the sphere average of the gradient kernel
vanishes by symmetry.
"""

from __future__ import annotations

import numpy as np

from .domain import Box, Domain
from .fields import laplacian


class PotentialQuadrature:
    """Midpoint cell decomposition of a box union for 1/r quadrature."""

    def __init__(self, domain: Domain, cells=(10, 10, 10)):
        if np.isscalar(cells):
            cells = (int(cells),) * 3
        centers, volumes = [], []
        self._box_info = []
        for box in domain.boxes:
            w = box.widths
            n = tuple(max(1, int(c)) for c in cells)
            axes = [
                box.lo[i] + (np.arange(n[i]) + 0.5) * w[i] / n[i]
                for i in range(3)
            ]
            g = np.meshgrid(*axes, indexing="ij")
            centers.append(np.stack([a.ravel() for a in g], axis=-1))
            vol = w[0] * w[1] * w[2] / (n[0] * n[1] * n[2])
            volumes.append(np.full(len(centers[-1]), vol))
            self._box_info.append((box, n))
        self.domain = domain
        self.centers = np.concatenate(centers)
        self.volumes = np.concatenate(volumes)
        # equal-volume sphere radius per cell, for the singular-cell rule
        self.radius_eq = np.cbrt(3.0 * self.volumes / (4.0 * np.pi))

    def cell_of(self, pts):
        """Index of the cell containing each point, -1 when outside."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.full(len(pts), -1, dtype=int)
        offset = 0
        for box, n in self._box_info:
            inside = box.contains(pts) & (out < 0)
            if np.any(inside):
                w = box.widths
                ijk = []
                for d in range(3):
                    i = np.floor(
                        (pts[inside, d] - box.lo[d]) / w[d] * n[d]
                    ).astype(int)
                    ijk.append(np.clip(i, 0, n[d] - 1))
                out[inside] = offset + (ijk[0] * n[1] + ijk[1]) * n[2] + ijk[2]
            offset += n[0] * n[1] * n[2]
        return out


def potential_matrix(quad: PotentialQuadrature, eval_points, deriv=(0, 0, 0)):
    """Dense quadrature matrix mapping cell densities to potential values.

    ``deriv`` selects the identity or one first derivative of the potential
    (total order <= 1).  Row e, column q holds the kernel weight so that
    ``values = matrix @ h(cell centers)``.
    """
    order = sum(deriv)
    if order > 1:
        raise ValueError(
            f"potential kernel supports derivative order <= 1, got {deriv}"
        )
    eval_points = np.atleast_2d(np.asarray(eval_points, dtype=float))
    diff = quad.centers[None, :, :] - eval_points[:, None, :]
    r = np.sqrt(np.sum(diff * diff, axis=-1))
    own = quad.cell_of(eval_points)
    rows = np.arange(len(eval_points))
    has_own = own >= 0
    # keep the kernel finite on the diagonal before overwriting it
    r_safe = r.copy()
    if np.any(has_own):
        r_safe[rows[has_own], own[has_own]] = np.inf
    c = -1.0 / (4.0 * np.pi)
    if order == 0:
        M = c * quad.volumes[None, :] / r_safe
        if np.any(has_own):
            R = quad.radius_eq[own[has_own]]
            M[rows[has_own], own[has_own]] = c * 2.0 * np.pi * R * R
    else:
        axis = deriv.index(1)
        M = c * quad.volumes[None, :] * diff[:, :, axis] / r_safe**3
        if np.any(has_own):
            M[rows[has_own], own[has_own]] = 0.0
    return M


def newtonian_potential(h, domain: Domain, t, eval_points,
                        cells=(10, 10, 10), deriv=(0, 0, 0)):
    """Evaluate the potential (or a first derivative) of a density field.

    Parameters
    ----------
    h : callable or ScalarField
        Density ``h(t, pts) -> (n,)``.
    t : float
        Time at which the density is sampled (a parameter of the kernel).
    eval_points : (n, 3) array
    """
    quad = PotentialQuadrature(domain, cells)
    M = potential_matrix(quad, eval_points, deriv=deriv)
    return M @ np.asarray(h(t, quad.centers), dtype=float)


def domain_capacity(domain: Domain, cells=(12, 12, 12), search=5):
    """The 1/r capacity ``max_x (1/4 pi) integral_K dx' / |x - x'|``.

    The maximum is taken over a ``search^3`` interior lattice per box plus
    every box center.  Unions made of many small boxes (lattice balls and
    the like) already give a dense center scan, so the per-box lattice is
    only added while the box count is small.  Returns (value, argmax_point).
    """
    quad = PotentialQuadrature(domain, cells)
    pts = [np.array([b.center for b in domain.boxes])]
    if len(domain.boxes) <= 64:
        for b in domain.boxes:
            axes = [np.linspace(b.lo[i], b.hi[i], search + 2)[1:-1]
                    for i in range(3)]
            g = np.meshgrid(*axes, indexing="ij")
            pts.append(np.stack([a.ravel() for a in g], axis=-1))
    pts = np.concatenate(pts)
    # chunk the scan: the dense eval-by-cell matrix for a fine union of
    # boxes would not fit in memory
    ones = np.ones(len(quad.centers))
    best_val, best_k = -np.inf, 0
    step = max(1, int(2e7) // max(1, len(quad.centers)))
    for start in range(0, len(pts), step):
        block = pts[start:start + step]
        # positive-kernel version of the quadrature matrix
        vals = -(potential_matrix(quad, block) @ ones)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val, best_k = float(vals[k]), start + k
    return best_val, pts[best_k]


def poisson_residual(v_values, h_values, grid):
    """Finite-difference residual ``laplacian v - h`` at interior points.

    ``v_values`` and ``h_values`` are (nt, n1, n2, n3) samples.  Returns
    (residual, sup) with the residual on the interior spatial slab.
    """
    lap = laplacian(v_values, grid.dx)
    res = (lap - h_values)[:, 1:-1, 1:-1, 1:-1]
    return res, float(np.max(np.abs(res)))


def ball_box_union(center, radius, n=24, T=1.0) -> Domain:
    """A ball approximated by a volume-matched union of lattice cubes.

    The cubes closest to the center are kept, as many as it takes to match
    the exact ball volume to within one cell.  Plain center-inclusion
    leaves a first-order staircase volume error whose sign flickers with
    ``n``; volume matching removes it, which the capacity oracle needs.
    Used by the potential oracles: the exact potential of the unit density
    on a ball is known in closed form.
    """
    c = np.asarray(center, dtype=float)
    h = 2.0 * radius / n
    pts = c[None, :] + (np.stack(np.meshgrid(*[np.arange(n + 2)] * 3,
                                             indexing="ij"),
                                 axis=-1).reshape(-1, 3) + 0.5) * h \
        - radius - h
    dist = np.linalg.norm(pts - c, axis=1)
    target = int(round(4.0 / 3.0 * np.pi * radius ** 3 / h ** 3))
    keep = np.argsort(dist)[:target]
    boxes = tuple(
        Box(tuple(p - h / 2), tuple(p + h / 2)) for p in pts[keep]
    )
    return Domain(boxes=boxes, T=T)
