"""Flow-field assembly from the solution tables and residual validation.

The velocities and pressure are single table sums: u_j is the velocity
entry of the combined (forcing + product) table, p the pressure entry.
``ns_residual`` measures how well the assembled fields satisfy mass and
momentum balance with the same finite-difference stencils the tableau
validator uses; it is a diagnostic, never a gate.  Partitioned solves are
stitched by indicator sums with the piece boundaries left undefined (a
measure-zero set, reported as NaN markers).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import _boxes_overlap
from .fields import ScalarField

#: (table position of u1, u2, u3, p) in the combined tables
VELOCITY_POSITIONS = (7, 11, 15)
PRESSURE_POSITION = 16

_INTERIOR = (slice(1, -1),) * 4


@dataclass
class FlowFields:
    """Velocities and pressure over one space-time grid.

    ``mask`` is None for a single-domain solve; piecewise assemblies use
    :class:`PiecewiseFlowFields` instead.
    """

    grid: object
    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    p: np.ndarray
    mask: object = None

    def __post_init__(self):
        for name in ("u1", "u2", "u3", "p"):
            if getattr(self, name).shape != self.grid.shape:
                raise ValueError(f"{name} does not match the grid shape")

    def components(self):
        return {"u1": self.u1, "u2": self.u2, "u3": self.u3, "p": self.p}

    def evaluate(self, name, t, pts):
        """Multilinear evaluation of one component at arbitrary points."""
        f = ScalarField.from_grid(self.grid, self.components()[name])
        return f(t, pts)

    def sup_norms(self):
        return {k: float(np.max(np.abs(v))) for k, v in self.components().items()}


def reconstruct(w1, w2) -> FlowFields:
    """Assemble (u1, u2, u3, p) from the two solution tables."""
    if w1.grid is not w2.grid and w1.grid.shape != w2.grid.shape:
        raise ValueError("tables live on different grids")
    u = [w1.combined(w2, pos) for pos in VELOCITY_POSITIONS]
    p = w1.combined(w2, PRESSURE_POSITION)
    return FlowFields(grid=w1.grid, u1=u[0], u2=u[1], u3=u[2], p=p)


@dataclass
class ResidualReport:
    """Interior residual fields of the four balance equations."""

    continuity: np.ndarray
    momentum: tuple                    # three interior arrays
    sup: dict
    mean: dict

    def summary_lines(self):
        yield "residual summary (interior points, central differences)"
        for key in ("continuity", "momentum1", "momentum2", "momentum3"):
            yield (f"  {key}: sup={self.sup[key]:.6g} "
                   f"mean={self.mean[key]:.6g}")


def ns_residual(flow: FlowFields, forcing, mu, tau, grid=None) -> ResidualReport:
    """Mass/momentum residuals of assembled fields under given forcing.

    Uses second-order central differences on the grid interior (edge rows
    are dropped, matching the tableau validator's stencils).  ``forcing``
    is the three-component forcing; pass three zero fields for a free flow.
    """
    g = grid if grid is not None else flow.grid
    dt, dx = g.dt, g.dx
    u = (flow.u1, flow.u2, flow.u3)

    du = [[np.gradient(uc, (dt, *dx)[ax], axis=ax, edge_order=2)
           for ax in range(4)] for uc in u]
    dp = [np.gradient(flow.p, dx[k], axis=1 + k, edge_order=2)
          for k in range(3)]

    cont = du[0][1] + du[1][2] + du[2][3]

    pts = g.spatial_points()
    mom = []
    for j in range(3):
        # direct 3-point second differences: nesting two first-derivative
        # stencils would leak the one-sided edge formula one row inward
        # and cost an order there; the wrap-around rows land outside the
        # interior slice
        lap = sum(
            (np.roll(u[j], -1, axis=1 + k) - 2.0 * u[j]
             + np.roll(u[j], 1, axis=1 + k)) / dx[k] ** 2
            for k in range(3)
        )
        adv = sum(u[k] * du[j][1 + k] for k in range(3))
        F_j = np.stack([
            np.asarray(forcing[j](t, pts), dtype=float).reshape(g.spatial_shape())
            for t in g.times
        ])
        mom.append(du[j][0] - mu * lap + adv + tau * dp[j] - F_j)

    cont_i = cont[_INTERIOR]
    mom_i = tuple(m[_INTERIOR] for m in mom)
    keys = ("continuity", "momentum1", "momentum2", "momentum3")
    arrays = (cont_i,) + mom_i
    sup = {k: float(np.max(np.abs(a))) for k, a in zip(keys, arrays)}
    mean = {k: float(np.mean(np.abs(a))) for k, a in zip(keys, arrays)}
    return ResidualReport(continuity=cont_i, momentum=mom_i, sup=sup, mean=mean)


# ---------------------------------------------------------------------------
# Piecewise assembly
# ---------------------------------------------------------------------------

class PartitionError(ValueError):
    pass


@dataclass
class PiecewiseFlowFields:
    """Indicator-sum assembly of per-piece solves.

    Evaluation returns the owning piece's interpolated value strictly
    inside a piece, exactly 0 outside the union (the zero-extension
    convention), and NaN on the union of piece boundaries -- the
    measure-zero set on which the stitched solution is undefined.
    """

    pieces: list                      # [(Domain, FlowFields), ...]
    boundary_tol: float = 1e-10

    def __post_init__(self):
        boxes = [b for dom, _ in self.pieces for b in dom.boxes]
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                if _boxes_overlap(boxes[i], boxes[j]):
                    raise PartitionError(
                        "pieces have overlapping interiors")

    def _locate(self, pts):
        """Owner index per point; -1 outside, -2 on a piece boundary."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        owner = np.full(len(pts), -1, dtype=int)
        on_boundary = np.zeros(len(pts), dtype=bool)
        tol = self.boundary_tol
        for k, (dom, _) in enumerate(self.pieces):
            for box in dom.boxes:
                lo = np.array(box.lo)
                hi = np.array(box.hi)
                closure = np.all((pts >= lo - tol) & (pts <= hi + tol), axis=1)
                interior = np.all((pts > lo + tol) & (pts < hi - tol), axis=1)
                on_boundary |= closure & ~interior
                owner[interior] = k
        owner[on_boundary] = -2
        return owner

    def mask_indicator(self, pts):
        return self._locate(pts) == -2

    def evaluate(self, name, t, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        owner = self._locate(pts)
        out = np.zeros(len(pts))
        out[owner == -2] = np.nan
        for k, (_, flow) in enumerate(self.pieces):
            sel = owner == k
            if np.any(sel):
                out[sel] = flow.evaluate(name, t, pts[sel])
        return out


def assemble_global(pieces) -> PiecewiseFlowFields:
    """Stitch per-piece flow fields into one undefined-on-interfaces field."""
    if not pieces:
        raise PartitionError("no pieces to assemble")
    return PiecewiseFlowFields(pieces=list(pieces))
