"""Space-time domains, grids, and quadrature/grid specifications."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in space: lo[i] <= x_i <= hi[i]."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != 3 or len(hi) != 3:
            raise ValueError("box corners must be 3-dimensional")
        if any(h <= l for l, h in zip(lo, hi)):
            raise ValueError(f"degenerate box: lo={lo}, hi={hi}")

    @property
    def widths(self):
        return tuple(h - l for l, h in zip(self.lo, self.hi))

    @property
    def center(self):
        return tuple(0.5 * (l + h) for l, h in zip(self.lo, self.hi))

    @property
    def volume(self):
        w = self.widths
        return w[0] * w[1] * w[2]

    @property
    def diameter(self):
        return float(np.linalg.norm(self.widths))

    def contains(self, pts, pad=0.0):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        lo = np.array(self.lo) - pad
        hi = np.array(self.hi) + pad
        return np.all((pts >= lo) & (pts <= hi), axis=-1)

    def octants(self):
        """The eight congruent sub-boxes from bisecting every axis."""
        mid = self.center
        out = []
        for m in range(8):
            lo, hi = [], []
            for i in range(3):
                if (m >> i) & 1:
                    lo.append(mid[i]); hi.append(self.hi[i])
                else:
                    lo.append(self.lo[i]); hi.append(mid[i])
            out.append(Box(tuple(lo), tuple(hi)))
        return out

    def scaled(self, s, about=None):
        about = self.center if about is None else about
        lo = tuple(a + s * (l - a) for a, l in zip(about, self.lo))
        hi = tuple(a + s * (h - a) for a, h in zip(about, self.hi))
        return Box(lo, hi)


@dataclass(frozen=True)
class Domain:
    """A finite union of boxes together with a time horizon."""

    boxes: tuple
    T: float

    def __post_init__(self):
        boxes = tuple(self.boxes)
        object.__setattr__(self, "boxes", boxes)
        if not boxes:
            raise ValueError("domain needs at least one box")
        if self.T <= 0:
            raise ValueError(f"time horizon must be positive, got {self.T}")
        # Pairwise disjointness check; skipped for very large unions (the
        # lattice constructors guarantee disjoint cells).
        if len(boxes) <= 128:
            for i, a in enumerate(boxes):
                for b in boxes[i + 1:]:
                    if _boxes_overlap(a, b):
                        raise ValueError(
                            f"domain boxes overlap with positive volume: {a}, {b}"
                        )

    @classmethod
    def single(cls, lo, hi, T):
        return cls(boxes=(Box(lo, hi),), T=T)

    @property
    def volume(self):
        return sum(b.volume for b in self.boxes)

    @property
    def diameter4(self):
        """Diameter of the space-time set [0, T] x (box union)."""
        los = np.array([b.lo for b in self.boxes])
        his = np.array([b.hi for b in self.boxes])
        span = his.max(axis=0) - los.min(axis=0)
        return float(np.sqrt(self.T**2 + np.sum(span**2)))

    def contains_space(self, pts, pad=0.0):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        inside = np.zeros(len(pts), dtype=bool)
        for b in self.boxes:
            inside |= b.contains(pts, pad=pad)
        return inside

    def scaled(self, s):
        """Scale every box about the overall centroid (time kept fixed)."""
        los = np.array([b.lo for b in self.boxes])
        his = np.array([b.hi for b in self.boxes])
        about = tuple(0.5 * (los.min(axis=0) + his.max(axis=0)))
        return Domain(tuple(b.scaled(s, about=about) for b in self.boxes),
                      self.T)


def _boxes_overlap(a: Box, b: Box) -> bool:
    return all(a.lo[i] < b.hi[i] - 1e-14 and b.lo[i] < a.hi[i] - 1e-14
               for i in range(3))


@dataclass(frozen=True)
class GridSpec:
    """Resolution and quadrature orders for one solve.

    counts: points per axis (t, x1, x2, x3).
    cells: potential-quadrature cells per spatial axis (per box).
    hermite_order / legendre_order: heat quadrature orders.
    """

    counts: tuple = (9, 9, 9, 9)
    cells: tuple = (10, 10, 10)
    hermite_order: int = 10
    legendre_order: int = 16

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        cells = self.cells
        if np.isscalar(cells):
            cells = (int(cells),) * 3
        cells = tuple(int(c) for c in cells)
        object.__setattr__(self, "cells", cells)
        if len(counts) != 4 or any(c < 2 for c in counts):
            raise ValueError(f"grid counts need 4 axes with >= 2 points: {counts}")
        if len(cells) != 3 or any(c < 1 for c in cells):
            raise ValueError(f"need >= 1 quadrature cell per axis: {cells}")
        if self.hermite_order < 2 or self.legendre_order < 2:
            raise ValueError("quadrature orders must be at least 2")


class Grid:
    """Uniform tensor grid over [0, T] x box."""

    def __init__(self, box: Box, T: float, counts):
        if len(counts) != 4 or any(c < 2 for c in counts):
            raise ValueError(f"grid counts need 4 axes with >= 2 points: {counts}")
        self.box = box
        self.T = float(T)
        self.times = np.linspace(0.0, T, counts[0])
        self.axes = tuple(
            np.linspace(box.lo[i], box.hi[i], counts[1 + i]) for i in range(3)
        )
        self.shape = (counts[0],) + tuple(len(a) for a in self.axes)

    @property
    def dt(self):
        return self.times[1] - self.times[0]

    @property
    def dx(self):
        return tuple(a[1] - a[0] for a in self.axes)

    def spatial_points(self):
        """All spatial grid points as an (n1*n2*n3, 3) array (C order)."""
        g = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([a.ravel() for a in g], axis=-1)

    def spatial_shape(self):
        return self.shape[1:]


def make_grid(domain_or_box, T=None, counts=(9, 9, 9, 9)) -> Grid:
    if isinstance(domain_or_box, Domain):
        if len(domain_or_box.boxes) != 1:
            raise ValueError("a tensor grid covers exactly one box")
        return Grid(domain_or_box.boxes[0], domain_or_box.T, counts)
    return Grid(domain_or_box, T, counts)
