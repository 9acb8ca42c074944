"""The iteration map over the nine advection products and its bookkeeping.

One application of the map: lift the current products through Newtonian
potential and heat propagation, assemble the product-side derivative table,
add it to the precomputed forcing-side table, and multiply the paired
entries -- each product field is (velocity entry) * (velocity-gradient
entry).  Iterating from zero yields the forcing-only seed first, then the
fixed point by contraction when the domain is small enough.

The map is affine-quadratic in the products: g(h) = S + L(h) + Q(h, h)
with S the forcing-only seed, L the cross terms and Q the pure product
part; ``g_parts`` exposes the decomposition for audits.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

import numpy as np

from .bounds import bound_constants, smallness_check
from .domain import Domain
from .fields import NineField
from .wtables import TableContext, W1Table

#: product index j -> table position of the left (velocity) factor
LEFT_INDEX = {1: 7, 2: 11, 3: 15, 4: 7, 5: 11, 6: 15, 7: 7, 8: 11, 9: 15}
#: product index j -> table position of the right (gradient) factor
RIGHT_INDEX = {1: 1, 2: 5, 3: 6, 4: 8, 5: 9, 6: 10, 7: 12, 8: 13, 9: 14}


@dataclass(frozen=True)
class HolderBudget:
    """Ball radii of the iteration space: sup norm M, Hölder constant C.

    ``C1`` is the Hölder constant granted to the forcing-only seed and
    ``alpha`` the Hölder exponent.  The closing argument needs C >= 2 C1.
    """

    M: float
    C: float
    C1: float
    alpha: float = 0.5

    def __post_init__(self):
        if self.M <= 0:
            raise ValueError("sup-norm budget M must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.C1 < 0 or self.C < 2.0 * self.C1:
            raise ValueError("need C >= 2*C1 >= 0")


# ---------------------------------------------------------------------------
# The map
# ---------------------------------------------------------------------------

def forcing_potentials(forcing, context: TableContext, verification=False):
    """Forcing-side table (potential lift, heat lift, derivative pattern)."""
    return context.forcing_table(forcing, verification=verification)


def lift_h2(h1: NineField, context: TableContext):
    """The nine heat-of-potential lifts of the product fields."""
    return context.lift_nine(h1.values)


def apply_g(h1: NineField, w1: W1Table, context: TableContext) -> NineField:
    """One application of the iteration map."""
    w2 = context.product_table(h1.component_sums())
    out = np.empty_like(h1.values)
    for j in range(1, 10):
        out[j - 1] = (w1.combined(w2, LEFT_INDEX[j])
                      * w1.combined(w2, RIGHT_INDEX[j]))
    return NineField(h1.grid, out)


def g_parts(h1: NineField, w1: W1Table, context: TableContext):
    """Decomposition g(h) = S + L(h) + Q(h,h) as three NineFields."""
    w2 = context.product_table(h1.component_sums())
    S = np.empty_like(h1.values)
    L = np.empty_like(h1.values)
    Q = np.empty_like(h1.values)
    for j in range(1, 10):
        l, r = LEFT_INDEX[j], RIGHT_INDEX[j]
        S[j - 1] = w1.field(l) * w1.field(r)
        L[j - 1] = w1.field(l) * w2.field(r) + w2.field(l) * w1.field(r)
        Q[j - 1] = w2.field(l) * w2.field(r)
    g = h1.grid
    return NineField(g, S), NineField(g, L), NineField(g, Q)


# ---------------------------------------------------------------------------
# Hölder sampling
# ---------------------------------------------------------------------------

def holder_estimate(h1: NineField, alpha, rng, pairs=200):
    """Empirical (sup norm, Hölder constant) over sampled point pairs.

    Pairs are drawn uniformly from the grid sample points; the distance is
    Euclidean in space-time.  With >= 100 pairs this tracks the true
    constant of smooth fields to sampling accuracy.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if pairs < 100:
        raise ValueError("need at least 100 sample pairs")
    g = h1.grid
    vals = h1.values
    sup = float(np.max(np.abs(vals)))

    nt, n1, n2, n3 = g.shape
    idx = np.stack([
        rng.integers(0, n, size=2 * pairs)
        for n in (nt, n1, n2, n3)
    ], axis=-1)
    a, b = idx[:pairs], idx[pairs:]
    same = np.all(a == b, axis=1)
    b[same, 0] = (b[same, 0] + 1) % nt

    coords = [g.times, g.axes[0], g.axes[1], g.axes[2]]
    pa = np.stack([coords[k][a[:, k]] for k in range(4)], axis=-1)
    pb = np.stack([coords[k][b[:, k]] for k in range(4)], axis=-1)
    dist = np.linalg.norm(pa - pb, axis=-1)

    va = vals[:, a[:, 0], a[:, 1], a[:, 2], a[:, 3]]
    vb = vals[:, b[:, 0], b[:, 1], b[:, 2], b[:, 3]]
    num = np.max(np.abs(va - vb), axis=0)
    holder = float(np.max(num / dist ** alpha))
    return sup, holder


# ---------------------------------------------------------------------------
# Picard iteration
# ---------------------------------------------------------------------------

@dataclass
class IterationRecord:
    index: int
    delta: float
    sup: float
    holder: float
    in_omega: bool
    elapsed: float


@dataclass
class IterationTrace:
    """Per-iteration history and the terminal status of one Picard run.

    status is one of "converged", "max-iterations", "budget-violated",
    "diverged".
    """

    records: list = field(default_factory=list)
    status: str = "max-iterations"
    tol: float = 1e-8

    @property
    def deltas(self):
        return np.array([r.delta for r in self.records])

    def ratios(self):
        d = self.deltas
        with np.errstate(divide="ignore", invalid="ignore"):
            r = d[1:] / d[:-1]
        return r[np.isfinite(r) & (d[:-1] > 0)]

    def final_sup(self):
        return self.records[-1].sup if self.records else 0.0


def picard(forcing, context: TableContext, budget: HolderBudget,
           tol=1e-8, max_iter=50, rng=None, w1=None):
    """Iterate the map from the zero seed until the sup-norm delta settles.

    Returns (fixed-point candidate, trace).  Divergence -- three
    consecutive growing deltas -- terminates with status "diverged" rather
    than failing silently.  A converged run whose final iterate exceeds the
    budget reports "budget-violated".
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if w1 is None:
        w1 = forcing_potentials(forcing, context)
    trace = IterationTrace(tol=tol)
    h = NineField.zeros(context.grid)
    start = _time.perf_counter()
    growth = 0
    prev_delta = None
    for n in range(1, max_iter + 1):
        h_next = apply_g(h, w1, context)
        delta = float(np.max(np.abs(h_next.values - h.values)))
        sup, holder = holder_estimate(h_next, budget.alpha, rng)
        in_omega = bool(sup <= budget.M and holder <= budget.C)
        trace.records.append(IterationRecord(
            index=n, delta=delta, sup=sup, holder=holder,
            in_omega=in_omega, elapsed=_time.perf_counter() - start))
        h = h_next
        if delta < tol:
            trace.status = "converged" if in_omega else "budget-violated"
            return h, trace
        if prev_delta is not None and delta > prev_delta:
            growth += 1
            if growth >= 3:
                trace.status = "diverged"
                return h, trace
        else:
            growth = 0
        prev_delta = delta
    trace.status = "max-iterations"
    return h, trace


# ---------------------------------------------------------------------------
# Domain partition
# ---------------------------------------------------------------------------

@dataclass
class PartitionResult:
    domain: Domain
    reports: list            # per-piece SmallnessReport
    ok: bool
    depth_used: int
    worst: object = None     # failing report at max depth, if any

    def worst_margin(self):
        if self.worst is None:
            return None
        return self.worst.contraction_lhs


def partition_domain(domain: Domain, T, mu, budget: HolderBudget,
                     max_depth=4, epsilon_trunc=None,
                     capacity_cells=(8, 8, 8)):
    """Bisect boxes into octants until every piece passes the smallness check.

    Axis-aligned boxes satisfy the exterior ball condition at every
    boundary point, so every produced piece does too.  When ``max_depth``
    is exhausted the result carries ok=False and the worst failing report.
    """
    pieces, reports = [], []
    worst = None
    depth_used = 0
    ok = True
    queue = [(box, 0) for box in domain.boxes]
    while queue:
        box, depth = queue.pop()
        piece = Domain.single(box.lo, box.hi, T)
        consts = bound_constants(piece, T, mu, budget.alpha, budget.M,
                                 epsilon_trunc=epsilon_trunc,
                                 capacity_cells=capacity_cells)
        rep = smallness_check(consts, budget)
        depth_used = max(depth_used, depth)
        if rep.all_ok:
            pieces.append(box)
            reports.append(rep)
        elif depth < max_depth:
            queue.extend((sub, depth + 1) for sub in box.octants())
        else:
            ok = False
            pieces.append(box)
            reports.append(rep)
            if worst is None or rep.contraction_lhs > worst.contraction_lhs:
                worst = rep
    return PartitionResult(
        domain=Domain(tuple(pieces), T), reports=reports, ok=ok,
        depth_used=depth_used, worst=worst)
