"""Constant tableau of the first-order closure and its verification.

Builds the structural matrices from the component dictionary:

* ``A = (E4, A1)`` -- the four field equations over the extended state,
* ``A_eta = [-A1; E55]`` -- a basis of the solution set of ``A X = beta``,
* the carrier matrices ``H, H0, H1, H2, H3`` of the first-order system,
* the quadratic (advection product) constraints.

All entries are placed exactly (0, +-1, tau, -mu); there is no floating
construction arithmetic, so the algebraic identities between the blocks hold
to the last bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import dictionary as dct
from .linalg import numeric_rank


@dataclass
class ConstantTableau:
    """Structural constants of the closure for one (mu, tau) pair."""

    mu: float
    tau: float
    alpha: np.ndarray          # (4, 55) equation rows over Z
    A: np.ndarray              # (4, 59) = (E4, A1)
    A1: np.ndarray             # (4, 55)
    A_eta: np.ndarray          # (59, 55) solution-basis columns
    H: np.ndarray              # (16, 55) carrier
    H0: np.ndarray             # (16, 55) time rows
    H1: np.ndarray             # (16, 55)
    H2: np.ndarray             # (16, 55)
    H3: np.ndarray             # (16, 55)
    quad_pairs: tuple = field(default=())  # (target, left, right-row) triples

    @property
    def H_family(self):
        return {"H": self.H, "H0": self.H0, "H1": self.H1,
                "H2": self.H2, "H3": self.H3}

    def h_vector(self, F):
        """Forcing offset of the carrier: U = H Z + h."""
        h = np.zeros(16)
        for pos, j in dct.H_FORCING.items():
            h[pos - 1] = F[j - 1]
        return h

    def h0_vector(self, F):
        """Forcing offset of the time rows: dU/dt = H0 Z + h0."""
        h = np.zeros(16)
        for pos, j in dct.H0_FORCING.items():
            h[pos - 1] = F[j - 1]
        return h

    def x0_vector(self, F):
        """Particular solution (0, F1, F2, F3, 0...) of the extended system."""
        x0 = np.zeros(dct.EXTENDED_DIM)
        x0[1:4] = F
        return x0


def _alpha_value(sym, mu, tau):
    if sym == "tau":
        return tau
    if sym == "-mu":
        return -mu
    return float(sym)


def _alpha_matrix(mu, tau):
    alpha = np.zeros((4, dct.STATE_DIM))
    for row, pattern in dct.ALPHA_PATTERNS.items():
        for slot, sym in pattern.items():
            alpha[row - 1, slot - 1] = _alpha_value(sym, mu, tau)
    return alpha


def row_vector(spec, alpha):
    """Materialise a row spec ("e", k) or ("a", k, sign) over Z."""
    if spec[0] == "e":
        v = np.zeros(dct.STATE_DIM)
        v[spec[1] - 1] = 1.0
        return v
    _, k, sign = spec
    return sign * alpha[k - 1]


def _rows_matrix(specs, alpha):
    return np.stack([row_vector(s, alpha) for s in specs])


def _quad_pairs(alpha):
    pairs = []
    for target, (left, rspec) in dct.PRODUCT_RULES.items():
        if rspec[0] == "e":
            right = np.zeros(dct.STATE_DIM)
            right[rspec[1] - 1] = 1.0
        else:  # eliminated derivative du1/dx1 = -alpha1 . Z
            right = -alpha[0]
        pairs.append((target, left, right))
    return tuple(pairs)


def build_tableau(mu: float, tau: float) -> ConstantTableau:
    """Assemble the constant tableau for viscosity mu and specific volume tau."""
    if mu <= 0:
        raise ValueError(f"viscosity must be positive, got {mu}")
    if tau <= 0:
        raise ValueError(f"specific volume must be positive, got {tau}")
    alpha = _alpha_matrix(mu, tau)
    A1 = alpha.copy()
    A = np.hstack([np.eye(4), A1])
    A_eta = np.vstack([-A1, np.eye(dct.STATE_DIM)])
    return ConstantTableau(
        mu=mu, tau=tau, alpha=alpha, A=A, A1=A1, A_eta=A_eta,
        H=_rows_matrix(dct.H_ROWS, alpha),
        H0=_rows_matrix(dct.H0_ROWS, alpha),
        H1=_rows_matrix(dct.H1_ROWS, alpha),
        H2=_rows_matrix(dct.H2_ROWS, alpha),
        H3=_rows_matrix(dct.H3_ROWS, alpha),
        quad_pairs=_quad_pairs(alpha),
    )


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass
class TableauVerification:
    product_annihilates: bool
    basis_rank: int
    particular_ok: bool
    row_failures: list
    alpha_pattern_ok: bool

    @property
    def basis_full_rank(self):
        return self.basis_rank == dct.STATE_DIM

    @property
    def all_ok(self):
        return (self.product_annihilates and self.basis_full_rank
                and self.particular_ok and not self.row_failures
                and self.alpha_pattern_ok)

    def summary(self):
        lines = [
            "tableau verification",
            f"  equation rows annihilate solution basis exactly: "
            f"{self.product_annihilates}",
            f"  solution basis rank: {self.basis_rank} / {dct.STATE_DIM}",
            f"  particular solution reproduces forcing: {self.particular_ok}",
            f"  carrier rows match dictionary generation: "
            f"{not self.row_failures}",
            f"  equation-row nonzero pattern matches dictionary: "
            f"{self.alpha_pattern_ok}",
        ]
        lines += [f"    mismatch: {f}" for f in self.row_failures]
        lines.append(f"  all checks pass: {self.all_ok}")
        return "\n".join(lines)


_ROW_LISTINGS = {
    "H": dct.H_ROWS, "H0": dct.H0_ROWS, "H1": dct.H1_ROWS,
    "H2": dct.H2_ROWS, "H3": dct.H3_ROWS,
}


def verify_tableau(tab: ConstantTableau, rng=None) -> TableauVerification:
    """Run the structural identity checks on a built tableau.

    The carrier matrices are rebuilt independently by differentiating the
    sixteen carrier descriptors through the component dictionary and must
    agree entrywise with the stored literal listings.
    """
    rng = np.random.default_rng(0) if rng is None else rng

    prod = tab.A @ tab.A_eta
    product_annihilates = bool(np.all(prod == 0.0))

    basis_rank = numeric_rank(tab.A_eta)

    particular_ok = True
    beta_template = np.zeros(4)
    for _ in range(3):
        F = rng.standard_normal(3)
        z = rng.standard_normal(dct.STATE_DIM)
        x = tab.x0_vector(F) + tab.A_eta @ z
        beta = beta_template.copy()
        beta[1:] = F
        if not np.allclose(tab.A @ x, beta, rtol=0.0, atol=1e-12):
            particular_ok = False

    row_failures = []
    generated = {
        "H": dct.carrier_rows(),
        "H0": dct.derived_rows(0),
        "H1": dct.derived_rows(1),
        "H2": dct.derived_rows(2),
        "H3": dct.derived_rows(3),
    }
    forcing_expected = {
        "H": dct.H_FORCING, "H0": dct.H0_FORCING,
        "H1": {}, "H2": {}, "H3": {},
    }
    for name, (rows, forcing) in generated.items():
        listed = _ROW_LISTINGS[name]
        if rows != listed:
            for pos, (got, want) in enumerate(zip(rows, listed), start=1):
                if got != want:
                    row_failures.append(f"{name}[{pos}]: {got} != {want}")
        if forcing != forcing_expected[name]:
            row_failures.append(f"{name}: forcing offsets {forcing}")
        stored = tab.H_family[name]
        rebuilt = _rows_matrix(rows, tab.alpha)
        if not np.array_equal(stored, rebuilt):
            row_failures.append(f"{name}: matrix differs from generation")

    alpha_pattern_ok = True
    for row, pattern in dct.ALPHA_PATTERNS.items():
        expected = np.zeros(dct.STATE_DIM)
        for slot, sym in pattern.items():
            expected[slot - 1] = _alpha_value(sym, tab.mu, tab.tau)
        if not np.array_equal(tab.alpha[row - 1], expected):
            alpha_pattern_ok = False

    return TableauVerification(
        product_annihilates=product_annihilates,
        basis_rank=basis_rank,
        particular_ok=particular_ok,
        row_failures=row_failures,
        alpha_pattern_ok=alpha_pattern_ok,
    )


# ---------------------------------------------------------------------------
# Pointwise residuals
# ---------------------------------------------------------------------------

def quadratic_residual(tab: ConstantTableau, z: np.ndarray) -> np.ndarray:
    """Residuals of the nine product constraints at a state sample.

    ``r_j = z[target] - (left . z) * (right . z)``; identically zero exactly
    when the product slots are consistent with the factor slots.  Accepts a
    single 55-vector or an array of them (last axis 55).
    """
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != dct.STATE_DIM:
        raise ValueError(f"state vector must have {dct.STATE_DIM} components")
    res = []
    for target, left, right in tab.quad_pairs:
        res.append(z[..., target - 1] - z[..., left - 1] * (z @ right))
    return np.stack(res, axis=-1)


def linear_system_residual(tab: ConstantTableau, Z, F, grid):
    """Finite-difference residuals of the first-order system on a grid.

    Parameters
    ----------
    Z : ndarray, shape (nt, n1, n2, n3, 55)
        Reduced state sampled on the grid.
    F : sequence of three ndarrays, shape (nt, n1, n2, n3)
        Forcing components on the same grid.
    grid : Grid
        Supplies the axis spacings.

    Returns
    -------
    ndarray, shape (64, nt-2, n1-2, n2-2, n3-2)
        The sixteen time-block residuals followed by the three sixteen-row
        space blocks, at interior points only.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 5 or Z.shape[-1] != dct.STATE_DIM:
        raise ValueError("state samples must have shape (nt, n1, n2, n3, 55)")
    if any(n < 3 for n in Z.shape[:4]):
        raise ValueError("residual stencils need at least 3 points per axis")
    F = [np.asarray(f, dtype=float) for f in F]

    U = np.einsum("rs,...s->...r", tab.H, Z)
    for pos, j in dct.H_FORCING.items():
        U[..., pos - 1] += F[j - 1]

    spacings = (grid.dt,) + tuple(grid.dx)
    interior = (slice(1, -1),) * 4

    blocks = []
    # time block
    dU = np.gradient(U, spacings[0], axis=0, edge_order=2)
    rhs = np.einsum("rs,...s->...r", tab.H0, Z)
    for pos, j in dct.H0_FORCING.items():
        rhs[..., pos - 1] += F[j - 1]
    blocks.append((dU - rhs)[interior])
    # space blocks
    for axis, Hx in enumerate((tab.H1, tab.H2, tab.H3), start=1):
        dU = np.gradient(U, spacings[axis], axis=axis, edge_order=2)
        rhs = np.einsum("rs,...s->...r", Hx, Z)
        blocks.append((dU - rhs)[interior])

    return np.concatenate([np.moveaxis(b, -1, 0) for b in blocks], axis=0)


def solvability_check(A, beta_samples, tol=1e-10):
    """Rank-consistency of ``A x = beta`` for a batch of right-hand sides.

    Returns (consistent, rank, augmented_ranks).
    """
    A = np.asarray(A, dtype=float)
    base_rank = numeric_rank(A, tol=tol)
    aug_ranks = []
    ok = True
    for beta in np.atleast_2d(np.asarray(beta_samples, dtype=float)):
        r = numeric_rank(np.hstack([A, beta[:, None]]), tol=tol)
        aug_ranks.append(r)
        ok = ok and (r == base_rank)
    return ok, base_rank, aug_ranks


# ---------------------------------------------------------------------------
# Structured-text dump
# ---------------------------------------------------------------------------

def _fmt_exact(x):
    fr = Fraction(x).limit_denominator(10**15)
    if Fraction(x) == fr:
        return str(fr)
    return str(Fraction(x))  # exact binary fraction


def tableau_dump(tab: ConstantTableau) -> str:
    """Exact row-major listing of every tableau constant.

    Entries are printed as exact rationals (floats converted without
    rounding), so the dump doubles as a golden file for regression tests.
    """
    lines = [
        "constant tableau",
        f"mu = {_fmt_exact(tab.mu)}",
        f"tau = {_fmt_exact(tab.tau)}",
    ]
    for row, pattern in sorted(dct.ALPHA_PATTERNS.items()):
        ent = ", ".join(
            f"{slot}:{_fmt_exact(_alpha_value(sym, tab.mu, tab.tau))}"
            for slot, sym in sorted(pattern.items())
        )
        lines.append(f"alpha{row} = [{ent}]")
    lines.append("A = (E4 | A1); A_eta = [-A1; E55]")
    for name, specs in _ROW_LISTINGS.items():
        for pos, spec in enumerate(specs, start=1):
            if spec[0] == "e":
                txt = f"e{spec[1]}  ({dct.describe_slot(spec[1])})"
            else:
                txt = f"{'-' if spec[2] < 0 else ''}alpha{spec[1]}"
            lines.append(f"{name}[{pos}] = {txt}")
    for pos, j in sorted(dct.H_FORCING.items()):
        lines.append(f"h[{pos}] = F{j}")
    for pos, j in sorted(dct.H0_FORCING.items()):
        lines.append(f"h0[{pos}] = F{j}")
    for target, left, _right in tab.quad_pairs:
        lines.append(
            f"product[{target}] = {dct.describe_slot(target)}"
            f"  (left factor slot z{left})"
        )
    return "\n".join(lines) + "\n"
