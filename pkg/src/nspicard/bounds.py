"""Envelope constants for the solution tables and the smallness conditions.

The iteration closes on a ball of radius M (sup norm) intersected with a
Hölder class; whether the map contracts is decided by inequalities built
from a handful of constants:

* ``M_K1`` -- the domain capacity ``max (1/4pi) integral 1/r``,
* ``Mp, Mpp, Mppp`` -- envelopes of the Gaussian integrals phi1..phi5 over
  the truncated region ``tau1 <= t - epsilon`` (phi1 and phi2 diverge as
  tau1 -> t, hence the truncation and the ``divergent`` flag),
* ``M_T1..M_T4`` -- sup-norm envelopes of the lifted fields and of the
  derivative tables built from them.

The derivative-table envelopes have no closed form in terms of phi alone;
they are assembled here from the heat-kernel derivative bound

    |d^a (heat lift of v)| <= pi^(-3/2) G_k (2 sqrt(mu))^(-k) I_k * sup|v|

with k = |a|, G_k the largest product of one-dimensional absolute Hermite
moments over three-part compositions of k, and I_k the (truncated for
k >= 2) time integral of s^(-k/2).  Every constant that depends on the
truncation carries the flag; reports print it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermroots, hermval
from scipy.integrate import quad

from .potential import domain_capacity


def hermite_abs_moment(n):
    """integral |H_n(theta)| exp(-theta^2) dtheta (physicists' H_n).

    n = 0 and n = 1 have exact values sqrt(pi) and 2; higher orders are
    integrated numerically with the polynomial roots as breakpoints.
    """
    if n == 0:
        return float(np.sqrt(np.pi))
    if n == 1:
        return 2.0
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    roots = np.real(hermroots(coeffs))
    L = float(np.max(np.abs(roots))) + 12.0
    val, _ = quad(lambda x: abs(hermval(x, coeffs)) * np.exp(-x * x),
                  -L, L, points=sorted(roots), limit=200)
    return float(val)


def _composition_max(k, moments):
    """Largest product of per-axis moments over 3-part compositions of k."""
    best = 0.0
    for a1 in range(k + 1):
        for a2 in range(k + 1 - a1):
            a3 = k - a1 - a2
            best = max(best, moments[a1] * moments[a2] * moments[a3])
    return best


def heat_derivative_envelopes(mu, T, epsilon, max_order=5):
    """Sup-norm envelopes E_k of the order-k heat-lift derivatives.

    E_k bounds ``sup |d^a heat_lift(v)| / sup |v|`` for |a| = k.  The time
    integrals of s^(-k/2) diverge at s = 0 for k >= 2 and are truncated at
    s = epsilon; E_0 and E_1 are exact.
    """
    if not 0 < epsilon < T:
        raise ValueError("truncation must satisfy 0 < epsilon < T")
    moments = [hermite_abs_moment(n) for n in range(max_order + 1)]
    I = [
        T,
        2.0 * np.sqrt(T),
        np.log(T / epsilon),
        2.0 * (epsilon ** -0.5 - T ** -0.5),
        1.0 / epsilon - 1.0 / T,
        (2.0 / 3.0) * (epsilon ** -1.5 - T ** -1.5),
    ]
    E = []
    for k in range(max_order + 1):
        G_k = _composition_max(k, moments)
        E.append(np.pi ** -1.5 * G_k * (2.0 * np.sqrt(mu)) ** -k * I[k])
    return tuple(E)


@dataclass(frozen=True)
class BoundConstants:
    """The envelope constants of one domain/viscosity/horizon configuration.

    ``M`` is the sup-norm ball radius the constants were computed for; the
    lifted-field envelopes all carry one factor of it.  ``divergent`` is
    True whenever a truncated (hence non-rigorous) envelope entered.
    """

    M_K1: float
    M_T1: float
    M_T2: float
    M_T3: float
    M_T4: float
    Mp: float
    Mpp: float
    Mppp: float
    epsilon_trunc: float
    M: float
    mu: float
    T: float
    alpha: float
    diam: float
    envelopes: tuple
    divergent: bool = True

    def __post_init__(self):
        for name in ("M_K1", "M_T1", "M_T2", "M_T3", "M_T4",
                     "Mp", "Mpp", "Mppp"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        expected = 4.0 * self.M_T3 * self.diam ** (1.0 - self.alpha)
        if not np.isclose(self.M_T4, expected, rtol=1e-12, atol=0.0):
            raise ValueError("M_T4 must equal 4*M_T3*diam^(1-alpha)")


def bound_constants(domain, T, mu, alpha, M, epsilon_trunc=None,
                    capacity_cells=(12, 12, 12)):
    """Compute the envelope constants for a domain configuration.

    ``epsilon_trunc`` defaults to T/100.  The capacity is evaluated on a
    sample lattice of ``capacity_cells`` per box.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if M <= 0:
        raise ValueError("sup-norm budget must be positive")
    eps = T / 100.0 if epsilon_trunc is None else float(epsilon_trunc)

    K, _ = domain_capacity(domain, cells=capacity_cells)

    # phi envelopes over tau1 <= t - eps: phi1 and phi2 peak at the cut,
    # the odd integrals vanish identically.
    Mp = np.pi ** 1.5 / eps
    Mpp = 0.0
    Mppp = 0.0

    pf = np.pi ** -1.5
    M_T1 = max(
        T * M,
        M + pf * 2.5 * T * M * Mp,
        pf * (T / np.sqrt(mu)) * M * Mpp,
        pf * (M / np.sqrt(mu)) * Mpp + pf * (3.5 / np.sqrt(mu)) * T * M * Mppp,
    )

    E = heat_derivative_envelopes(mu, T, eps)
    # table entries hold derivatives of orders 2..3 of the lifts, plus the
    # time-derivative entries routed through mu*lap + source (orders 4..5
    # carrying a factor mu)
    table_env = max(E[2], E[3], E[4], mu * E[4], mu * E[5])
    M_T2 = M * table_env
    # each table entry sums at most 4 derivative terms, and each lifted
    # field sums the three products of one momentum group
    M_T3 = 12.0 * M * table_env

    diam = domain.diameter4
    M_T4 = 4.0 * M_T3 * diam ** (1.0 - alpha)

    return BoundConstants(
        M_K1=K, M_T1=M_T1, M_T2=M_T2, M_T3=M_T3, M_T4=M_T4,
        Mp=Mp, Mpp=Mpp, Mppp=Mppp, epsilon_trunc=eps, M=M,
        mu=mu, T=T, alpha=alpha, diam=diam, envelopes=E, divergent=True,
    )


@dataclass(frozen=True)
class SmallnessReport:
    """Evaluation of the closing inequalities at one budget."""

    smallness_ok: bool          # both rows of the invariance condition
    contraction_ok: bool        # the contraction condition
    row1_lhs: float
    row1_rhs: float
    row2_lhs: float
    row2_rhs: float
    contraction_lhs: float
    capacity_product: float     # M_T3 * M_K1
    divergent: bool
    epsilon_trunc: float

    @property
    def all_ok(self):
        return self.smallness_ok and self.contraction_ok

    def lines(self):
        tag = " [truncated envelopes]" if self.divergent else ""
        yield ("invariance row 1 (sup norm): "
               f"{self.row1_lhs:.6g} <= {self.row1_rhs:.6g} : "
               f"{'pass' if self.row1_lhs <= self.row1_rhs else 'fail'}")
        yield ("invariance row 2 (Holder):   "
               f"{self.row2_lhs:.6g} <= {self.row2_rhs:.6g} : "
               f"{'pass' if self.row2_lhs <= self.row2_rhs else 'fail'}")
        yield ("contraction factor:          "
               f"{self.contraction_lhs:.6g} < 1 : "
               f"{'pass' if self.contraction_lhs < 1 else 'fail'}{tag}")


def smallness_check(consts: BoundConstants, budget) -> SmallnessReport:
    """Evaluate the ball-invariance and contraction inequalities.

    ``budget`` carries (M, C, C1, alpha); it must match the budget the
    constants were computed for, since the envelopes absorb one factor of M.
    """
    if not np.isclose(budget.M, consts.M, rtol=1e-12):
        raise ValueError(
            f"constants were computed for M={consts.M}, budget has {budget.M}"
        )
    M, C, C1 = budget.M, budget.C, budget.C1
    K = consts.M_K1
    P = consts.M_T3 * K
    P4 = consts.M_T4 * K

    row1_lhs = M / 2.0 + 2.0 * (M / 2.0) * P + P * P
    row2_lhs = C1 + 2.0 * ((M / 2.0) * P4 + C1 * P
                           + consts.M_T3 * consts.M_T4 * K * K)
    contraction_lhs = (M / 2.0 + P) * (2.0 * P / M)

    return SmallnessReport(
        smallness_ok=bool(row1_lhs <= M and row2_lhs <= C),
        contraction_ok=bool(contraction_lhs < 1.0),
        row1_lhs=float(row1_lhs), row1_rhs=float(M),
        row2_lhs=float(row2_lhs), row2_rhs=float(C),
        contraction_lhs=float(contraction_lhs),
        capacity_product=float(P),
        divergent=consts.divergent,
        epsilon_trunc=consts.epsilon_trunc,
    )
