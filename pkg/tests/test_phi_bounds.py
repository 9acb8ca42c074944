"""Envelope integrals, absolute Hermite moments, and the closing bounds."""

import dataclasses

import numpy as np
import pytest

from nspicard import Domain
from nspicard.bounds import (BoundConstants, bound_constants,
                             heat_derivative_envelopes, hermite_abs_moment,
                             smallness_check)
from nspicard.engine import HolderBudget
from nspicard.heat import phi_functions, phi_quadrature

PI32 = np.pi ** 1.5


# ---------------------------------------------------------------------------
# phi envelope integrals
# ---------------------------------------------------------------------------

def test_phi_closed_forms():
    t, tau1 = 1.0, 0.25
    s = t - tau1
    phi = phi_functions(t, tau1)
    assert phi[0] == pytest.approx(PI32 / s, rel=1e-14)
    assert phi[1] == pytest.approx(1.5 * PI32 / s, rel=1e-14)
    assert phi[2] == phi[3] == phi[4] == 0.0


def test_phi_quadrature_matches_closed_forms():
    for t, tau1 in ((1.0, 0.25), (0.5, 0.45), (2.0, 1.99)):
        closed = phi_functions(t, tau1)
        numer = phi_quadrature(t, tau1)
        for c, q in zip(closed, numer):
            assert abs(c - q) < 1e-8 * max(1.0, abs(c))


def test_phi_odd_moments_vanish_by_symmetry():
    assert phi_quadrature(1.0, 0.5)[2] == pytest.approx(0.0, abs=1e-10)


def test_phi_requires_positive_lag():
    with pytest.raises(ValueError):
        phi_functions(1.0, 1.0)
    with pytest.raises(ValueError):
        phi_functions(1.0, 1.5)


def test_phi_diverges_as_lag_closes():
    vals = [phi_functions(1.0, 1.0 - eps)[0] for eps in (1e-1, 1e-3, 1e-6)]
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] > 1e5


# ---------------------------------------------------------------------------
# absolute Hermite moments
# ---------------------------------------------------------------------------

def test_low_moments_exact():
    assert hermite_abs_moment(0) == pytest.approx(np.sqrt(np.pi), rel=1e-14)
    assert hermite_abs_moment(1) == pytest.approx(2.0, rel=1e-14)


def test_second_moment_closed_form():
    # integral of |4 theta^2 - 2| e^{-theta^2}: split at theta = 1/sqrt(2)
    # and integrate by parts -> 4 sqrt(2) e^{-1/2}
    target = 4.0 * np.sqrt(2.0) * np.exp(-0.5)
    assert hermite_abs_moment(2) == pytest.approx(target, rel=1e-10)


def test_moments_grow():
    g = [hermite_abs_moment(n) for n in range(6)]
    assert all(v > 0 for v in g)
    assert g[5] > g[3] > g[1]


# ---------------------------------------------------------------------------
# derivative envelopes
# ---------------------------------------------------------------------------

def test_envelope_order_zero_is_the_time_window():
    E = heat_derivative_envelopes(0.7, T=0.5, epsilon=0.005)
    assert E[0] == pytest.approx(0.5, rel=1e-12)


def test_envelope_order_one_closed_form():
    mu, T = 0.7, 0.5
    E = heat_derivative_envelopes(mu, T=T, epsilon=0.005)
    target = 2.0 * np.sqrt(T) / np.sqrt(np.pi * mu)
    assert E[1] == pytest.approx(target, rel=1e-10)


def test_envelope_validation():
    with pytest.raises(ValueError):
        heat_derivative_envelopes(0.7, T=0.5, epsilon=0.5)
    with pytest.raises(ValueError):
        heat_derivative_envelopes(0.7, T=0.5, epsilon=0.0)


def test_envelopes_blow_up_as_truncation_vanishes():
    mu, T = 0.7, 0.5
    E_loose = heat_derivative_envelopes(mu, T, epsilon=0.05)
    E_tight = heat_derivative_envelopes(mu, T, epsilon=0.0005)
    assert E_tight[4] > E_loose[4]
    assert E_tight[5] > E_loose[5]


# ---------------------------------------------------------------------------
# bound constants and the closing inequalities
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def consts():
    dom = Domain.single((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5), T=0.25)
    return bound_constants(dom, T=0.25, mu=1.0, alpha=0.5, M=1.0)


def test_constants_structure(consts):
    assert consts.Mp == pytest.approx(PI32 / consts.epsilon_trunc, rel=1e-12)
    assert consts.Mpp == 0.0 and consts.Mppp == 0.0
    assert consts.M_T3 == pytest.approx(12.0 * consts.M_T2, rel=1e-12)
    d = consts.diam ** (1.0 - consts.alpha)
    assert consts.M_T4 == pytest.approx(4.0 * consts.M_T3 * d, rel=1e-12)
    assert consts.divergent is True
    assert consts.M_K1 > 0.0


def test_constants_reject_inconsistent_table():
    dom = Domain.single((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5), T=0.25)
    c = bound_constants(dom, T=0.25, mu=1.0, alpha=0.5, M=1.0)
    with pytest.raises(ValueError):
        dataclasses.replace(c, M_T4=2.0 * c.M_T4)


def test_smallness_passes_with_zero_capacity(consts):
    degenerate = dataclasses.replace(consts, M_K1=0.0)
    rep = smallness_check(degenerate, HolderBudget(M=1.0, C=2.0, C1=0.5))
    assert rep.smallness_ok and rep.contraction_ok
    assert rep.row1_lhs == pytest.approx(0.5)
    assert rep.contraction_lhs == 0.0


def test_smallness_fails_at_unit_feedback(consts):
    # capacity tuned so the feedback product M_T3 * K equals M: the
    # contraction factor becomes exactly 3
    forced = dataclasses.replace(consts, M_K1=consts.M / consts.M_T3)
    rep = smallness_check(forced, HolderBudget(M=1.0, C=2.0, C1=0.5))
    assert not rep.smallness_ok
    assert not rep.contraction_ok
    assert rep.contraction_lhs == pytest.approx(3.0, rel=1e-12)


def test_smallness_requires_matching_radius(consts):
    with pytest.raises(ValueError):
        smallness_check(consts, HolderBudget(M=2.0, C=4.0, C1=1.0))


def test_report_lines_mention_each_inequality(consts):
    rep = smallness_check(consts, HolderBudget(M=1.0, C=2.0, C1=0.5))
    text = "\n".join(rep.lines())
    assert "contraction" in text
    assert "pass" in text or "fail" in text


def test_capacity_shrinks_with_the_domain():
    big = Domain.single((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5), T=0.25)
    small = big.scaled(0.5)
    cb = bound_constants(big, 0.25, 1.0, 0.5, 1.0)
    cs = bound_constants(small, 0.25, 1.0, 0.5, 1.0)
    assert cs.M_K1 == pytest.approx(0.25 * cb.M_K1, rel=5e-3)
    # time-independent envelopes agree, so the feedback product shrinks too
    assert cs.M_T3 == pytest.approx(cb.M_T3, rel=1e-12)
