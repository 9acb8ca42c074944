"""Frequency-domain certification of the first-order system."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nspicard import build_tableau
from nspicard.linalg import numeric_rank
from nspicard.spectral import (SingularFrequencyError, build_B, build_G,
                               certification_csv, certify_frequencies,
                               eval_ab, null_eta, particular_Y1,
                               sample_frequencies)

MU, TAU = 0.7, 1.3

finite_xi = st.tuples(
    st.floats(-50, 50, allow_nan=False),
    st.floats(-50, 50, allow_nan=False).filter(lambda v: abs(v) > 1e-3),
    st.floats(-50, 50, allow_nan=False),
    st.floats(-50, 50, allow_nan=False),
)


@pytest.fixture(scope="module")
def tab():
    return build_tableau(MU, TAU)


@settings(max_examples=60, deadline=None)
@given(finite_xi)
def test_ab_product_is_exactly_minus_norm(xi):
    a, b = eval_ab(xi, MU, TAU)
    q = xi[1] ** 2 + xi[2] ** 2 + xi[3] ** 2
    assert a * b == pytest.approx(-q, rel=1e-13, abs=1e-13)


def test_zero_spatial_frequency_rejected(tab):
    with pytest.raises(SingularFrequencyError):
        eval_ab((1.0, 0.0, 0.0, 0.0), MU, TAU)
    with pytest.raises(SingularFrequencyError):
        particular_Y1(tab, (0.5, 0.0, 0.0, 0.0), np.ones(3))


def test_B_shape_and_rank(tab):
    rng = np.random.default_rng(0)
    for xi in sample_frequencies(rng, 25):
        B = build_B(tab, xi)
        assert B.shape == (64, 55)
        assert numeric_rank(B) == 46


def test_null_vectors_annihilated(tab):
    rng = np.random.default_rng(1)
    for xi in sample_frequencies(rng, 10):
        B = build_B(tab, xi)
        nB = np.linalg.norm(B)
        for j in range(1, 10):
            eta = null_eta(tab, xi, j)
            assert eta[46 + j - 1] == 1.0
            # unit tail only at its own product slot
            tail = eta[46:]
            assert np.count_nonzero(tail) == 1
            assert np.linalg.norm(B @ eta) / (nB * np.linalg.norm(eta)) < 1e-12


def test_nine_null_vectors_independent(tab):
    xi = (0.3, 1.1, -0.4, 0.9)
    E = np.stack([null_eta(tab, xi, j) for j in range(1, 10)])
    assert numeric_rank(E) == 9


def test_particular_solution_reproduces_forcing(tab):
    rng = np.random.default_rng(2)
    for xi in sample_frequencies(rng, 10):
        F_hat = rng.normal(size=3) + 1j * rng.normal(size=3)
        B = build_B(tab, xi)
        G = build_G(tab, xi, F_hat)
        Y1 = particular_Y1(tab, xi, F_hat)
        assert np.linalg.norm(B @ Y1 - G) / np.linalg.norm(G) < 1e-11


def test_particular_solution_divergence_free(tab):
    rng = np.random.default_rng(3)
    for xi in sample_frequencies(rng, 10):
        F_hat = rng.normal(size=3) + 1j * rng.normal(size=3)
        Y1 = particular_Y1(tab, xi, F_hat)
        div = (xi[1] * Y1[2] + xi[2] * Y1[6] + xi[3] * Y1[10]) * 1j
        assert abs(div) < 1e-12 * max(1.0, np.abs(Y1).max())


@settings(max_examples=25, deadline=None)
@given(finite_xi)
def test_conjugate_symmetry_of_particular(xi):
    tab = build_tableau(MU, TAU)
    rng = np.random.default_rng(4)
    F_hat = rng.normal(size=3) + 1j * rng.normal(size=3)
    xi_neg = tuple(-v for v in xi)
    Y = particular_Y1(tab, xi, F_hat)
    Y_neg = particular_Y1(tab, xi_neg, np.conj(F_hat))
    scale = np.abs(Y).max()
    assert np.abs(Y_neg - np.conj(Y)).max() < 1e-10 * max(1.0, scale)


def test_certification_sweep_and_csv(tab):
    rng = np.random.default_rng(5)
    records = certify_frequencies(tab, rng, n=30)
    assert len(records) == 30
    assert all(r.ok for r in records)
    text = certification_csv(records)
    lines = text.strip().splitlines()
    assert len(lines) == 31
    assert lines[0].startswith("xi0,")


def test_certification_is_seed_deterministic(tab):
    r1 = certify_frequencies(tab, np.random.default_rng(9), n=8)
    r2 = certify_frequencies(tab, np.random.default_rng(9), n=8)
    assert certification_csv(r1) == certification_csv(r2)
