"""Exact identities of the constant equation tableau."""

import pathlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nspicard import build_tableau, verify_tableau
from nspicard.dictionary import (PRODUCT_RULES, STATE_DIM, Z_DESCRIPTORS,
                                 describe_slot)
from nspicard.tableau import (linear_system_residual, quadratic_residual,
                              solvability_check, tableau_dump)

from mms import ManufacturedFlow, convergence_order

DATA = pathlib.Path(__file__).parent / "data"

MU, TAU = 0.7, 1.3


@pytest.fixture(scope="module")
def tab():
    return build_tableau(MU, TAU)


def test_dimensions(tab):
    assert tab.H.shape == (16, STATE_DIM)
    assert tab.H0.shape == (16, STATE_DIM)
    assert tab.H1.shape == (16, STATE_DIM)
    assert tab.H2.shape == (16, STATE_DIM)
    assert tab.H3.shape == (16, STATE_DIM)


def test_exact_verification(tab):
    ver = verify_tableau(tab, np.random.default_rng(0))
    assert ver.product_annihilates
    assert ver.basis_rank == STATE_DIM
    assert ver.particular_ok
    assert ver.row_failures == []
    assert ver.alpha_pattern_ok
    assert ver.all_ok


def test_dictionary_slots_are_the_advertised_ones():
    assert Z_DESCRIPTORS[3] == ("u1", (0, 0, 0, 0))
    assert Z_DESCRIPTORS[7] == ("u2", (0, 0, 0, 0))
    assert Z_DESCRIPTORS[11] == ("u3", (0, 0, 0, 0))
    assert Z_DESCRIPTORS[16] == ("p", (0, 0, 0, 0))
    # last product slot pairs u3 with the x3-derivative of u3
    assert describe_slot(55) == "u3*(du3/dx3)"
    assert describe_slot(47) == "u1*(du1/dx1)"


def test_quadratic_residual_vanishes_on_manufactured_state(tab):
    mf = ManufacturedFlow(MU, TAU)
    rng = np.random.default_rng(7)
    t = rng.uniform(0.0, 1.0, 50)
    x = rng.uniform(-2.0, 2.0, (3, 50))
    r = quadratic_residual(tab, mf.state(t, *x))
    assert np.abs(r).max() < 1e-13


def _fill_products(head):
    """Extend a 46-component head to a consistent 55-component state."""
    z = np.zeros(STATE_DIM)
    z[:46] = head
    for target, (left, right) in PRODUCT_RULES.items():
        if right[0] == "e":
            rv = z[right[1] - 1]
        else:  # eliminated derivative du1/dx1 = -(z5 + z10)
            rv = -(z[4] + z[9])
        z[target - 1] = z[left - 1] * rv
    return z


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=46, max_size=46))
def test_quadratic_residual_zero_iff_products_consistent(head):
    tab = build_tableau(MU, TAU)
    z = _fill_products(np.array(head))
    assert np.abs(quadratic_residual(tab, z)).max() < 1e-9


def test_quadratic_residual_rejects_wrong_length(tab):
    with pytest.raises(ValueError):
        quadratic_residual(tab, np.zeros(46))


def test_linear_system_residual_second_order(tab):
    from nspicard import Domain, make_grid
    mf = ManufacturedFlow(MU, TAU)
    dom = Domain.single((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0), T=0.8)
    errs, hs = [], []
    for n in (7, 11, 15):
        grid = make_grid(dom, counts=(n, n, n, n))
        r = linear_system_residual(tab, mf.state_on_grid(grid),
                                   mf.forcing_on_grid(grid), grid)
        errs.append(np.abs(r).max())
        hs.append(grid.dx[0])
    order = convergence_order(errs, hs)
    assert 1.7 < order < 2.3


def test_solvability_check_consistent_and_inconsistent():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(6, 4))
    xs = rng.normal(size=(5, 4))
    ok, rank, aug = solvability_check(A, xs @ A.T)
    assert ok and rank == 4 and aug == [4] * 5
    # a right-hand side outside the column space raises the augmented rank
    u, _, _ = np.linalg.svd(A)
    bad = u[:, -1]
    ok2, _, aug2 = solvability_check(A, [bad])
    assert not ok2 and aug2 == [5]


def test_dump_matches_golden(tab):
    golden = (DATA / "tableau_dump.txt").read_text()
    assert tableau_dump(tab) == golden


def test_dump_roundtrips_exact_coefficients(tab):
    text = tableau_dump(tab)
    assert "mu = " in text and "tau = " in text
    # exact rational rendering: no decimal points in coefficient lists
    for line in text.splitlines():
        if line.startswith("alpha"):
            assert "." not in line
