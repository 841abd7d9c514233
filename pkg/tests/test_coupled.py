"""Coupled-basis Hamiltonian: assembly invariants, the uncoupled fan,
crossings and avoided crossings."""

import numpy as np
import pytest
from scipy.constants import hbar as HBAR, h as PLANCK

from heliumjcm import (
    BasisMismatch,
    FieldConfiguration,
    NoCrossingInRange,
    ProductBasis,
    assemble_hamiltonian,
    coupling_constant,
    cyclotron_frequency,
    diagonalize,
    find_crossing,
    minimum_gap,
    solve_coupled,
)

GHZ = 1e9 * PLANCK


def test_basis_indexing():
    basis = ProductBasis(n_max=3, l_max=4)
    assert basis.size == 15
    for k in range(basis.size):
        n, l = basis.label(k)
        assert basis.index(n, l) == k
    with pytest.raises(IndexError):
        basis.index(4, 0)
    with pytest.raises(IndexError):
        basis.label(15)
    with pytest.raises(ValueError):
        ProductBasis(0, 4)


def test_hamiltonian_symmetric(vs15):
    cfg = FieldConfiguration.from_v_cm(15.0, 0.65, 0.2)
    h = assemble_hamiltonian(vs15, cfg, ProductBasis(6, 12))
    scale = np.abs(h).max()
    assert np.abs(h - h.T).max() < 1e-8 * scale


def test_eigenvector_orthonormality(vs15):
    cfg = FieldConfiguration.from_v_cm(15.0, 0.65, 0.2)
    spec = solve_coupled(vs15, cfg, ProductBasis(6, 12))
    gram = spec.eigenvectors.T @ spec.eigenvectors
    assert np.abs(gram - np.eye(gram.shape[0])).max() < 1e-8


def test_trace_preserved(vs15):
    cfg = FieldConfiguration.from_v_cm(15.0, 0.65, 0.2)
    h = assemble_hamiltonian(vs15, cfg, ProductBasis(6, 12))
    spec = diagonalize(h, ProductBasis(6, 12), cfg)
    assert spec.eigenvalues.sum() == pytest.approx(np.trace(h), rel=1e-10)


def test_uncoupled_fan_exact(vs15):
    # b_y = 0: eigenvalues are exactly E_n + hbar w_c l, sorted
    cfg = FieldConfiguration.from_v_cm(15.0, 0.584, 0.0)
    basis = ProductBasis(4, 11)
    spec = solve_coupled(vs15, cfg, basis)
    w_c = cyclotron_frequency(0.584)
    fan = np.sort([vs15.energy(n) + HBAR * w_c * l
                   for n in range(1, 5) for l in range(12)])
    assert np.allclose(spec.eigenvalues, fan, rtol=1e-12, atol=1e-30)


def test_even_in_coupling_field(vs15):
    basis = ProductBasis(6, 14)
    plus = solve_coupled(
        vs15, FieldConfiguration.from_v_cm(15.0, 0.65, 0.2), basis)
    minus = solve_coupled(
        vs15, FieldConfiguration.from_v_cm(15.0, 0.65, -0.2), basis)
    assert np.allclose(plus.eigenvalues, minus.eigenvalues,
                       rtol=1e-12, atol=1e-30)


def test_diamagnetic_modes_ordered(vs15):
    # dropping the diamagnetic block lowers every level it touched
    cfg = FieldConfiguration.from_v_cm(15.0, 0.65, 0.3)
    basis = ProductBasis(4, 8)
    full = solve_coupled(vs15, cfg, basis, diamagnetic="full")
    none = solve_coupled(vs15, cfg, basis, diamagnetic="none")
    assert none.eigenvalues.sum() < full.eigenvalues.sum()
    with pytest.raises(ValueError):
        assemble_hamiltonian(vs15, cfg, basis, diamagnetic="half")


def test_basis_mismatch_guards(vs15, he3):
    cfg = FieldConfiguration.from_v_cm(15.0, 0.65, 0.1)
    with pytest.raises(BasisMismatch):
        assemble_hamiltonian(vs15, cfg, ProductBasis(8, 10))
    with pytest.raises(BasisMismatch):
        assemble_hamiltonian(vs15, cfg.replace(e_perp=2000.0),
                             ProductBasis(4, 10))


def test_ladder_truncation_converged(vs15):
    # doubling the ladder from 50 to 80 rungs moves the levels below the
    # (4,0) threshold by under 10 MHz at a strong coupling field
    cfg = FieldConfiguration.from_v_cm(15.0, 0.65, 1.0)
    small = solve_coupled(vs15, cfg, ProductBasis(6, 50))
    large = solve_coupled(vs15, cfg, ProductBasis(6, 80))
    cut = vs15.energy(4)
    k = int(np.searchsorted(small.eigenvalues, cut))
    drift = np.abs(small.eigenvalues[:k] - large.eigenvalues[:k]) / GHZ
    # a dozen dressed levels fit under the n = 4 threshold here; enough
    # to make the comparison meaningful
    assert k >= 10
    assert drift.max() < 0.010


def test_locate_and_dominant(vs15):
    cfg = FieldConfiguration.from_v_cm(15.0, 0.65, 0.05)
    spec = solve_coupled(vs15, cfg, ProductBasis(4, 8))
    k = spec.locate(2, 1)
    n, l, w = spec.dominant(k)
    assert (n, l) == (2, 1)
    assert w > 0.9


def test_find_crossing_oracle(vs15):
    # (1,1)/(2,0) at 15 V/cm sits near 2.83 T; exact linear-fan root
    b = find_crossing(vs15, ((1, 1), (2, 0)), (0.5, 5.0))
    assert b == pytest.approx(2.8306, abs=2e-3)
    w_c = cyclotron_frequency(b)
    assert HBAR * w_c == pytest.approx(vs15.transition_energy(1, 2),
                                       rel=1e-3)
    with pytest.raises(NoCrossingInRange):
        find_crossing(vs15, ((1, 1), (2, 0)), (0.5, 1.0))


def test_minimum_gap_matches_coupling(vs20):
    # dressed (2,1)/(3,0) gap equals 2|g_23| near its crossing
    b_star = find_crossing(vs20, ((2, 1), (3, 0)), (0.5, 3.0))
    cfg = FieldConfiguration.from_v_cm(20.0, b_star, 0.1)
    b_min, gap = minimum_gap(
        vs20, cfg, ((2, 1), (3, 0)), ProductBasis(6, 12),
        b_z_range=(0.98 * b_star, 1.02 * b_star), n_steps=41)
    g = coupling_constant(vs20, cfg.replace(b_z=b_min), 2, 3)
    assert gap == pytest.approx(2.0 * abs(g), rel=0.02)
    assert abs(b_min - b_star) < 0.01


def test_minimum_gap_linear_in_coupling_field(vs20):
    b_star = find_crossing(vs20, ((2, 1), (3, 0)), (0.5, 3.0))
    gaps = []
    for b_y in (0.05, 0.1):
        cfg = FieldConfiguration.from_v_cm(20.0, b_star, b_y)
        _, gap = minimum_gap(
            vs20, cfg, ((2, 1), (3, 0)), ProductBasis(6, 12),
            b_z_range=(0.98 * b_star, 1.02 * b_star), n_steps=41)
        gaps.append(gap)
    assert gaps[1] / gaps[0] == pytest.approx(2.0, rel=0.02)
