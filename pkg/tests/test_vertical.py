"""Vertical (image-charge) solver: hydrogenic limit, grid convergence,
matrix-element quality, Stark utilities."""

import csv

import numpy as np
import pytest
from scipy.constants import e as QE

from heliumjcm import (
    GridSpec,
    GridTooSmall,
    find_transition_field,
    solve_vertical,
    stark_slope,
    truncation_report,
    write_wavefunctions_csv,
)
from heliumjcm.vertical import V_PER_CM


def test_hydrogenic_energies_and_dipoles(he3):
    # zero tilt: E_n = -R/n^2 and z_nn = 1.5 n^2 r_B analytically
    vs = solve_vertical(he3, 0.0, n_max=4)
    r, a = he3.rydberg_energy, he3.bohr_radius
    for n in range(1, 5):
        assert vs.energy(n) == pytest.approx(-r / n**2, rel=1e-3)
        assert vs.z_elem(n, n) == pytest.approx(1.5 * n**2 * a, rel=1e-3)


def test_grid_doubling_converged(he3):
    base = solve_vertical(he3, 1500.0, n_max=6, grid=GridSpec(150.0, 4000))
    fine = solve_vertical(he3, 1500.0, n_max=6, grid=GridSpec(150.0, 8000))
    shift = np.abs(fine.energies - base.energies) / np.abs(fine.energies)
    assert shift.max() < 1e-5


def test_orthonormality(vs15):
    dz = vs15.grid[1] - vs15.grid[0]
    overlap = vs15.wavefunctions @ vs15.wavefunctions.T * dz
    assert np.allclose(overlap, np.eye(vs15.n_max), atol=1e-8)


def test_matrix_elements_match_quadrature(vs15):
    # recompute a few elements by direct quadrature, independent of the
    # solver's own assembly path
    dz = vs15.grid[1] - vs15.grid[0]
    psi = vs15.wavefunctions
    z = vs15.grid
    for (n, m) in ((1, 1), (1, 2), (2, 3), (2, 2)):
        direct = float(np.sum(psi[n - 1] * z * psi[m - 1]) * dz)
        assert vs15.z_elem(n, m) == pytest.approx(direct, rel=1e-10)
    direct2 = float(np.sum(psi[0] * z**2 * psi[0]) * dz)
    assert vs15.z2_elem(1, 1) == pytest.approx(direct2, rel=1e-10)


def test_phase_convention(vs15):
    # wavefunctions positive at the wall pins every off-diagonal sign;
    # the couplings out of n = 1 and out of n = 2 all come out negative
    # for these tilted-well states
    assert vs15.wavefunctions[:, 0].min() > 0.0
    assert vs15.z_elem(1, 2) < 0.0
    assert vs15.z_elem(1, 3) < 0.0
    assert vs15.z_elem(2, 3) < 0.0


def test_energies_increase_with_tilt(he3, vs15):
    vs_hi = solve_vertical(he3, 2500.0)
    assert vs_hi.energy(1) > vs15.energy(1)
    assert vs_hi.transition_energy(1, 2) > vs15.transition_energy(1, 2)


def test_transition_frequency_oracle(vs15):
    # frozen regression anchor for the calibrated He3 table
    assert vs15.transition_frequency_ghz(1, 2) == pytest.approx(
        79.2369, abs=2e-3)
    assert vs15.transition_frequency_ghz(1, 3) == pytest.approx(
        107.4097, abs=2e-3)


def test_truncation_residual_decreases_with_basis(he3):
    residuals = []
    for n_max in (4, 6, 10, 14):
        vs = solve_vertical(he3, 1500.0, n_max=n_max)
        residuals.append(truncation_report(vs)[0])
    assert all(a > b for a, b in zip(residuals, residuals[1:]))
    # the n = 1 sum rule keeps a slow continuum tail; n = 2 converges fast
    vs = solve_vertical(he3, 1500.0, n_max=20)
    assert truncation_report(vs)[1] < 5e-3


def test_hellmann_feynman_slope(he3, vs15):
    # dE_n/dE_perp = e z_nn within 0.5%
    delta = 5.0 * V_PER_CM
    lo = solve_vertical(he3, 1500.0 - delta)
    hi = solve_vertical(he3, 1500.0 + delta)
    for n in (1, 2, 3):
        numeric = (hi.energy(n) - lo.energy(n)) / (2.0 * delta)
        assert numeric == pytest.approx(QE * vs15.z_elem(n, n), rel=5e-3)


def test_stark_slope_oracle(he3):
    assert stark_slope(he3, 23.0 * V_PER_CM, 1, 2) == pytest.approx(
        0.7413, abs=2e-3)
    # slope falls with field as the well stiffens
    assert stark_slope(he3, 29.3 * V_PER_CM, 1, 2) < \
        stark_slope(he3, 23.0 * V_PER_CM, 1, 2)
    assert stark_slope(he3, 23.0 * V_PER_CM, 2, 2) == 0.0


def test_find_transition_field_round_trip(he3):
    e90 = find_transition_field(he3, 90.0, 1, 2)
    vs = solve_vertical(he3, e90)
    assert vs.transition_frequency_ghz(1, 2) == pytest.approx(90.0, abs=1e-3)
    with pytest.raises(ValueError):
        find_transition_field(he3, 90.0, 1, 2, bracket_v_cm=(1.0, 2.0))


def test_dvdz_positive_and_ordered(vs15):
    # the barrier-gradient diagonal shrinks for softer, higher states
    vals = [vs15.dvdz(n) for n in range(1, 5)]
    assert all(v > 0.0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_grid_guards(he3):
    with pytest.raises(ValueError):
        solve_vertical(he3, 1500.0, n_max=1)
    with pytest.raises(ValueError):
        solve_vertical(he3, 1500.0, n_max=6, grid=GridSpec(150.0, 20))
    # a box shorter than the n = 6 state leaks norm into the tail
    with pytest.raises(GridTooSmall):
        solve_vertical(he3, 0.0, n_max=6, grid=GridSpec(40.0, 2000))


def test_wavefunction_dump(tmp_path, vs15):
    path = tmp_path / "wf.csv"
    write_wavefunctions_csv(vs15, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "z_m"
    assert len(rows) == 1 + vs15.grid.size
    assert float(rows[1][1]) == pytest.approx(vs15.wavefunctions[0, 0])
