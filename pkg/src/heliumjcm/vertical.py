"""Vertical eigenproblem: image-charge well plus Stark tilt over a rigid wall.

The dimensionless Hamiltonian -d^2/dzeta^2 - 2/zeta + f*zeta (energies in
R_e, lengths in r_B, f = e E_perp r_B / R_e) is discretized by a symmetric
three-point finite difference on a uniform grid with Dirichlet walls at 0 and
z_max. Eigenvalues carry an O(dz^2) bias at the default grid that would break
the advertised grid-doubling stability of E_1, E_2, so they are Richardson
extrapolated from the full and half resolution grids; wavefunctions and
matrix elements come from the fine grid, whose O(dz^2) error is far inside
every tolerance used downstream.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .errors import ConvergenceFailure, GridTooSmall
from .materials import (
    ELEMENTARY_CHARGE,
    GHZ,
    MaterialProperties,
    V_PER_CM,
)

# Fraction of the grid, counted from the outer wall, whose probability mass
# must stay below the leak tolerance for the highest state.
_TAIL_FRACTION = 0.01
_TAIL_TOLERANCE = 1e-6


@dataclass(frozen=True)
class GridSpec:
    """Uniform solver grid: extent in units of r_B and interior point count."""

    z_max: float = 150.0
    n_points: int = 4000

    def __post_init__(self):
        if self.z_max <= 0.0:
            raise ValueError("z_max must be positive")
        if self.n_points < 16:
            raise ValueError("n_points must be at least 16")


@dataclass(frozen=True)
class VerticalSpectrum:
    """Lowest bound states of the vertical motion and their matrix elements.

    All arrays are SI: grid in m, energies in J, wavefunctions in m^-1/2
    normalized so that sum(psi_n psi_m) dz = delta_nm, z_matrix in m,
    z2_matrix in m^2, dvdz_diag in J/m. Index convention: row/column i holds
    state n = i + 1. Arrays are frozen after construction.
    """

    material: MaterialProperties
    e_perp: float               # V/m
    grid_spec: GridSpec
    grid: np.ndarray            # (n_points,)
    energies: np.ndarray        # (n_max,)
    wavefunctions: np.ndarray   # (n_max, n_points)
    z_matrix: np.ndarray        # (n_max, n_max)
    z2_matrix: np.ndarray       # (n_max, n_max)
    dvdz_diag: np.ndarray       # (n_max,)

    @property
    def n_max(self) -> int:
        return len(self.energies)

    def _check(self, n: int) -> int:
        if not 1 <= n <= self.n_max:
            raise IndexError(f"state index {n} outside 1..{self.n_max}")
        return n - 1

    def energy(self, n: int) -> float:
        return float(self.energies[self._check(n)])

    def z_elem(self, n: int, m: int) -> float:
        return float(self.z_matrix[self._check(n), self._check(m)])

    def z2_elem(self, n: int, m: int) -> float:
        return float(self.z2_matrix[self._check(n), self._check(m)])

    def dvdz(self, n: int) -> float:
        return float(self.dvdz_diag[self._check(n)])

    def transition_energy(self, n: int, m: int) -> float:
        """E_m - E_n in J."""
        return self.energy(m) - self.energy(n)

    def transition_frequency_ghz(self, n: int, m: int) -> float:
        return self.transition_energy(n, m) / GHZ


def _solve_reduced(f: float, z_max: float, n_points: int, n_max: int):
    """Finite-difference eigenpairs of the reduced Hamiltonian.

    Returns (zeta, dz, eigenvalues, psi) with psi of shape (n_max, n_points)
    normalized to unit L2 norm in the reduced length and positive near the
    wall; that sign convention fixes all matrix-element phases repo-wide.
    """
    dz = z_max / (n_points + 1)
    zeta = dz * np.arange(1, n_points + 1)
    diag = 2.0 / dz**2 - 2.0 / zeta + f * zeta
    off = np.full(n_points - 1, -1.0 / dz**2)
    try:
        vals, vecs = eigh_tridiagonal(
            diag, off, select="i", select_range=(0, n_max - 1)
        )
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceFailure(f"tridiagonal eigensolver failed: {exc}") from exc
    psi = (vecs / math.sqrt(dz)).T
    psi = psi * np.sign(psi[:, 0])[:, None]
    return zeta, dz, vals, psi


def solve_vertical(
    mat: MaterialProperties,
    e_perp: float,
    n_max: int = 6,
    grid: GridSpec = GridSpec(),
) -> VerticalSpectrum:
    """Solve the vertical problem at e_perp (V/m) for the lowest n_max states.

    Raises GridTooSmall when the highest state carries more than 1e-6 of its
    norm in the outer 1% of the box, and ConvergenceFailure from the
    eigensolver.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    if 4 * n_max > grid.n_points:
        raise ValueError("grid too coarse for the requested number of states")
    f = mat.stark_parameter(e_perp)

    zeta, dz, vals_fine, psi = _solve_reduced(f, grid.z_max, grid.n_points, n_max)
    _, dz_c, vals_coarse, _ = _solve_reduced(f, grid.z_max, grid.n_points // 2, n_max)

    # Two-grid Richardson step: the FD eigenvalue error is C dz^2 + O(dz^4).
    ratio_sq = (dz_c / dz) ** 2
    vals = (ratio_sq * vals_fine - vals_coarse) / (ratio_sq - 1.0)
    if np.any(np.diff(vals) <= 0.0):
        raise ConvergenceFailure("eigenvalues not strictly increasing")

    tail_points = max(1, int(grid.n_points * _TAIL_FRACTION))
    tail = float(np.sum(psi[-1, -tail_points:] ** 2) * dz)
    if tail > _TAIL_TOLERANCE:
        raise GridTooSmall(
            f"state n={n_max} holds {tail:.2e} of its norm in the outer "
            f"{_TAIL_FRACTION:.0%} of the box; increase z_max"
        )

    # Trapezoid quadrature; Dirichlet endpoints make it a plain weighted sum.
    z_red = (psi * zeta) @ psi.T * dz
    z2_red = (psi * zeta**2) @ psi.T * dz
    dvdz_red = np.sum(psi**2 * (2.0 / zeta**2 + f), axis=1) * dz
    z_red = 0.5 * (z_red + z_red.T)
    z2_red = 0.5 * (z2_red + z2_red.T)

    r_b = mat.length_scale()
    r_e = mat.energy_scale()
    arrays = dict(
        grid=zeta * r_b,
        energies=vals * r_e,
        wavefunctions=psi / math.sqrt(r_b),
        z_matrix=z_red * r_b,
        z2_matrix=z2_red * r_b**2,
        dvdz_diag=dvdz_red * r_e / r_b,
    )
    for arr in arrays.values():
        arr.setflags(write=False)
    return VerticalSpectrum(
        material=mat, e_perp=e_perp, grid_spec=grid, **arrays
    )


def truncation_report(vs: VerticalSpectrum) -> np.ndarray:
    """Completeness residual |(z^2)_nn - sum_m |z_nm|^2| / (z^2)_nn per state.

    Measures how much of each state's z^2 sum rule escapes the retained
    basis; downstream perturbative sums inherit exactly this residual.
    """
    z2_diag = np.diag(vs.z2_matrix)
    closure = np.sum(vs.z_matrix**2, axis=1)
    return np.abs(z2_diag - closure) / z2_diag


def stark_slope(
    mat: MaterialProperties,
    e_perp: float,
    n: int,
    n_prime: int,
    grid: GridSpec = GridSpec(),
    delta_v_cm: float = 0.1,
) -> float:
    """Slope of the n -> n_prime transition frequency vs E_perp, GHz cm / V.

    Central finite difference with step delta_v_cm; one-sided from above when
    e_perp sits closer to zero than the step.
    """
    if n == n_prime:
        return 0.0
    n_states = max(n, n_prime, 2)
    delta = delta_v_cm * V_PER_CM

    def freq(e):
        vs = solve_vertical(mat, e, n_max=n_states, grid=grid)
        return vs.transition_frequency_ghz(n, n_prime)

    if e_perp >= delta:
        return (freq(e_perp + delta) - freq(e_perp - delta)) / (2.0 * delta_v_cm)
    return (freq(e_perp + delta) - freq(e_perp)) / delta_v_cm


def find_transition_field(
    mat: MaterialProperties,
    target_ghz: float,
    n: int,
    n_prime: int,
    bracket_v_cm: tuple[float, float] = (1.0, 80.0),
    grid: GridSpec = GridSpec(),
    tol_v_cm: float = 1e-3,
) -> float:
    """E_perp (V/m) at which the n -> n_prime transition hits target_ghz.

    The transition frequency grows monotonically with the tilt, so a sign
    change over the bracket pins the root; raises ValueError otherwise.
    """
    n_states = max(n, n_prime, 2)

    def objective(e_v_cm):
        vs = solve_vertical(mat, e_v_cm * V_PER_CM, n_max=n_states, grid=grid)
        return vs.transition_frequency_ghz(n, n_prime) - target_ghz

    lo, hi = bracket_v_cm
    f_lo, f_hi = objective(lo), objective(hi)
    if f_lo * f_hi > 0.0:
        raise ValueError(
            f"transition {n}->{n_prime} does not reach {target_ghz} GHz "
            f"inside {bracket_v_cm} V/cm (endpoints {f_lo:+.3f}, {f_hi:+.3f})"
        )
    root = brentq(objective, lo, hi, xtol=tol_v_cm)
    return float(root * V_PER_CM)


def write_wavefunctions_csv(vs: VerticalSpectrum, path) -> None:
    """Debug dump: grid and wavefunctions, one row per grid point."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["z_m"] + [f"psi_{n}" for n in range(1, vs.n_max + 1)])
        for i, z in enumerate(vs.grid):
            writer.writerow([f"{z:.9e}"]
                            + [f"{vs.wavefunctions[k, i]:.9e}"
                               for k in range(vs.n_max)])
