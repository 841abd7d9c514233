"""Coupled vertical-plus-Landau problem on the truncated product basis |n,l>.

The Hamiltonian (with the cyclotron zero-point energy already dropped) is

    H = E_n delta + hbar w_c l delta + (m w_y^2 / 2) (z^2)_nn' delta_ll'
        + (hbar w_y / sqrt(2) l_B) z_nn' (sqrt(l+1) d_{l',l+1} + sqrt(l) d_{l',l-1})

assembled in SI Joules with Kronecker products, flat index
k = (n - 1) (l_max + 1) + l. The diamagnetic z^2 block is kept as a full
matrix in n by default; a diagonal-only mode exists to quantify how much the
off-diagonal renormalization matters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BasisMismatch,
    BranchTrackingLost,
    ConvergenceFailure,
    NoCrossingInRange,
)
from .materials import (
    ELECTRON_MASS,
    HBAR,
    FieldConfiguration,
    cyclotron_frequency,
    derived_frequencies,
)
from .vertical import VerticalSpectrum


@dataclass(frozen=True)
class ProductBasis:
    """Truncated |n,l> basis, 1 <= n <= n_max, 0 <= l <= l_max."""

    n_max: int = 6
    l_max: int = 50

    def __post_init__(self):
        if self.n_max < 1 or self.l_max < 0:
            raise ValueError("need n_max >= 1 and l_max >= 0")

    @property
    def size(self) -> int:
        return self.n_max * (self.l_max + 1)

    def index(self, n: int, l: int) -> int:
        if not (1 <= n <= self.n_max and 0 <= l <= self.l_max):
            raise IndexError(f"state ({n},{l}) outside basis")
        return (n - 1) * (self.l_max + 1) + l

    def label(self, k: int) -> tuple[int, int]:
        if not 0 <= k < self.size:
            raise IndexError(f"flat index {k} outside basis")
        n, l = divmod(k, self.l_max + 1)
        return n + 1, l


@dataclass(frozen=True)
class CoupledSpectrum:
    """Eigendecomposition of the coupled Hamiltonian.

    eigenvalues ascending in J (cyclotron zero-point energy excluded),
    eigenvectors in columns, both frozen.
    """

    basis: ProductBasis
    config: FieldConfiguration
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def amplitude(self, k: int, n: int, l: int) -> float:
        return float(self.eigenvectors[self.basis.index(n, l), k])

    def dominant(self, k: int) -> tuple[int, int, float]:
        """(n, l, weight) of the strongest product component of state k."""
        weights = self.eigenvectors[:, k] ** 2
        idx = int(np.argmax(weights))
        n, l = self.basis.label(idx)
        return n, l, float(weights[idx])

    def locate(self, n: int, l: int) -> int:
        """Eigenstate index with the largest weight on |n,l>."""
        row = self.eigenvectors[self.basis.index(n, l), :] ** 2
        return int(np.argmax(row))


def _landau_ladder(l_max: int) -> np.ndarray:
    """Matrix of <l'| a + a^dagger |l> on 0..l_max."""
    s = np.zeros((l_max + 1, l_max + 1))
    for l in range(l_max):
        s[l + 1, l] = s[l, l + 1] = np.sqrt(l + 1.0)
    return s


def assemble_hamiltonian(
    vs: VerticalSpectrum,
    cfg: FieldConfiguration,
    basis: ProductBasis = ProductBasis(),
    diamagnetic: str = "full",
) -> np.ndarray:
    """Dense symmetric Hamiltonian in J on the product basis.

    diamagnetic: "full" keeps the whole (z^2)_nn' block, "diagonal" its
    diagonal only (lower-fidelity comparison mode), "none" drops it.
    """
    if basis.n_max > vs.n_max:
        raise BasisMismatch(
            f"basis wants n_max={basis.n_max}, spectrum has {vs.n_max}"
        )
    if diamagnetic not in ("full", "diagonal", "none"):
        raise ValueError(f"unknown diamagnetic mode {diamagnetic!r}")
    if abs(cfg.e_perp - vs.e_perp) > 1e-9 * max(1.0, abs(vs.e_perp)):
        raise BasisMismatch(
            "field configuration e_perp differs from the vertical solve"
        )

    nb, lb = basis.n_max, basis.l_max
    omega_c = cyclotron_frequency(cfg.b_z)
    eye_n = np.eye(nb)
    eye_l = np.eye(lb + 1)

    h = np.kron(np.diag(vs.energies[:nb]), eye_l)
    h += np.kron(eye_n, HBAR * omega_c * np.diag(np.arange(lb + 1.0)))

    if cfg.b_y != 0.0:
        _, omega_y, l_b = derived_frequencies(cfg)
        z2 = vs.z2_matrix[:nb, :nb]
        if diamagnetic == "diagonal":
            z2 = np.diag(np.diag(z2))
        if diamagnetic != "none":
            h += 0.5 * ELECTRON_MASS * omega_y**2 * np.kron(z2, eye_l)
        coupling = HBAR * omega_y / (np.sqrt(2.0) * l_b)
        h += coupling * np.kron(vs.z_matrix[:nb, :nb], _landau_ladder(lb))

    return 0.5 * (h + h.T)


def diagonalize(
    h: np.ndarray,
    basis: ProductBasis,
    cfg: FieldConfiguration,
) -> CoupledSpectrum:
    if h.shape != (basis.size, basis.size):
        raise BasisMismatch(
            f"matrix shape {h.shape} does not match basis size {basis.size}"
        )
    if not np.all(np.isfinite(h)):
        raise ConvergenceFailure("Hamiltonian contains non-finite entries")
    try:
        vals, vecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"dense eigensolver failed: {exc}") from exc
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return CoupledSpectrum(basis=basis, config=cfg,
                           eigenvalues=vals, eigenvectors=vecs)


def solve_coupled(
    vs: VerticalSpectrum,
    cfg: FieldConfiguration,
    basis: ProductBasis = ProductBasis(),
    diamagnetic: str = "full",
) -> CoupledSpectrum:
    return diagonalize(assemble_hamiltonian(vs, cfg, basis, diamagnetic),
                       basis, cfg)


def find_crossing(
    vs: VerticalSpectrum,
    pair: tuple[tuple[int, int], tuple[int, int]],
    b_z_range: tuple[float, float],
    xtol: float = 1e-4,
) -> float:
    """b_z (T) where the uncoupled levels (n_a,l_a) and (n_b,l_b) cross.

    Works on the b_y = 0 energies E_n + hbar w_c l, so the root is found by
    bisection of a linear function of b_z; raises NoCrossingInRange when the
    difference keeps one sign over the interval.
    """
    (n_a, l_a), (n_b, l_b) = pair

    def gap(b_z):
        w_c = cyclotron_frequency(b_z)
        return (vs.energy(n_a) + HBAR * w_c * l_a
                - vs.energy(n_b) - HBAR * w_c * l_b)

    lo, hi = b_z_range
    if not 0.0 <= lo < hi:
        raise ValueError("need 0 <= lo < hi for the search range")
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if g_lo * g_hi > 0.0:
        raise NoCrossingInRange(
            f"levels {pair} do not cross for b_z in {b_z_range} T"
        )
    return float(brentq(gap, lo, hi, xtol=xtol))


def minimum_gap(
    vs: VerticalSpectrum,
    cfg_template: FieldConfiguration,
    pair: tuple[tuple[int, int], tuple[int, int]],
    basis: ProductBasis = ProductBasis(),
    b_z_range: tuple[float, float] | None = None,
    n_steps: int = 81,
    overlap_threshold: float = 0.5,
) -> tuple[float, float]:
    """(b_z at minimum, gap in J) for the avoided crossing of a level pair.

    Sweeps b_z, following the two dressed branches by eigenvector overlap
    continuity rather than energy order, which swaps at the crossing. When
    b_z_range is omitted a +-5% window around the uncoupled crossing is used.
    Raises BranchTrackingLost when successive eigenvectors overlap below
    overlap_threshold, the sign the sweep step is too coarse.
    """
    if b_z_range is None:
        center = find_crossing(vs, pair, (1e-3, 20.0))
        b_z_range = (0.95 * center, 1.05 * center)
    values = np.linspace(b_z_range[0], b_z_range[1], n_steps)

    spec = solve_coupled(vs, cfg_template.replace(b_z=float(values[0])), basis)
    tracked = [spec.eigenvectors[:, spec.locate(*label)].copy()
               for label in pair]
    if np.allclose(tracked[0], tracked[1]):
        raise BranchTrackingLost(
            f"branches of {pair} start on the same eigenstate; "
            "widen b_z_range or reduce b_y"
        )

    best = (float(values[0]), float("inf"))
    for b_z in values:
        spec = solve_coupled(vs, cfg_template.replace(b_z=float(b_z)), basis)
        energies = []
        taken = set()
        for i, prev in enumerate(tracked):
            overlaps = np.abs(spec.eigenvectors.T @ prev)
            for k in taken:
                overlaps[k] = -1.0
            k = int(np.argmax(overlaps))
            if overlaps[k] < overlap_threshold:
                raise BranchTrackingLost(
                    f"overlap {overlaps[k]:.3f} below {overlap_threshold} "
                    f"at b_z = {b_z:.4f} T; refine the sweep"
                )
            taken.add(k)
            tracked[i] = spec.eigenvectors[:, k].copy()
            energies.append(spec.eigenvalues[k])
        gap = abs(energies[1] - energies[0])
        if gap < best[1]:
            best = (float(b_z), float(gap))
    return best
