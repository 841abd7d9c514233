"""Forward simulation of the Stark-spectroscopy observables.

A map pixel at (sweep value, E_perp) is built by re-solving the coupled
problem at that tuning field, cataloging the microwave transitions out of
the thermally occupied initial states, and depositing each line as a
unit-area frequency Gaussian converted to the E_perp axis by its own local
Stark slope. That slope factor makes the E_perp-integrated intensity equal
the in-band sum of weight times squared moment, which is the sum rule the
tests pin.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .coupled import CoupledSpectrum, ProductBasis, solve_coupled
from .errors import DegenerateField, HeliumJcmError
from .materials import (
    BOLTZMANN,
    ELEMENTARY_CHARGE,
    ELECTRON_MASS,
    GHZ,
    HBAR,
    V_PER_CM,
    FieldConfiguration,
    MaterialProperties,
    cyclotron_frequency,
)
from .vertical import GridSpec, VerticalSpectrum, solve_vertical

SQRT_2PI = math.sqrt(2.0 * math.pi)


def thermal_populations(cfg: FieldConfiguration, l_cut: int) -> np.ndarray:
    """Boltzmann weights of the Landau ladder, normalized over l = 0..l_cut.

    The vertical motion is assumed frozen in n = 1; its quantum is three
    orders of magnitude above k_B T here.
    """
    if cfg.b_z <= 0.0:
        raise DegenerateField("thermal populations need b_z > 0")
    if l_cut < 0:
        raise ValueError("l_cut must be non-negative")
    x = HBAR * cyclotron_frequency(cfg.b_z) / (BOLTZMANN * cfg.temperature)
    weights = np.exp(-x * np.arange(l_cut + 1))
    return weights / weights.sum()


@dataclass(frozen=True)
class BroadeningModel:
    """Gaussian linewidth model, all widths as standard deviations in GHz.

    base_width covers the b_y-independent inhomogeneity of the tuning field.
    The fluctuating in-plane Coulomb field of the neighbors adds
    kappa (b_y/b_z) E_f with E_f = c_f n_s^(3/4) (n_s in cm^-2, E_f in V/cm);
    c_f is a calibration constant, not a measured one. Thermal motion across
    b_y adds kappa sqrt(k_B T / m_e) b_y, but only once the Landau splitting
    has sunk below k_B T, where the in-plane motion is quasi-classical.
    """

    base_width_ghz: float = 0.2
    kappa_ghz_cm_per_v: float = 0.74
    areal_density_cm2: float = 1e7
    fluct_field_coefficient: float = 4.3e-6   # V/cm per cm^-3/2
    include_thermal: bool = True

    def width_ghz(self, cfg: FieldConfiguration) -> float:
        b_y = abs(cfg.b_y)
        terms = [self.base_width_ghz]
        if cfg.b_z > 0.0 and b_y > 0.0:
            e_f = self.fluct_field_coefficient * self.areal_density_cm2**0.75
            terms.append(self.kappa_ghz_cm_per_v * (b_y / cfg.b_z) * e_f)
            if (self.include_thermal
                    and HBAR * cyclotron_frequency(cfg.b_z)
                    < BOLTZMANN * cfg.temperature):
                rms_v_cm = (math.sqrt(BOLTZMANN * cfg.temperature / ELECTRON_MASS)
                            * b_y / V_PER_CM)
                terms.append(self.kappa_ghz_cm_per_v * rms_v_cm)
        return math.hypot(*terms) if len(terms) > 1 else terms[0]


def broadening_width(
    cfg: FieldConfiguration,
    areal_density_cm2: float,
    base_width_ghz: float,
    kappa_ghz_cm_per_v: float = 0.74,
    fluct_field_coefficient: float = 4.3e-6,
) -> float:
    """Total Gaussian linewidth (GHz, standard deviation) at cfg."""
    if areal_density_cm2 <= 0.0:
        raise ValueError("areal density must be positive")
    model = BroadeningModel(
        base_width_ghz=base_width_ghz,
        kappa_ghz_cm_per_v=kappa_ghz_cm_per_v,
        areal_density_cm2=areal_density_cm2,
        fluct_field_coefficient=fluct_field_coefficient,
    )
    return model.width_ghz(cfg)


@dataclass(frozen=True)
class TransitionLine:
    """One microwave line: initial product label with its thermal weight,
    final eigenstate, frequency, squared moment, and the Landau-index jump
    of the dominant components."""

    initial_label: tuple[int, int]
    weight: float
    final_index: int
    final_label: tuple[int, int]
    frequency_ghz: float
    moment_sq: float          # m^2
    sideband_order: int


def _moments_from(spec: CoupledSpectrum, z_matrix: np.ndarray,
                  k_init: int) -> np.ndarray:
    """<k|z|k_init> for every eigenstate k, in m."""
    nb, lb = spec.basis.n_max, spec.basis.l_max
    c = spec.eigenvectors[:, k_init].reshape(nb, lb + 1)
    zc = (z_matrix[:nb, :nb] @ c).reshape(-1)
    return spec.eigenvectors.T @ zc


def transition_catalog(
    spec: CoupledSpectrum,
    vs: VerticalSpectrum,
    populations: np.ndarray,
    mw_band_ghz: tuple[float, float],
) -> list[TransitionLine]:
    """All lines out of the thermally occupied (1,l) states with transition
    frequencies inside the band."""
    f_min, f_max = mw_band_ghz
    if f_min >= f_max:
        raise ValueError("empty frequency band")
    lines: list[TransitionLine] = []
    for l0, weight in enumerate(populations):
        if l0 > spec.basis.l_max:
            break
        k_init = spec.locate(1, l0)
        e_init = spec.eigenvalues[k_init]
        moments = _moments_from(spec, vs.z_matrix, k_init)
        freqs = (spec.eigenvalues - e_init) / GHZ
        for k in np.nonzero((freqs >= f_min) & (freqs <= f_max))[0]:
            if k == k_init:
                continue
            n_f, l_f, _ = spec.dominant(int(k))
            lines.append(TransitionLine(
                initial_label=(1, l0),
                weight=float(weight),
                final_index=int(k),
                final_label=(n_f, l_f),
                frequency_ghz=float(freqs[k]),
                moment_sq=float(moments[k] ** 2),
                sideband_order=l_f - l0,
            ))
    return lines


def line_profile(
    line: TransitionLine,
    mw_frequency_ghz: float,
    width_ghz: float,
    kappa_ghz_cm_per_v: float,
    e_perp_grid_v_cm: np.ndarray,
    line_e_perp_v_cm: float,
) -> np.ndarray:
    """Intensity contribution of one line over an E_perp grid.

    Linearizes the Stark map around the point where the line was computed:
    the line center sits where its frequency Stark-shifts onto the drive,
    the Gaussian has unit area in E_perp, and the total area is weight times
    squared moment. The zero-width limit degenerates to a delta at the
    center, which callers get by narrow width, not by width = 0.
    """
    if width_ghz <= 0.0:
        raise ValueError("width must be positive")
    if kappa_ghz_cm_per_v <= 0.0:
        raise ValueError("kappa must be positive")
    center = line_e_perp_v_cm + (mw_frequency_ghz - line.frequency_ghz) \
        / kappa_ghz_cm_per_v
    sigma_e = width_ghz / kappa_ghz_cm_per_v
    x = (np.asarray(e_perp_grid_v_cm) - center) / sigma_e
    area = line.weight * line.moment_sq
    return area * np.exp(-0.5 * x**2) / (sigma_e * SQRT_2PI)


@dataclass(frozen=True)
class AbsorptionMap:
    """Simulated absorption over (swept field) x (tuning field).

    intensity is normalized to unit maximum; failed pixels are NaN and
    listed in failures as (sweep index, e_perp index, message).
    """

    sweep_name: str
    sweep_values: np.ndarray
    e_perp_v_cm: np.ndarray
    intensity: np.ndarray
    lines: list[dict] = field(repr=False)
    config: FieldConfiguration | None = None
    mw_frequency_ghz: float = 0.0
    failures: list[tuple[int, int, str]] = field(default_factory=list)
    peak_raw: float = 1.0   # intensity * peak_raw restores physical units


def _auto_l_cut(cfg: FieldConfiguration, l_max: int) -> int:
    """Smallest ladder cut that holds the neglected Boltzmann tail below
    about 3e-4 of the total population."""
    x = HBAR * cyclotron_frequency(cfg.b_z) / (BOLTZMANN * cfg.temperature)
    return int(min(l_max, max(5, math.ceil(8.0 / max(x, 1e-6)))))


def _pixel_intensity(
    spec: CoupledSpectrum,
    vs: VerticalSpectrum,
    populations: np.ndarray,
    mw_frequency_ghz: float,
    width_ghz: float,
    band_ghz: float,
) -> tuple[float, list[TransitionLine]]:
    """Deposit of all in-band lines at one pixel plus the raw catalog.

    Each line contributes area x Gaussian(frequency detuning) x |local Stark
    slope|; the slope is the Hellmann-Feynman diagonal form
    e (zbar_final - zbar_initial) / h with zbar the eigenstate-weighted z_nn.
    """
    band = (mw_frequency_ghz - band_ghz, mw_frequency_ghz + band_ghz)
    lines = transition_catalog(spec, vs, populations, band)
    if not lines:
        return 0.0, lines

    nb, lb = spec.basis.n_max, spec.basis.l_max
    weights_n = (spec.eigenvectors.T.reshape(-1, nb, lb + 1) ** 2).sum(axis=2)
    zbar = weights_n @ np.diag(vs.z_matrix)[:nb]    # m, per eigenstate

    total = 0.0
    for line in lines:
        k_init = spec.locate(1, line.initial_label[1])
        slope = abs(ELEMENTARY_CHARGE * (zbar[line.final_index] - zbar[k_init])
                    * V_PER_CM) / GHZ          # GHz per V/cm
        detuning = (line.frequency_ghz - mw_frequency_ghz) / width_ghz
        if abs(detuning) > 8.0:
            continue
        gaussian = math.exp(-0.5 * detuning**2) / (width_ghz * SQRT_2PI)
        total += line.weight * line.moment_sq * gaussian * slope
    return total, lines


def absorption_map(
    mat: MaterialProperties,
    base_cfg: FieldConfiguration,
    sweep_name: str,
    sweep_values: np.ndarray,
    e_perp_values_v_cm: np.ndarray,
    mw_frequency_ghz: float,
    broadening: BroadeningModel = BroadeningModel(),
    basis: ProductBasis = ProductBasis(),
    grid: GridSpec = GridSpec(),
    l_cut: int | None = None,
    band_ghz: float = 30.0,
    threads: int = 1,
) -> AbsorptionMap:
    """Simulate a 2D absorption map over a magnetic-field axis x E_perp.

    sweep_name must be "b_y" or "b_z"; the tuning axis is always E_perp, so
    sweeping it as the outer axis too is rejected. Vertical solves are shared
    across the whole sweep column at fixed E_perp. Pixels are independent;
    threads > 1 distributes them without changing the result.
    """
    if sweep_name not in ("b_y", "b_z"):
        raise ValueError(
            f"sweep axis must be b_y or b_z, not {sweep_name!r}; the second "
            "axis is already e_perp"
        )
    sweep_values = np.asarray(sweep_values, dtype=float)
    e_grid = np.asarray(e_perp_values_v_cm, dtype=float)
    if sweep_values.size == 0 or e_grid.size == 0:
        raise ValueError("sweep and e_perp axes must be non-empty")

    verticals: list[VerticalSpectrum | Exception] = []
    for e_v_cm in e_grid:
        try:
            verticals.append(
                solve_vertical(mat, e_v_cm * V_PER_CM, basis.n_max, grid))
        except HeliumJcmError as exc:
            verticals.append(exc)

    intensity = np.full((sweep_values.size, e_grid.size), np.nan)
    failures: list[tuple[int, int, str]] = []
    traces: list[dict] = []

    def run_pixel(i: int, j: int):
        vs = verticals[j]
        if isinstance(vs, Exception):
            return i, j, vs, None
        cfg = base_cfg.replace(**{sweep_name: float(sweep_values[i]),
                                  "e_perp": float(e_grid[j] * V_PER_CM)})
        try:
            cut = _auto_l_cut(cfg, basis.l_max) if l_cut is None else l_cut
            populations = thermal_populations(cfg, cut)
            spec = solve_coupled(vs, cfg, basis)
            width = broadening.width_ghz(cfg)
            value, lines = _pixel_intensity(
                spec, vs, populations, mw_frequency_ghz, width, band_ghz)
            return i, j, value, lines
        except HeliumJcmError as exc:
            return i, j, exc, None

    jobs = [(i, j) for i in range(sweep_values.size)
            for j in range(e_grid.size)]
    line_table: dict[tuple[int, int], list[TransitionLine]] = {}
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda ij: run_pixel(*ij), jobs))
    else:
        results = [run_pixel(i, j) for i, j in jobs]

    for i, j, value, lines in results:
        if isinstance(value, Exception):
            failures.append((i, j, f"{type(value).__name__}: {value}"))
            continue
        intensity[i, j] = value
        line_table[(i, j)] = lines

    # Line-center traces: along E_perp at fixed sweep value, find where each
    # labeled line crosses the drive frequency. Lines carrying under 1e-6 of
    # the strongest area are invisible on any map and are dropped here.
    area_floor = 1e-6 * max(
        (line.weight * line.moment_sq
         for lines in line_table.values() for line in lines),
        default=0.0,
    )
    for i in range(sweep_values.size):
        by_label: dict[tuple, list[tuple[float, float, float]]] = {}
        for j in range(e_grid.size):
            for line in line_table.get((i, j), ()):
                if line.weight * line.moment_sq < area_floor:
                    continue
                key = (line.initial_label, line.final_label)
                by_label.setdefault(key, []).append(
                    (float(e_grid[j]), line.frequency_ghz,
                     line.weight * line.moment_sq))
        for (init_l, final_l), points in by_label.items():
            points.sort()
            for (e0, f0, a0), (e1, f1, _) in zip(points, points[1:]):
                d0, d1 = f0 - mw_frequency_ghz, f1 - mw_frequency_ghz
                if d0 == 0.0 or d0 * d1 < 0.0:
                    frac = 0.0 if d0 == 0.0 else d0 / (d0 - d1)
                    traces.append({
                        "sweep_value": float(sweep_values[i]),
                        "e_perp_v_cm": e0 + frac * (e1 - e0),
                        "initial": list(init_l),
                        "final": list(final_l),
                        "area": a0,
                    })

    peak = np.nanmax(intensity) if np.isfinite(intensity).any() else np.nan
    if peak and np.isfinite(peak) and peak > 0.0:
        intensity = intensity / peak
    else:
        peak = 1.0
    intensity.setflags(write=False)
    return AbsorptionMap(
        sweep_name=sweep_name,
        sweep_values=sweep_values,
        e_perp_v_cm=e_grid,
        intensity=intensity,
        lines=traces,
        config=base_cfg,
        mw_frequency_ghz=mw_frequency_ghz,
        failures=failures,
        peak_raw=float(peak),
    )
