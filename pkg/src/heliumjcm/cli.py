"""Batch front-end: config-driven sweeps, maps, and reports.

Usage: heliumjcm <task> --config <path> [--out <dir>] [--threads N]

Artifacts are CSV (fixed number format, LF line endings, so identical
inputs and version give identical bytes) plus a JSON sidecar that echoes
everything needed to rerun: resolved config, physical constants, material
calibration, and any per-point failures.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(artifacts still written, failures listed in the sidecar), 4 self-test
failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .analytics import full_transition_shift_ghz, transition_shift_ghz
from .config import RunConfig, load_run_config
from .coupled import find_crossing, minimum_gap, solve_coupled
from .dissipation import strong_coupling_report
from .errors import ConfigError, HeliumJcmError
from .materials import (
    BOLTZMANN,
    ELECTRON_MASS,
    ELEMENTARY_CHARGE,
    GHZ,
    HBAR,
    PLANCK,
    VACUUM_PERMITTIVITY,
    V_PER_CM,
)
from .spectroscopy import absorption_map
from .vertical import solve_vertical, truncation_report

OUT_DIR_ENV = "HELIUMJCM_OUT"


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if value == 0.0:
            return "0"
        return f"{value:.10g}"
    return str(value)


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(dataclasses.asdict(obj))
    return obj


def _sidecar(cfg: RunConfig, extra: dict) -> dict:
    mat = cfg.material()
    body = {
        "version": __version__,
        "task": cfg.task,
        "resolved_config": dict(cfg.resolved_items()),
        "constants": {
            "elementary_charge_C": ELEMENTARY_CHARGE,
            "electron_mass_kg": ELECTRON_MASS,
            "hbar_Js": HBAR,
            "planck_Js": PLANCK,
            "boltzmann_JK": BOLTZMANN,
            "vacuum_permittivity_Fm": VACUUM_PERMITTIVITY,
        },
        "material": {
            "isotope": mat.isotope,
            "rydberg_energy_J": mat.rydberg_energy,
            "bohr_radius_m": mat.bohr_radius,
            "epsilon": mat.epsilon,
            "lambda_Jm": mat.lambda_coupling,
            "barrier_height_J": mat.barrier_height,
            "surface_tension_Nm": mat.surface_tension,
            "mass_density_kgm3": mat.mass_density,
        },
    }
    body.update(extra)
    return _jsonable(body)


def _write_sidecar(path: str, cfg: RunConfig, extra: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(_sidecar(cfg, extra), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_spectrum_sweep(cfg: RunConfig, out_dir: str) -> int:
    mat = cfg.material()
    basis = cfg.basis()
    base = cfg.field_config()
    vs = solve_vertical(mat, base.e_perp, basis.n_max, cfg.grid())
    values = np.linspace(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_steps)
    overlays = cfg.b_y_values if (cfg.sweep_axis == "b_z"
                                  and cfg.b_y_values) else (base.b_y,)

    rows = []
    failures = []
    for b_y in overlays:
        for value in values:
            if cfg.sweep_axis == "b_z":
                point = base.replace(b_z=float(value), b_y=float(b_y))
            else:
                point = base.replace(b_y=float(value))
            try:
                spec = solve_coupled(vs, point, basis)
            except HeliumJcmError as exc:
                failures.append({"sweep_value": float(value),
                                 "b_y": float(point.b_y),
                                 "error": f"{type(exc).__name__}: {exc}"})
                continue
            ground = spec.eigenvalues[spec.locate(1, 0)]
            for k in range(basis.size):
                n_dom, l_dom, weight = spec.dominant(k)
                rows.append((
                    float(value), float(point.b_y), k,
                    float(spec.eigenvalues[k] / GHZ),
                    float((spec.eigenvalues[k] - ground) / GHZ),
                    n_dom, l_dom, float(weight),
                ))

    csv_path = os.path.join(out_dir, f"{cfg.prefix}_spectrum.csv")
    _write_csv(csv_path,
               ["sweep_value", "b_y", "state", "energy_ghz",
                "energy_rel_ghz", "dominant_n", "dominant_l",
                "dominant_weight"],
               rows)
    _write_sidecar(os.path.join(out_dir, f"{cfg.prefix}_spectrum.json"), cfg,
                   {"sweep_axis": cfg.sweep_axis,
                    "overlay_b_y": list(overlays),
                    "vertical_levels_ghz":
                        [vs.energy(n) / GHZ for n in range(1, vs.n_max + 1)],
                    "truncation_residuals": truncation_report(vs),
                    "failures": failures})
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return 3 if failures else 0


def _run_shifts(cfg: RunConfig, out_dir: str) -> int:
    mat = cfg.material()
    basis = cfg.basis()
    base = cfg.field_config()
    vs = solve_vertical(mat, base.e_perp, basis.n_max, cfg.grid())
    values = np.linspace(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_steps)

    rows = []
    failures = []
    for b_y in values:
        point = base.replace(b_y=float(b_y))
        for l in cfg.l_values:
            try:
                pert = transition_shift_ghz(vs, point, l)
            except HeliumJcmError as exc:
                pert = float("nan")
                failures.append({"b_y": float(b_y), "l": l,
                                 "error": f"{type(exc).__name__}: {exc}"})
            if point.b_y == 0.0:
                full = 0.0
            else:
                full = full_transition_shift_ghz(vs, point, l, basis)
            rows.append((float(b_y), l, pert, full))

    csv_path = os.path.join(out_dir, f"{cfg.prefix}_shifts.csv")
    _write_csv(csv_path,
               ["b_y", "l", "perturbative_ghz", "full_ghz"], rows)
    _write_sidecar(os.path.join(out_dir, f"{cfg.prefix}_shifts.json"), cfg,
                   {"transition_ghz": vs.transition_frequency_ghz(1, 2),
                    "failures": failures})
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return 3 if failures else 0


def _run_crossings(cfg: RunConfig, out_dir: str) -> int:
    mat = cfg.material()
    basis = cfg.basis()
    base = cfg.field_config()
    vs = solve_vertical(mat, base.e_perp, basis.n_max, cfg.grid())

    rows = []
    failures = []
    for n_hi, n_lo in cfg.crossing_pairs:
        pair = ((n_hi, 0), (n_lo, 1))
        try:
            b_star = find_crossing(vs, pair, (cfg.b_z_min, cfg.b_z_max))
        except HeliumJcmError as exc:
            failures.append({"pair": [n_hi, n_lo],
                             "error": f"{type(exc).__name__}: {exc}"})
            continue
        if base.b_y > 0.0:
            try:
                b_min, gap = minimum_gap(vs, base, pair, basis)
                rows.append((n_hi, n_lo, b_star, b_min, gap / GHZ))
            except HeliumJcmError as exc:
                failures.append({"pair": [n_hi, n_lo],
                                 "error": f"{type(exc).__name__}: {exc}"})
                rows.append((n_hi, n_lo, b_star, float("nan"),
                             float("nan")))
        else:
            rows.append((n_hi, n_lo, b_star, float("nan"), float("nan")))

    csv_path = os.path.join(out_dir, f"{cfg.prefix}_crossings.csv")
    _write_csv(csv_path,
               ["n_upper", "n_lower", "b_z_cross_t", "b_z_min_gap_t",
                "gap_ghz"],
               rows)
    _write_sidecar(os.path.join(out_dir, f"{cfg.prefix}_crossings.json"),
                   cfg, {"failures": failures})
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return 3 if failures else 0


def _run_absorption_map(cfg: RunConfig, out_dir: str, threads: int) -> int:
    mat = cfg.material()
    base = cfg.field_config()
    sweep = np.linspace(cfg.map_sweep_start, cfg.map_sweep_stop,
                        cfg.map_sweep_steps)
    e_grid = np.linspace(cfg.map_e_perp_start, cfg.map_e_perp_stop,
                         cfg.map_e_perp_steps)
    amap = absorption_map(
        mat, base, cfg.map_sweep_axis, sweep, e_grid,
        cfg.mw_frequency_ghz,
        broadening=cfg.broadening(),
        basis=cfg.basis(),
        grid=cfg.grid(),
        l_cut=cfg.l_cut,
        band_ghz=cfg.band_ghz,
        threads=threads,
    )

    rows = []
    for i, s in enumerate(amap.sweep_values):
        for j, e in enumerate(amap.e_perp_v_cm):
            rows.append((float(s), float(e), float(amap.intensity[i, j])))
    csv_path = os.path.join(out_dir, f"{cfg.prefix}_map.csv")
    _write_csv(csv_path, [cfg.map_sweep_axis, "e_perp_v_cm", "intensity"],
               rows)
    _write_sidecar(os.path.join(out_dir, f"{cfg.prefix}_map.json"), cfg, {
        "mw_frequency_ghz": amap.mw_frequency_ghz,
        "sweep_axis": amap.sweep_name,
        "line_centers": amap.lines,
        "failures": [{"i": i, "j": j, "error": msg}
                     for i, j, msg in amap.failures],
    })
    print(f"wrote {csv_path} ({len(rows)} pixels, "
          f"{len(amap.failures)} failed)")
    return 3 if amap.failures else 0


def _run_rates(cfg: RunConfig, out_dir: str) -> int:
    mat = cfg.material()
    base = cfg.field_config()
    vs = solve_vertical(mat, base.e_perp, max(cfg.n_max, 2), cfg.grid())
    report = strong_coupling_report(vs, base, pair=cfg.rates_pair,
                                    nu_0=cfg.nu_0)
    path = os.path.join(out_dir, f"{cfg.prefix}_rates.json")
    _write_sidecar(path, cfg, {"report": {
        "g_over_h_ghz": report.g_ghz,
        "rate_vertical_per_s": report.rate_vertical,
        "rate_ladder_per_s": report.rate_ladder,
        "elastic_rate_per_s": report.elastic_rate,
        "coherence_ratio": report.ratio,
    }})
    print(f"wrote {path}")
    return 0


def _run_self_test(cfg: RunConfig | None) -> int:
    """Fast bundled regression: hydrogenic limit, sum rule, uncoupled fan."""
    from .coupled import ProductBasis, assemble_hamiltonian, diagonalize
    from .materials import (
        FieldConfiguration,
        cyclotron_frequency,
        material_for,
    )

    mat = cfg.material() if cfg is not None else material_for("he3")
    checks: list[tuple[str, bool, str]] = []

    vs = solve_vertical(mat, 0.0, 4)
    worst_e = max(abs(vs.energy(n) / (-mat.rydberg_energy / n**2) - 1.0)
                  for n in range(1, 5))
    checks.append(("hydrogenic energies within 0.1%", worst_e < 1e-3,
                   f"worst relative error {worst_e:.2e}"))
    worst_z = max(abs(vs.z_elem(n, n) / (1.5 * n**2 * mat.bohr_radius) - 1.0)
                  for n in range(1, 5))
    checks.append(("hydrogenic dipole diagonals within 0.1%", worst_z < 1e-3,
                   f"worst relative error {worst_z:.2e}"))

    vs6 = solve_vertical(mat, 15.0 * V_PER_CM, 6)
    resid = truncation_report(vs6)[0]
    checks.append(("ground-state dipole sum rule within 5%", resid < 0.05,
                   f"missing weight {resid:.2%}"))

    basis = ProductBasis(n_max=4, l_max=12)
    cfg0 = FieldConfiguration(e_perp=15.0 * V_PER_CM, b_z=0.65, b_y=0.0)
    spec = diagonalize(assemble_hamiltonian(vs6, cfg0, basis), basis, cfg0)
    expected = sorted(
        vs6.energy(n) + HBAR * cyclotron_frequency(0.65) * l
        for n in range(1, 5) for l in range(13)
    )
    fan_err = max(abs(a - b) for a, b in zip(spec.eigenvalues, expected))
    checks.append(("uncoupled ladder fan exact", fan_err < 1e-9 * GHZ,
                   f"worst deviation {fan_err / GHZ:.2e} GHz"))

    ok = all(passed for _, passed, _ in checks)
    for name, passed, detail in checks:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    return 0 if ok else 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heliumjcm",
        description="Rydberg-Landau spectra of surface electrons on "
                    "liquid helium in tilted magnetic fields",
    )
    sub = parser.add_subparsers(dest="task", required=True)
    descriptions = {
        "spectrum-sweep": "eigenvalue fan over a magnetic-field sweep",
        "absorption-map": "microwave absorption over field x tuning field",
        "shifts": "perturbative vs exact transition shifts over b_y",
        "crossings": "uncoupled crossing fields and dressed minimum gaps",
        "rates": "coupling vs ripplon decay at one operating point",
        "self-test": "bundled regression checks",
        "validate": "check a config without computing",
    }
    for task, desc in descriptions.items():
        p = sub.add_parser(task, help=desc)
        p.add_argument("--config",
                       required=task not in ("self-test",),
                       help="path to an INI run configuration")
        p.add_argument("--out", default=None,
                       help=f"output directory (default ${OUT_DIR_ENV} "
                            "or ./out)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for map pixels")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.task == "validate":
        try:
            cfg = load_run_config(args.config)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        if not cfg.task:
            print("error: run.task: required for validate", file=sys.stderr)
            return 2
        errors, warnings = cfg.validate()
        for line in warnings:
            print(f"warning: {line}")
        if errors:
            for line in errors:
                print(f"error: {line}", file=sys.stderr)
            return 2
        print(f"ok: {args.config} ({cfg.task})")
        for name, value in cfg.resolved_items():
            print(f"  {name} = {value}")
        return 0

    if args.task == "self-test":
        cfg = None
        if args.config:
            try:
                cfg = load_run_config(args.config, task="self-test")
            except ConfigError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return 2
        try:
            return _run_self_test(cfg)
        except HeliumJcmError as exc:
            print(f"self-test crashed: {exc}", file=sys.stderr)
            return 4

    try:
        cfg = load_run_config(args.config, task=args.task)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    errors, warnings = cfg.validate()
    for line in warnings:
        print(f"warning: {line}", file=sys.stderr)
    if errors:
        for line in errors:
            print(f"error: {line}", file=sys.stderr)
        return 2

    out_dir = args.out or cfg.out_dir or os.environ.get(OUT_DIR_ENV, "out")
    os.makedirs(out_dir, exist_ok=True)

    try:
        if args.task == "spectrum-sweep":
            return _run_spectrum_sweep(cfg, out_dir)
        if args.task == "shifts":
            return _run_shifts(cfg, out_dir)
        if args.task == "crossings":
            return _run_crossings(cfg, out_dir)
        if args.task == "absorption-map":
            return _run_absorption_map(cfg, out_dir, args.threads)
        if args.task == "rates":
            return _run_rates(cfg, out_dir)
    except HeliumJcmError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 3
    raise AssertionError(f"unhandled task {args.task}")  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
