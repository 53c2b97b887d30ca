"""Scenario scans: config parsing, grid execution, CSV output.

A scan file is TOML with sections [scan], [scan.grid], [physics],
[protocol], [security], [output] and an optional [search] block; see
README.md for the full key list. Each grid point is optimized
independently (no state is shared between points), so rows can be
computed by a worker pool and are written sorted by grid coordinate.

The optimized source columns (mu .. Tc) and the diagnostic columns
(E_z, phi11_z_upper, s11_frac) describe the advantage-distillation
optimum when that toggle is on, otherwise the plain optimum.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .channel import NoZBasisData, build_statistics, transmittance
from .config import (
    ConfigError,
    DetectorParams,
    EpsilonBudget,
    ExperimentConfig,
    FiberParams,
    NoiseParams,
    SourceParams,
)
from .decoy import estimate_bounds
from .keyrate import plob_bound
from .optimizer import SearchSpace, optimize

CSV_COLUMNS = (
    "L_km",
    "N",
    "e_d_z",
    "E_hom",
    "rate_no_ad",
    "rate_ad",
    "b_opt",
    "plob",
    "mu",
    "nu",
    "p_mu",
    "p_nu",
    "Tc",
    "E_z",
    "phi11_z_upper",
    "s11_frac",
)

SCAN_KINDS = ("distance", "pulses", "misalignment", "error-grid", "single-point")


class ScanConfigError(ConfigError):
    """Raised with a section/key diagnostic when a scan file is invalid."""


@dataclass(frozen=True)
class GridPoint:
    """One scenario coordinate of a scan."""

    L_km: float
    pulse_count: float
    e_d_z: float
    E_hom: float


@dataclass(frozen=True)
class ScanSpec:
    """A validated scan: scenario grid plus fixed parameters and toggles."""

    kind: str
    points: tuple[GridPoint, ...]
    base: ExperimentConfig
    space: SearchSpace
    with_ad: bool
    without_ad: bool
    with_plob: bool
    output_path: str
    config_echo: dict

    def __post_init__(self) -> None:
        if not self.points:
            raise ScanConfigError("constraint violated: scan grid is empty")
        if not (self.with_ad or self.without_ad):
            raise ScanConfigError("constraint violated: all rate toggles off")


def _section(doc: dict, name: str, required: bool = True) -> dict:
    sub = doc.get(name)
    if sub is None:
        if required:
            raise ScanConfigError(f"missing section [{name}]")
        return {}
    if not isinstance(sub, dict):
        raise ScanConfigError(f"[{name}] must be a table")
    return sub


def _get(section: dict, section_name: str, key: str, kind, default=None):
    if key not in section:
        if default is not None:
            return default
        raise ScanConfigError(f"missing key {section_name}.{key}")
    value = section[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise ScanConfigError(
            f"{section_name}.{key}: expected {kind.__name__}, got {type(value).__name__}"
        )
    return value


def _float_list(section: dict, section_name: str, key: str) -> list[float]:
    raw = _get(section, section_name, key, list)
    out = []
    for i, v in enumerate(raw):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ScanConfigError(f"{section_name}.{key}[{i}] is not a number")
        out.append(float(v))
    if not out:
        raise ScanConfigError(f"{section_name}.{key} is empty")
    return out


def _distance_grid(grid: dict) -> list[float]:
    """Either an explicit list or a list of start/stop/step segments."""
    if "distances_km" in grid:
        return sorted(set(_float_list(grid, "scan.grid", "distances_km")))
    if "segments" in grid:
        values: list[float] = []
        for i, seg in enumerate(grid["segments"]):
            name = f"scan.grid.segments[{i}]"
            if not isinstance(seg, dict):
                raise ScanConfigError(f"{name} must be a table")
            start = _get(seg, name, "start", float)
            stop = _get(seg, name, "stop", float)
            step = _get(seg, name, "step", float)
            if step <= 0 or stop < start:
                raise ScanConfigError(f"{name}: need step > 0 and stop >= start")
            k = 0
            while start + k * step <= stop + 1e-9:
                values.append(round(start + k * step, 9))
                k += 1
        if not values:
            raise ScanConfigError("scan.grid.segments produced no points")
        return sorted(set(values))
    raise ScanConfigError("scan.grid needs distances_km or segments")


def _build_grid(kind: str, grid: dict, base_L: float, base: ExperimentConfig) -> list[GridPoint]:
    N = base.pulse_count
    e_d = base.noise.e_d_z
    e_hom = base.noise.E_hom
    if kind == "single-point":
        return [GridPoint(base_L, N, e_d, e_hom)]
    if kind == "distance":
        return [GridPoint(L, N, e_d, e_hom) for L in _distance_grid(grid)]
    if kind == "pulses":
        pulses = _float_list(grid, "scan.grid", "pulse_counts")
        return [
            GridPoint(L, n, e_d, e_hom)
            for n in sorted(pulses)
            for L in _distance_grid(grid)
        ]
    if kind == "misalignment":
        errors = _float_list(grid, "scan.grid", "error_values")
        return [
            GridPoint(L, N, e, e)
            for e in sorted(errors)
            for L in _distance_grid(grid)
        ]
    if kind == "error-grid":
        e_d_values = _float_list(grid, "scan.grid", "e_d_z_values")
        e_hom_values = _float_list(grid, "scan.grid", "E_hom_values")
        return [
            GridPoint(base_L, N, a, b)
            for a in sorted(e_d_values)
            for b in sorted(e_hom_values)
        ]
    raise ScanConfigError(f"scan.kind must be one of {', '.join(SCAN_KINDS)}")


def load_scan(path: str, asymptotic: bool = False) -> ScanSpec:
    """Parse and validate a TOML scan file."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ScanConfigError(f"{path}: {exc}") from exc

    scan = _section(doc, "scan")
    physics = _section(doc, "physics", required=False)
    protocol = _section(doc, "protocol", required=False)
    security = _section(doc, "security")
    output = _section(doc, "output")
    search = _section(doc, "search", required=False)

    kind = _get(scan, "scan", "kind", str)
    if kind not in SCAN_KINDS:
        raise ScanConfigError(f"scan.kind must be one of {', '.join(SCAN_KINDS)}")
    grid = scan.get("grid", {})
    if not isinstance(grid, dict):
        raise ScanConfigError("[scan.grid] must be a table")
    if kind != "single-point" and not grid:
        raise ScanConfigError("missing section [scan.grid]")

    try:
        detectors = DetectorParams(
            eta_L=_get(physics, "physics", "eta_L", float, 0.781),
            eta_R=_get(physics, "physics", "eta_R", float, 0.77),
            pd_L=_get(physics, "physics", "pd_L", float, 3.03e-9),
            pd_R=_get(physics, "physics", "pd_R", float, 3.81e-9),
        )
        base_L = _get(physics, "physics", "distance_km", float, 0.0)
        fiber = FiberParams(
            alpha=_get(physics, "physics", "alpha_dB_km", float, 0.16),
            total_distance_km=max(base_L, 0.0),
            insert_loss_dB=_get(physics, "physics", "insert_loss_dB", float, 1.5),
        )
        noise = NoiseParams(
            e_d_z=_get(physics, "physics", "e_d_z", float, 0.005),
            E_hom=_get(physics, "physics", "E_hom", float, 0.04),
            delta_nu=_get(physics, "physics", "delta_nu_Hz", float, 10.0),
            omega_fib=_get(physics, "physics", "omega_fib", float, 5900.0),
        )
        source = SourceParams(
            mu=_get(protocol, "protocol", "mu", float, 0.5),
            nu=_get(protocol, "protocol", "nu", float, 0.05),
            p_mu=_get(protocol, "protocol", "p_mu", float, 0.5),
            p_nu=_get(protocol, "protocol", "p_nu", float, 0.25),
            M=_get(protocol, "protocol", "M", int, 16),
            F=_get(protocol, "protocol", "F_Hz", float, 1e9),
            Tc=_get(protocol, "protocol", "Tc", float, 1e-6),
        )
        budget = EpsilonBudget(
            eps=_get(security, "security", "epsilon", float), asymptotic=asymptotic
        )
        base = ExperimentConfig(
            detectors=detectors,
            fiber=fiber,
            source=source,
            noise=noise,
            pulse_count=_get(protocol, "protocol", "pulse_count", float, 7.24e13),
            f_ec=_get(protocol, "protocol", "f_ec", float, 1.1),
            security=budget,
        )
        space = SearchSpace(
            multistart=_get(search, "search", "multistart", int, 3),
            max_sweeps=_get(search, "search", "max_sweeps", int, 6),
            coord_iters=_get(search, "search", "coord_iters", int, 16),
        )
    except ScanConfigError:
        raise
    except ConfigError as exc:
        raise ScanConfigError(str(exc)) from exc

    return ScanSpec(
        kind=kind,
        points=tuple(_build_grid(kind, grid, base_L, base)),
        base=base,
        space=space,
        with_ad=_get(scan, "scan", "with_ad", bool, True),
        without_ad=_get(scan, "scan", "without_ad", bool, True),
        with_plob=_get(scan, "scan", "plob", bool, True),
        output_path=_get(output, "output", "path", str),
        config_echo=doc,
    )


def _point_config(spec: ScanSpec, pt: GridPoint) -> ExperimentConfig:
    base = spec.base
    return replace(
        base,
        fiber=replace(base.fiber, total_distance_km=pt.L_km),
        noise=replace(base.noise, e_d_z=pt.e_d_z, E_hom=pt.E_hom),
        pulse_count=pt.pulse_count,
    )


def _diagnostics(cfg: ExperimentConfig, params: SourceParams) -> tuple[float, float, float]:
    """E_z, phi upper bound and certified single-photon fraction at an optimum."""
    cfg = cfg.with_source(params)
    try:
        stats = build_statistics(cfg)
    except NoZBasisData:
        return 0.0, 0.5, 0.0
    bounds = estimate_bounds(stats, cfg, cfg.security)
    return stats.E_z, bounds.phi11_z_upper, bounds.s11_z_lower / stats.n_z


def evaluate_point(spec: ScanSpec, pt: GridPoint) -> dict[str, float]:
    """Optimize one grid point and assemble its CSV row."""
    cfg = _point_config(spec, pt)
    row = dict.fromkeys(CSV_COLUMNS, 0.0)
    row["L_km"] = pt.L_km
    row["N"] = pt.pulse_count
    row["e_d_z"] = pt.e_d_z
    row["E_hom"] = pt.E_hom
    if spec.with_plob:
        # full Alice-to-Bob channel, including both arms' insert loss;
        # keeps the bound finite at L = 0
        eta = transmittance(cfg.fiber, pt.L_km / 2.0) ** 2
        row["plob"] = plob_bound(eta)

    best = None
    if spec.without_ad:
        point = optimize(cfg, spec.space, use_ad=False)
        row["rate_no_ad"] = point.rate
        best = point
    if spec.with_ad:
        point = optimize(cfg, spec.space, use_ad=True)
        row["rate_ad"] = point.rate
        row["b_opt"] = float(getattr(point.result, "b_opt", 0) or 0)
        best = point
    assert best is not None
    p = best.params
    row["mu"], row["nu"], row["p_mu"], row["p_nu"], row["Tc"] = p.mu, p.nu, p.p_mu, p.p_nu, p.Tc
    row["E_z"], row["phi11_z_upper"], row["s11_frac"] = _diagnostics(cfg, p)
    return row


def _format(value: float) -> str:
    return "%.12g" % value


def format_rows(rows: list[dict[str, float]]) -> str:
    """Deterministic CSV text for a list of result rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_format(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def run_scan(spec: ScanSpec, threads: int = 1, verbose: bool = False) -> list[dict[str, float]]:
    """Evaluate all grid points and write the CSV plus its .meta sidecar."""
    workers = os.cpu_count() or 1 if threads == 0 else threads
    if workers > 1 and len(spec.points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate_point, [spec] * len(spec.points), spec.points))
    else:
        rows = []
        for i, pt in enumerate(spec.points):
            rows.append(evaluate_point(spec, pt))
            if verbose:
                print(
                    f"[{i + 1}/{len(spec.points)}] L={pt.L_km:g} km "
                    f"rate_no_ad={rows[-1]['rate_no_ad']:.3e} "
                    f"rate_ad={rows[-1]['rate_ad']:.3e}",
                    file=sys.stderr,
                )
    rows.sort(key=lambda r: (r["N"], r["e_d_z"], r["E_hom"], r["L_km"]))

    out_dir = os.path.dirname(spec.output_path)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    with open(spec.output_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_rows(rows))
    meta = {
        "version": __version__,
        "eps_sec": spec.base.security.eps_sec,
        "asymptotic": spec.base.security.asymptotic,
        "kind": spec.kind,
        "rows": len(rows),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "config": spec.config_echo,
    }
    with open(spec.output_path + ".meta", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return rows
