"""Command-line front end.

Usage::

    angspec propagate --config run.json --out results/
    angspec verify --config run.json --out results/ --seed 7
    angspec dispersion-table --config run.json

Exit codes: 0 success, 1 failed verification, 2 invalid config,
3 numerical failure (non-finite field values).

Config files are JSON with ``"schema_version": 1``; every other key is
optional and unknown keys are rejected. See README.md for the schema.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import importlib
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .core import BRANCHES, AngularSpectrum, FrequencyGrid, UnitSystem, make_paired_grids
from .dispersion import DispersionKind, DispersionRelation, OutOfDomainError
from .io import dumps_json, fmt, write_slice
from .observables import energy
from .propagation import KernelKind, KernelMismatchError, check_kind, default_kernel, field_slice
from .spectrum import BeamSource, SourceKind, make_source
from .verify import DEFAULT_TOLERANCES, run_suite

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

TOP_KEYS = {
    "schema_version", "units", "dispersion", "kernel", "source", "grid", "omegas", "omega_weights",
    "branches", "z", "t", "output_dir", "tolerances", "seed", "verify", "table",
}
SOURCE_KEYS = {"kind", "waist", "ring_radius", "node", "polarization", "omega0", "bandwidth"}
GRID_KEYS = {"n", "q_lim"}
DISPERSION_KEYS = {"kind", "function", "derivative", "name"}
VERIFY_KEYS = {"inject_zeta_error", "z"}
TABLE_KEYS = {"q"}
TABLE_HEADER = ["omega", "q", "f", "dfdomega", "ck", "q_max"]


class ConfigError(ValueError):
    """Invalid run configuration (exit code 2)."""


@dataclass
class RunConfig:
    units: UnitSystem
    rel: DispersionRelation
    kernel: KernelKind
    source: dict
    n: int
    q_lim: float
    omegas: list
    omega_weights: Optional[list]
    branches: list
    z: list
    t: list
    output_dir: str = "out"
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    verify: dict = field(default_factory=dict)
    table: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """Normalized config for manifests; the output location is left out so it cannot affect bytes."""
        out = {k: v for k, v in self.raw.items() if k != "output_dir"}
        out["units"] = self.units.mode.value
        out["kernel"] = self.kernel.value
        return out


def _check_keys(section: dict, allowed: set, where: str):
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _float_list(value, name: str, allow_empty: bool = False) -> list:
    if not isinstance(value, list) or (not value and not allow_empty):
        raise ConfigError(f"{name} must be a nonempty list of numbers")
    try:
        out = [float(v) for v in value]
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must contain only numbers") from None
    if not all(np.isfinite(out)):
        raise ConfigError(f"{name} must be finite")
    return out


def _import_ref(ref: str):
    module, _, attr = str(ref).partition(":")
    if not attr:
        raise ConfigError(f"custom function reference {ref!r} must look like 'module:attribute'")
    try:
        return getattr(importlib.import_module(module), attr)
    except (ImportError, AttributeError) as exc:
        raise ConfigError(f"cannot import {ref!r}: {exc}") from None


def _build_relation(value, units: UnitSystem) -> DispersionRelation:
    if isinstance(value, str):
        value = {"kind": value}
    _check_keys(value, DISPERSION_KEYS, "dispersion")
    try:
        kind = DispersionKind.parse(value.get("kind", "ti"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if kind is DispersionKind.CUSTOM:
        if "function" not in value:
            raise ConfigError("a custom dispersion needs a 'function' reference")
        func = _import_ref(value["function"])
        dfunc = _import_ref(value["derivative"]) if "derivative" in value else None
        return DispersionRelation.custom(func, dfunc, units, value.get("name", "custom"))
    if set(value) - {"kind"}:
        raise ConfigError("only custom dispersion relations take extra keys")
    return DispersionRelation(kind, units)


def parse_config(raw: dict, units_override: Optional[str] = None, seed_override: Optional[int] = None) -> RunConfig:
    _check_keys(raw, TOP_KEYS, "config")
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, got {raw.get('schema_version')!r}")
    raw = dict(raw)
    if units_override is not None:
        raw["units"] = units_override
    try:
        units = UnitSystem.from_name(raw.get("units", "natural"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rel = _build_relation(raw.get("dispersion", "ti"), units)
    try:
        kernel = KernelKind(raw["kernel"]) if "kernel" in raw else default_kernel(rel)
    except ValueError:
        raise ConfigError(f"unknown kernel {raw['kernel']!r}") from None
    try:
        check_kind(kernel, rel)
    except KernelMismatchError as exc:
        raise ConfigError(str(exc)) from None

    source = dict(raw.get("source", {"kind": "gaussian", "waist": 20.0}))
    _check_keys(source, SOURCE_KEYS, "source")
    grid = raw.get("grid", {"n": 128, "q_lim": 0.4})
    _check_keys(grid, GRID_KEYS, "grid")
    try:
        n, q_lim = int(grid.get("n", 128)), float(grid.get("q_lim", 0.4))
    except (TypeError, ValueError):
        raise ConfigError("grid.n must be an integer and grid.q_lim a number") from None
    if q_lim <= 0:
        raise ConfigError("grid.q_lim must be positive")

    omegas = _float_list(raw.get("omegas", [1.0]), "omegas")
    weights = raw.get("omega_weights")
    if weights is not None:
        weights = _float_list(weights, "omega_weights")
        if len(weights) != len(omegas):
            raise ConfigError("omega_weights must match omegas in length")
    branches = raw.get("branches", [1])
    if not isinstance(branches, list) or not branches or any(b not in BRANCHES for b in branches):
        raise ConfigError("branches must be a nonempty list drawn from [1, -1]")
    if len(set(branches)) != len(branches):
        raise ConfigError("branches must not repeat")

    tolerances = raw.get("tolerances", {})
    _check_keys(tolerances, set(DEFAULT_TOLERANCES), "tolerances")
    verify = raw.get("verify", {})
    _check_keys(verify, VERIFY_KEYS, "verify")
    table = raw.get("table", {})
    _check_keys(table, TABLE_KEYS, "table")
    if "q" in table:
        _float_list(table["q"], "table.q")
    seed = raw.get("seed", 0) if seed_override is None else seed_override
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    raw["seed"] = seed

    return RunConfig(
        units=units, rel=rel, kernel=kernel, source=source, n=n, q_lim=q_lim, omegas=omegas,
        omega_weights=weights, branches=list(branches), z=_float_list(raw.get("z", [0.0]), "z"),
        t=_float_list(raw.get("t", [0.0]), "t"), output_dir=str(raw.get("output_dir", "out")),
        tolerances=dict(tolerances), seed=seed, verify=dict(verify), table=dict(table), raw=raw,
    )


def load_config(path, units_override=None, seed_override=None) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from None
    return parse_config(raw, units_override, seed_override)


def build_spectrum(cfg: RunConfig) -> AngularSpectrum:
    """Source spectrum, split evenly over the configured branches."""
    try:
        grid, _ = make_paired_grids(cfg.n, cfg.q_lim)
        freq = FrequencyGrid.from_nodes(cfg.omegas, cfg.omega_weights)
        params = dict(cfg.source)
        params["kind"] = SourceKind(params.get("kind", "gaussian"))
        for key in ("polarization", "node"):
            if key in params:
                params[key] = tuple(params[key])
        specs = [make_source(BeamSource(branch=s, **params), grid, freq, cfg.rel) for s in cfg.branches]
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid source or grid: {exc}") from None
    amps = sum(sp.amps for sp in specs) / np.sqrt(len(specs))
    warnings = sorted({w for sp in specs for w in sp.metadata.get("warnings", [])})
    return specs[0].replace(amps, warnings=warnings)


def _manifest_base(cfg: RunConfig, timestamp: bool) -> dict:
    manifest = {"config": cfg.echo(), "amplitude_normalization": "|a|^2 dq^2 domega is dimensionless mode occupation"}
    if timestamp:
        manifest["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return manifest


def cmd_propagate(cfg: RunConfig, out: Path, timestamp: bool = False) -> int:
    spec = build_spectrum(cfg)
    pairs = [(i, j) for i in range(len(cfg.z)) for j in range(len(cfg.t))]

    def compute(pair):
        i, j = pair
        return field_slice(spec, cfg.kernel, cfg.z[i], cfg.t[j], cfg.branches)

    try:
        with ThreadPoolExecutor() as pool:
            slices = list(pool.map(compute, pairs))
    except FloatingPointError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for (i, j), sl in zip(pairs, slices):
        name = f"slice_z{i:03d}_t{j:03d}.csv"
        write_slice(sl, out / name, cfg.units)
        files.append({"file": name, "z": cfg.z[i], "t": cfg.t[j]})
    manifest = _manifest_base(cfg, timestamp)
    manifest.update(
        masked_power_fraction=float(spec.metadata.get("masked_power_fraction", 0.0)),
        warnings=list(spec.metadata.get("warnings", [])),
        energy=energy(spec).to_dict(),
        slices=files,
    )
    (out / "manifest.json").write_text(dumps_json(manifest))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out: Path) -> int:
    spec = build_spectrum(cfg)
    reports = run_suite(spec, cfg.kernel, cfg.tolerances, cfg.seed, cfg.verify.get("z"),
                        float(cfg.verify.get("inject_zeta_error", 0.0)))
    out.mkdir(parents=True, exist_ok=True)
    (out / "verification.json").write_text(dumps_json([r.to_dict() for r in reports]))
    for r in reports:
        print(r.line())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def dispersion_table(cfg: RunConfig) -> str:
    """CSV rows (omega, q, f, df/domega, c|k|, q_max); nodes outside the domain are skipped."""
    rel = cfg.rel
    if "q" in cfg.table:
        qs = [float(q) for q in cfg.table["q"]]
    else:
        grid, _ = make_paired_grids(cfg.n, cfg.q_lim)
        qs = [float(q) for q in grid.coords if q >= 0]
    buf = io.StringIO(newline="")
    writer = csv.writer(buf)
    writer.writerow(TABLE_HEADER)
    for omega in cfg.omegas:
        q_max = float(rel.q_max(omega))
        for q in qs:
            if not rel.domain_mask(q, omega):
                continue
            f = float(rel.f(q, omega))
            row = [omega, q, f, float(rel.jacobian(q, omega)), float(rel.plane_wave_frequency(q, omega)), q_max]
            writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def cmd_dispersion_table(cfg: RunConfig, out: Optional[Path]) -> int:
    text = dispersion_table(cfg)
    if out is None:
        sys.stdout.write(text)
    else:
        out.mkdir(parents=True, exist_ok=True)
        (out / "dispersion_table.csv").write_text(text, newline="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="angspec", description="Angular-spectrum beam propagation and checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("propagate", "write field slices and a run manifest"),
        ("verify", "run the verification suite"),
        ("dispersion-table", "tabulate the dispersion relation"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        p.add_argument("--units", choices=["si", "natural"], help="unit system (overrides config)")
        p.add_argument("--seed", type=int, help="seed for randomized sampling in verify")
        p.add_argument("--timestamp", action="store_true", help="record wall-clock time in the propagate manifest")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.units, args.seed)
        if args.command == "dispersion-table":
            return cmd_dispersion_table(cfg, Path(args.out) if args.out else None)
        out = Path(args.out or cfg.output_dir)
        if args.command == "propagate":
            return cmd_propagate(cfg, out, args.timestamp)
        return cmd_verify(cfg, out)
    except (ConfigError, OutOfDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
