"""CSV + JSON-sidecar serialization of spectra and field slices.

CSV files follow RFC 4180 (CRLF line ends, ``.`` decimal separator) and
write every float with 17 significant digits so values round-trip exactly.
The sidecar sits next to the CSV with a ``.json`` suffix.

Spectrum columns: ``lam,s,iw,iy,ix,re,im`` (every node, masked ones as 0).
Slice columns: ``iy,ix,x,y,Ax_re,Ax_im,Ay_re,Ay_im,Az_re,Az_im``.
Rows run over the trailing index fastest (C order).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import (
    BRANCHES,
    AngularSpectrum,
    FieldSlice,
    FrequencyGrid,
    TransverseGrid,
    UnitMode,
    UnitSystem,
)
from .dispersion import DispersionKind, DispersionRelation

FORMAT_VERSION = 1
SPECTRUM_COLUMNS = ["lam", "s", "iw", "iy", "ix", "re", "im"]
SLICE_COLUMNS = ["iy", "ix", "x", "y", "Ax_re", "Ax_im", "Ay_re", "Ay_im", "Az_re", "Az_im"]


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def _units_from_dict(d: dict) -> UnitSystem:
    return UnitSystem(UnitMode(d["mode"]), d["c"], d["hbar"], d["eps0"])


def write_spectrum(spec: AngularSpectrum, path) -> Path:
    path = Path(path)
    amps = spec.amps
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SPECTRUM_COLUMNS)
        for idx in np.ndindex(amps.shape):
            lam, b, iw, iy, ix = idx
            v = amps[idx]
            writer.writerow([lam + 1, BRANCHES[b], iw, iy, ix, fmt(v.real), fmt(v.imag)])
    meta = {
        "format": "angspec-spectrum",
        "version": FORMAT_VERSION,
        "columns": SPECTRUM_COLUMNS,
        "grid": spec.grid.to_dict(),
        "frequencies": spec.freq.to_dict(),
        "units": spec.units.to_dict(),
        "dispersion": spec.rel.kind.value,
        "dispersion_name": spec.rel.name,
        "amplitude_normalization": "|a|^2 dq^2 domega is dimensionless mode occupation",
        "metadata": spec.metadata,
    }
    sidecar_path(path).write_text(dumps_json(meta))
    return path


def read_spectrum(path, rel: DispersionRelation | None = None) -> AngularSpectrum:
    path = Path(path)
    meta = json.loads(sidecar_path(path).read_text())
    if meta.get("format") != "angspec-spectrum":
        raise ValueError(f"{path} is not a spectrum file")
    units = _units_from_dict(meta["units"])
    kind = DispersionKind(meta["dispersion"])
    if rel is None:
        if kind is DispersionKind.CUSTOM:
            raise ValueError("a custom dispersion relation must be supplied to read this spectrum")
        rel = DispersionRelation(kind, units)
    elif rel.kind is not kind:
        raise ValueError(f"file was written with the {kind.value!r} relation, got {rel.kind.value!r}")
    g = meta["grid"]
    grid = TransverseGrid(g["n"], g["lim"], g["domain"])
    freq = FrequencyGrid(meta["frequencies"]["omegas"], meta["frequencies"]["weights"])
    amps = np.zeros((2, 2, len(freq), grid.n, grid.n), dtype=complex)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        if next(reader) != SPECTRUM_COLUMNS:
            raise ValueError("unexpected spectrum header")
        for row in reader:
            lam, s, iw, iy, ix = (int(v) for v in row[:5])
            amps[lam - 1, BRANCHES.index(s), iw, iy, ix] = complex(float(row[5]), float(row[6]))
    return AngularSpectrum(grid, freq, amps, rel, meta.get("metadata", {}))


def write_slice(slice_: FieldSlice, path, units: UnitSystem | None = None) -> Path:
    path = Path(path)
    x = slice_.grid.coords
    v = slice_.values
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SLICE_COLUMNS)
        for iy in range(slice_.grid.n):
            for ix in range(slice_.grid.n):
                row = [iy, ix, fmt(x[ix]), fmt(x[iy])]
                for comp in range(3):
                    row += [fmt(v[comp, iy, ix].real), fmt(v[comp, iy, ix].imag)]
                writer.writerow(row)
    meta = {
        "format": "angspec-slice",
        "version": FORMAT_VERSION,
        "columns": SLICE_COLUMNS,
        "grid": slice_.grid.to_dict(),
        "z": slice_.z,
        "t": slice_.t,
        "kernel": slice_.kernel,
        "metadata": slice_.metadata,
    }
    if units is not None:
        meta["units"] = units.to_dict()
    sidecar_path(path).write_text(dumps_json(meta))
    return path


def read_slice(path) -> FieldSlice:
    path = Path(path)
    meta = json.loads(sidecar_path(path).read_text())
    if meta.get("format") != "angspec-slice":
        raise ValueError(f"{path} is not a field-slice file")
    g = meta["grid"]
    grid = TransverseGrid(g["n"], g["lim"], g["domain"])
    values = np.zeros((3, grid.n, grid.n), dtype=complex)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        if next(reader) != SLICE_COLUMNS:
            raise ValueError("unexpected slice header")
        for row in reader:
            iy, ix = int(row[0]), int(row[1])
            for comp in range(3):
                values[comp, iy, ix] = complex(float(row[4 + 2 * comp]), float(row[5 + 2 * comp]))
    return FieldSlice(grid, meta["z"], meta["t"], values, meta["kernel"], meta.get("metadata", {}))
