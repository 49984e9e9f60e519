"""Energy, occupation and beam-geometry diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BRANCHES, AngularSpectrum, FieldSlice, branch_index


@dataclass(frozen=True)
class EnergyReport:
    """Classical, normal-ordered field energy with its (s, lam) breakdown.

    ``mean_plane_wave_frequency`` is the occupation-weighted mean of c|k|.
    """

    total: float
    breakdown: dict
    occupation: float
    mean_plane_wave_frequency: float

    def by_branch(self) -> dict:
        return {s: sum(v for (b, _), v in self.breakdown.items() if b == s) for s in BRANCHES}

    def by_polarization(self) -> dict:
        return {lam: sum(v for (_, p), v in self.breakdown.items() if p == lam) for lam in (1, 2)}

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "breakdown": {f"s={s:+d},lambda={lam}": v for (s, lam), v in sorted(self.breakdown.items())},
            "occupation": self.occupation,
            "mean_plane_wave_frequency": self.mean_plane_wave_frequency,
        }


def occupation(spec: AngularSpectrum) -> float:
    """sum over lam, s of the integral |a|^2 d^2q domega."""
    return float(np.sum(np.abs(spec.amps) ** 2 * spec.measure))


def plane_wave_frequencies(spec: AngularSpectrum) -> np.ndarray:
    """c|k| at every node, zero outside the domain, shaped ``[iw, iy, ix]``."""
    mask = spec.mask
    q = np.broadcast_to(spec.grid.radius(), mask.shape)
    w = np.broadcast_to(spec.freq.omegas[:, None, None], mask.shape)
    ck = np.zeros(mask.shape)
    ck[mask] = spec.rel.plane_wave_frequency(q[mask], w[mask])
    return ck


def energy(spec: AngularSpectrum) -> EnergyReport:
    """H = sum_s sum_lam int domega int d^2q hbar c sqrt(q^2 + f^2) |a_{lam s}|^2.

    The symmetrized operator product collapses to |a|^2 for classical
    amplitudes; the vacuum term is dropped.
    """
    hbar = spec.units.hbar
    weight = hbar * plane_wave_frequencies(spec) * spec.measure
    breakdown = {}
    for s in BRANCHES:
        b = branch_index(s)
        for lam in (1, 2):
            breakdown[(s, lam)] = float(np.sum(np.abs(spec.amps[lam - 1, b]) ** 2 * weight))
    total = sum(breakdown.values())
    n = occupation(spec)
    mean_ck = total / (hbar * n) if n > 0 else 0.0
    return EnergyReport(total, breakdown, n, mean_ck)


def beam_width(slice_: FieldSlice, components=(0, 1)) -> tuple[float, float]:
    """Second-moment widths (w_x, w_y), w^2 = 4 Var, of the summed component intensity.

    Only the transverse components enter by default: they carry the power
    flux through the plane. Pass ``components=(0, 1, 2)`` to include the
    longitudinal one.
    """
    intensity = slice_.intensity(components)
    total = float(np.sum(intensity))
    if not total > 0:
        raise ValueError("beam width of an all-zero slice is undefined")
    x = slice_.grid.coords
    px = np.sum(intensity, axis=0) / total
    py = np.sum(intensity, axis=1) / total
    mx, my = float(px @ x), float(py @ x)
    var_x = float(px @ (x - mx) ** 2)
    var_y = float(py @ (x - my) ** 2)
    return 2.0 * np.sqrt(var_x), 2.0 * np.sqrt(var_y)
