"""Beam sources and the change of variables between k-space and (q, omega) amplitudes.

A k-space amplitude a_lam(k_s) with k_s = (qx, qy, s zeta) and the angular
spectrum a_{lam s}(q, omega) are related through zeta = f(q, omega) and

    a_{lam s}(q, omega) = a_lam(k_s) * sqrt(df/domega),

which keeps ``|a|^2 dzeta = |a_{lam s}|^2 domega`` node by node.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    AngularSpectrum,
    FrequencyGrid,
    TransverseGrid,
    branch_index,
    spectral_mask,
)
from .dispersion import DispersionRelation
from .modes import mode_weight, triad

CLIP_WARNING_FRACTION = 0.01
_MONO_MATCH_RTOL = 1e-9


class UnmappableNodeError(ValueError):
    """Raised when k-space nodes have no image on the target (q, omega) grid."""

    def __init__(self, message: str, nodes):
        super().__init__(message)
        self.nodes = nodes


@dataclass(frozen=True, eq=False)
class KSpaceAmplitude:
    """Amplitudes a_lam(k_s) sampled at nodes (qx, qy, zeta).

    ``zeta`` is shaped ``[layer, iy, ix]`` and increases along the layer axis
    in every column; ``valid`` marks nodes that carry a wavevector. Invalid
    nodes hold zeta = 0 and zero amplitude.
    """

    grid: TransverseGrid
    zeta: np.ndarray
    valid: np.ndarray
    amps: np.ndarray

    def __post_init__(self):
        zeta = np.asarray(self.zeta, dtype=float)
        valid = np.asarray(self.valid, dtype=bool)
        amps = np.asarray(self.amps, dtype=complex)
        if zeta.ndim != 3 or zeta.shape[1:] != (self.grid.n, self.grid.n) or valid.shape != zeta.shape:
            raise ValueError("zeta and valid must be shaped [layer, n, n]")
        if amps.shape != (2, 2) + zeta.shape:
            raise ValueError("amplitudes must be shaped [2, 2, layer, n, n]")
        if not np.all(np.isfinite(amps)) or not np.all(np.isfinite(zeta)):
            raise ValueError("k-space data must be finite")
        if np.any(zeta[valid] <= 0):
            raise ValueError("zeta must be positive at every valid node")
        both = valid[1:] & valid[:-1]
        if np.any(np.diff(zeta, axis=0)[both] <= 0):
            raise ValueError("zeta must increase along the layer axis")
        zeta = np.where(valid, zeta, 0.0)
        amps = np.where(valid, amps, 0.0)
        for name, value in (("zeta", zeta), ("valid", valid), ("amps", amps)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)


def _assign_nodes(freq: FrequencyGrid, omega: np.ndarray):
    """Nearest frequency node for each omega, plus an in-range flag."""
    nodes = freq.omegas
    if nodes.size == 1:
        idx = np.zeros(omega.shape, dtype=int)
        ok = np.abs(omega - nodes[0]) <= _MONO_MATCH_RTOL * nodes[0]
        return idx, ok
    mids = 0.5 * (nodes[1:] + nodes[:-1])
    idx = np.searchsorted(mids, omega)
    lo = nodes[0] - 0.5 * freq.weights[0]
    hi = nodes[-1] + 0.5 * freq.weights[-1]
    return idx, (omega >= lo) & (omega <= hi)


def to_angular_spectrum(k_amp: KSpaceAmplitude, rel: DispersionRelation, freq: FrequencyGrid) -> AngularSpectrum:
    """Map k-space amplitudes onto the (q, omega) grid of ``freq``.

    omega is recovered from zeta = f(q, omega) (closed form for built-in
    relations, bisection otherwise) and each node is assigned to the nearest
    frequency node. The quadrature weights of ``freq`` are kept as given.
    Nodes landing on the same (q, omega) node are superposed. The largest
    relative frequency shift caused by the assignment is recorded in
    ``metadata["resampling_error"]``.
    """
    grid = k_amp.grid
    q_all = np.broadcast_to(grid.radius(), k_amp.zeta.shape)
    layer, iy, ix = np.nonzero(k_amp.valid)
    q = q_all[layer, iy, ix]
    omega_star = rel.omega_from_zeta(q, k_amp.zeta[layer, iy, ix])
    j, in_range = _assign_nodes(freq, omega_star)
    target_mask = spectral_mask(rel, grid, freq)
    ok = in_range & rel.domain_mask(q, omega_star)
    ok &= target_mask[np.minimum(j, len(freq) - 1), iy, ix]
    if not np.all(ok):
        bad = [(int(a), int(b), int(c)) for a, b, c in zip(layer[~ok], iy[~ok], ix[~ok])]
        shown = ", ".join(map(str, bad[:10])) + (" ..." if len(bad) > 10 else "")
        raise UnmappableNodeError(f"{len(bad)} k-space node(s) [layer, iy, ix] have no image: {shown}", bad)

    scale = np.sqrt(rel.jacobian(q, omega_star))
    amps = np.zeros((2, 2, len(freq), grid.n, grid.n), dtype=complex)
    for lam in range(2):
        for b in range(2):
            np.add.at(amps[lam, b], (j, iy, ix), k_amp.amps[lam, b, layer, iy, ix] * scale)
    targets = j * grid.n * grid.n + iy * grid.n + ix
    collisions = int(targets.size - np.unique(targets).size)
    shift = np.abs(omega_star - freq.omegas[j]) / freq.omegas[j]
    meta = {
        "resampling_error": float(shift.max()) if shift.size else 0.0,
        "resampling_collisions": collisions,
    }
    return AngularSpectrum(grid, freq, amps, rel, meta)


def from_angular_spectrum(spec: AngularSpectrum) -> KSpaceAmplitude:
    """Inverse map: zeta = f(q, omega) per node and amplitudes divided by sqrt(df/domega)."""
    rel = spec.rel
    mask = spec.mask
    q = np.broadcast_to(spec.grid.radius(), mask.shape)
    w = np.broadcast_to(spec.freq.omegas[:, None, None], mask.shape)
    zeta = np.zeros(mask.shape)
    zeta[mask] = rel.f(q[mask], w[mask])
    scale = np.ones(mask.shape)
    scale[mask] = np.sqrt(rel.jacobian(q[mask], w[mask]))
    amps = np.where(mask, spec.amps / scale, 0.0)
    return KSpaceAmplitude(spec.grid, zeta, mask, amps)


def _zeta_cells(zeta: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Cell widths around each zeta node from its neighbours along the layer axis."""
    if zeta.shape[0] < 2:
        raise ValueError("midpoint cells need at least two zeta layers")
    z = np.where(valid, zeta, np.nan)
    nan = np.full((1,) + z.shape[1:], np.nan)
    up = np.concatenate([z[1:], nan])
    down = np.concatenate([nan, z[:-1]])
    central = 0.5 * (up - down)
    forward = up - z
    backward = z - down
    cells = np.where(np.isfinite(central), central, np.where(np.isfinite(forward), forward, backward))
    return np.where(valid & np.isfinite(cells), cells, 0.0)


def measure_invariance(spec: AngularSpectrum, k_amp: KSpaceAmplitude, method: str = "exact") -> float:
    """Relative mismatch between sum |a(k)|^2 dq^2 dzeta and sum |a(q, omega)|^2 dq^2 domega.

    ``method="exact"`` gives each k-space node the image of its omega cell,
    dzeta = (df/domega) * w_omega, so the two sums agree up to rounding.
    ``method="midpoint"`` takes dzeta from the spacing of the k-space nodes
    themselves, an independent quadrature whose mismatch falls as domega^2.
    """
    grid = spec.grid
    omega_side = float(np.sum(np.abs(spec.amps) ** 2 * spec.measure))
    power_k = np.sum(np.abs(k_amp.amps) ** 2, axis=(0, 1))
    if method == "exact":
        mask = spec.mask
        q = np.broadcast_to(grid.radius(), mask.shape)
        w = np.broadcast_to(spec.freq.omegas[:, None, None], mask.shape)
        dzeta = np.zeros(mask.shape)
        dzeta[mask] = spec.rel.jacobian(q[mask], w[mask]) * np.broadcast_to(
            spec.freq.weights[:, None, None], mask.shape)[mask]
    elif method == "midpoint":
        dzeta = _zeta_cells(k_amp.zeta, k_amp.valid)
    else:
        raise ValueError(f"unknown method {method!r}")
    k_side = float(np.sum(power_k * dzeta)) * grid.spacing ** 2
    if omega_side == 0.0:
        return 0.0 if k_side == 0.0 else math.inf
    return abs(k_side - omega_side) / omega_side


class SourceKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    RING = "ring"
    NODE = "node"


@dataclass(frozen=True)
class BeamSource:
    """Test-signal generator parameters.

    For ``GAUSSIAN`` and ``RING`` sources ``polarization`` is the Cartesian
    Jones vector (c_x, c_y) of the field in the plane z = 0; each mode
    receives the projection of that field on its own triad. For ``NODE``
    sources ``polarization`` holds the two mode amplitudes (c_1, c_2)
    directly. ``bandwidth`` adds a Gaussian spectral factor
    exp(-(omega - omega0)^2 / (4 bandwidth^2)) on multi-frequency grids.
    """

    kind: SourceKind
    waist: Optional[float] = None
    ring_radius: Optional[float] = None
    node: Optional[tuple] = None
    polarization: tuple = (1.0, 0.0)
    branch: int = 1
    omega0: Optional[float] = None
    bandwidth: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SourceKind(self.kind))
        pol = tuple(complex(p) for p in self.polarization)
        if len(pol) != 2 or abs(abs(pol[0]) ** 2 + abs(pol[1]) ** 2 - 1.0) > 1e-12:
            raise ValueError("polarization weights must satisfy |c1|^2 + |c2|^2 = 1")
        object.__setattr__(self, "polarization", pol)
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        if self.kind is SourceKind.GAUSSIAN and not (self.waist is not None and self.waist > 0):
            raise ValueError("a Gaussian source needs a positive waist")
        if self.kind is SourceKind.RING and not (self.ring_radius is not None and self.ring_radius > 0):
            raise ValueError("a ring source needs a positive ring radius")
        if self.kind is SourceKind.NODE and self.node is None:
            raise ValueError("a node source needs a node index")
        if self.bandwidth is not None and not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")


def _spectral_factor(src: BeamSource, freq: FrequencyGrid) -> np.ndarray:
    if src.bandwidth is None:
        if len(freq) != 1:
            raise ValueError("multi-frequency grids need a source bandwidth")
        return np.ones(1)
    center = src.omega0 if src.omega0 is not None else float(np.mean(freq.omegas))
    return np.exp(-((freq.omegas - center) ** 2) / (4.0 * src.bandwidth ** 2))


def _profile(src: BeamSource, grid: TransverseGrid) -> np.ndarray:
    q = grid.radius()
    if src.kind is SourceKind.GAUSSIAN:
        return np.exp(-(q * src.waist) ** 2 / 4.0)
    return (np.abs(q - src.ring_radius) < 0.5 * grid.spacing).astype(float)


def make_source(src: BeamSource, grid: TransverseGrid, freq: FrequencyGrid,
                rel: DispersionRelation) -> AngularSpectrum:
    """Build a normalized angular spectrum, sum |a|^2 dq^2 w_omega = 1.

    Gaussian and ring sources describe the field at z = 0: its transverse
    part is ``polarization * profile(q)`` and the longitudinal part follows
    from transversality to k. Power cut away by the domain mask is recorded
    in ``metadata["masked_power_fraction"]``; more than 1% adds a warning.
    """
    b = branch_index(src.branch)
    s = src.branch
    amps = np.zeros((2, 2, len(freq), grid.n, grid.n), dtype=complex)
    mask = spectral_mask(rel, grid, freq)
    meta: dict = {"source": src.kind.value, "warnings": []}

    if src.kind is SourceKind.NODE:
        node = tuple(int(i) for i in src.node)
        if len(node) == 2:
            node = (0,) + node
        if not mask[node]:
            raise ValueError(f"node {node} lies outside the domain C_q")
        amps[0, b][node] = src.polarization[0]
        amps[1, b][node] = src.polarization[1]
        meta["masked_power_fraction"] = 0.0
    else:
        spectral = _spectral_factor(src, freq)
        profile = _profile(src, grid)
        full = (spectral[:, None, None] * profile) ** 2 * freq.weights[:, None, None]
        total = float(np.sum(full))
        if total == 0.0:
            raise ValueError("source profile has no support on the grid")
        clipped = float(np.sum(full[~mask])) / total
        meta["masked_power_fraction"] = clipped
        if clipped > CLIP_WARNING_FRACTION:
            meta["warnings"].append(f"domain mask clips {clipped:.3%} of the source power")
        X, Y = grid.mesh()
        px, py = src.polarization
        for iw, omega in enumerate(freq.omegas):
            m = mask[iw]
            if not np.any(m):
                continue
            qx, qy = X[m], Y[m]
            q = np.hypot(qx, qy)
            f = rel.f(q, omega)
            amp = spectral[iw] * profile[m]
            vz = -(px * qx + py * qy) / (s * f)
            tri = triad(rel, qx, qy, s, omega)
            weight = mode_weight(rel, q, omega)
            for lam, eps in enumerate((tri.eps1, tri.eps2)):
                proj = eps[0] * px + eps[1] * py + eps[2] * vz
                amps[lam, b, iw][m] = amp * proj / weight

    norm = float(np.sum(np.abs(amps) ** 2 * (grid.spacing ** 2 * freq.weights)[:, None, None]))
    if norm == 0.0:
        raise ValueError("source has no power inside the domain")
    amps /= math.sqrt(norm)
    return AngularSpectrum(grid, freq, amps, rel, meta)
