"""Propagation kernels and synthesis of envelope and full fields.

The envelope of branch s at carrier omega is

    Psi_s(x, y; z, t) = sum_q dq^2 w(q) [eps1 a_1 + eps2 a_2] exp(i q.x) K(q; z, t)

and the positive-frequency field is

    A(x, y, z, t) = sum_s sum_omega w_omega exp(-i omega (t - s z / c)) Psi_s.

The transverse sum is an inverse DFT. With q_n = (n - N/2) dq and
x_m = (m - N/2) dx, dq dx N = 2 pi, it is evaluated as

    N^2 dq^2 * fftshift(ifft2(ifftshift(V)))

so node ``N // 2`` of both grids is the origin. ``method="direct"`` sums the
plane waves explicitly instead and serves as the reference path.
"""

from __future__ import annotations

import enum

import numpy as np

from .core import (
    BRANCHES,
    AngularSpectrum,
    FieldSlice,
    TransverseGrid,
    are_paired,
    branch_index,
    reciprocal_grid,
)
from .dispersion import DispersionKind, DispersionRelation
from .modes import mode_weight, triad


class KernelMismatchError(ValueError):
    """Raised when a kernel is paired with a dispersion relation it does not belong to."""


class KernelKind(str, enum.Enum):
    FRESNEL_TI = "fresnel_ti"
    HALF_FRESNEL_TD = "half_fresnel_td"
    EXACT_AS = "exact_as"
    GENERAL = "general"


MATCHING = {
    KernelKind.FRESNEL_TI: DispersionKind.TI,
    KernelKind.HALF_FRESNEL_TD: DispersionKind.TD,
    KernelKind.EXACT_AS: DispersionKind.EXACT,
}


def default_kernel(rel: DispersionRelation) -> KernelKind:
    for kind, dk in MATCHING.items():
        if rel.kind is dk:
            return kind
    return KernelKind.GENERAL


def kernel_relation(kind: KernelKind, units) -> DispersionRelation:
    """The built-in relation a closed-form kernel belongs to."""
    return DispersionRelation(MATCHING[KernelKind(kind)], units)


def check_kind(kind: KernelKind, rel: DispersionRelation) -> KernelKind:
    kind = KernelKind(kind)
    if kind is not KernelKind.GENERAL and MATCHING[kind] is not rel.kind:
        raise KernelMismatchError(
            f"kernel {kind.value!r} requires the {MATCHING[kind].value!r} dispersion relation, "
            f"got {rel.kind.value!r}"
        )
    return kind


def kernel_phase(kind: KernelKind, rel: DispersionRelation, q, omega, s: int, z: float, t: float):
    """Phase of the propagation kernel relative to the plane carrier.

    FRESNEL_TI       -s q^2 c z / (2 w) - w t (sqrt(1 + theta^4) - 1)
    HALF_FRESNEL_TD  -(q^2 c / (4 w)) (s z + c t)
    EXACT_AS         -s z w (1 - |cos theta|) / c
    GENERAL          s z (f - w/c) - t (c sqrt(q^2 + f^2) - w)
    """
    kind = check_kind(kind, rel)
    q = np.asarray(q, dtype=float)
    omega = np.asarray(omega, dtype=float)
    rel.f(q, omega)
    c = rel.units.c
    if kind is KernelKind.FRESNEL_TI:
        theta4 = ((q * c / omega) ** 2 / 2.0) ** 2
        return -s * q ** 2 * c * z / (2.0 * omega) - omega * t * theta4 / (np.sqrt(1.0 + theta4) + 1.0)
    if kind is KernelKind.HALF_FRESNEL_TD:
        return -(q ** 2 * c / (4.0 * omega)) * (s * z + c * t)
    if kind is KernelKind.EXACT_AS:
        cos_theta = rel.f(q, omega) * c / omega
        u2 = (q * c / omega) ** 2
        return -s * z * omega * (u2 / (1.0 + cos_theta)) / c
    f = rel.f(q, omega)
    return s * z * (f - omega / c) - t * (c * np.hypot(q, f) - omega)


def kernel(kind, rel, q, omega, s, z, t):
    return np.exp(1j * kernel_phase(kind, rel, q, omega, s, z, t))


def spectral_content(spec: AngularSpectrum, kind: KernelKind, s: int, z: float, t: float,
                     omega_index: int = 0, kernel_rel: DispersionRelation | None = None) -> np.ndarray:
    """Vector integrand V[c, iy, ix] = w (eps1 a_1 + eps2 a_2) K of the envelope sum.

    Prefactors come from ``spec.rel``. The kernel phase uses ``kernel_rel``
    when given, which lets two kernels act on identical spectral content.
    """
    rel = spec.rel
    krel = rel if kernel_rel is None else kernel_rel
    kind = check_kind(kind, krel)
    b = branch_index(s)
    grid = spec.grid
    out = np.zeros((3, grid.n, grid.n), dtype=complex)
    m = spec.mask[omega_index]
    a1 = spec.amps[0, b, omega_index][m]
    a2 = spec.amps[1, b, omega_index][m]
    if not np.any(m) or not (np.any(a1) or np.any(a2)):
        return out
    omega = spec.freq.omegas[omega_index]
    X, Y = grid.mesh()
    qx, qy = X[m], Y[m]
    q = np.hypot(qx, qy)
    tri = triad(rel, qx, qy, s, omega)
    coeff = mode_weight(rel, q, omega) * kernel(kind, krel, q, omega, s, z, t)
    out[:, m] = coeff * (tri.eps1 * a1 + tri.eps2 * a2)
    return out


def synthesize_fft(V: np.ndarray, grid: TransverseGrid) -> np.ndarray:
    """Inverse-DFT binding of sum_q dq^2 V(q) exp(i q.x) onto the reciprocal spatial grid."""
    axes = (-2, -1)
    n = grid.n
    shifted = np.fft.ifftshift(V, axes=axes)
    return (n * grid.spacing) ** 2 * np.fft.fftshift(np.fft.ifft2(shifted, axes=axes), axes=axes)


def synthesize_direct(V: np.ndarray, grid: TransverseGrid, x, y) -> np.ndarray:
    """Explicit plane-wave sum of V on the points x (columns) and y (rows)."""
    q = grid.coords
    ex = np.exp(1j * np.outer(np.asarray(x, dtype=float), q))
    ey = np.exp(1j * np.outer(np.asarray(y, dtype=float), q))
    return grid.spacing ** 2 * (ey @ V @ ex.T)


def _spatial_grid(spec: AngularSpectrum, spatial: TransverseGrid | None) -> TransverseGrid:
    if spatial is None:
        return reciprocal_grid(spec.grid)
    if spatial.domain != "spatial" or not are_paired(spec.grid, spatial):
        raise ValueError("spatial grid is not DFT-paired with the spectral grid")
    return spatial


def _synthesize(V, spec, spatial, method):
    if method == "fft":
        return synthesize_fft(V, spec.grid)
    if method == "direct":
        return synthesize_direct(V, spec.grid, spatial.coords, spatial.coords)
    raise ValueError(f"unknown synthesis method {method!r}")


def envelope_slice(spec: AngularSpectrum, kind: KernelKind, s: int, z: float, t: float,
                   omega_index: int = 0, method: str = "fft",
                   spatial: TransverseGrid | None = None) -> FieldSlice:
    """Envelope Psi_s(x, y; z, t) at one carrier frequency on the paired spatial grid."""
    kind = check_kind(kind, spec.rel)
    spatial = _spatial_grid(spec, spatial)
    V = spectral_content(spec, kind, s, z, t, omega_index)
    meta = {
        "quantity": "envelope",
        "branch": s,
        "omega": float(spec.freq.omegas[omega_index]),
        "masked_power_fraction": float(spec.metadata.get("masked_power_fraction", 0.0)),
        "method": method,
    }
    return FieldSlice(spatial, z, t, _synthesize(V, spec, spatial, method), kind.value, meta)


def _field_content(spec: AngularSpectrum, kind: KernelKind, z: float, t: float, branches) -> np.ndarray:
    c = spec.units.c
    total = np.zeros((3, spec.grid.n, spec.grid.n), dtype=complex)
    for s in branches:
        for j, (omega, weight) in enumerate(zip(spec.freq.omegas, spec.freq.weights)):
            carrier = weight * np.exp(-1j * omega * (t - s * z / c))
            total += carrier * spectral_content(spec, kind, s, z, t, j)
    return total


def field_slice(spec: AngularSpectrum, kind: KernelKind, z: float, t: float,
                branches=BRANCHES, method: str = "fft",
                spatial: TransverseGrid | None = None) -> FieldSlice:
    """Positive-frequency field A(x, y, z, t): carrier times envelope, summed over s and omega.

    The real field is twice the real part of this.
    """
    kind = check_kind(kind, spec.rel)
    spatial = _spatial_grid(spec, spatial)
    V = _field_content(spec, kind, z, t, branches)
    meta = {
        "quantity": "field",
        "branches": list(branches),
        "masked_power_fraction": float(spec.metadata.get("masked_power_fraction", 0.0)),
        "method": method,
    }
    return FieldSlice(spatial, z, t, _synthesize(V, spec, spatial, method), kind.value, meta)


def sample_envelope(spec, kind, s, x, y, z, t, omega_index=0):
    """Envelope values ``[3, len(y), len(x)]`` at arbitrary points (direct sum)."""
    V = spectral_content(spec, kind, s, z, t, omega_index)
    return synthesize_direct(V, spec.grid, x, y)


def sample_field(spec, kind, x, y, z, t, branches=BRANCHES):
    """Full positive-frequency field ``[3, len(y), len(x)]`` at arbitrary points."""
    check_kind(kind, spec.rel)
    V = _field_content(spec, kind, z, t, branches)
    return synthesize_direct(V, spec.grid, x, y)


def apply_kernel(spec: AngularSpectrum, kind: KernelKind, z: float, t: float) -> AngularSpectrum:
    """Amplitudes multiplied by the kernel of each branch and frequency."""
    kind = check_kind(kind, spec.rel)
    q = spec.grid.radius()
    amps = np.array(spec.amps)
    for s in BRANCHES:
        b = branch_index(s)
        for j, omega in enumerate(spec.freq.omegas):
            m = spec.mask[j]
            amps[:, b, j][:, m] *= kernel(kind, spec.rel, q[m], omega, s, z, t)
    return spec.replace(amps)


def fubini_totals(spec: AngularSpectrum) -> tuple[float, float]:
    """Total occupation summed q-outer/omega-inner and omega-outer/q-inner."""
    power = np.sum(np.abs(spec.amps) ** 2, axis=(0, 1)) * spec.measure
    power = np.where(spec.mask, power, 0.0)
    n = spec.grid.n
    q_outer = 0.0
    for iy in range(n):
        for ix in range(n):
            column = power[:, iy, ix]
            q_outer += float(np.sum(column[spec.mask[:, iy, ix]]))
    omega_outer = 0.0
    for j in range(len(spec.freq)):
        omega_outer += float(np.sum(power[j][spec.mask[j]]))
    return q_outer, omega_outer
