"""Polarization triads and per-mode normalization weights."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dispersion import DispersionRelation


@dataclass(frozen=True, eq=False)
class PolarizationTriad:
    """Unit vectors (eps1, eps2, khat), each shaped ``(3, ...)``, for branch ``s``."""

    eps1: np.ndarray
    eps2: np.ndarray
    khat: np.ndarray
    s: int

    def as_matrix(self) -> np.ndarray:
        """Stack as ``(3 vectors, 3 components, ...)``."""
        return np.stack([self.eps1, self.eps2, self.khat])


def transverse_direction(qx, qy, on_axis=(1.0, 0.0)):
    """Unit vector q/|q| as ``(ux, uy)``; ``on_axis`` is used where q = 0."""
    qx = np.asarray(qx, dtype=float)
    qy = np.asarray(qy, dtype=float)
    q = np.hypot(qx, qy)
    zero = q == 0
    # rescale first so subnormal components keep their direction
    scale = np.where(zero, 1.0, np.maximum(np.abs(qx), np.abs(qy)))
    sx, sy = qx / scale, qy / scale
    norm = np.where(zero, 1.0, np.hypot(sx, sy))
    ux = np.where(zero, on_axis[0], sx / norm)
    uy = np.where(zero, on_axis[1], sy / norm)
    return ux, uy, q


def triad(rel: DispersionRelation, qx, qy, s: int, omega, on_axis=(1.0, 0.0)) -> PolarizationTriad:
    """Polarization triad of the plane wave with wavevector (qx, qy, s f).

    eps1 = (f qhat - s q zhat) / |k|,  eps2 = s zhat x qhat,
    khat = (q qhat + s f zhat) / |k|.

    qhat is undefined at q = 0; ``on_axis`` (default x) fixes it there.
    Accepts broadcastable arrays and validates (|q|, omega) against the domain.
    """
    if s not in (1, -1):
        raise ValueError("s must be +1 or -1")
    ux, uy, q = transverse_direction(qx, qy, on_axis)
    q, omega = np.broadcast_arrays(q, np.asarray(omega, dtype=float))
    ux, uy = np.broadcast_to(ux, q.shape), np.broadcast_to(uy, q.shape)
    f = rel.f(q, omega)
    k = np.hypot(q, f)
    zeros = np.zeros_like(q)
    eps1 = np.stack([f * ux / k, f * uy / k, -s * q / k])
    eps2 = np.stack([-s * uy, s * ux, zeros])
    khat = np.stack([q * ux / k, q * uy / k, s * f / k])
    return PolarizationTriad(eps1, eps2, khat, s)


def mode_weight(rel: DispersionRelation, q, omega):
    """sqrt(hbar (df/domega) / (16 pi^3 eps0 c sqrt(q^2 + f^2)))."""
    u = rel.units
    f = rel.f(q, omega)
    return np.sqrt(u.hbar * rel.jacobian(q, omega) / (16.0 * np.pi ** 3 * u.eps0 * u.c * np.hypot(q, f)))
