"""Units, sampling grids and the field containers shared by every other module.

Array layout conventions
------------------------
* Transverse arrays are indexed ``[iy, ix]``; node ``n // 2`` is the origin.
* Spectral amplitudes are indexed ``[lam, branch, iw, iy, ix]`` where ``lam``
  0/1 stands for polarization 1/2 and ``branch`` 0/1 stands for s = +1/-1.
* Field samples are indexed ``[component, iy, ix]`` with components x, y, z.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy import constants

if TYPE_CHECKING:
    from .dispersion import DispersionRelation

BRANCHES = (1, -1)


def branch_index(s: int) -> int:
    """Map a branch sign s = +1/-1 to its array index 0/1."""
    if s == 1:
        return 0
    if s == -1:
        return 1
    raise ValueError(f"branch sign must be +1 or -1, got {s!r}")


class UnitMode(str, enum.Enum):
    SI = "si"
    NATURAL = "natural"


@dataclass(frozen=True)
class UnitSystem:
    """Physical constants c, hbar and eps0 in a chosen unit system.

    Natural units fix all three to exactly 1. SI values come from CODATA via
    :mod:`scipy.constants`.
    """

    mode: UnitMode = UnitMode.NATURAL
    c: float = 1.0
    hbar: float = 1.0
    eps0: float = 1.0

    def __post_init__(self):
        mode = UnitMode(self.mode)
        object.__setattr__(self, "mode", mode)
        for name in ("c", "hbar", "eps0"):
            value = float(getattr(self, name))
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
            object.__setattr__(self, name, value)
        if mode is UnitMode.NATURAL and (self.c, self.hbar, self.eps0) != (1.0, 1.0, 1.0):
            raise ValueError("natural units require c = hbar = eps0 = 1")

    @classmethod
    def natural(cls) -> "UnitSystem":
        return cls(UnitMode.NATURAL, 1.0, 1.0, 1.0)

    @classmethod
    def si(cls) -> "UnitSystem":
        return cls(UnitMode.SI, constants.c, constants.hbar, constants.epsilon_0)

    @classmethod
    def from_name(cls, name: str) -> "UnitSystem":
        mode = UnitMode(str(name).lower())
        return cls.si() if mode is UnitMode.SI else cls.natural()

    def to_dict(self) -> dict[str, Any]:
        return {"mode": self.mode.value, "c": self.c, "hbar": self.hbar, "eps0": self.eps0}


@dataclass(frozen=True)
class TransverseGrid:
    """Uniform, origin-centred square grid with ``n`` nodes per axis.

    ``lim`` is the half-extent: samples sit at ``(k - n/2) * spacing`` for
    ``k = 0 .. n-1`` with ``spacing = 2 * lim / n``, so ``-lim`` is a node and
    ``+lim`` is not.
    """

    n: int
    lim: float
    domain: str = "spectral"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8 or self.n % 2:
            raise ValueError(f"grid size must be an even integer >= 8, got {self.n!r}")
        if not (self.lim > 0 and math.isfinite(self.lim)):
            raise ValueError(f"grid half-extent must be positive, got {self.lim!r}")
        if self.domain not in ("spectral", "spatial"):
            raise ValueError(f"unknown grid domain {self.domain!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "lim", float(self.lim))

    @property
    def spacing(self) -> float:
        return 2.0 * self.lim / self.n

    @property
    def origin_index(self) -> int:
        return self.n // 2

    @property
    def coords(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.spacing

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays ``(X, Y)`` indexed ``[iy, ix]``."""
        return np.meshgrid(self.coords, self.coords, indexing="xy")

    def radius(self) -> np.ndarray:
        X, Y = self.mesh()
        return np.hypot(X, Y)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "lim": self.lim, "domain": self.domain}


def make_paired_grids(n: int, q_lim: float) -> tuple[TransverseGrid, TransverseGrid]:
    """Spectral grid on ``[-q_lim, q_lim)^2`` and its DFT-reciprocal spatial grid.

    The pair obeys ``dx * dq * n = 2 pi``.

    >>> q, x = make_paired_grids(8, 4.0)
    >>> q.spacing, round(x.spacing, 4)
    (1.0, 0.7854)
    """
    spectral = TransverseGrid(n, q_lim, "spectral")
    x_lim = math.pi / spectral.spacing
    return spectral, TransverseGrid(n, x_lim, "spatial")


def reciprocal_grid(grid: TransverseGrid) -> TransverseGrid:
    other = "spatial" if grid.domain == "spectral" else "spectral"
    return TransverseGrid(grid.n, math.pi / grid.spacing, other)


def are_paired(spectral: TransverseGrid, spatial: TransverseGrid, rtol: float = 1e-12) -> bool:
    if spectral.n != spatial.n:
        return False
    product = spectral.spacing * spatial.spacing * spectral.n
    return abs(product - 2.0 * math.pi) <= rtol * 2.0 * math.pi


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Carrier frequencies with quadrature weights for the omega integral."""

    omegas: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        omegas = np.atleast_1d(np.asarray(self.omegas, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if omegas.ndim != 1 or omegas.shape != weights.shape or omegas.size == 0:
            raise ValueError("omegas and weights must be non-empty 1-D arrays of equal length")
        if not np.all(np.isfinite(omegas)) or np.any(omegas <= 0):
            raise ValueError("carrier frequencies must be finite and positive")
        if np.any(np.diff(omegas) <= 0):
            raise ValueError("carrier frequencies must be strictly increasing")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise ValueError("quadrature weights must be finite and positive")
        object.__setattr__(self, "omegas", _readonly(omegas))
        object.__setattr__(self, "weights", _readonly(weights))

    @classmethod
    def monochromatic(cls, omega: float) -> "FrequencyGrid":
        """Single node with unit weight (spectral density times unit bandwidth)."""
        return cls(np.array([omega]), np.array([1.0]))

    @classmethod
    def uniform(cls, lo: float, hi: float, count: int) -> "FrequencyGrid":
        """Midpoint rule on ``[lo, hi]``: nodes at cell centres, weights equal to the cell width."""
        if not (0 < lo < hi) or count < 1:
            raise ValueError("need 0 < lo < hi and count >= 1")
        width = (hi - lo) / count
        return cls(lo + (np.arange(count) + 0.5) * width, np.full(count, width))

    @classmethod
    def from_nodes(cls, omegas, weights=None) -> "FrequencyGrid":
        omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
        if weights is not None:
            return cls(omegas, weights)
        if omegas.size == 1:
            return cls.monochromatic(float(omegas[0]))
        edges = np.empty(omegas.size + 1)
        edges[1:-1] = 0.5 * (omegas[1:] + omegas[:-1])
        edges[0] = omegas[0] - (edges[1] - omegas[0])
        edges[-1] = omegas[-1] + (omegas[-1] - edges[-2])
        return cls(omegas, np.diff(edges))

    def __len__(self) -> int:
        return self.omegas.size

    def to_dict(self) -> dict[str, Any]:
        return {"omegas": [float(w) for w in self.omegas], "weights": [float(w) for w in self.weights]}


def spectral_mask(rel: "DispersionRelation", grid: TransverseGrid, freq: FrequencyGrid) -> np.ndarray:
    """Boolean ``[iw, iy, ix]`` membership of each node in C_q(f, omega)."""
    q = grid.radius()
    return np.stack([rel.domain_mask(q, w) for w in freq.omegas])


@dataclass(frozen=True, eq=False)
class AngularSpectrum:
    """Classical amplitudes a_{lam s}(q, omega) on a (q, omega) grid.

    ``|a|^2 dq^2 domega`` counts mode occupation. Amplitudes at nodes outside
    C_q(f, omega) are forced to zero on construction; the power removed that
    way is kept in ``metadata["masked_power_fraction"]``.
    """

    grid: TransverseGrid
    freq: FrequencyGrid
    amps: np.ndarray
    rel: "DispersionRelation"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.grid.domain != "spectral":
            raise ValueError("an angular spectrum lives on a spectral grid")
        shape = (2, 2, len(self.freq), self.grid.n, self.grid.n)
        amps = np.asarray(self.amps, dtype=complex)
        if amps.shape != shape:
            raise ValueError(f"amplitude array must have shape {shape}, got {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        mask = spectral_mask(self.rel, self.grid, self.freq)
        total = float(np.sum(np.abs(amps) ** 2))
        masked = np.where(mask, amps, 0.0)
        metadata = dict(self.metadata)
        if "masked_power_fraction" not in metadata:
            kept = float(np.sum(np.abs(masked) ** 2))
            metadata["masked_power_fraction"] = (total - kept) / total if total > 0 else 0.0
        object.__setattr__(self, "amps", _readonly(masked))
        object.__setattr__(self, "metadata", metadata)
        object.__setattr__(self, "_mask", _readonly(mask))

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    @property
    def units(self):
        return self.rel.units

    @cached_property
    def measure(self) -> np.ndarray:
        """Per-node quadrature weight dq^2 * w_omega, shaped ``[iw, 1, 1]``."""
        return (self.grid.spacing ** 2 * self.freq.weights)[:, None, None]

    def replace(self, amps: np.ndarray, **metadata) -> "AngularSpectrum":
        meta = dict(self.metadata)
        meta.update(metadata)
        return AngularSpectrum(self.grid, self.freq, amps, self.rel, meta)

    def scaled(self, factor: complex) -> "AngularSpectrum":
        return self.replace(self.amps * factor)


@dataclass(frozen=True, eq=False)
class FieldSlice:
    """Complex 3-vector field samples on a spatial grid at fixed (z, t)."""

    grid: TransverseGrid
    z: float
    t: float
    values: np.ndarray
    kernel: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        shape = (3, self.grid.n, self.grid.n)
        if values.shape != shape:
            raise ValueError(f"field values must have shape {shape}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise FloatingPointError("field slice contains non-finite values")
        object.__setattr__(self, "values", _readonly(values))
        object.__setattr__(self, "z", float(self.z))
        object.__setattr__(self, "t", float(self.t))

    def intensity(self, components=(0, 1, 2)) -> np.ndarray:
        return np.sum(np.abs(self.values[list(components)]) ** 2, axis=0)


def l2_norm(slice_: FieldSlice) -> float:
    """Discrete L2 norm ``sqrt(sum |v|^2 dx^2)`` over all nodes and components."""
    return float(np.sqrt(np.sum(np.abs(slice_.values) ** 2)) * slice_.grid.spacing)
