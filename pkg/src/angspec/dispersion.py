"""Dispersion relations zeta = f(q, omega), their Jacobians and domain geometry.

Three built-in branches are provided:

* ``TI`` (time-independent paraxial):  f = (w/c) (1 - q^2 c^2 / (2 w^2))
* ``TD`` (time-dependent paraxial):    f = (w/c) (1 - q^2 c^2 / (4 w^2))
* ``EXACT`` (plane-wave frequency):    f = (w/c) sqrt(1 - q^2 c^2 / w^2)

plus ``CUSTOM`` relations wrapping a user callable ``f(q, omega)``. A custom
relation must increase with omega and decrease with |q| so that its domain
C_q(f, omega) is a disc; both properties are checked by sampling only.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .core import UnitSystem

# Exact-branch nodes with q > (1 - BOUNDARY_SHELL) * omega / c are excluded:
# the Jacobian diverges on the boundary.
BOUNDARY_SHELL = 1e-6
FD_REL_STEP = 1e-6
BISECT_RTOL = 1e-12
_MAX_BRACKET_STEPS = 200


class OutOfDomainError(ValueError):
    """Raised when (q, omega) lies outside the domain of a dispersion relation."""


class NoBoundaryError(ValueError):
    """Raised when a custom relation shows no sign change inside the search bracket."""


class DispersionKind(str, enum.Enum):
    TI = "ti"
    TD = "td"
    EXACT = "exact"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, name: str) -> "DispersionKind":
        aliases = {
            "time_independent_paraxial": cls.TI,
            "time-independent-paraxial": cls.TI,
            "time_dependent_paraxial": cls.TD,
            "time-dependent-paraxial": cls.TD,
        }
        key = str(name).lower()
        return aliases.get(key) or cls(key)


@dataclass(frozen=True)
class DispersionRelation:
    kind: DispersionKind
    units: UnitSystem = field(default_factory=UnitSystem.natural)
    func: Optional[Callable] = None
    dfunc: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        kind = DispersionKind.parse(self.kind) if not isinstance(self.kind, DispersionKind) else self.kind
        object.__setattr__(self, "kind", kind)
        if kind is DispersionKind.CUSTOM and self.func is None:
            raise ValueError("a custom dispersion relation needs a callable f(q, omega)")
        if kind is not DispersionKind.CUSTOM and (self.func is not None or self.dfunc is not None):
            raise ValueError("built-in dispersion relations take no callables")
        if not self.name:
            object.__setattr__(self, "name", kind.value)

    @classmethod
    def ti(cls, units: UnitSystem | None = None) -> "DispersionRelation":
        return cls(DispersionKind.TI, units or UnitSystem.natural())

    @classmethod
    def td(cls, units: UnitSystem | None = None) -> "DispersionRelation":
        return cls(DispersionKind.TD, units or UnitSystem.natural())

    @classmethod
    def exact(cls, units: UnitSystem | None = None) -> "DispersionRelation":
        return cls(DispersionKind.EXACT, units or UnitSystem.natural())

    @classmethod
    def custom(cls, func, dfunc=None, units: UnitSystem | None = None, name: str = "custom"):
        return cls(DispersionKind.CUSTOM, units or UnitSystem.natural(), func, dfunc, name)

    @property
    def is_builtin(self) -> bool:
        return self.kind is not DispersionKind.CUSTOM

    # -- raw formulas (no domain checks) ---------------------------------

    def _raw_f(self, q, omega):
        c = self.units.c
        q = np.asarray(q, dtype=float)
        omega = np.asarray(omega, dtype=float)
        u2 = (q * c / omega) ** 2
        if self.kind is DispersionKind.TI:
            return (omega / c) * (1.0 - u2 / 2.0)
        if self.kind is DispersionKind.TD:
            return (omega / c) * (1.0 - u2 / 4.0)
        if self.kind is DispersionKind.EXACT:
            return (omega / c) * np.sqrt(np.maximum(1.0 - u2, 0.0))
        return np.asarray(self.func(q, omega), dtype=float)

    # -- domain ----------------------------------------------------------

    def q_max(self, omega):
        """Radius of the boundary circle f(q, omega) = 0."""
        omega = np.asarray(omega, dtype=float)
        if np.any(omega <= 0):
            raise ValueError("omega must be positive")
        c = self.units.c
        if self.kind is DispersionKind.TI:
            return math.sqrt(2.0) * omega / c
        if self.kind is DispersionKind.TD:
            return 2.0 * omega / c
        if self.kind is DispersionKind.EXACT:
            return omega / c
        return _vectorize(self._custom_q_max, omega)

    def omega_min(self, q):
        """Lower end of I_omega(f, q), the smallest omega with f(q, omega) >= 0."""
        q = np.asarray(q, dtype=float)
        if np.any(q < 0):
            raise ValueError("q must be non-negative")
        c = self.units.c
        if self.kind is DispersionKind.TI:
            return q * c / math.sqrt(2.0)
        if self.kind is DispersionKind.TD:
            return q * c / 2.0
        if self.kind is DispersionKind.EXACT:
            return q * c
        return _vectorize(self._custom_omega_min, q)

    def domain_mask(self, q, omega) -> np.ndarray:
        """True where (q, omega) is strictly inside the usable domain.

        The boundary f = 0 itself is excluded (zeta must be positive), and for
        the exact branch so is the shell next to it.
        """
        q = np.asarray(q, dtype=float)
        omega = np.asarray(omega, dtype=float)
        if self.kind is DispersionKind.CUSTOM:
            with np.errstate(invalid="ignore"):
                f = self._raw_f(q, omega)
            return np.isfinite(f) & (f > 0)
        qmax = self.q_max(omega)
        if self.kind is DispersionKind.EXACT:
            return q <= (1.0 - BOUNDARY_SHELL) * qmax
        return q < qmax

    def _check_nonnegative(self, q, omega):
        q = np.asarray(q, dtype=float)
        omega = np.asarray(omega, dtype=float)
        if np.any(omega <= 0):
            raise OutOfDomainError("omega must be positive")
        if np.any(q < 0):
            raise OutOfDomainError("q must be non-negative")
        if self.is_builtin:
            bad = q > self.q_max(omega) * (1.0 + 4 * np.finfo(float).eps)
        else:
            bad = ~(self._raw_f(q, omega) >= 0)
        if np.any(bad):
            raise OutOfDomainError(
                f"{int(np.count_nonzero(bad))} point(s) outside the domain of the {self.name} relation (f < 0)"
            )

    def _check_jacobian_domain(self, q, omega):
        self._check_nonnegative(q, omega)
        if self.kind is DispersionKind.EXACT:
            q = np.asarray(q, dtype=float)
            bad = q > (1.0 - BOUNDARY_SHELL) * self.q_max(np.asarray(omega, dtype=float))
            if np.any(bad):
                raise OutOfDomainError(
                    f"{int(np.count_nonzero(bad))} point(s) inside the exact-branch boundary shell"
                )

    # -- public evaluations ----------------------------------------------

    def f(self, q, omega):
        """Longitudinal wavenumber zeta = f(q, omega); never negative."""
        self._check_nonnegative(q, omega)
        return np.maximum(self._raw_f(q, omega), 0.0)

    def jacobian(self, q, omega):
        """df/domega."""
        self._check_jacobian_domain(q, omega)
        c = self.units.c
        q = np.asarray(q, dtype=float)
        omega = np.asarray(omega, dtype=float)
        u2 = (q * c / omega) ** 2
        if self.kind is DispersionKind.TI:
            return (1.0 + u2 / 2.0) / c
        if self.kind is DispersionKind.TD:
            return (1.0 + u2 / 4.0) / c
        if self.kind is DispersionKind.EXACT:
            return 1.0 / (c * np.sqrt(1.0 - u2))
        if self.dfunc is not None:
            return np.asarray(self.dfunc(q, omega), dtype=float)
        return finite_difference_jacobian(self, q, omega)

    def plane_wave_frequency(self, q, omega):
        """c |k| = c sqrt(q^2 + f^2) of the plane-wave mode at (q, omega)."""
        zeta = self.f(q, omega)
        if self.kind is DispersionKind.EXACT:
            return np.broadcast_to(np.asarray(omega, dtype=float), np.shape(zeta)).copy()
        return self.units.c * np.hypot(q, zeta)

    def omega_from_zeta(self, q, zeta):
        """Invert zeta = f(q, omega) for omega on the increasing branch."""
        q = np.asarray(q, dtype=float)
        zeta = np.asarray(zeta, dtype=float)
        c = self.units.c
        if self.kind is DispersionKind.TI:
            half = c * zeta / 2.0
            return half + np.sqrt(half ** 2 + (q * c) ** 2 / 2.0)
        if self.kind is DispersionKind.TD:
            half = c * zeta / 2.0
            return half + np.sqrt(half ** 2 + (q * c) ** 2 / 4.0)
        if self.kind is DispersionKind.EXACT:
            return c * np.hypot(zeta, q)
        return _vectorize(self._custom_omega_from_zeta, q, zeta)

    # -- custom-relation root finding ------------------------------------

    def _fs(self, q, omega) -> float:
        return float(self._raw_f(np.float64(q), np.float64(omega)))

    def _custom_q_max(self, omega: float) -> float:
        if not self._fs(0.0, omega) > 0:
            raise NoBoundaryError(f"custom relation is not positive on axis at omega={omega!r}")
        hi = omega / self.units.c
        for _ in range(_MAX_BRACKET_STEPS):
            if self._fs(hi, omega) < 0:
                return optimize.bisect(lambda q: self._fs(q, omega), 0.0, hi, xtol=1e-300, rtol=BISECT_RTOL)
            hi *= 2.0
        raise NoBoundaryError(f"no sign change of f(q, {omega!r}) found in q")

    def _custom_omega_min(self, q: float) -> float:
        hi = q * self.units.c if q > 0 else 1.0
        for _ in range(_MAX_BRACKET_STEPS):
            if self._fs(q, hi) >= 0:
                break
            hi *= 2.0
        else:
            raise NoBoundaryError(f"f(q={q!r}, omega) never becomes non-negative")
        lo = hi
        for _ in range(_MAX_BRACKET_STEPS):
            lo /= 2.0
            if self._fs(q, lo) < 0:
                return optimize.bisect(lambda w: self._fs(q, w), lo, hi, xtol=1e-300, rtol=BISECT_RTOL)
        raise NoBoundaryError(f"no sign change of f(q={q!r}, omega) found in omega")

    def _custom_omega_from_zeta(self, q: float, zeta: float) -> float:
        lo = max(self._custom_omega_min(q), np.finfo(float).tiny)
        hi = max(2.0 * lo, zeta * self.units.c)
        for _ in range(_MAX_BRACKET_STEPS):
            if self._fs(q, hi) >= zeta:
                return optimize.bisect(lambda w: self._fs(q, w) - zeta, lo, hi, xtol=1e-300, rtol=BISECT_RTOL)
            lo, hi = hi, 2.0 * hi
        raise OutOfDomainError(f"zeta={zeta!r} is not reached by f(q={q!r}, omega)")


def _vectorize(func, *args):
    out = np.vectorize(func, otypes=[float])(*args)
    return out[()] if out.ndim == 0 else out


def finite_difference_jacobian(rel: DispersionRelation, q, omega):
    """Central difference df/domega with relative step FD_REL_STEP * omega."""
    omega = np.asarray(omega, dtype=float)
    h = FD_REL_STEP * omega
    return (rel._raw_f(q, omega + h) - rel._raw_f(q, omega - h)) / (2.0 * h)


@dataclass(frozen=True)
class MonotoneCheck:
    ok: bool
    first_violation: Optional[float] = None

    def __bool__(self) -> bool:
        return self.ok


def validate_monotone(rel: DispersionRelation, q: float, omega_lo: float, omega_hi: float,
                      n_samples: int) -> MonotoneCheck:
    """Sample df/domega on ``[omega_lo, omega_hi]`` and require it positive wherever f >= 0.

    Returns a falsy :class:`MonotoneCheck` carrying the first offending
    frequency when the check fails.
    """
    if n_samples < 3:
        raise ValueError("need at least 3 samples")
    if not omega_lo < omega_hi:
        raise ValueError("need omega_lo < omega_hi")
    omegas = np.linspace(omega_lo, omega_hi, n_samples)
    f = rel._raw_f(q, omegas)
    inside = f >= 0
    if rel.kind is DispersionKind.EXACT:
        inside &= q <= (1.0 - BOUNDARY_SHELL) * omegas / rel.units.c
    for w in omegas[inside]:
        if rel.dfunc is not None or rel.is_builtin:
            d = float(rel.jacobian(q, w))
        else:
            d = float(finite_difference_jacobian(rel, q, w))
        if not d > 0:
            return MonotoneCheck(False, float(w))
    return MonotoneCheck(True)
