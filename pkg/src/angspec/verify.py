"""Numerical checks of the wave equations and of the spectral identities.

Residuals are evaluated with second-order central differences on a square
patch of points around the origin. Field values at the stencil points come
from the direct plane-wave sum, so the patch spacing ``h`` is free and the
convergence order is measured by repeating the check at ``h / 2``. A 2-node
border of the patch is excluded; fields are never treated as periodic.

The relative residual divides the residual norm by the sum of the norms of
the individual terms of the equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    BRANCHES,
    AngularSpectrum,
    FrequencyGrid,
    UnitSystem,
    make_paired_grids,
)
from .dispersion import (
    DispersionKind,
    DispersionRelation,
    finite_difference_jacobian,
)
from .modes import mode_weight, triad
from .observables import energy, occupation
from .propagation import (
    KernelKind,
    apply_kernel,
    check_kind,
    default_kernel,
    envelope_slice,
    fubini_totals,
    kernel,
    kernel_relation,
    sample_envelope,
    sample_field,
    spectral_content,
    synthesize_fft,
)
from .spectrum import (
    BeamSource,
    SourceKind,
    from_angular_spectrum,
    make_source,
    measure_invariance,
    to_angular_spectrum,
)

EPS_FLOOR = 1e-300
DEFAULT_TOLERANCE = 1e-3
MIN_ORDER = 1.9
# Relative residuals below this are rounding noise and carry no order.
NOISE_FLOOR = 1e-11
SPACING_FACTOR = 0.05
PATCH_HALF_NODES = 16
BORDER = 2

Evaluator = Callable[[np.ndarray, np.ndarray, float, float], np.ndarray]


@dataclass
class VerificationReport:
    name: str
    residual_norm: float
    reference_norm: float
    tolerance: float
    passed: bool
    convergence_order: Optional[float] = None
    details: dict = field(default_factory=dict)
    relative_residual: float = field(init=False)

    def __post_init__(self):
        self.residual_norm = float(self.residual_norm)
        self.reference_norm = float(self.reference_norm)
        self.relative_residual = self.residual_norm / max(self.reference_norm, EPS_FLOOR)
        self.passed = bool(self.passed)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "residual_norm": self.residual_norm,
            "reference_norm": self.reference_norm,
            "relative_residual": self.relative_residual,
            "convergence_order": self.convergence_order,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "details": self.details,
        }

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        order = "" if self.convergence_order is None else f" order={self.convergence_order:.3f}"
        return f"[{status}] {self.name}: relative={self.relative_residual:.3e}{order} (tol {self.tolerance:g})"


def _report_value(name, value, tolerance, **details) -> VerificationReport:
    """Report for a check whose outcome is a single relative discrepancy."""
    return VerificationReport(name, value, 1.0, tolerance, value <= tolerance, details=details)


# -- stencils ----------------------------------------------------------------


def patch_coords(h: float, half_width: float, center: float = 0.0) -> np.ndarray:
    nodes = int(round(half_width / h))
    if 2 * nodes + 1 - 2 * BORDER < 5:
        raise ValueError("patch too small: need at least 5 interior nodes per axis")
    return center + h * np.arange(-nodes, nodes + 1)


def _inner(a: np.ndarray) -> np.ndarray:
    return a[..., BORDER:-BORDER, BORDER:-BORDER]


def _transverse_laplacian(p: np.ndarray, h: float) -> np.ndarray:
    b = BORDER
    centre = p[..., b:-b, b:-b]
    xx = p[..., b:-b, b + 1:p.shape[-1] - b + 1] + p[..., b:-b, b - 1:-b - 1] - 2 * centre
    yy = p[..., b + 1:p.shape[-2] - b + 1, b:-b] + p[..., b - 1:-b - 1, b:-b] - 2 * centre
    return (xx + yy) / h ** 2


def _norm(a: np.ndarray, h: float) -> float:
    return float(np.sqrt(np.sum(np.abs(a) ** 2)) * h)


def paraxial_residual(evaluate: Evaluator, omega: float, c: float, s: int, z: float, t: float,
                      h: float, half_width: float, hz: float, ht: Optional[float] = None):
    """(residual, reference) norms of Psi_xx + Psi_yy + 2 i s (w/c) Psi_z [+ 2 i (w/c^2) Psi_t]."""
    x = patch_coords(h, half_width)
    p0 = evaluate(x, x, z, t)
    dz = _inner(evaluate(x, x, z + hz, t) - evaluate(x, x, z - hz, t)) / (2 * hz)
    terms = [_transverse_laplacian(p0, h), 2j * s * (omega / c) * dz]
    if ht is not None:
        dt = _inner(evaluate(x, x, z, t + ht) - evaluate(x, x, z, t - ht)) / (2 * ht)
        terms.append(2j * (omega / c ** 2) * dt)
    residual = sum(terms)
    return _norm(residual, h), sum(_norm(term, h) for term in terms)


def dalembert_residual(evaluate: Evaluator, c: float, z: float, t: float, h: float,
                       half_width: float, hz: float, ht: float):
    """(residual, reference) norms of (laplacian - c^-2 d^2/dt^2) A."""
    x = patch_coords(h, half_width)
    a0 = evaluate(x, x, z, t)
    azz = _inner(evaluate(x, x, z + hz, t) + evaluate(x, x, z - hz, t) - 2 * a0) / hz ** 2
    att = _inner(evaluate(x, x, z, t + ht) + evaluate(x, x, z, t - ht) - 2 * a0) / (c * ht) ** 2
    lap = _transverse_laplacian(a0, h) + azz
    return _norm(lap - att, h), _norm(lap, h) + _norm(att, h)


def _convergence(name, run, h, tolerance, min_order, refine, **details) -> VerificationReport:
    res_c, ref_c = run(h)
    rel_c = res_c / max(ref_c, EPS_FLOOR)
    details = dict(details, h=h)
    if not refine:
        return VerificationReport(name, res_c, ref_c, tolerance, rel_c <= tolerance, None, details)
    res_f, ref_f = run(h / 2)
    rel_f = res_f / max(ref_f, EPS_FLOOR)
    order = None
    if rel_c > NOISE_FLOOR and rel_f > NOISE_FLOOR:
        order = math.log2(rel_c / rel_f)
    details.update(relative_coarse=rel_c, relative_fine=rel_f, h_fine=h / 2, min_order=min_order)
    passed = rel_f <= tolerance and (order is None or order >= min_order)
    return VerificationReport(name, res_f, ref_f, tolerance, passed, order, details)


# -- evaluators ----------------------------------------------------------------


def envelope_evaluator(spec: AngularSpectrum, kind, s: int, omega_index: int = 0) -> Evaluator:
    return lambda x, y, z, t: sample_envelope(spec, kind, s, x, y, z, t, omega_index)


def field_evaluator(spec: AngularSpectrum, kind, branches=BRANCHES) -> Evaluator:
    return lambda x, y, z, t: sample_field(spec, kind, x, y, z, t, branches)


def plane_wave_evaluator(rel: DispersionRelation, qx: float, qy: float, omega: float, s: int = 1,
                         zeta_error: float = 0.0) -> Evaluator:
    """Single plane wave p exp(i(q.x + s zeta z - c|k| t)) with zeta = (1 + zeta_error) f(q, omega).

    |k| is taken from the unperturbed relation, so any ``zeta_error`` breaks
    the d'Alembert equation by a known amount.
    """
    q = math.hypot(qx, qy)
    f = float(rel.f(q, omega))
    zeta = (1.0 + zeta_error) * f
    ck = rel.units.c * math.hypot(q, f)
    pol = triad(rel, qx, qy, s, omega).eps2

    def evaluate(x, y, z, t):
        phase = np.exp(1j * (qx * x[None, :] + qy * y[:, None] + s * zeta * z - ck * t))
        return pol[:, None, None] * phase

    return evaluate


def _default_envelope_spacing(spec: AngularSpectrum, omega_index: int) -> float:
    power = np.sum(np.abs(spec.amps[:, :, omega_index]) ** 2, axis=(0, 1))
    total = float(np.sum(power))
    q2 = spec.grid.radius() ** 2
    q_rms = math.sqrt(float(np.sum(power * q2)) / total) if total > 0 else 0.0
    if q_rms > 0:
        return SPACING_FACTOR / q_rms
    return SPACING_FACTOR * spec.units.c / float(spec.freq.omegas[omega_index])


def _default_field_spacing(spec: AngularSpectrum) -> float:
    return SPACING_FACTOR * spec.units.c / float(spec.freq.omegas.max())


# -- residual checks -----------------------------------------------------------


def residual_ti_paraxial(spec: AngularSpectrum, s: int = 1, z: float = 0.0, h: Optional[float] = None,
                         omega_index: int = 0, half_width: Optional[float] = None,
                         hz: Optional[float] = None, tolerance: float = DEFAULT_TOLERANCE,
                         min_order: float = MIN_ORDER, refine: bool = True) -> VerificationReport:
    """Time-independent paraxial equation for the FresnelTI envelope at t = 0."""
    check_kind(KernelKind.FRESNEL_TI, spec.rel)
    h = h or _default_envelope_spacing(spec, omega_index)
    span = half_width or PATCH_HALF_NODES * h
    ratio = 1.0 if hz is None else hz / h
    omega = float(spec.freq.omegas[omega_index])
    evaluate = envelope_evaluator(spec, KernelKind.FRESNEL_TI, s, omega_index)
    c = spec.units.c

    def run(step):
        return paraxial_residual(evaluate, omega, c, s, z, 0.0, step, span, ratio * step)

    return _convergence("ti_paraxial_residual", run, h, tolerance, min_order, refine, z=z, s=s)


def residual_td_paraxial(spec: AngularSpectrum, s: int = 1, z: float = 0.0, t: float = 0.0,
                         h: Optional[float] = None, omega_index: int = 0,
                         half_width: Optional[float] = None, hz: Optional[float] = None,
                         ht: Optional[float] = None, tolerance: float = DEFAULT_TOLERANCE,
                         min_order: float = MIN_ORDER, refine: bool = True) -> VerificationReport:
    """Time-dependent paraxial equation for the HalfFresnelTD envelope."""
    check_kind(KernelKind.HALF_FRESNEL_TD, spec.rel)
    c = spec.units.c
    h = h or _default_envelope_spacing(spec, omega_index)
    span = half_width or PATCH_HALF_NODES * h
    z_ratio = 1.0 if hz is None else hz / h
    t_ratio = 1.0 / c if ht is None else ht / h
    omega = float(spec.freq.omegas[omega_index])
    evaluate = envelope_evaluator(spec, KernelKind.HALF_FRESNEL_TD, s, omega_index)

    def run(step):
        return paraxial_residual(evaluate, omega, c, s, z, t, step, span, z_ratio * step, t_ratio * step)

    return _convergence("td_paraxial_residual", run, h, tolerance, min_order, refine, z=z, t=t, s=s)


def residual_dalembert(spec: Optional[AngularSpectrum] = None, kind: Optional[KernelKind] = None,
                       z: float = 0.0, t: float = 0.0, h: Optional[float] = None,
                       half_width: Optional[float] = None, hz: Optional[float] = None,
                       ht: Optional[float] = None, tolerance: float = DEFAULT_TOLERANCE,
                       min_order: float = MIN_ORDER, refine: bool = True,
                       evaluate: Optional[Evaluator] = None, units: Optional[UnitSystem] = None,
                       name: str = "dalembert_residual") -> VerificationReport:
    """d'Alembert equation for the full field A(x, y, z, t).

    Either pass a spectrum (and optionally its kernel) or a field evaluator
    together with ``units`` and ``h``.
    """
    if evaluate is None:
        if spec is None:
            raise ValueError("need a spectrum or an evaluator")
        kind = check_kind(kind or default_kernel(spec.rel), spec.rel)
        evaluate = field_evaluator(spec, kind)
        units = spec.units
        h = h or _default_field_spacing(spec)
    elif units is None or h is None:
        raise ValueError("an evaluator needs explicit units and spacing")
    c = units.c
    span = half_width or PATCH_HALF_NODES * h
    z_ratio = 1.0 if hz is None else hz / h
    t_ratio = 1.0 / c if ht is None else ht / h

    def run(step):
        return dalembert_residual(evaluate, c, z, t, step, span, z_ratio * step, t_ratio * step)

    details = {"z": z, "t": t}
    if kind is not None:
        details["kernel"] = KernelKind(kind).value
    return _convergence(name, run, h, tolerance, min_order, refine, **details)


def negative_control(rel: DispersionRelation, qx: float, qy: float, omega: float, s: int = 1,
                     zeta_error: float = 0.1, h: Optional[float] = None, min_ratio: float = 1e3,
                     half_width: Optional[float] = None) -> VerificationReport:
    """Plane wave with a perturbed zeta must fail the d'Alembert check by min_ratio x the matched wave."""
    units = rel.units
    h = h or SPACING_FACTOR * units.c / omega
    common = dict(units=units, h=h, half_width=half_width, refine=False)
    good = residual_dalembert(evaluate=plane_wave_evaluator(rel, qx, qy, omega, s), **common)
    bad = residual_dalembert(evaluate=plane_wave_evaluator(rel, qx, qy, omega, s, zeta_error), **common)
    ratio = bad.relative_residual / max(good.relative_residual, EPS_FLOOR)
    return VerificationReport(
        "negative_control_wrong_zeta", bad.residual_norm, bad.reference_norm, min_ratio, ratio >= min_ratio,
        details={"zeta_error": zeta_error, "matched_relative": good.relative_residual, "ratio": ratio, "h": h},
    )


# -- paraxial limit ------------------------------------------------------------


@dataclass
class LimitStudy:
    rows: list
    exponent: float
    omega: float
    z: float

    def to_report(self, expected: float = 4.0, tolerance: float = 0.3) -> VerificationReport:
        miss = abs(self.exponent - expected) if math.isfinite(self.exponent) else math.inf
        return VerificationReport(
            "paraxial_limit_exponent", miss, 1.0, tolerance, miss <= tolerance, self.exponent,
            details={"rows": [list(r) for r in self.rows], "omega": self.omega, "z": self.z},
        )


def kernel_difference(spec: AngularSpectrum, kind_a, kind_b, z: float, t: float = 0.0,
                      s: int = 1, omega_index: int = 0) -> float:
    """Relative L2 difference of two kernels applied to the same spectral content."""
    units = spec.units

    def rel_for(kind):
        kind = KernelKind(kind)
        return spec.rel if kind is KernelKind.GENERAL else kernel_relation(kind, units)

    fields = []
    for kind in (kind_a, kind_b):
        V = spectral_content(spec, kind, s, z, t, omega_index, kernel_rel=rel_for(kind))
        fields.append(synthesize_fft(V, spec.grid))
    ref = float(np.sqrt(np.sum(np.abs(fields[1]) ** 2)))
    diff = float(np.sqrt(np.sum(np.abs(fields[0] - fields[1]) ** 2)))
    return diff / ref if ref > 0 else 0.0


def paraxial_limit_study(q_lims: Sequence[float], omega: float = 1.0, z: Optional[float] = None,
                         n: int = 64, waist_factor: float = 6.0, polarization=(1.0, 0.0), s: int = 1,
                         units: Optional[UnitSystem] = None,
                         kinds=(KernelKind.EXACT_AS, KernelKind.FRESNEL_TI)) -> LimitStudy:
    """ExactAS vs FresnelTI envelopes of a Gaussian beam for shrinking q_lim.

    The waist scales as ``waist_factor / q_lim`` so the spectrum fills the
    grid the same way at every q_lim; the fitted log-log slope of the
    difference against q_lim is the reported exponent.
    """
    if len(q_lims) < 3:
        raise ValueError("need at least three q_lim values")
    units = units or UnitSystem.natural()
    z = 10.0 * units.c / omega if z is None else z
    rel = DispersionRelation.exact(units)
    freq = FrequencyGrid.monochromatic(omega)
    rows = []
    for q_lim in sorted(q_lims, reverse=True):
        grid, _ = make_paired_grids(n, q_lim)
        src = BeamSource(SourceKind.GAUSSIAN, waist=waist_factor / q_lim, polarization=polarization, branch=s)
        spec = make_source(src, grid, freq, rel)
        rows.append((float(q_lim), kernel_difference(spec, kinds[0], kinds[1], z, 0.0, s)))
    q, d = np.array(rows).T
    if np.all(d > 0):
        exponent = float(np.polyfit(np.log(q), np.log(d), 1)[0])
    else:
        exponent = math.nan
    return LimitStudy(rows, exponent, omega, z)


# -- identity and closure checks ----------------------------------------------


def sample_domain(rel: DispersionRelation, count: int, rng: np.random.Generator,
                  omega_range=(0.5, 2.0), margin: float = 0.01):
    """Random (q, omega) with q c / omega uniform on [0, (1 - margin) q_max c / omega]."""
    omega = rng.uniform(*omega_range, size=count)
    q = rng.uniform(0.0, 1.0 - margin, size=count) * rel.q_max(omega)
    return q, omega


def dispersion_closure(rel: DispersionRelation, count: int = 1000, seed: int = 0,
                       omega_range=(0.5, 2.0), fd_tolerance: float = 1e-6,
                       ck_tolerance: float = 1e-12) -> VerificationReport:
    """f >= 0, analytic vs finite-difference Jacobian, and closed forms of c|k|."""
    rng = np.random.default_rng(seed)
    q, omega = sample_domain(rel, count, rng, omega_range)
    c = rel.units.c
    f = rel.f(q, omega)
    jac = rel.jacobian(q, omega)
    fd = finite_difference_jacobian(rel, q, omega)
    fd_err = float(np.max(np.abs(fd - jac) / np.abs(jac)))
    ck = c * np.sqrt(q ** 2 + f ** 2)
    if rel.kind is DispersionKind.TI:
        closed = omega * np.sqrt(1.0 + ((q * c / omega) ** 2 / 2.0) ** 2)
    elif rel.kind is DispersionKind.TD:
        closed = omega * (1.0 + (q * c / (2.0 * omega)) ** 2)
    elif rel.kind is DispersionKind.EXACT:
        closed = omega
    else:
        closed = rel.plane_wave_frequency(q, omega)
    ck_err = float(np.max(np.abs(ck - closed) / closed))
    passed = bool(np.all(f >= 0) and np.all(jac > 0) and fd_err <= fd_tolerance and ck_err <= ck_tolerance)
    return VerificationReport(
        f"dispersion_closure[{rel.kind.value}]", fd_err, 1.0, fd_tolerance, passed,
        details={"min_f": float(f.min()), "ck_error": ck_err, "samples": count, "seed": seed},
    )


def triad_check(rel: DispersionRelation, grid, omega: float, tolerance: float = 1e-12) -> VerificationReport:
    """Orthonormality, right-handedness and transversality at every masked-in node, both branches."""
    m = rel.domain_mask(grid.radius(), omega)
    X, Y = grid.mesh()
    qx, qy = X[m], Y[m]
    worst = 0.0
    for s in BRANCHES:
        tri = triad(rel, qx, qy, s, omega)
        vecs = tri.as_matrix()
        gram = np.einsum("iak,jak->ijk", vecs, vecs)
        worst = max(worst, float(np.max(np.abs(gram - np.eye(3)[:, :, None]))))
        cross = np.cross(tri.eps1, tri.eps2, axis=0)
        worst = max(worst, float(np.max(np.abs(cross - tri.khat))))
        f = rel.f(np.hypot(qx, qy), omega)
        k = np.stack([qx, qy, s * f])
        kn = np.linalg.norm(k, axis=0)
        for eps in (tri.eps1, tri.eps2):
            worst = max(worst, float(np.max(np.abs(np.sum(eps * k, axis=0)) / kn)))
    return _report_value(f"triad[{rel.kind.value}]", worst, tolerance, nodes=int(m.sum()))


def mode_weight_closure(rel: DispersionRelation, grid, omega: float, tolerance: float = 1e-12):
    u = rel.units
    q = grid.radius()[rel.domain_mask(grid.radius(), omega)]
    w = mode_weight(rel, q, omega)
    f = rel.f(q, omega)
    hbar = w ** 2 * 16 * np.pi ** 3 * u.eps0 * u.c * np.hypot(q, f) / rel.jacobian(q, omega)
    err = float(np.max(np.abs(hbar - u.hbar)) / u.hbar)
    return _report_value(f"mode_weight_closure[{rel.kind.value}]", err, tolerance)


def roundtrip_check(spec: AngularSpectrum, tolerance: float = 1e-12) -> VerificationReport:
    back = to_angular_spectrum(from_angular_spectrum(spec), spec.rel, spec.freq)
    scale = float(np.max(np.abs(spec.amps))) or 1.0
    err = float(np.max(np.abs(back.amps - spec.amps))) / scale
    return _report_value("change_of_variables_roundtrip", err, tolerance)


def measure_exact_check(spec: AngularSpectrum, tolerance: float = 1e-12) -> VerificationReport:
    value = measure_invariance(spec, from_angular_spectrum(spec), "exact")
    return _report_value("measure_invariance_exact", value, tolerance)


def measure_convergence(rel: DispersionRelation, omega0: float = 1.0, counts=(16, 32, 64), n: int = 32,
                        min_order: float = MIN_ORDER) -> VerificationReport:
    """Midpoint dzeta mismatch on a Gaussian spectrum under successive domega halving."""
    c = rel.units.c
    q_lim = 0.2 * omega0 / c
    grid, _ = make_paired_grids(n, q_lim)
    sigma = 0.05 * omega0
    src = BeamSource(SourceKind.GAUSSIAN, waist=6.0 / q_lim, omega0=omega0, bandwidth=sigma)
    errors = []
    for count in counts:
        freq = FrequencyGrid.uniform(omega0 - 6 * sigma, omega0 + 6 * sigma, count)
        spec = make_source(src, grid, freq, rel)
        errors.append(measure_invariance(spec, from_angular_spectrum(spec), "midpoint"))
    orders = [math.log2(a / b) for a, b in zip(errors[:-1], errors[1:])]
    order = min(orders)
    return VerificationReport(
        f"measure_invariance_midpoint_order[{rel.kind.value}]", errors[-1], 1.0, min_order,
        order >= min_order, order, details={"counts": list(counts), "errors": errors, "orders": orders},
    )


def fubini_check(spec: AngularSpectrum, tolerance: float = 1e-12) -> VerificationReport:
    a, b = fubini_totals(spec)
    err = abs(a - b) / max(abs(a), EPS_FLOOR)
    return _report_value("fubini_totals", err, tolerance, q_outer=a, omega_outer=b)


def unimodularity_check(spec: AngularSpectrum, kind, z: float, t: float, tolerance: float = 1e-14):
    q = spec.grid.radius()
    worst = 0.0
    for s in BRANCHES:
        for j, omega in enumerate(spec.freq.omegas):
            m = spec.mask[j]
            worst = max(worst, float(np.max(np.abs(np.abs(kernel(kind, spec.rel, q[m], omega, s, z, t)) - 1.0))))
    return _report_value("kernel_unimodularity", worst, tolerance, z=z, t=t)


def conservation_check(spec: AngularSpectrum, kind, zs, ts, tolerance: float = 1e-14):
    e0 = energy(spec).total
    n0 = occupation(spec)
    worst = 0.0
    for z in zs:
        for t in ts:
            moved = apply_kernel(spec, kind, z, t)
            worst = max(worst, abs(energy(moved).total - e0) / e0, abs(occupation(moved) - n0) / n0)
    return _report_value("energy_occupation_conservation", worst, tolerance)


def fft_direct_check(spec: AngularSpectrum, kind, s: int, z: float, t: float,
                     tolerance: float = 1e-10, omega_index: int = 0):
    fast = envelope_slice(spec, kind, s, z, t, omega_index, method="fft").values
    slow = envelope_slice(spec, kind, s, z, t, omega_index, method="direct").values
    scale = float(np.max(np.abs(slow))) or 1.0
    err = float(np.max(np.abs(fast - slow))) / scale
    return _report_value("fft_vs_direct", err, tolerance, z=z, t=t)


# -- suite -----------------------------------------------------------------------

DEFAULT_TOLERANCES = {
    "residual": DEFAULT_TOLERANCE,
    "min_order": MIN_ORDER,
    "identity": 1e-12,
    "conservation": 1e-14,
    "fft_direct": 1e-10,
    "jacobian_fd": 1e-6,
    "negative_control_ratio": 1e3,
    "limit_exponent": 0.3,
}


def run_suite(spec: AngularSpectrum, kind=None, tolerances: Optional[dict] = None, seed: int = 0,
              z: Optional[float] = None, inject_zeta_error: float = 0.0) -> list[VerificationReport]:
    """Every check applicable to the spectrum's dispersion relation and kernel."""
    tol = dict(DEFAULT_TOLERANCES, **(tolerances or {}))
    rel = spec.rel
    kind = check_kind(kind or default_kernel(rel), rel)
    omega = float(spec.freq.omegas[0])
    c = spec.units.c
    z = 10.0 * c / omega if z is None else z
    s = 1 if np.any(spec.amps[:, 0]) else -1
    reports = [
        dispersion_closure(rel, seed=seed, fd_tolerance=tol["jacobian_fd"]),
        triad_check(rel, spec.grid, omega, tol["identity"]),
        mode_weight_closure(rel, spec.grid, omega, tol["identity"]),
        roundtrip_check(spec, tol["identity"]),
        measure_exact_check(spec, tol["identity"]),
        measure_convergence(rel, omega, min_order=tol["min_order"]),
        fubini_check(spec, tol["identity"]),
        unimodularity_check(spec, kind, z, z / c, tol["conservation"]),
        conservation_check(spec, kind, [0.0, z], [0.0, z / c], tol["conservation"]),
        fft_direct_check(spec, kind, s, z, 0.0, tol["fft_direct"]),
    ]
    common = dict(tolerance=tol["residual"], min_order=tol["min_order"])
    if rel.kind is DispersionKind.TI:
        reports.append(residual_ti_paraxial(spec, s, z, **common))
    if rel.kind is DispersionKind.TD:
        reports.append(residual_td_paraxial(spec, s, z, z / c, **common))
    reports.append(residual_dalembert(spec, kind, z, z / c, **common))

    q_probe = 0.3 * omega / c
    reports.append(negative_control(rel, q_probe, 0.0, omega, min_ratio=tol["negative_control_ratio"]))
    if inject_zeta_error:
        reports.append(residual_dalembert(
            evaluate=plane_wave_evaluator(rel, q_probe, 0.0, omega, 1, inject_zeta_error),
            units=spec.units, h=SPACING_FACTOR * c / omega, name="dalembert_plane_wave_injected", **common,
        ))
    study = paraxial_limit_study([0.2 * omega / c, 0.1 * omega / c, 0.05 * omega / c], omega,
                                 10.0 * c / omega, units=spec.units)
    reports.append(study.to_report(tolerance=tol["limit_exponent"]))
    return reports
