import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from angspec.core import BRANCHES, FrequencyGrid, make_paired_grids
from angspec.dispersion import DispersionKind, DispersionRelation
from angspec.modes import mode_weight, triad
from angspec.propagation import (
    KernelKind,
    KernelMismatchError,
    apply_kernel,
    default_kernel,
    envelope_slice,
    field_slice,
    fubini_totals,
    kernel,
    kernel_phase,
    sample_envelope,
    synthesize_direct,
    synthesize_fft,
)
from angspec.spectrum import BeamSource, make_source
from conftest import gaussian_spec


def test_zero_phase_at_origin(rel):
    kind = default_kernel(rel)
    for k in (kind, KernelKind.GENERAL):
        assert np.all(kernel_phase(k, rel, np.array([0.0, 0.3]), 1.0, 1, 0.0, 0.0) == 0.0)


def test_fresnel_hand_value():
    rel = DispersionRelation.ti()
    assert kernel_phase(KernelKind.FRESNEL_TI, rel, 0.2, 1.0, 1, 1.0, 0.0) == pytest.approx(-0.02, rel=1e-14)


def test_exact_hand_value():
    rel = DispersionRelation.exact()
    assert kernel_phase(KernelKind.EXACT_AS, rel, 0.6, 1.0, 1, 1.0, 0.0) == pytest.approx(-0.2, rel=1e-14)


def test_half_fresnel_comoving():
    rel = DispersionRelation.td()
    # s z + c t = 0: no phase in the co-moving frame of a backward wave
    assert kernel_phase(KernelKind.HALF_FRESNEL_TD, rel, 0.3, 1.0, -1, 2.0, 2.0) == 0.0


def test_closed_forms_match_general(rel):
    kind = default_kernel(rel)
    q = np.linspace(0.0, 0.9 * rel.q_max(1.3), 11)
    for s in BRANCHES:
        a = kernel_phase(kind, rel, q, 1.3, s, 3.7, -1.1)
        b = kernel_phase(KernelKind.GENERAL, rel, q, 1.3, s, 3.7, -1.1)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-13)


def test_mismatch_names_both_kinds():
    with pytest.raises(KernelMismatchError, match="fresnel_ti.*exact"):
        kernel_phase(KernelKind.FRESNEL_TI, DispersionRelation.exact(), 0.1, 1.0, 1, 1.0, 0.0)


@settings(max_examples=100, deadline=None)
@given(
    kind=st.sampled_from([DispersionKind.TI, DispersionKind.TD, DispersionKind.EXACT]),
    frac=st.floats(0.0, 0.99),
    z=st.floats(-1e4, 1e4),
    t=st.floats(-1e4, 1e4),
    s=st.sampled_from([1, -1]),
)
def test_kernel_unimodular(kind, frac, z, t, s):
    rel = DispersionRelation(kind)
    q = frac * rel.q_max(1.0)
    assert abs(abs(kernel(default_kernel(rel), rel, q, 1.0, s, z, t)) - 1.0) <= 1e-14


def test_fft_matches_direct(rel):
    spec = gaussian_spec(rel, n=32, q_lim=0.4, waist=15.0)
    kind = default_kernel(rel)
    fast = envelope_slice(spec, kind, 1, 40.0, 5.0, method="fft")
    slow = envelope_slice(spec, kind, 1, 40.0, 5.0, method="direct")
    assert np.max(np.abs(fast.values - slow.values)) <= 1e-10 * np.max(np.abs(slow.values))


def test_synthesis_of_single_node_is_plane_wave():
    grid, spatial = make_paired_grids(16, 0.8)
    V = np.zeros((3, 16, 16), dtype=complex)
    V[0, 8, 11] = 1.0
    field = synthesize_fft(V, grid)[0]
    qx = grid.coords[11]
    expected = grid.spacing ** 2 * np.exp(1j * qx * spatial.coords)[None, :] * np.ones((16, 1))
    assert np.allclose(field, expected, atol=1e-15)
    assert np.allclose(synthesize_direct(V, grid, spatial.coords, spatial.coords)[0], expected, atol=1e-15)


def test_node_impulse_envelope_constant_modulus():
    rel = DispersionRelation.exact()
    grid, _ = make_paired_grids(16, 0.8)
    spec = make_source(BeamSource("node", node=(8, 11)), grid, FrequencyGrid.monochromatic(1.0), rel)
    sl = envelope_slice(spec, KernelKind.EXACT_AS, 1, 0.0, 0.0)
    mod = np.abs(sl.values)
    assert np.allclose(mod, mod[:, :1, :1], rtol=1e-12)
    q = grid.coords[11]
    tri = triad(rel, q, 0.0, 1, 1.0)
    expected = mode_weight(rel, q, 1.0) * spec.amps[0, 0, 0, 8, 11] * grid.spacing ** 2 * np.abs(tri.eps1)
    assert np.allclose(mod[:, 0, 0], np.abs(expected), rtol=1e-12)


def test_field_at_origin_is_weighted_envelope_sum(rel):
    spec = gaussian_spec(rel, n=16, waist=10.0, omegas=(0.9, 1.1, 4))
    kind = default_kernel(rel)
    full = field_slice(spec, kind, 0.0, 0.0, branches=(1,)).values
    summed = sum(w * envelope_slice(spec, kind, 1, 0.0, 0.0, j).values for j, w in enumerate(spec.freq.weights))
    assert np.allclose(full, summed, rtol=1e-13, atol=1e-16)


def test_sample_envelope_agrees_with_slice(rel):
    spec = gaussian_spec(rel, n=16, waist=10.0)
    kind = default_kernel(rel)
    sl = envelope_slice(spec, kind, 1, 7.0, 0.0)
    x = sl.grid.coords
    pts = sample_envelope(spec, kind, 1, x[3:6], x[5:9], 7.0, 0.0)
    assert np.allclose(pts, sl.values[:, 5:9, 3:6], atol=1e-14)


def test_envelope_at_origin_reproduces_source_field():
    # x-polarized Gaussian: transverse envelope at z = 0 is x-polarized
    rel = DispersionRelation.ti()
    spec = gaussian_spec(rel, n=64, waist=20.0)
    v = envelope_slice(spec, KernelKind.FRESNEL_TI, 1, 0.0, 0.0).values
    assert np.max(np.abs(v[1])) <= 1e-12 * np.max(np.abs(v[0]))


def test_apply_kernel_preserves_modulus(rel):
    spec = gaussian_spec(rel, n=16)
    moved = apply_kernel(spec, default_kernel(rel), 123.0, 45.0)
    assert np.allclose(np.abs(moved.amps), np.abs(spec.amps), rtol=1e-14)


def test_fubini(rel):
    spec = gaussian_spec(rel, n=16, omegas=(0.8, 1.2, 8))
    a, b = fubini_totals(spec)
    assert a == pytest.approx(b, rel=1e-12)
    assert a == pytest.approx(1.0, rel=1e-12)
    zero = spec.scaled(0.0)
    assert fubini_totals(zero) == (0.0, 0.0)


def test_slice_metadata(rel):
    spec = gaussian_spec(rel, n=16)
    sl = field_slice(spec, default_kernel(rel), 1.0, 0.0)
    assert sl.kernel == default_kernel(rel).value
    assert "masked_power_fraction" in sl.metadata
    assert math.isfinite(sl.metadata["masked_power_fraction"])
