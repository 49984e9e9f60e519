import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from angspec.core import AngularSpectrum, FrequencyGrid, TransverseGrid, make_paired_grids
from angspec.dispersion import DispersionKind, DispersionRelation
from angspec.modes import mode_weight
from angspec.spectrum import (
    BeamSource,
    KSpaceAmplitude,
    UnmappableNodeError,
    from_angular_spectrum,
    make_source,
    measure_invariance,
    to_angular_spectrum,
)
from conftest import gaussian_spec


def _single_node(rel, qx, zeta, amp=1.0):
    # 8x8 grid with dq = 0.2, node (iy=4, ix=4 + qx/0.2)
    grid = TransverseGrid(8, 0.8, "spectral")
    ix = 4 + int(round(qx / grid.spacing))
    z = np.zeros((1, 8, 8))
    valid = np.zeros((1, 8, 8), dtype=bool)
    a = np.zeros((2, 2, 1, 8, 8), dtype=complex)
    z[0, 4, ix] = zeta
    valid[0, 4, ix] = True
    a[0, 0, 0, 4, ix] = amp
    return KSpaceAmplitude(grid, z, valid, a), (4, ix)


def test_exact_on_axis_identity_scaling():
    rel = DispersionRelation.exact()
    k_amp, node = _single_node(rel, 0.0, 1.0)
    spec = to_angular_spectrum(k_amp, rel, FrequencyGrid.monochromatic(1.0))
    assert spec.amps[0, 0, 0][node] == pytest.approx(1.0, rel=1e-15)


def test_exact_pythagorean_node():
    rel = DispersionRelation.exact()
    k_amp, node = _single_node(rel, 0.6, 0.8)
    spec = to_angular_spectrum(k_amp, rel, FrequencyGrid.monochromatic(1.0))
    assert spec.amps[0, 0, 0][node] == pytest.approx(math.sqrt(1.25), rel=1e-12)
    back = from_angular_spectrum(spec)
    assert back.zeta[0][node] == pytest.approx(0.8, rel=1e-14)
    assert back.amps[0, 0, 0][node] == pytest.approx(1.0, rel=1e-12)


def test_unmappable_nodes_listed():
    rel = DispersionRelation.exact()
    k_amp, node = _single_node(rel, 0.6, 0.5)
    with pytest.raises(UnmappableNodeError) as info:
        to_angular_spectrum(k_amp, rel, FrequencyGrid.monochromatic(1.0))
    assert info.value.nodes == [(0,) + node]


def test_k_amplitude_validation():
    grid = TransverseGrid(8, 0.8, "spectral")
    z = np.ones((2, 8, 8))
    with pytest.raises(ValueError):
        KSpaceAmplitude(grid, z, np.ones_like(z, dtype=bool), np.zeros((2, 2, 2, 8, 8)))
    with pytest.raises(ValueError):
        KSpaceAmplitude(grid, -z[:1], np.ones((1, 8, 8), dtype=bool), np.zeros((2, 2, 1, 8, 8)))


def test_roundtrip_multifrequency(rel):
    spec = gaussian_spec(rel, n=16, q_lim=0.4, waist=10.0, omegas=(0.8, 1.2, 12))
    back = to_angular_spectrum(from_angular_spectrum(spec), rel, spec.freq)
    assert np.max(np.abs(back.amps - spec.amps)) <= 1e-12 * np.max(np.abs(spec.amps))
    assert back.metadata["resampling_collisions"] == 0
    assert back.metadata["resampling_error"] < 1e-12


def test_exact_invariance(rel):
    spec = gaussian_spec(rel, n=16, omegas=(0.8, 1.2, 12))
    assert measure_invariance(spec, from_angular_spectrum(spec), "exact") <= 1e-12


def test_zero_spectrum_invariance():
    rel = DispersionRelation.ti()
    grid, _ = make_paired_grids(8, 0.4)
    freq = FrequencyGrid.uniform(0.9, 1.1, 3)
    spec = AngularSpectrum(grid, freq, np.zeros((2, 2, 3, 8, 8)), rel)
    assert measure_invariance(spec, from_angular_spectrum(spec), "exact") == 0.0
    assert measure_invariance(spec, from_angular_spectrum(spec), "midpoint") == 0.0


def test_midpoint_invariance_quarters(rel):
    errors = []
    for count in (16, 32):
        spec = gaussian_spec(rel, n=16, waist=15.0, omegas=(0.7, 1.3, count))
        errors.append(measure_invariance(spec, from_angular_spectrum(spec), "midpoint"))
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.05)


def test_gaussian_amplitude_ratio_is_e():
    rel = DispersionRelation.ti()
    w0 = 20.0
    grid, _ = make_paired_grids(64, 0.4)
    spec = make_source(BeamSource("gaussian", waist=w0, polarization=(0.0, 1.0)), grid,
                       FrequencyGrid.monochromatic(1.0), rel)
    i0 = grid.origin_index
    ix = i0 + int(round((2.0 / w0) / grid.spacing))
    q = grid.coords[ix]
    assert q == pytest.approx(2.0 / w0)
    # for q along x a y-polarized field feeds only eps2 = y
    a0 = spec.amps[1, 0, 0, i0, i0] * mode_weight(rel, 0.0, 1.0)
    a1 = spec.amps[1, 0, 0, i0, ix] * mode_weight(rel, q, 1.0)
    assert abs(a0 / a1) == pytest.approx(math.e, rel=1e-12)
    assert abs(spec.amps[0, 0, 0, i0, ix]) < 1e-15


def test_source_normalized(rel):
    spec = gaussian_spec(rel, n=32)
    assert np.sum(np.abs(spec.amps) ** 2 * spec.measure) == pytest.approx(1.0, abs=1e-12)


def test_node_impulse():
    rel = DispersionRelation.exact()
    grid, _ = make_paired_grids(16, 0.8)
    spec = make_source(BeamSource("node", node=(8, 11), polarization=(0.6, 0.8)), grid,
                       FrequencyGrid.monochromatic(1.0), rel)
    nz = np.argwhere(spec.amps != 0)
    assert {tuple(i[2:]) for i in nz} == {(0, 8, 11)}
    assert np.sum(np.abs(spec.amps) ** 2 * spec.measure) == pytest.approx(1.0, abs=1e-12)
    ratio = spec.amps[1, 0, 0, 8, 11] / spec.amps[0, 0, 0, 8, 11]
    assert ratio == pytest.approx(0.8 / 0.6)


def test_node_outside_domain_rejected():
    grid, _ = make_paired_grids(8, 4.0)
    with pytest.raises(ValueError):
        make_source(BeamSource("node", node=(0, 0)), grid, FrequencyGrid.monochromatic(1.0),
                    DispersionRelation.exact())


def test_clipping_warning():
    grid, _ = make_paired_grids(32, 2.0)
    spec = make_source(BeamSource("gaussian", waist=1.0), grid, FrequencyGrid.monochromatic(1.0),
                       DispersionRelation.exact())
    assert spec.metadata["masked_power_fraction"] > 0.01
    assert spec.metadata["warnings"]
    fine = gaussian_spec(DispersionRelation.exact())
    assert fine.metadata["warnings"] == []


def test_source_validation():
    with pytest.raises(ValueError):
        BeamSource("gaussian", waist=-1.0)
    with pytest.raises(ValueError):
        BeamSource("gaussian", waist=1.0, polarization=(1.0, 1.0))
    with pytest.raises(ValueError):
        BeamSource("ring")
    grid, _ = make_paired_grids(8, 0.4)
    with pytest.raises(ValueError):
        make_source(BeamSource("gaussian", waist=5.0), grid, FrequencyGrid.uniform(0.9, 1.1, 4),
                    DispersionRelation.ti())


def test_ring_source_support():
    grid, _ = make_paired_grids(32, 0.8)
    spec = make_source(BeamSource("ring", ring_radius=0.3), grid, FrequencyGrid.monochromatic(1.0),
                       DispersionRelation.td())
    q = grid.radius()
    power = np.sum(np.abs(spec.amps[:, 0, 0]) ** 2, axis=0)
    assert np.all(np.abs(q[power > 0] - 0.3) < grid.spacing)


@settings(max_examples=25, deadline=None)
@given(
    kind=st.sampled_from([DispersionKind.TI, DispersionKind.TD, DispersionKind.EXACT]),
    seed=st.integers(0, 2 ** 32 - 1),
)
def test_roundtrip_random_spectra(kind, seed):
    rel = DispersionRelation(kind)
    rng = np.random.default_rng(seed)
    grid, _ = make_paired_grids(8, 1.2)
    freq = FrequencyGrid.uniform(0.9, 1.1, 3)
    amps = rng.normal(size=(2, 2, 3, 8, 8)) + 1j * rng.normal(size=(2, 2, 3, 8, 8))
    spec = AngularSpectrum(grid, freq, amps, rel)
    back = to_angular_spectrum(from_angular_spectrum(spec), rel, freq)
    assert np.max(np.abs(back.amps - spec.amps)) <= 1e-12 * np.max(np.abs(spec.amps))
