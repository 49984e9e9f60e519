import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from angspec.core import UnitSystem
from angspec.dispersion import DispersionKind, DispersionRelation
from angspec.modes import mode_weight, transverse_direction, triad


def test_on_axis_triad():
    tri = triad(DispersionRelation.ti(), 0.0, 0.0, 1, 1.0)
    assert np.allclose(tri.eps1, [1, 0, 0])
    assert np.allclose(tri.eps2, [0, 1, 0])
    assert np.allclose(tri.khat, [0, 0, 1])


def test_boundary_triad_exact():
    tri = triad(DispersionRelation.exact(), 1.0, 0.0, 1, 1.0)
    assert np.allclose(tri.eps1, [0, 0, -1], atol=1e-15)


def test_backward_branch_eps2():
    tri = triad(DispersionRelation.td(), 0.3, 0.0, -1, 1.0)
    assert np.allclose(tri.eps2, [0, -1, 0])


def test_on_axis_convention_is_configurable():
    ux, uy, q = transverse_direction(0.0, 0.0, on_axis=(0.0, 1.0))
    assert (ux, uy, q) == (0.0, 1.0, 0.0)
    tri = triad(DispersionRelation.ti(), 0.0, 0.0, 1, 1.0, on_axis=(0.0, 1.0))
    assert np.allclose(tri.eps1, [0, 1, 0])


def test_on_axis_projector_independent_of_convention():
    # eps1 eps1^T + eps2 eps2^T is the transverse projector whatever qhat is.
    rel = DispersionRelation.exact()
    a = triad(rel, 0.0, 0.0, 1, 1.0)
    b = triad(rel, 0.0, 0.0, 1, 1.0, on_axis=(math.cos(0.7), math.sin(0.7)))
    pa = np.outer(a.eps1, a.eps1) + np.outer(a.eps2, a.eps2)
    pb = np.outer(b.eps1, b.eps1) + np.outer(b.eps2, b.eps2)
    assert np.allclose(pa, pb, atol=1e-15)


def test_mode_weight_on_axis(rel):
    assert mode_weight(rel, 0.0, 1.0) == pytest.approx(math.sqrt(1 / (16 * math.pi ** 3)), rel=1e-14)
    assert mode_weight(rel, 0.0, 1.0) == pytest.approx(0.044897, abs=1e-6)


def test_triad_validates_domain():
    with pytest.raises(ValueError):
        triad(DispersionRelation.ti(), 2.0, 0.0, 1, 1.0)
    with pytest.raises(ValueError):
        triad(DispersionRelation.ti(), 0.1, 0.0, 0, 1.0)


@settings(max_examples=200, deadline=None)
@given(
    kind=st.sampled_from([DispersionKind.TI, DispersionKind.TD, DispersionKind.EXACT]),
    s=st.sampled_from([1, -1]),
    frac=st.floats(0.0, 0.999),
    phi=st.floats(0.0, 2 * math.pi),
    omega=st.floats(0.5, 2.0),
)
def test_triad_orthonormal_right_handed_transverse(kind, s, frac, phi, omega):
    rel = DispersionRelation(kind, UnitSystem.natural())
    q = frac * rel.q_max(omega)
    qx, qy = q * math.cos(phi), q * math.sin(phi)
    tri = triad(rel, qx, qy, s, omega)
    m = tri.as_matrix()
    assert np.allclose(m @ m.T, np.eye(3), atol=1e-12)
    assert np.allclose(np.cross(tri.eps1, tri.eps2), tri.khat, atol=1e-12)
    k = np.array([qx, qy, s * rel.f(q, omega)])
    assert abs(tri.eps1 @ k) <= 1e-12 * np.linalg.norm(k)
    assert abs(tri.eps2 @ k) <= 1e-12 * np.linalg.norm(k)
