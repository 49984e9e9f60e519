import json

import numpy as np
import pytest

from angspec.dispersion import DispersionRelation
from angspec.io import read_slice, read_spectrum, sidecar_path, write_slice, write_spectrum
from angspec.propagation import default_kernel, field_slice
from conftest import gaussian_spec


def test_spectrum_roundtrip_exact(tmp_path, rel):
    spec = gaussian_spec(rel, n=8, omegas=(0.9, 1.1, 2))
    path = write_spectrum(spec, tmp_path / "spec.csv")
    back = read_spectrum(path)
    assert np.array_equal(back.amps, spec.amps)
    assert np.array_equal(back.freq.weights, spec.freq.weights)
    assert back.rel.kind is rel.kind
    meta = json.loads(sidecar_path(path).read_text())
    assert meta["format"] == "angspec-spectrum"


def test_spectrum_wrong_relation(tmp_path):
    spec = gaussian_spec(DispersionRelation.ti(), n=8)
    path = write_spectrum(spec, tmp_path / "spec.csv")
    with pytest.raises(ValueError):
        read_spectrum(path, DispersionRelation.exact())


def test_slice_roundtrip_exact(tmp_path, rel):
    spec = gaussian_spec(rel, n=8)
    sl = field_slice(spec, default_kernel(rel), 3.0, 1.0)
    path = write_slice(sl, tmp_path / "s.csv", spec.units)
    raw = path.read_bytes()
    assert b"\r\n" in raw
    assert raw.splitlines()[0] == b"iy,ix,x,y,Ax_re,Ax_im,Ay_re,Ay_im,Az_re,Az_im"
    back = read_slice(path)
    assert np.array_equal(back.values, sl.values)
    assert (back.z, back.t, back.kernel) == (3.0, 1.0, sl.kernel)


def test_reader_rejects_other_format(tmp_path):
    spec = gaussian_spec(DispersionRelation.ti(), n=8)
    path = write_spectrum(spec, tmp_path / "spec.csv")
    with pytest.raises(ValueError):
        read_slice(path)
