import numpy as np
import pytest

from angspec import (
    BeamSource,
    DispersionKind,
    DispersionRelation,
    FrequencyGrid,
    UnitSystem,
    make_paired_grids,
    make_source,
)

ACCEPTANCE_LINES = []

BUILTIN = [DispersionKind.TI, DispersionKind.TD, DispersionKind.EXACT]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def natural():
    return UnitSystem.natural()


@pytest.fixture(params=BUILTIN, ids=lambda k: k.value)
def rel(request, natural):
    return DispersionRelation(request.param, natural)


def gaussian_spec(rel, n=32, q_lim=0.4, waist=20.0, omegas=None, polarization=(1.0, 0.0), branch=1):
    grid, _ = make_paired_grids(n, q_lim)
    if omegas is None:
        freq = FrequencyGrid.monochromatic(1.0)
        src = BeamSource("gaussian", waist=waist, polarization=polarization, branch=branch)
    else:
        freq = FrequencyGrid.uniform(*omegas)
        src = BeamSource("gaussian", waist=waist, polarization=polarization, branch=branch,
                         omega0=float(np.mean(freq.omegas)), bandwidth=0.05)
    return make_source(src, grid, freq, rel)
