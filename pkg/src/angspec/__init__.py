"""Angular-spectrum representation of light beams with pluggable dispersion relations."""

from .core import (
    BRANCHES,
    AngularSpectrum,
    FieldSlice,
    FrequencyGrid,
    TransverseGrid,
    UnitMode,
    UnitSystem,
    l2_norm,
    make_paired_grids,
)
from .dispersion import (
    DispersionKind,
    DispersionRelation,
    NoBoundaryError,
    OutOfDomainError,
    validate_monotone,
)
from .modes import mode_weight, triad
from .observables import beam_width, energy, occupation
from .propagation import KernelKind, KernelMismatchError, envelope_slice, field_slice, kernel
from .spectrum import (
    BeamSource,
    KSpaceAmplitude,
    SourceKind,
    UnmappableNodeError,
    from_angular_spectrum,
    make_source,
    measure_invariance,
    to_angular_spectrum,
)

__version__ = "0.1.0"
