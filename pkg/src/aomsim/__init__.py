"""aomsim: multi-photon states over labeled frequency/path modes.

The package models few-photon superpositions, the unitary acousto-optic
device rotation family (plus the non-unitary map it is often wrongly
replaced with), reduced-density-matrix diagnostics, and an end-to-end audit
of the entanglement-swapping scheme built from two such devices.
"""

__version__ = "0.1.0"

from .errors import (
    AomsimError,
    BipartitionError,
    ComparisonError,
    CompositionError,
    DimensionMismatchError,
    EmptySelectionError,
    EmptyStateError,
    FormatError,
    InvalidParamsError,
    ModeCollisionError,
    NonHermitianError,
    NormalizationError,
    StructureError,
)
from .states import (
    ModeLabel,
    PhotonState,
    equal_up_to_global_phase,
    inner_product,
    ket_notation,
    make_state,
    normalize,
    single_ket,
    state_from_dict,
    state_notation,
    state_to_dict,
    tensor,
)
from .transforms import (
    AOMParams,
    IsometryReport,
    ModeTransform,
    aom_evolution,
    apply_transform,
    balanced_aom,
    compose,
    flawed_aom,
    identity_transform,
    isometry_report,
    transform_from_dict,
    transform_to_dict,
)
from .analysis import (
    DensityMatrix,
    SchmidtSpectrum,
    entropy,
    hermitian_eigenvalues,
    negativity,
    partial_trace,
    partial_transpose,
    pure_density_matrix,
    schmidt,
    trace_distance,
)
from .scenarios import (
    SchemeWiring,
    SwapReport,
    align_device_regions,
    aom_factor_overlap,
    build_scheme_transforms,
    build_source_states,
    no_signaling_check,
    post_select,
    run_swap,
    run_swap_details,
    signaling_distance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
