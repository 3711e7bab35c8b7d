"""Entanglement measures and monogamy-inequality audits for qudit states."""

from .qlinalg import (
    Bipartition,
    DensityOperator,
    DimensionProfile,
    DomainError,
    NumericalError,
    PureState,
    SchmidtData,
    as_bipartition,
    partial_trace,
    partial_transpose,
    schmidt,
    spectral_decomposition,
    tensor_product,
    trace_norm,
)
from .states import (
    ExcitationWeights,
    PCSSpec,
    PartitionSpec,
    SpecFormatError,
    WClassSpec,
    apply_phase_damping,
    build_pcs_density,
    build_w_state,
    coarse_grain,
    coherent_superposition,
    ghz_state,
    kim_sanders_state,
    load_state_spec,
    maximally_entangled,
    ou_state,
    pair_marginal_analytic,
    parse_state_spec,
)
from .measures import (
    MeasureValue,
    concurrence_pure,
    negativity_mixed,
    negativity_pure,
    wootters_concurrence_2q,
)
from .convexroof import (
    Decomposition,
    FlatnessResult,
    OptConfig,
    OptResult,
    RootSet,
    average_negativity,
    cren,
    crenoa,
    decomposition_from_unitary,
    flatness_scan,
    haar_unitary,
    optimize,
)
from .monogamy import (
    AnalyticWValues,
    AuditReport,
    analytic_w_audit,
    ckw_audit,
    cren_audit,
    dual_audit,
    hunt,
    negativity_audit,
    random_pure_state,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticWValues",
    "AuditReport",
    "Bipartition",
    "Decomposition",
    "DensityOperator",
    "DimensionProfile",
    "DomainError",
    "ExcitationWeights",
    "FlatnessResult",
    "MeasureValue",
    "NumericalError",
    "OptConfig",
    "OptResult",
    "PCSSpec",
    "PartitionSpec",
    "PureState",
    "RootSet",
    "SchmidtData",
    "SpecFormatError",
    "WClassSpec",
    "analytic_w_audit",
    "apply_phase_damping",
    "as_bipartition",
    "average_negativity",
    "build_pcs_density",
    "build_w_state",
    "ckw_audit",
    "coarse_grain",
    "coherent_superposition",
    "concurrence_pure",
    "cren",
    "cren_audit",
    "crenoa",
    "decomposition_from_unitary",
    "dual_audit",
    "flatness_scan",
    "ghz_state",
    "haar_unitary",
    "hunt",
    "kim_sanders_state",
    "load_state_spec",
    "maximally_entangled",
    "negativity_audit",
    "negativity_mixed",
    "negativity_pure",
    "optimize",
    "ou_state",
    "pair_marginal_analytic",
    "parse_state_spec",
    "partial_trace",
    "partial_transpose",
    "random_pure_state",
    "schmidt",
    "spectral_decomposition",
    "tensor_product",
    "trace_norm",
    "wootters_concurrence_2q",
]
