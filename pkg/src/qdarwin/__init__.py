"""Density-matrix toolkit for witnessing non-objectivity of system-environment
states, with exact and Monte Carlo protocol simulation."""

from .channels import (
    CNOT,
    HADAMARD,
    KrausChannel,
    NoiseConfig,
    apply_gate,
    average_gate_fidelity,
    depolarize_local,
    mix_with_noise,
    noisy_cnot,
    point_channel,
)
from .hilbert import (
    DensityOperator,
    InvariantViolation,
    PureState,
    TensorLayout,
    born_probabilities,
    computational_ket,
    eigvals_hermitian,
    embed_operator,
    maximally_mixed,
    partial_trace,
    sample_outcome,
    tensor_product,
    trace_norm_distance,
)
from .info import (
    CorrelationReport,
    StructureVerdict,
    check_structure,
    correlation_report,
    holevo_information,
    mutual_information,
    quantum_discord,
    verify_equal_dimension_reduction,
    von_neumann_entropy,
)
from .objectivity import (
    FRAMEWORK_ISBS,
    FRAMEWORK_SQD,
    ObjectiveSubspaceSpec,
    computational_spec,
    fragment_projector,
    nonobjectivity_measure,
    objectivity_operation_isbs,
    objectivity_operation_sqd,
    parity_spec,
)
from .protocol import (
    CostComparison,
    NonterminatingSampling,
    ProtocolConfig,
    WitnessReport,
    cost_model,
    isbs_layout,
    prepare_initial_isbs,
    prepare_initial_sqd,
    run_branch,
    run_witness,
    sqd_layout,
    witness_exact,
    witness_monte_carlo,
)
from .tolerances import TOL, Tolerances

__all__ = [
    "CNOT",
    "HADAMARD",
    "CostComparison",
    "CorrelationReport",
    "DensityOperator",
    "FRAMEWORK_ISBS",
    "FRAMEWORK_SQD",
    "InvariantViolation",
    "KrausChannel",
    "NoiseConfig",
    "NonterminatingSampling",
    "ObjectiveSubspaceSpec",
    "ProtocolConfig",
    "PureState",
    "StructureVerdict",
    "TensorLayout",
    "TOL",
    "Tolerances",
    "WitnessReport",
    "apply_gate",
    "average_gate_fidelity",
    "born_probabilities",
    "check_structure",
    "computational_ket",
    "computational_spec",
    "correlation_report",
    "cost_model",
    "depolarize_local",
    "eigvals_hermitian",
    "embed_operator",
    "fragment_projector",
    "holevo_information",
    "isbs_layout",
    "maximally_mixed",
    "mix_with_noise",
    "mutual_information",
    "noisy_cnot",
    "nonobjectivity_measure",
    "objectivity_operation_isbs",
    "objectivity_operation_sqd",
    "parity_spec",
    "partial_trace",
    "point_channel",
    "prepare_initial_isbs",
    "prepare_initial_sqd",
    "quantum_discord",
    "run_branch",
    "run_witness",
    "sample_outcome",
    "sqd_layout",
    "tensor_product",
    "trace_norm_distance",
    "verify_equal_dimension_reduction",
    "von_neumann_entropy",
    "witness_exact",
    "witness_monte_carlo",
]
