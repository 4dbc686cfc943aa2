"""Semi-random beam pairing transceiver for sparse beamspace MIMO channels."""

from .channel import (
    MaskMatrix,
    PathSet,
    PhysicalChannel,
    SparseVirtualChannel,
    SparsityConfig,
    VirtualChannel,
    apply_mask,
    derive_mask,
    sample_bernoulli_mask,
    steering_matrix,
    steering_vector,
    synthesize_physical_channel,
    virtual_decompose,
)
from .dof import (
    DofPrediction,
    DofRecursionState,
    init_state,
    poisson_row_weight_pmf,
    predict_dof,
    step,
    trajectory_csv,
)
from .estimators import SrbpTransceiver, SvdTransceiver
from .experiments import (
    AggregateReport,
    ExperimentConfig,
    TrialRecord,
    run_block_census,
    run_capacity_sweep,
    run_dof_trials,
)
from .pairing import (
    Block,
    BlockDecomposition,
    OperatingMatrix,
    PermutationTrace,
    TraceAction,
    TriangulationResult,
    block_triangulate,
    extract_blocks,
    initialize,
    lower_triangulate,
    permuted_mask,
    serialize_trace,
    triangulate_mask,
)
from .spectral import (
    CapacityResult,
    PowerAllocation,
    squared_singular_values,
    srbp_capacity,
    svd_capacity,
    waterfill,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateReport",
    "Block",
    "BlockDecomposition",
    "CapacityResult",
    "DofPrediction",
    "DofRecursionState",
    "ExperimentConfig",
    "MaskMatrix",
    "OperatingMatrix",
    "PathSet",
    "PermutationTrace",
    "PhysicalChannel",
    "PowerAllocation",
    "SparseVirtualChannel",
    "SparsityConfig",
    "SrbpTransceiver",
    "SvdTransceiver",
    "TraceAction",
    "TrialRecord",
    "TriangulationResult",
    "VirtualChannel",
    "apply_mask",
    "block_triangulate",
    "derive_mask",
    "extract_blocks",
    "init_state",
    "initialize",
    "lower_triangulate",
    "permuted_mask",
    "poisson_row_weight_pmf",
    "predict_dof",
    "run_block_census",
    "run_capacity_sweep",
    "run_dof_trials",
    "sample_bernoulli_mask",
    "serialize_trace",
    "squared_singular_values",
    "srbp_capacity",
    "steering_matrix",
    "steering_vector",
    "step",
    "svd_capacity",
    "synthesize_physical_channel",
    "trajectory_csv",
    "triangulate_mask",
    "virtual_decompose",
    "waterfill",
]
