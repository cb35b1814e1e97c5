"""Sparse recovery from nonlinear measurements via pointwise linearization
of composite sensing maps: property certification (spark, RIP, NSP) of
sensing matrices, a catalog of nonlinear measurement maps, per-point
linearization certificates, l1/l0 decoders, and a batch experiment harness.
"""

__version__ = "0.1.0"

from .errors import (
    GuardError,
    MapDomainError,
    NspOrderError,
    RequirementError,
    RipOrderError,
)
from .matrix_core import (
    extreme_eigenvalues,
    gaussian_matrix,
    random_sparse_signal,
    rank,
    read_matrix,
    read_vector,
    solve_least_squares,
    write_matrix,
    write_vector,
)
from .nonlinear_maps import (
    NonlinearMap,
    RequirementCheck,
    abs_map,
    check_requirement,
    check_requirement_sampled,
    custom_map,
    evaluate,
    identity_map,
    map_from_spec,
    nonzero_random_map,
    quantize_away_from_zero,
    quantize_floor,
    sign_map,
    sine_map,
    square_map,
)
from .pointwise_linearization import (
    ClassificationReport,
    LinearizationCertificate,
    certificate_errors,
    classify,
    linearize_diagonal,
    linearize_general,
    linearize_invertible,
    linearize_permuted_diagonal,
    linearize_strongest,
)
from .recovery import (
    LpSettings,
    PipelineResult,
    RecoveryReport,
    basis_pursuit,
    l0_oracle,
    recover_via_linearization,
    support_set,
)
from .sensing_properties import (
    NspEstimate,
    RipReport,
    SparkReport,
    check_invariance_rip_order,
    check_invariance_spark,
    composite_rip_estimate,
    nsp_estimate,
    rip_constants,
    sample_null_vectors,
    sample_sparse_pairs,
    spark,
)
from .experiment import (
    ExperimentConfig,
    ExperimentResult,
    ExperimentSummary,
    TrialRecord,
    emit_reports,
    run_experiment,
)
