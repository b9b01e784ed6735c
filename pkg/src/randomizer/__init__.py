"""Random unitary mixing channels, nets of pure states, and randomizing certification."""

from .bounds import (
    BoundConstants,
    DEFAULT_CONSTANTS,
    concentration_tail_bound,
    failure_log_bound,
    min_N_for_success,
    required_N,
    success_constant_ratio,
)
from .certify import (
    DeviationCertificate,
    LowerBound,
    NetSupremum,
    Verdict,
    alternating_max_lower_bound,
    bilinear_bound_check,
    certified_upper_bound_A,
    default_net_delta,
    net_supremum_B,
    verdict,
)
from .channel import (
    RandomUnitaryChannel,
    apply_adjoint,
    apply_channel,
    build_random_channel,
    build_weyl_channel,
    deviation,
    maximally_mixed,
    pair_statistic,
    pure_adjoint_output,
    pure_output,
    pure_projector,
    random_pure_state,
    random_pure_states,
    require_density,
    require_pure_state,
)
from .errors import (
    DegenerateSample,
    DimensionMismatch,
    InvalidDimension,
    InvalidMatrix,
    InvalidParameter,
    NetInfeasible,
    NumericalFailure,
    ParseError,
    RandomizerError,
)
from .experiments import (
    ConcentrationReport,
    SweepCell,
    SweepConfig,
    SweepReport,
    certificate_to_dict,
    load_channel,
    load_net,
    run_concentration_trial,
    run_randomizing_sweep,
    save_certificate,
    save_channel,
    save_net,
    write_concentration_csv,
    write_sweep_csv,
)
from .haar import (
    RngStream,
    as_generator,
    sample_ginibre,
    sample_haar_unitaries,
    sample_haar_unitary,
    unitarity_defect,
)
from .linalg import (
    EigenSystem,
    TOL,
    Tolerances,
    hermitian_eigensystem,
    hermitian_part,
    operator_norm,
    qr_unitary_factor,
    trace_norm,
)
from .netcover import (
    CoverageReport,
    PureStateNet,
    audit_covering,
    build_delta_net,
    log_cardinality_bound,
    trace_distance_pure,
)

__version__ = "0.1.0"
