"""Gaussian gates, their lab approximations, and channel distinguishability.

The package models ideal continuous-variable Gaussian gates and the channels
realized by their standard experimental implementations, and computes the
metrics separating them: Gaussian fidelities, trace distances, sine-distance
bounds under input-energy constraints, and the energy-constrained diamond
distance via a certified SDP on truncated Fock spaces.
"""

from .errors import (
    DimensionMismatch,
    EigenFailure,
    GaussgateError,
    InfeasibleInput,
    IoError,
    NegativeParameter,
    NumericalBreakdown,
    OutOfRange,
    QuadratureFailure,
    SolverStall,
    TruncationTooSmall,
    UnknownQuery,
)
from .gaussian_core import (
    GaussianChannel,
    GaussianState,
    PhasePoint,
    apply_channel,
    channel_from_json,
    channel_to_json,
    char_fn,
    char_fn_pushforward,
    compose,
    extend_channel,
    fidelity_gaussian,
    identity_channel,
    make_state,
    mean_photons,
    omega,
    reduce_state,
    sine_distance,
    state_coherent,
    state_from_json,
    state_squeezed_vacuum,
    state_thermal,
    state_tms,
    state_to_json,
    state_vacuum,
    symplectic_bs,
    symplectic_phase,
    symplectic_squeeze,
    symplectic_sum,
    tensor_state,
)
from .gate_zoo import (
    AngleMixture,
    ApproxGate,
    GatePair,
    TruncatedNormalParams,
    approx_bs_loss,
    approx_displacement,
    approx_mixture,
    approx_phase_loss,
    approx_squeezer,
    approx_sum,
    canonical_b1_conjugation,
    gate_pair,
    ideal_displacement,
    mixture_char_fn,
    mixture_fidelity,
    pure_loss,
    squeezer_residual,
    sum_residual,
)
from .metrics_bounds import (
    BoundValue,
    EnergyConstraint,
    R_15_DB,
    R_UNIT_GAIN,
    arbitrary_unitary_coefficient,
    arbitrary_unitary_fidelity,
    d1,
    db_to_r,
    displacement_trace_distance_oracle,
    f_sine,
    g_angle_bound,
    optimal_state,
    optimal_state_vec,
    r_to_db,
    squeezer_sv_fidelity,
    squeezer_tms_fidelity,
    squeezer_tms_sine,
    sum_sine,
    sum_sv_fidelity,
    sum_tms_fidelity,
    sum_tms_fidelity_via_channel,
    tensor_disp_bound,
    trunc_normal_pdf,
    varrho_matrix,
)
from .fock_oracle import (
    FockDensity,
    TruncatedChannel,
    apply_truncated,
    choi_from_json,
    choi_of,
    choi_to_json,
    density_from_vec,
    fidelity_fock,
    kraus_pure_loss,
    kraus_unitary,
    moments_from_fock,
    op_annihilation,
    op_bs,
    op_displacement,
    op_number,
    op_phase,
    op_squeeze,
    project_truncate,
    thermal_density,
    trace_distance_fock,
    vec_coherent,
    vec_fock,
    vec_squeezed_vacuum,
    vec_tms,
)
from .ecd_sdp import (
    EcdProblem,
    EcdSolution,
    SdpConfig,
    d2_displacement,
    displacement_problem,
    displacement_problem_alpha,
    sandwich_check,
    solve_ecd,
    solve_ecd_alternating,
)

__version__ = "0.1.0"
