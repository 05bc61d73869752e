"""Stationary states of the cubic conformal flow at finite Galerkin truncation."""

from .core import (
    DEFAULT_N,
    EVOLUTION_N,
    AmplitudeState,
    ConservedSet,
    apply_D,
    apply_expD,
    apply_global_phase,
    apply_local_phase,
    apply_scaling,
    conserved,
    cubic_term,
    flow_rhs,
    interaction_coeff,
    random_state,
)
from .errors import (
    BlowUp,
    ConformalFlowError,
    DomainError,
    IndeterminateIndex,
    IndexOutOfRange,
    NoConvergence,
    NoConvergenceEig,
    SingularJacobian,
    TailOverflow,
    TruncationTooSmall,
    UnknownBranch,
)
from .evolution import StabilityProbeReport, Trajectory, conservation_drift, gauge_distance, integrate, stability_probe
from .families import (
    InvariantManifoldParams,
    StationaryState,
    alternating_state,
    blaschke_state,
    ground_state,
    pair_state,
    pair_state_normalized,
    residual_norm,
    single_mode,
    stationary_residual,
    twisted_state,
)
from .solver import (
    Branch,
    BranchSample,
    BranchSpec,
    bifurcation_points_lowest,
    bifurcation_points_second,
    branch_function,
    branch_predictor,
    continue_branch,
    half_wavelength_map,
    linearization_scan,
    newton_refine,
    solve_at_omega,
    two_param_family_second,
)
from .spectral import (
    HessianPair,
    SpectralReport,
    assemble_hessians,
    d_matrix,
    inertia,
    spectral_report,
    sym_eigs,
)

__version__ = "0.1.0"
