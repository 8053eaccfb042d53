"""Coherent-state moment integrals, classical entropy, and inequality scans
for spin systems."""

from .errors import (
    BadExponent,
    BadGridSize,
    BadStep,
    DimensionMismatch,
    DomainError,
    InvalidPair,
    NoConvergence,
    NonFinite,
    SpinMismatch,
    WehrlLabError,
    WrongSpin,
    ZeroVector,
)
from .spin_core import (
    EulerAngles,
    HalfInt,
    SphereGrid,
    SpinState,
    basis_state,
    gauss_legendre_grid,
    inner,
    magnetic_labels,
    make_state,
    norm,
    normalize,
    random_euler_angles,
    random_haar_state,
    spin,
    state_from_dict,
    state_to_dict,
)
from .wigner import (
    LittleDMatrix,
    apply_rotation,
    coherent_overlap,
    log_factorial,
    rotation_element,
    wigner_d,
)
from .sphere_quadrature import (
    MomentResult,
    classical_entropy_direct,
    classical_entropy_pderiv,
    default_grid,
    husimi_q,
    moment_integral,
    square_integrability_check,
)
from .closed_forms import (
    HypergeomSeriesConfig,
    OrbitParamA,
    entropy_from_hypothesis,
    hyp_f,
    i_n_oa_legendre,
    i_n_oa_triple_sum,
    i_p_basis_closed,
    i_p_o0,
    i_p_o1,
    i_p_oa_hypothesis,
    i_p_oa_integral_rep,
    legendre_func,
    legendre_poly,
    ln_gamma,
    log_beta,
    orbit_param_a,
    s_cl_basis,
    s_cl_j1,
    stratum_representative,
)
from .conjectures import (
    MinimizeResult,
    ScanReport,
    Violation,
    beta_margin,
    coherence_witness,
    generalized_margin,
    harmonic_margin,
    jensen_identity_check,
    lieb_margin,
    minimize_entropy,
    scan_lieb,
)

__version__ = "0.1.0"
