"""Hölder exponents for quasiregular gradient mappings, with numerical verifiers."""

from .errors import AliasingError, DegenerateError, DomainError, OutOfIntervalWarning, SingularityError
from .exponents import (
    DistortionParams,
    EllipticConstants,
    ExponentReport,
    TSplit,
    alpha0,
    alpha1,
    alpha2,
    alpha2_crossover,
    alpha_classical,
    alpha_from_split,
    alpha_of_t,
    distortion_from_k,
    kk_prime_constants,
    t0_of,
    t1_of,
    t_split,
)
from .optimal import (
    ConcavityCertificate,
    CriticalPoint,
    QuarticNk,
    alpha_prime,
    alpha_second,
    alpha_star,
    certify_concavity,
    eval_Nk,
    exponent_report,
    golden_section_max,
    isolate_real_roots,
    maximize_alpha,
    phi_coefficients,
    quartic_coeffs,
    quartic_roots_in_interval,
    stationarity_residuals,
)
from .pointwise import (
    CoeffPairSample,
    MarginReport,
    PQSSample,
    constant_coeff_sweep,
    discrete_coeff_inequality,
    discrete_sweep,
    discriminant_condition,
    jacobian_identity_check,
    jacobian_identity_sweep,
    lower_bound_margin,
    pqs_from_polar,
    reduced_quadratic_check,
)
from .fourier import (
    BoundCheck,
    FieldSample,
    FourierProfile,
    MorreyEstimate,
    PolarGrid,
    J_direct,
    J_from_fourier,
    bound_vs_measured,
    coefficient_relation_check,
    default_corpus,
    fourier_profile,
    gen_homogeneous_gradient,
    gen_radial_power_field,
    gen_scaled_harmonic_gradient,
    morrey_estimate,
    parseval_checks,
    radial_derivative_profile,
    sandwich_check,
)

__version__ = "0.1.0"
