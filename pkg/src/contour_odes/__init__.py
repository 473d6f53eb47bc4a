"""Contour-integral solutions of linear ODEs with polynomial coefficients.

Two families are covered: ``phi`` (generalizing the Airy integral) and
``psi`` (including the special functions ``U``, ``H`` and ``G``), with
quadrature, Maclaurin-series and property-checking tools around them.
"""

from .contours import JContourSpec, decay_sector_bounds, standard_contour
from .errors import (
    BadIndex,
    CertFailure,
    ContourOdesError,
    DegenerateExponent,
    DuplicateIndex,
    InvalidContour,
    NonConvergence,
    NonPositiveModulus,
    OutOfSector,
    SeedLengthMismatch,
    TooFewCoefficients,
    UnknownName,
    UnknownProperty,
)
from .phi import (
    PhiParams,
    ode_residual_phi,
    phi_deriv_zero_re,
    phi_eval,
    phi_wronskian_zero,
    roots_of_unity,
    u_family_eval,
)
from .psi import (
    PsiExistenceCert,
    PsiParams,
    h_prime_zero,
    identity_residual,
    ode_residual_psi,
    psi_eval,
    psi_existence_check,
    special_eval,
)
from .quadrature import (
    Arc,
    Circle,
    Contour,
    EvalResult,
    Line,
    QuadratureSpec,
    Ray,
    choose_truncation_radius,
    integrate_circle_spectral,
    integrate_path,
)
from .series import (
    OrderTypeEstimate,
    SeriesCoeffs,
    U_coeff,
    order_type_estimate,
    psi_deriv_zero_sum,
    recurrence_extend,
    u_deriv_zero,
)
from .verify import (
    GridSpec,
    PropertyReport,
    decay_fit,
    estimate_order_max_modulus,
    max_modulus,
    run_property,
)

__version__ = "0.1.0"
