"""Finite-dimensional Balian-Low machinery.

Finite Fourier and Zak transforms on rectangular lattices, Riesz bounds of
Gabor systems, the alpha and beta localization functionals, explicit
generators, jump certificates for the log N lower bound, and the mollifier
pipeline behind the tail bound.
"""

from .bridge import (
    SmoothFunction,
    continuous_zak,
    gaussian_function,
    poisson_fourier_check,
    poisson_zak_check,
    sample_periodize,
    tv_domination_check,
)
from .errors import PreconditionError, TheoremViolation
from .functionals import (
    BltReport,
    alpha_functional,
    alpha_terms,
    beta_functional,
    beta_of_field,
    beta_terms,
    discrete_derivative,
    sandwich_check,
)
from .gabor import (
    GaborSystem,
    RieszBounds,
    build_system,
    is_orthonormal_basis,
    riesz_bounds_via_gram,
    riesz_bounds_via_zak,
)
from .generators import (
    PhaseSpec,
    bcgp_field,
    bcgp_generator,
    bcgp_phase,
    gaussian_generator,
    random_unimodular_generator,
)
from .jumps import (
    Certificate,
    JumpCollection,
    JumpRecord,
    build_sublattice,
    certify,
    certify_rect,
    collect_separated_jumps,
    find_jump,
    lower_bound_certificate,
    lower_bound_certificate_rect,
)
from .lattice import (
    LatticeMismatch,
    LatticeParams,
    Signal,
    Spectrum,
    box,
    circular_convolve,
    delta,
    fourier_forward,
    fourier_inverse,
)
from .quantitative import (
    TailReport,
    conv_gap_jump_set,
    mollifier_samples,
    rho_derivative_l1,
    rho_eval,
    rho_hat,
    verify_quantitative,
)
from .zak import (
    ZakField,
    convolved_field,
    translate_field,
    zak_convolve_first,
    zak_extend,
    zak_forward,
    zak_inverse,
    zak_of_fourier,
)

__version__ = "0.1.0"
