"""Orthogonal polynomials whose recurrence is pinned to 1/4 except on a sparse
pattern, represented through Chebyshev polynomial mappings."""
from .chebyshev import FIRST, SECOND, Kind, T, That, U, Uhat, cheb_eval, cheb_poly, zeros_T, zeros_U
from .example import (ExampleConfig, JacobiParams, beta_identities, example_P_explicit,
                      example_tsequence, example_weight, jacobi_monic_coeffs, scaled_Q_check)
from .mapping import (build_bundle, delta, derive_Q, mapped_representation_check, mapped_P, poly_A, poly_B)
from .measure import (DivergentIntegral, Measure, QuadratureError, StieltjesBreakdown, WeightFn,
                      build_muP, compute_C, compute_mass_M, gram_matrix, preimage_E, quad,
                      stieltjes_recover)
from .polycore import NotDivisible, Poly, set_working_precision
from .recurrence import (InvalidTSequence, TSequence, generate_P, generate_Q, validate_tsequence,
                         zeros_P)
from .suite import run_matrix, run_verification

__version__ = "0.1.0"
