"""Singular values of Toeplitz matrices: the ergodic formula with an explicit
n-independent error bound, its limiting trace, and numerical checks of the
supporting operator identities."""

from .errors import (DimensionError, ErgodicError, EvaluationDomainError, InputError,
                     NumericalError, RegistryError, ToleranceError, TruncationError)
from .symbols import (BUILTIN_SYMBOLS, NormReport, RangeBounds, Symbol, abs_sq_symbol,
                      compose_symbol, conj_symbol, constant_symbol, cos_shift_symbol,
                      derived_symbol, exp_abs_sq_symbol, fourier_coefficients,
                      mode_symbol, parse_symbol, product_symbol, range_bounds,
                      reflect_symbol, sampled_symbol, sup_norm, vertiii_sq, zeta2_symbol)
from .matrices import (dump_matrix, flip_matrix, hankel, hankel_product,
                       hankel_product_stable, infinite_product_block, load_matrix,
                       projection, toeplitz)
from .spectral import (EigenSystem, hermitian_eig, matrix_exp_unitary, matrix_function,
                       schatten_norm, singular_values)
from .quadrature import adaptive_gauss_legendre, gauss_legendre
from .testfunctions import (BUILTIN_TESTFUNCTIONS, TestFunction, bound_constants,
                            builtin_testfunction, bump, derivative_norm,
                            fourier_transform_samples, ft_l2_norm, ft_moment, plateau,
                            poly_bump)
from .ergodic import (BoundReport, SweepRecord, WidomResult, ergodic_gap,
                      ergodic_gap_sigma, lhs_sum, rhs_value, sweep, theorem1_bound,
                      widom_trace)
from .oracles import OracleResult, format_report, run_suite

__version__ = "0.1.0"

__all__ = [
    "DimensionError", "ErgodicError", "EvaluationDomainError", "InputError",
    "NumericalError", "RegistryError", "ToleranceError", "TruncationError",
    "BUILTIN_SYMBOLS", "NormReport", "RangeBounds", "Symbol", "abs_sq_symbol",
    "compose_symbol", "conj_symbol", "constant_symbol", "cos_shift_symbol",
    "derived_symbol", "exp_abs_sq_symbol", "fourier_coefficients", "mode_symbol",
    "parse_symbol", "product_symbol", "range_bounds", "reflect_symbol", "sampled_symbol",
    "sup_norm", "vertiii_sq", "zeta2_symbol", "dump_matrix", "flip_matrix", "hankel",
    "hankel_product", "hankel_product_stable", "infinite_product_block", "load_matrix",
    "projection", "toeplitz", "EigenSystem", "hermitian_eig", "matrix_exp_unitary",
    "matrix_function", "schatten_norm", "singular_values", "adaptive_gauss_legendre",
    "gauss_legendre", "BUILTIN_TESTFUNCTIONS", "TestFunction", "bound_constants",
    "builtin_testfunction", "bump", "derivative_norm", "fourier_transform_samples",
    "ft_l2_norm", "ft_moment", "plateau", "poly_bump", "BoundReport", "SweepRecord",
    "WidomResult", "ergodic_gap", "ergodic_gap_sigma", "lhs_sum", "rhs_value", "sweep",
    "theorem1_bound", "widom_trace", "OracleResult", "format_report", "run_suite",
]
