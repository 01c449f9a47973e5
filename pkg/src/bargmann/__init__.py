"""Truncated Bargmann-Fock space, multiplication operators and their commutation checks."""

from .fock import (
    FockVector, GaussWeight, WeightMismatchError, basis_norm_sq, basis_vector, embed_symbol,
    eval_vector, inner, kernel_gram, kernel_tail_sq, kernel_vector, zero_vector,
)
from .operators import (
    TruncatedOperator, adjoint, annihilation_matrix, apply, commutator, creation_matrix,
    harmonic_operator, identity_operator, mult_matrix, p_matrix, q_matrix,
)
from .oracle import QuadratureRule, cauchy_taylor, gauss_inner, gauss_norm_over_annulus
from .symbols import (
    Custom, EntireSymbol, ExpQuadratic, FockVerdict, GrowthReport, Kernel, LambdaVerdict,
    Polynomial, Product, Shifted, Sum, antiderivative, classify_growth, derivative,
    eval_symbol, fock_norm_partial, lambda_bound_witness, parse_symbol, taylor,
)

eval = eval_vector  # noqa: A001  (``bargmann.eval(f, z)``)

__version__ = "0.1.0"
