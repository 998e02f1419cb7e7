"""Hadamard matrices with entries in finite-dimensional C*-algebras."""

from .algebra import (
    AlgebraShape,
    AlgElem,
    adjoint,
    commutator_residual,
    is_central,
    is_unitary,
    make_shape,
    mul,
    normalized_trace,
    random_unitary,
)
from .classify import SearchConfig, SearchResult, canonical_form_3x3, check_2x2, extract_vanishing_sum_unit, search_hadamard
from .hadamard import (
    NCMatrix,
    PermuteCols,
    PermuteRows,
    ScaleCol,
    ScaleRow,
    VerificationReport,
    apply_equivalence,
    dephase,
    dita_deform,
    fourier,
    is_biunitary,
    is_classical,
    relatives,
    tensor,
    verify_hadamard,
)
from .invariants import MomentReport, build_moment_matrix, cesaro_trace, estimate_moments
from .magic import MagicUnitary, build_magic, verify_magic
from .wreath import compute_components, verify_factorization, verify_product_formula, wreath_check

__version__ = "0.1.0"

__all__ = [
    "AlgebraShape",
    "AlgElem",
    "adjoint",
    "commutator_residual",
    "is_central",
    "is_unitary",
    "make_shape",
    "mul",
    "normalized_trace",
    "random_unitary",
    "NCMatrix",
    "PermuteCols",
    "PermuteRows",
    "ScaleCol",
    "ScaleRow",
    "VerificationReport",
    "apply_equivalence",
    "dephase",
    "dita_deform",
    "fourier",
    "is_biunitary",
    "is_classical",
    "relatives",
    "tensor",
    "verify_hadamard",
    "SearchConfig",
    "SearchResult",
    "canonical_form_3x3",
    "check_2x2",
    "extract_vanishing_sum_unit",
    "search_hadamard",
    "MomentReport",
    "build_moment_matrix",
    "cesaro_trace",
    "estimate_moments",
    "MagicUnitary",
    "build_magic",
    "verify_magic",
    "compute_components",
    "verify_factorization",
    "verify_product_formula",
    "wreath_check",
]
