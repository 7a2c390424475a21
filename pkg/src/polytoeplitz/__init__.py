"""Universal operator models of regular polydomains on truncated Fock spaces.

The package builds the weighted creation-operator models attached to a
polydomain specification, classifies weighted multi-Toeplitz operators,
extracts and evaluates their Fourier symbols, runs Berezin-transform and
positivity checks, and verifies the structural (Brown-Halmos type) equation,
all at configurable truncation degrees.
"""

from .brownhalmos import RowOperator, bh_residual, bh_scan, build_row, cauchy_dual
from .cpmaps import (
    BerezinKernel,
    OperatorTuple,
    berezin_kernel,
    berezin_transform,
    defect,
    is_member,
    is_pure,
    phi_map,
    random_pure_tuple,
    universal_tuple,
)
from .errors import (
    DimensionMismatch,
    NotComparable,
    NumericalRankError,
    PolytoeplitzError,
    SpecError,
    TruncationError,
)
from .freemonoid import (
    IndexPair,
    MultiWord,
    Word,
    comparable,
    enumerate_words,
    multiword_index,
    multiword_unindex,
    reverse,
    right_divides,
    simplify,
)
from .model import (
    FockOperator,
    FockSpace,
    graded_projection,
    monomial,
    scalar_kernel,
    truncated_gram_kernel,
    weighted_fock_unitary,
    weighted_left_creation,
    weighted_right_creation,
)
from .toeplitz import (
    FourierSymbol,
    NotMultiToeplitz,
    ToeplitzReport,
    cesaro_reconstruct,
    evaluate_at_model,
    evaluate_at_tuple,
    evaluate_symbol,
    extract_fourier,
    homogeneous_part,
    is_multi_toeplitz,
    pluriharmonic_kernel,
    random_symbol,
    symbol_from_json,
    symbol_to_json,
)
from .weights import (
    PolydomainSpec,
    WeightTable,
    brute_force_weight,
    build_weight_table,
    compactness_ratios,
    mu,
    spec_from_json,
    spec_to_json,
    tau,
)

__version__ = "0.1.0"
