"""Schmidt-number witness toolkit for bipartite quantum systems.

Builds, verifies, classifies and refines Schmidt-number witnesses by
embedding states and operators into an ancilla-extended Hilbert space where
every bounded-Schmidt-rank positivity question becomes a product-state
positivity question, answered by seeded see-saw minimization.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateStateError,
    DimensionError,
    NotHermitianError,
    ParameterError,
    PreconditionError,
    SnWitnessError,
)
from .hilbert import (
    Dims,
    Operator,
    PureState,
    SchmidtForm,
    expectation,
    min_eigenpair,
    normalize,
    partial_expectation,
    partial_transpose,
    product_state,
    schmidt_decompose,
    schmidt_rank,
    trace_pair,
)
from .embedding import (
    LiftedOperator,
    LiftedState,
    lift_ensemble,
    lift_operator,
    lift_state,
    lower_ensemble,
    lower_product_state,
    lower_state,
)
from .witness import (
    FinerCertificate,
    OptimizerConfig,
    ProductMinResult,
    SubtractionResult,
    WitnessCheck,
    WitnessClassification,
    classify_schmidt_witness,
    detects,
    finer_certificate,
    is_entanglement_witness,
    lambda_max_subtraction,
    min_product_expectation,
    optimality_certificate,
    refine_by_subtraction,
    subtract,
)
from .families import (
    IsotropicWitnessSpec,
    ScanResult,
    ScanRow,
    make_isotropic_witness,
    maximally_entangled_state,
    random_hermitian,
    random_pure_state,
    threshold_scan,
)

__all__ = [
    "__version__",
    "Dims",
    "PureState",
    "Operator",
    "SchmidtForm",
    "LiftedState",
    "LiftedOperator",
    "OptimizerConfig",
    "ProductMinResult",
    "WitnessCheck",
    "WitnessClassification",
    "SubtractionResult",
    "FinerCertificate",
    "IsotropicWitnessSpec",
    "ScanRow",
    "ScanResult",
    "SnWitnessError",
    "DimensionError",
    "DegenerateStateError",
    "NotHermitianError",
    "ParameterError",
    "PreconditionError",
    "schmidt_decompose",
    "schmidt_rank",
    "partial_expectation",
    "min_eigenpair",
    "expectation",
    "trace_pair",
    "partial_transpose",
    "normalize",
    "product_state",
    "lift_state",
    "lift_operator",
    "lower_product_state",
    "lower_state",
    "lift_ensemble",
    "lower_ensemble",
    "min_product_expectation",
    "is_entanglement_witness",
    "classify_schmidt_witness",
    "detects",
    "subtract",
    "refine_by_subtraction",
    "finer_certificate",
    "lambda_max_subtraction",
    "optimality_certificate",
    "make_isotropic_witness",
    "maximally_entangled_state",
    "random_pure_state",
    "random_hermitian",
    "threshold_scan",
]
