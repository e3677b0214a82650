"""Skew-information nonlocality and nonbilocality measures for small quantum systems."""

from .errors import (
    DegenerateMarginal,
    DimensionMismatch,
    InvalidMeasurement,
    InvalidWeights,
    NotHermitian,
    NotNormalized,
    NotPSD,
    NumericalFailure,
    OutOfRange,
    QuantumError,
)
from .measures import (
    bell_diagonal_minbs,
    min_s,
    minbs,
    minbs_b_nondegenerate,
    minbs_both_nondegenerate,
    minbs_pure,
    property_vi_check,
    skew_information,
    upper_bound_t2,
)
from .optimizer import (
    InvariantMeasurement,
    OptimizerConfig,
    invariant_blocks,
    maximize_min_s,
    maximize_minbs,
    objective,
)
from .operator_basis import (
    HermitianBasis,
    bilocal_correlation_matrix,
    correlation_matrix,
    gell_mann_basis,
    measurement_expansion,
)
from .qmatrix import (
    EigenSystem,
    SchmidtDecomposition,
    hermitian_eig,
    kron,
    partial_trace,
    psd_sqrt,
    schmidt,
)
from .results import MarginalSpectrum, MeasureResult, marginal_spectrum
from .states import (
    BilocalInput,
    DensityMatrix,
    ValidationReport,
    bell,
    bell_diagonal,
    classical_separable,
    classical_quantum,
    pure_from_schmidt,
    quantum_classical,
    random_bipartite,
    random_density,
    swap_bipartite,
    validate,
    werner,
)

__version__ = "0.1.0"
