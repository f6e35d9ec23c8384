"""Factor analysis of interval-valued data.

Intervals are read as Uniform, Symmetric Triangular or Triangular laws.  The
package computes symbolic moments and correlations, extracts common factors
(PCF or PAF) and estimates interval-valued factor scores by minimising
weighted squared Mallows distances between quantile functions.
"""

__version__ = "0.1.0"

from .core import (
    DistributionModel,
    IntervalDataset,
    IntervalObservation,
    column_moments,
    observation_moments,
    quantile,
    standardize,
)
from .errors import (
    DegenerateVariableError,
    DomainError,
    GenerationError,
    InputFormatError,
    IntervalFAError,
    InvalidIntervalError,
    ModelError,
    NumericalError,
)
from .factor import (
    ExtractionMethod,
    FactorModel,
    eigendecompose,
    extract,
    extract_paf,
    extract_pcf,
    kaiser_count,
)
from .io import emit_csv, ingest_csv
from .mallows import PiecewiseQuantile, combine, lift, mallows_sq, mallows_sq_numeric
from .scores import (
    FactorScores,
    OptConfig,
    ScoreParams,
    estimate_anderson_rubin,
    estimate_bartlett,
    score_correlations,
    unit_objective,
)
from .stats import (
    CovDef,
    SymbolicSummary,
    correlation_matrix,
    covariance,
    covariance_matrix,
    sample_mean,
    sample_variance,
)
from .synth import (
    BlockSpec,
    ModePolicy,
    SynthConfig,
    cholesky_upper,
    generate_block_correlation,
    generate_dataset,
    run_case_experiment,
)

__all__ = [name for name in dir() if not name.startswith("_")]
