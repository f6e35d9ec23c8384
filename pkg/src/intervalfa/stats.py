"""
Symbolic sample moments of interval-valued variables.

A variable observed on ``n`` units is treated as the equal-weight mixture of
the ``n`` within-interval laws; its mean and variance are the mixture's.
Three covariance definitions are available:

``COV1``
    Covariance of the per-observation means (the interval centers under the
    symmetric laws).  Its diagonal is *not* the symbolic variance.
``COV2``
    Signed geometric mean of the per-observation second moments about the
    variable means.
``COV3``
    Within-observation sum of products of standard deviations plus the
    between-observation term; equals ``mean(sigma * sigma') + COV1``.

All formulas use population ``1/n`` weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .core import (
    DistributionModel,
    IntervalDataset,
    IntervalObservation,
    moment_arrays,
    resolve_mode,
)
from .errors import DegenerateVariableError, DomainError, ModelError


class CovDef(str, Enum):
    COV1 = "cov1"
    COV2 = "cov2"
    COV3 = "cov3"

    @classmethod
    def parse(cls, value) -> "CovDef":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown covariance definition {value!r}") from None


@dataclass(frozen=True)
class SymbolicSummary:
    """Means, variances, covariance and correlation of a dataset."""

    names: tuple
    means: np.ndarray
    variances: np.ndarray
    covariance: np.ndarray
    correlation: np.ndarray
    model: DistributionModel
    covdef: CovDef

    @property
    def std(self):
        return np.sqrt(self.variances)


def _column_arrays(col: Sequence[IntervalObservation], model):
    if len(col) == 0:
        raise DomainError("empty column")
    model = DistributionModel.parse(model)
    lower = np.array([o.lower for o in col], dtype=float)
    upper = np.array([o.upper for o in col], dtype=float)
    mode = None
    if model.needs_mode:
        if any(o.mode is None for o in col):
            raise ModelError("the Triangular model requires a mode for every observation")
        mode = np.array([o.mode for o in col], dtype=float)
    return lower, upper, mode


def _moments(col, model):
    lower, upper, mode = _column_arrays(col, model)
    return moment_arrays(lower, upper, resolve_mode(lower, upper, mode, model), model)


def sample_mean(col: Sequence[IntervalObservation], model) -> float:
    """Symbolic sample mean: the average of the per-observation means."""
    mu, _ = _moments(col, model)
    return float(mu.mean())


def sample_variance(col: Sequence[IntervalObservation], model) -> float:
    """Symbolic sample variance, ``mean(sigma_i^2) + mean((mu_i - mean)^2)``."""
    mu, var = _moments(col, model)
    return float(var.mean() + ((mu - mu.mean()) ** 2).mean())


def _pair_cov(mu_a, sd_a, mu_b, sd_b, covdef):
    da = mu_a - mu_a.mean(axis=0)
    db = mu_b - mu_b.mean(axis=0)
    n = mu_a.shape[0]
    if covdef is CovDef.COV1:
        return da.T @ db / n
    if covdef is CovDef.COV3:
        return sd_a.T @ sd_b / n + da.T @ db / n
    # G is -1 when the observation mean is <= the variable mean (tie included)
    ga = np.where(mu_a <= mu_a.mean(axis=0), -1.0, 1.0) * np.sqrt(sd_a**2 + da**2)
    gb = np.where(mu_b <= mu_b.mean(axis=0), -1.0, 1.0) * np.sqrt(sd_b**2 + db**2)
    return ga.T @ gb / n


def covariance(col_a, col_b, model, covdef=CovDef.COV3) -> float:
    """Symbolic sample covariance between two columns.

    Parameters
    ----------
    col_a, col_b : sequence of IntervalObservation
        Columns of equal length.
    model : DistributionModel or str
    covdef : CovDef or str, default COV3
    """
    covdef = CovDef.parse(covdef)
    if len(col_a) != len(col_b):
        raise DomainError(f"column lengths differ: {len(col_a)} vs {len(col_b)}")
    mu_a, var_a = _moments(col_a, model)
    mu_b, var_b = _moments(col_b, model)
    c = _pair_cov(mu_a[:, None], np.sqrt(var_a)[:, None], mu_b[:, None], np.sqrt(var_b)[:, None], covdef)
    return float(c[0, 0])


def covariance_matrix(data: IntervalDataset, model, covdef=CovDef.COV3) -> np.ndarray:
    covdef = CovDef.parse(covdef)
    mu, var = moment_arrays(data.lower, data.upper, data.resolved_mode(model), model)
    sd = np.sqrt(var)
    cov = _pair_cov(mu, sd, mu, sd, covdef)
    return (cov + cov.T) / 2.0


def correlation_matrix(data: IntervalDataset, model, covdef=CovDef.COV3) -> SymbolicSummary:
    """Correlation matrix of the interval variables of ``data``.

    Correlations divide the chosen covariance by the square roots of the
    symbolic sample variances, whatever ``covdef`` is; under ``COV1`` the
    diagonal is therefore below one.

    Raises
    ------
    DegenerateVariableError
        If a variable has zero symbolic variance.
    """
    model = DistributionModel.parse(model)
    covdef = CovDef.parse(covdef)
    mu, var = moment_arrays(data.lower, data.upper, data.resolved_mode(model), model)
    means = mu.mean(axis=0)
    variances = var.mean(axis=0) + ((mu - means) ** 2).mean(axis=0)
    for j, v in enumerate(variances):
        if not v > 0.0:
            raise DegenerateVariableError(data.names[j])
    sd = np.sqrt(var)
    cov = _pair_cov(mu, sd, mu, sd, covdef)
    cov = (cov + cov.T) / 2.0
    scale = np.sqrt(variances)
    corr = cov / np.outer(scale, scale)
    if covdef is not CovDef.COV1:
        np.fill_diagonal(corr, 1.0)
    if not np.isfinite(corr).all():
        raise DomainError("non-finite correlation")
    return SymbolicSummary(
        names=tuple(data.names),
        means=means,
        variances=variances,
        covariance=cov,
        correlation=corr,
        model=model,
        covdef=covdef,
    )
