"""
Factor extraction from a symbolic correlation matrix.

Two extraction methods are implemented:

PCF
    Principal component factoring: loadings are eigenvectors scaled by the
    square roots of their eigenvalues.
PAF
    Principal axis factoring: communalities replace the unit diagonal and the
    eigen-analysis is repeated until the communalities settle.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, NumericalError

SPECIFIC_VARIANCE_FLOOR = 1e-6
COMMUNALITY_CEILING = 1.0 - 1e-6


class ExtractionMethod(str, Enum):
    PCF = "pcf"
    PAF = "paf"

    @classmethod
    def parse(cls, value) -> "ExtractionMethod":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown extraction method {value!r}") from None


@dataclass(frozen=True)
class FactorModel:
    """Result of a factor extraction.

    Attributes
    ----------
    loadings : ndarray, shape (p, m)
    eigenvalues : ndarray, shape (p,)
        Descending; for PAF these belong to the final reduced matrix.
    communalities : ndarray, shape (p,)
        Row sums of squared loadings.
    specific_variances : ndarray, shape (p,)
        ``1 - communalities``, floored at ``SPECIFIC_VARIANCE_FLOOR``.
    method : ExtractionMethod
    cumulative_explained : ndarray, shape (m,)
        ``cumsum(eigenvalues[:m]) / p``.
    converged : bool
    iterations : int
    """

    loadings: np.ndarray
    eigenvalues: np.ndarray
    communalities: np.ndarray
    specific_variances: np.ndarray
    method: ExtractionMethod
    cumulative_explained: np.ndarray
    converged: bool = True
    iterations: int = 0

    @property
    def n_factors(self) -> int:
        return self.loadings.shape[1]

    @property
    def p(self) -> int:
        return self.loadings.shape[0]


def _check_square_symmetric(R, tol=1e-10):
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {R.shape}")
    if not np.isfinite(R).all():
        raise DomainError("matrix has non-finite entries")
    if np.abs(R - R.T).max(initial=0.0) > tol:
        raise DomainError("matrix is not symmetric")
    return R


def eigendecompose(R):
    """Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix.

    Each eigenvector is signed so that its entry of largest magnitude is
    positive; ties go to the lowest index.
    """
    R = _check_square_symmetric(R)
    vals, vecs = np.linalg.eigh((R + R.T) / 2.0)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    lead = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[lead, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vals, vecs * signs


def kaiser_count(eigenvalues) -> int:
    """Number of eigenvalues strictly greater than one."""
    return int(np.sum(np.asarray(eigenvalues, dtype=float) > 1.0))


def _check_m(m, p):
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= p:
        raise DomainError(f"number of factors must be in 1..{p}, got {m!r}")
    return int(m)


def _finish(loadings, eigenvalues, method, p, converged=True, iterations=0):
    comm = np.sum(loadings**2, axis=1)
    spec = np.maximum(1.0 - comm, SPECIFIC_VARIANCE_FLOOR)
    m = loadings.shape[1]
    return FactorModel(
        loadings=loadings,
        eigenvalues=eigenvalues,
        communalities=comm,
        specific_variances=spec,
        method=method,
        cumulative_explained=np.cumsum(eigenvalues[:m]) / p,
        converged=converged,
        iterations=iterations,
    )


def extract_pcf(R, m: int) -> FactorModel:
    """Principal component factoring with ``m`` retained factors."""
    vals, vecs = eigendecompose(R)
    p = vals.size
    m = _check_m(m, p)
    if not vals[m - 1] > 0.0:
        raise NumericalError(f"eigenvalue {m} is not positive ({vals[m - 1]:.3g})")
    loadings = vecs[:, :m] * np.sqrt(vals[:m])
    return _finish(loadings, vals, ExtractionMethod.PCF, p)


def squared_multiple_correlations(R):
    R = np.asarray(R, dtype=float)
    try:
        inv = np.linalg.inv(R)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("correlation matrix is singular") from exc
    diag = np.diag(inv)
    if not np.isfinite(diag).all() or np.any(diag <= 0.0):
        raise NumericalError("correlation matrix is singular or indefinite")
    return 1.0 - 1.0 / diag


def _paf_step(R, h, m):
    reduced = R.copy()
    np.fill_diagonal(reduced, h)
    vals, vecs = eigendecompose(reduced)
    loadings = vecs[:, :m] * np.sqrt(np.maximum(vals[:m], 0.0))
    comm = np.sum(loadings**2, axis=1)
    over = comm > COMMUNALITY_CEILING
    if over.any():
        # Heywood case: shrink the offending rows onto the ceiling
        loadings[over] *= np.sqrt(COMMUNALITY_CEILING / comm[over])[:, None]
    return vals, loadings


def extract_paf(R, m: int, tol: float = 1e-6, max_iter: int = 200) -> FactorModel:
    """Iterated principal axis factoring.

    Starts from squared multiple correlations and alternates between an
    eigen-analysis of the reduced matrix (communalities on the diagonal) and a
    communality update, stopping when the largest change drops below ``tol``.
    Non-convergence is reported through ``FactorModel.converged``.
    """
    R = _check_square_symmetric(R)
    p = R.shape[0]
    m = _check_m(m, p)
    h = np.clip(squared_multiple_correlations(R), 0.0, COMMUNALITY_CEILING)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        vals, loadings = _paf_step(R, h, m)
        h_new = np.sum(loadings**2, axis=1)
        delta = np.abs(h_new - h).max()
        h = h_new
        if delta < tol:
            converged = True
            break
    return _finish(loadings, vals, ExtractionMethod.PAF, p, converged, it)


def extract(R, m: int, method=ExtractionMethod.PAF, **kwargs) -> FactorModel:
    method = ExtractionMethod.parse(method)
    if method is ExtractionMethod.PCF:
        return extract_pcf(R, m)
    return extract_paf(R, m, **kwargs)
