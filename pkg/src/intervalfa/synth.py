"""
Synthetic interval datasets with a planted block-correlation structure.

Centers are ``C_ini @ L_C`` and half-ranges ``|R_ini @ L_R|`` where
``C_ini ~ U(a, b)``, ``R_ini ~ U(0.1, 1)`` entrywise and ``L_C``, ``L_R`` are
upper Cholesky factors of two correlation matrices with the same block
pattern.  Six reference structures (``case_spec(1..6)``) reproduce the
factor-count experiment.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _reference
from .core import DistributionModel, IntervalDataset
from .errors import DomainError, GenerationError, NumericalError
from .factor import ExtractionMethod, extract, kaiser_count
from .stats import CovDef, correlation_matrix

MIN_EIGENVALUE = 1e-8
MAX_ATTEMPTS = 100
EXPECTED_FACTOR_COUNTS = dict(_reference.EXPECTED_FACTOR_COUNTS)


def _check_range(rng_pair, name):
    lo, hi = (float(v) for v in rng_pair)
    if not (-1.0 <= lo <= hi <= 1.0):
        raise DomainError(f"{name} must satisfy -1 <= low <= high <= 1, got ({lo}, {hi})")
    return lo, hi


@dataclass(frozen=True)
class BlockSpec:
    """Block pattern of a correlation matrix.

    Parameters
    ----------
    blocks : sequence of (size, (low, high))
        Consecutive variable groups and the range of their within-group
        correlations.
    cross_range : (low, high)
        Range of correlations between variables of different groups.
    """

    blocks: tuple
    cross_range: tuple = (0.0, 0.0)

    def __post_init__(self):
        blocks = []
        for size, within in self.blocks:
            if int(size) != size or size < 1:
                raise DomainError(f"block sizes must be positive integers, got {size!r}")
            blocks.append((int(size), _check_range(within, "within_range")))
        if not blocks:
            raise DomainError("at least one block is required")
        object.__setattr__(self, "blocks", tuple(blocks))
        object.__setattr__(self, "cross_range", _check_range(self.cross_range, "cross_range"))

    @property
    def p(self) -> int:
        return sum(size for size, _ in self.blocks)

    @property
    def labels(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.blocks)), [size for size, _ in self.blocks])

    @classmethod
    def from_matrix(cls, R, sizes) -> "BlockSpec":
        """Tightest spec containing the off-diagonal entries of ``R``."""
        R = np.asarray(R, dtype=float)
        lab = np.repeat(np.arange(len(sizes)), sizes)
        if R.shape != (lab.size, lab.size):
            raise DomainError("matrix size does not match the block sizes")
        iu, ju = np.triu_indices(lab.size, 1)
        vals = R[iu, ju]
        blocks = []
        for b, size in enumerate(sizes):
            sel = (lab[iu] == b) & (lab[ju] == b)
            blocks.append((size, (vals[sel].min(), vals[sel].max()) if sel.any() else (1.0, 1.0)))
        cross = lab[iu] != lab[ju]
        cross_range = (vals[cross].min(), vals[cross].max()) if cross.any() else (0.0, 0.0)
        return cls(tuple(blocks), cross_range)


class ModePolicy(str, Enum):
    NONE = "none"
    CENTER = "center"
    RANDOM = "random"


@dataclass(frozen=True)
class SynthConfig:
    """Settings of one synthetic dataset.

    ``a`` and ``b`` (the bounds of the center draws) are drawn once per
    dataset from ``a_range`` and ``b_range``.
    """

    n: int
    spec_centers: BlockSpec
    spec_ranges: BlockSpec
    seed: int = 0
    mode_policy: ModePolicy = ModePolicy.NONE
    a_range: tuple = (0.0, 5.0)
    b_range: tuple = (5.0, 15.0)
    range_bounds: tuple = (0.1, 1.0)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n!r}")
        if self.spec_centers.p != self.spec_ranges.p:
            raise DomainError("center and range specs disagree on p")
        for name in ("a_range", "b_range", "range_bounds"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise DomainError(f"{name} must be ordered")
        object.__setattr__(self, "mode_policy", ModePolicy(self.mode_policy))

    @property
    def p(self) -> int:
        return self.spec_centers.p


def _draw(spec: BlockSpec, rng) -> np.ndarray:
    lab = spec.labels
    p = lab.size
    lo = np.empty((p, p))
    hi = np.empty((p, p))
    lo[:] = spec.cross_range[0]
    hi[:] = spec.cross_range[1]
    for b, (_, (wlo, whi)) in enumerate(spec.blocks):
        sel = np.ix_(lab == b, lab == b)
        lo[sel], hi[sel] = wlo, whi
    iu, ju = np.triu_indices(p, 1)
    R = np.eye(p)
    R[iu, ju] = rng.uniform(lo[iu, ju], hi[iu, ju])
    R[ju, iu] = R[iu, ju]
    return R


def _repair(R):
    vals, vecs = np.linalg.eigh(R)
    R = (vecs * np.maximum(vals, MIN_EIGENVALUE)) @ vecs.T
    d = np.sqrt(np.diag(R))
    R = R / np.outer(d, d)
    lam = np.linalg.eigvalsh(R).min()
    if lam < MIN_EIGENVALUE:
        # a ridge toward the identity keeps the unit diagonal
        delta = (MIN_EIGENVALUE - lam) / (1.0 - MIN_EIGENVALUE)
        R = (R + delta * np.eye(R.shape[0])) / (1.0 + delta)
    R = (R + R.T) / 2.0
    np.fill_diagonal(R, 1.0)
    return R


def generate_block_correlation(spec: BlockSpec, rng) -> np.ndarray:
    """Random correlation matrix following ``spec``.

    Entries are drawn uniformly in their ranges and the result is repaired to
    be positive definite (eigenvalue clipping, unit-diagonal rescaling and, if
    needed, a small ridge).
    """
    for _ in range(MAX_ATTEMPTS):
        R = _repair(_draw(spec, rng))
        if np.isfinite(R).all() and np.linalg.eigvalsh(R).min() >= MIN_EIGENVALUE * (1.0 - 1e-6):
            return R
    raise GenerationError(f"no valid correlation matrix after {MAX_ATTEMPTS} attempts")


def cholesky_upper(R) -> np.ndarray:
    """Upper-triangular ``U`` with ``U.T @ U == R``."""
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1] or not np.allclose(R, R.T, rtol=0.0, atol=1e-10):
        raise DomainError("expected a symmetric square matrix")
    try:
        return np.linalg.cholesky(R).T
    except np.linalg.LinAlgError as exc:
        raise NumericalError("matrix is not positive definite") from exc


def generate_dataset(cfg: SynthConfig) -> IntervalDataset:
    """Draw one interval dataset; identical seeds give identical datasets."""
    rng = np.random.default_rng(cfg.seed)
    L_c = cholesky_upper(generate_block_correlation(cfg.spec_centers, rng))
    L_r = cholesky_upper(generate_block_correlation(cfg.spec_ranges, rng))
    a = rng.uniform(*cfg.a_range)
    b = rng.uniform(*cfg.b_range)
    centers = rng.uniform(a, b, size=(cfg.n, cfg.p)) @ L_c
    half = np.abs(rng.uniform(*cfg.range_bounds, size=(cfg.n, cfg.p)) @ L_r)
    lower, upper = centers - half, centers + half
    mode = None
    if cfg.mode_policy is ModePolicy.CENTER:
        mode = centers.copy()
    elif cfg.mode_policy is ModePolicy.RANDOM:
        mode = np.clip(rng.uniform(lower, upper), lower, upper)
    return IntervalDataset(lower, upper, mode)


def reference_matrices(case_id: int) -> tuple[np.ndarray, np.ndarray]:
    """Center and half-range correlation matrices of a reference case."""
    if case_id not in _reference.MATRICES:
        raise DomainError(f"case id must be in 1..6, got {case_id!r}")
    out = []
    for key in ("centers", "ranges"):
        rows = _reference.MATRICES[case_id][key]
        p = len(rows) + 1
        R = np.eye(p)
        for i, row in enumerate(rows):
            R[i, i + 1 :] = row
            R[i + 1 :, i] = row
        out.append(R)
    return out[0], out[1]


def case_spec(case_id: int) -> tuple[BlockSpec, BlockSpec]:
    """Center and half-range block specs spanning a reference case's entries."""
    Rc, Rr = reference_matrices(case_id)
    sizes = _reference.BLOCK_SIZES[case_id]
    return BlockSpec.from_matrix(Rc, sizes), BlockSpec.from_matrix(Rr, sizes)


@dataclass(frozen=True)
class CaseResult:
    case_id: int
    model: DistributionModel
    method: ExtractionMethod
    seeds: tuple
    counts: tuple
    explained: tuple
    modal: int
    expected: int

    @property
    def agreement(self) -> float:
        return sum(c == self.expected for c in self.counts) / len(self.counts)


def run_case_experiment(case_id: int, model, method, seeds, n: int = 100) -> CaseResult:
    """Kaiser factor counts of one reference case over several seeds.

    For every seed a dataset is generated, its Cov3 correlation matrix is
    computed and the eigenvalues above one are counted.  ``explained`` holds
    the share of variance explained by that many factors under ``method``.
    The modal count breaks ties toward the smaller count.
    """
    model = DistributionModel.parse(model)
    method = ExtractionMethod.parse(method)
    seeds = tuple(int(s) for s in seeds)
    if not seeds:
        raise DomainError("at least one seed is required")
    spec_c, spec_r = case_spec(case_id)
    policy = ModePolicy.RANDOM if model.needs_mode else ModePolicy.NONE
    counts, explained = [], []
    for seed in seeds:
        data = generate_dataset(SynthConfig(n, spec_c, spec_r, seed=seed, mode_policy=policy))
        R = correlation_matrix(data, model, CovDef.COV3).correlation
        k = kaiser_count(np.linalg.eigvalsh(R))
        counts.append(k)
        explained.append(float(extract(R, max(k, 1), method).cumulative_explained[-1]))
    tally = Counter(counts)
    modal = min(tally, key=lambda c: (-tally[c], c))
    return CaseResult(case_id, model, method, seeds, tuple(counts), tuple(explained), modal, EXPECTED_FACTOR_COUNTS[case_id])
