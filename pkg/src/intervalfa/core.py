"""
Interval observations, within-interval distribution models and datasets.

An interval observation ``[l, u]`` (optionally with a mode ``m``) is read as
a probability law supported on the interval.  Three laws are supported:
Uniform, Symmetric Triangular (mode at the center) and general Triangular.
Every law is represented by its quantile function, which is what the Mallows
distance and the factor-score estimators operate on.

Vectorised kernels (``quantile_arrays``, ``moment_arrays``) work on plain
numpy arrays of bounds and are shared by the higher-level modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateVariableError,
    DomainError,
    InvalidIntervalError,
    ModelError,
)


class DistributionModel(str, Enum):
    """Law assumed for the values inside each observed interval."""

    UNIFORM = "uniform"
    SYMMETRIC_TRIANGULAR = "symtri"
    TRIANGULAR = "tri"

    @classmethod
    def parse(cls, value) -> "DistributionModel":
        if isinstance(value, cls):
            return value
        aliases = {
            "u": cls.UNIFORM,
            "uniform": cls.UNIFORM,
            "symtri": cls.SYMMETRIC_TRIANGULAR,
            "symmetric": cls.SYMMETRIC_TRIANGULAR,
            "symmetric_triangular": cls.SYMMETRIC_TRIANGULAR,
            "tri": cls.TRIANGULAR,
            "triangular": cls.TRIANGULAR,
        }
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown distribution model {value!r}") from None

    @property
    def needs_mode(self) -> bool:
        return self is DistributionModel.TRIANGULAR


@dataclass(frozen=True, slots=True)
class IntervalObservation:
    """A closed interval ``[lower, upper]`` with an optional mode."""

    lower: float
    upper: float
    mode: float | None = None

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise InvalidIntervalError(f"non-finite bounds [{lo}, {hi}]")
        if lo > hi:
            raise InvalidIntervalError(f"lower bound {lo} exceeds upper bound {hi}")
        if self.mode is not None:
            md = float(self.mode)
            object.__setattr__(self, "mode", md)
            if not math.isfinite(md) or md < lo or md > hi:
                raise InvalidIntervalError(f"mode {md} outside [{lo}, {hi}]")

    @property
    def center(self) -> float:
        return (self.lower + self.upper) / 2.0

    @property
    def half_range(self) -> float:
        return (self.upper - self.lower) / 2.0

    @property
    def is_degenerate(self) -> bool:
        return self.lower == self.upper

    def __str__(self):
        if self.mode is None:
            return f"[{self.lower:g}, {self.upper:g}]"
        return f"({self.lower:g}, {self.mode:g}, {self.upper:g})"


def _as_model(model) -> DistributionModel:
    return DistributionModel.parse(model)


def resolve_mode(lower, upper, mode, model):
    """Return the mode array a model actually uses.

    Uniform returns ``None``; Symmetric Triangular always uses the center;
    Triangular requires ``mode`` and raises :class:`ModelError` otherwise.
    """
    model = _as_model(model)
    if model is DistributionModel.UNIFORM:
        return None
    if model is DistributionModel.SYMMETRIC_TRIANGULAR:
        return (np.asarray(lower, dtype=float) + np.asarray(upper, dtype=float)) / 2.0
    if mode is None:
        raise ModelError("the Triangular model requires a mode for every observation")
    mode = np.asarray(mode, dtype=float)
    if np.isnan(mode).any():
        raise ModelError("the Triangular model requires a mode for every observation")
    return mode


def quantile_arrays(lower, upper, mode, model, t):
    """Vectorised quantile function; all array arguments broadcast together."""
    model = _as_model(model)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    t = np.asarray(t, dtype=float)
    if model is DistributionModel.UNIFORM:
        return lower + (upper - lower) * t
    mode = resolve_mode(lower, upper, mode, model)
    width = upper - lower
    with np.errstate(divide="ignore", invalid="ignore"):
        t_star = np.where(width > 0, (mode - lower) / np.where(width > 0, width, 1.0), 0.5)
        left = lower + np.sqrt(np.maximum(width * (mode - lower) * t, 0.0))
        right = upper - np.sqrt(np.maximum(width * (upper - mode) * (1.0 - t), 0.0))
    out = np.where(t <= t_star, left, right)
    return np.where(width > 0, out, (lower + upper) / 2.0)


def moment_arrays(lower, upper, mode, model):
    """Per-observation mean and variance of the within-interval law."""
    model = _as_model(model)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    center = (lower + upper) / 2.0
    half = (upper - lower) / 2.0
    if model is DistributionModel.UNIFORM:
        return center, half**2 / 3.0
    if model is DistributionModel.SYMMETRIC_TRIANGULAR:
        return center, half**2 / 6.0
    mode = resolve_mode(lower, upper, mode, model)
    mean = (2.0 * center + mode) / 3.0
    var = (center - mode) ** 2 / 18.0 + half**2 / 6.0
    return mean, var


def quantile(obs: IntervalObservation, model, t: float) -> float:
    """Evaluate the quantile function of ``obs`` under ``model`` at ``t``.

    Raises
    ------
    DomainError
        If ``t`` lies outside ``[0, 1]``.
    ModelError
        If the Triangular model is requested for an observation without mode.
    """
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"quantile level t={t} outside [0, 1]")
    model = _as_model(model)
    if model.needs_mode and obs.mode is None:
        raise ModelError("the Triangular model requires a mode")
    return float(quantile_arrays(obs.lower, obs.upper, obs.mode, model, t))


def observation_moments(obs: IntervalObservation, model) -> tuple[float, float]:
    """Return ``(mean, variance)`` of the law ``obs`` represents under ``model``."""
    model = _as_model(model)
    if model.needs_mode and obs.mode is None:
        raise ModelError("the Triangular model requires a mode")
    mean, var = moment_arrays(obs.lower, obs.upper, obs.mode, model)
    return float(mean), float(var)


def _readonly(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


class IntervalDataset:
    """An ``n x p`` table of interval observations.

    Bounds are stored as read-only ``(n, p)`` arrays; ``mode`` is either
    ``None`` or an array of the same shape.  Individual cells are exposed as
    :class:`IntervalObservation` values through :meth:`cell`, :meth:`column`
    and :attr:`cells`.
    """

    __slots__ = ("_lower", "_upper", "_mode", "_names", "_units")

    def __init__(self, lower, upper, mode=None, names=None, units=None):
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if lower.ndim == 1:
            lower = lower[:, None]
            upper = upper[:, None]
            if mode is not None:
                mode = np.asarray(mode, dtype=float)[:, None]
        if lower.ndim != 2 or lower.shape != upper.shape:
            raise DomainError(f"bounds must be matching 2-d arrays, got {lower.shape} and {upper.shape}")
        n, p = lower.shape
        if n < 1 or p < 1:
            raise DomainError("a dataset needs at least one unit and one variable")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise InvalidIntervalError("non-finite bound in dataset")
        bad = np.argwhere(lower > upper)
        if bad.size:
            i, j = bad[0]
            raise InvalidIntervalError(f"cell ({i}, {j}): lower {lower[i, j]} exceeds upper {upper[i, j]}")
        if mode is not None:
            mode = np.asarray(mode, dtype=float)
            if mode.shape != lower.shape:
                raise DomainError("mode array shape differs from bounds")
            bad = np.argwhere(~np.isfinite(mode) | (mode < lower) | (mode > upper))
            if bad.size:
                i, j = bad[0]
                raise InvalidIntervalError(f"cell ({i}, {j}): mode {mode[i, j]} outside bounds")
        if names is None:
            names = tuple(f"V{j + 1}" for j in range(p))
        names = tuple(str(x) for x in names)
        if len(names) != p:
            raise DomainError(f"{len(names)} names given for {p} variables")
        if units is not None:
            units = tuple(str(x) for x in units)
            if len(units) != n:
                raise DomainError(f"{len(units)} unit labels given for {n} units")
        self._lower = _readonly(lower)
        self._upper = _readonly(upper)
        self._mode = None if mode is None else _readonly(mode)
        self._names = names
        self._units = units

    @classmethod
    def from_cells(cls, cells: Sequence[Sequence[IntervalObservation]], names=None, units=None):
        rows = [list(r) for r in cells]
        if not rows:
            raise DomainError("a dataset needs at least one unit")
        p = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != p:
                raise DomainError(f"row {i} has {len(r)} cells, expected {p}")
        lower = [[c.lower for c in r] for r in rows]
        upper = [[c.upper for c in r] for r in rows]
        has_mode = [c.mode is not None for r in rows for c in r]
        mode = None
        if all(has_mode):
            mode = [[c.mode for c in r] for r in rows]
        return cls(lower, upper, mode, names=names, units=units)

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence[IntervalObservation]], names=None):
        cols = [list(c) for c in columns]
        if not cols:
            raise DomainError("a dataset needs at least one variable")
        n = len(cols[0])
        if any(len(c) != n for c in cols):
            raise DomainError("columns differ in length")
        return cls.from_cells([[c[i] for c in cols] for i in range(n)], names=names)

    lower = property(lambda self: self._lower)
    upper = property(lambda self: self._upper)
    mode = property(lambda self: self._mode)
    names = property(lambda self: self._names)
    units = property(lambda self: self._units)

    @property
    def n(self) -> int:
        return self._lower.shape[0]

    @property
    def p(self) -> int:
        return self._lower.shape[1]

    @property
    def shape(self):
        return self._lower.shape

    @property
    def has_mode(self) -> bool:
        return self._mode is not None

    @property
    def center(self):
        return (self._lower + self._upper) / 2.0

    @property
    def half_range(self):
        return (self._upper - self._lower) / 2.0

    def cell(self, i: int, j: int) -> IntervalObservation:
        md = None if self._mode is None else self._mode[i, j]
        return IntervalObservation(self._lower[i, j], self._upper[i, j], md)

    def column(self, j) -> list[IntervalObservation]:
        if isinstance(j, str):
            j = self._names.index(j)
        return [self.cell(i, j) for i in range(self.n)]

    def row(self, i: int) -> list[IntervalObservation]:
        return [self.cell(i, j) for j in range(self.p)]

    @property
    def cells(self) -> tuple[tuple[IntervalObservation, ...], ...]:
        return tuple(tuple(self.row(i)) for i in range(self.n))

    def without_mode(self) -> "IntervalDataset":
        return IntervalDataset(self._lower, self._upper, None, self._names, self._units)

    def resolved_mode(self, model):
        return resolve_mode(self._lower, self._upper, self._mode, model)

    def __eq__(self, other):
        if not isinstance(other, IntervalDataset):
            return NotImplemented
        same_mode = (self._mode is None and other._mode is None) or (
            self._mode is not None
            and other._mode is not None
            and np.array_equal(self._mode, other._mode)
        )
        return (
            self._names == other._names
            and np.array_equal(self._lower, other._lower)
            and np.array_equal(self._upper, other._upper)
            and same_mode
        )

    __hash__ = None

    def __repr__(self):
        kind = "triplets" if self.has_mode else "intervals"
        return f"IntervalDataset(n={self.n}, p={self.p}, {kind}, names={list(self._names)})"


def column_moments(data: IntervalDataset, model):
    """Symbolic sample mean and variance of every column.

    The variance is accumulated as ``mean(sigma_i^2) + mean((mu_i - mean)^2)``,
    which equals the mixture formula but avoids the cancellation of
    ``E[mu^2] - mean^2``.
    """
    mu, var = moment_arrays(data.lower, data.upper, data.resolved_mode(model), model)
    mean = mu.mean(axis=0)
    variance = var.mean(axis=0) + ((mu - mean) ** 2).mean(axis=0)
    return mean, variance


def standardize(data: IntervalDataset, model) -> IntervalDataset:
    """Centre and scale every variable to zero symbolic mean and unit variance.

    Each cell ``[l, u]`` becomes ``[(l - mean_j) / S_j, (u - mean_j) / S_j]``.
    Stored modes go through the same affine map, so a Triangular law stays
    Triangular with its mode moved accordingly.

    Raises
    ------
    DegenerateVariableError
        If some variable has zero sample variance.
    """
    model = _as_model(model)
    if model.needs_mode and not data.has_mode:
        raise ModelError("the Triangular model requires a mode for every observation")
    mean, variance = column_moments(data, model)
    for j, v in enumerate(variance):
        if not v > 0.0:
            raise DegenerateVariableError(data.names[j])
    scale = np.sqrt(variance)
    lower = (data.lower - mean) / scale
    upper = (data.upper - mean) / scale
    mode = None if data.mode is None else (data.mode - mean) / scale
    if mode is not None:
        # rounding can push the mapped mode a hair outside the mapped bounds
        mode = np.clip(mode, lower, upper)
    return IntervalDataset(lower, upper, mode, names=data.names, units=data.units)
