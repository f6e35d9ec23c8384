"""
Interval-valued factor scores.

For unit ``i`` the factor scores are intervals (Triangular triplets under the
Triangular model) ``f_i1, ..., f_im``.  The linear combination
``CL_ij = sum_k l_jk f_ik`` is formed on quantile functions, a negative
loading reflecting its factor (``Q(1 - t)``).  Scores are chosen to minimise

    sum_j D_M^2(Q_{Z_ij}, Q_{CL_ij}) / specific_variance_j

either unit by unit (Bartlett style) or jointly for all units with a penalty
on the squared correlations between factors (Anderson-Rubin style).

Each score is parameterised by ``(center, half_range, mode_pos)`` with
``half_range >= 0`` and ``mode_pos`` in ``[0, 1]`` (Triangular only), where
``mode = center - half_range + 2 * half_range * mode_pos``.  The feasible set
is then a box, handled natively by L-BFGS-B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .core import DistributionModel, IntervalDataset, IntervalObservation
from .errors import DomainError, ModelError
from .factor import SPECIFIC_VARIANCE_FLOOR, FactorModel
from .mallows import DEFAULT_NODES, basis_at, combine, integrate_sq, lift, mallows_sq, mallows_sq_numeric, quadrature_nodes
from .stats import CovDef, correlation_matrix

CORRELATION_TARGET = 0.01

_KAPPA = {
    DistributionModel.UNIFORM: 1.0 / 3.0,
    DistributionModel.SYMMETRIC_TRIANGULAR: 1.0 / 6.0,
}


@dataclass(frozen=True, slots=True)
class ScoreParams:
    """One interval-valued factor score."""

    center: float
    half_range: float
    mode_pos: float | None = None

    def __post_init__(self):
        if not self.half_range >= 0.0:
            raise DomainError(f"half_range must be >= 0, got {self.half_range}")
        if self.mode_pos is not None and not 0.0 <= self.mode_pos <= 1.0:
            raise DomainError(f"mode_pos must lie in [0, 1], got {self.mode_pos}")

    @property
    def mode(self) -> float | None:
        if self.mode_pos is None:
            return None
        return self.center - self.half_range + 2.0 * self.half_range * self.mode_pos

    def to_observation(self) -> IntervalObservation:
        lo = self.center - self.half_range
        hi = self.center + self.half_range
        md = self.mode
        if md is not None:
            md = min(max(md, lo), hi)
        return IntervalObservation(lo, hi, md)


@dataclass(frozen=True)
class OptConfig:
    """Optimiser settings shared by both score estimators.

    ``penalty=None`` means ``1e4 * n``.  ``restarts`` and ``penalty`` only
    matter for the Anderson-Rubin estimator.
    """

    max_iter: int = 500
    tol: float = 1e-8
    restarts: int = 20
    penalty: float | None = None
    seed: int = 0
    perturbation_sd: float = 0.25

    def __post_init__(self):
        if self.max_iter < 1 or self.tol <= 0 or self.restarts < 0 or self.perturbation_sd < 0:
            raise DomainError("invalid optimiser configuration")
        if self.penalty is not None and not self.penalty > 0:
            raise DomainError("penalty must be positive")

    def penalty_for(self, n: int) -> float:
        return float(self.penalty) if self.penalty is not None else 1e4 * n


@dataclass(frozen=True)
class FactorScores:
    """Estimated interval-valued scores for ``n`` units and ``m`` factors.

    ``objective`` is the weighted Mallows distance term summed over units;
    ``penalty_term`` is the correlation penalty (zero for Bartlett scores).
    """

    centers: np.ndarray
    half_ranges: np.ndarray
    mode_pos: np.ndarray | None
    model: DistributionModel
    method: str
    objective: float
    unit_objectives: np.ndarray
    converged: np.ndarray
    penalty_term: float = 0.0
    penalty: float = 0.0
    restarts_used: int = 0
    factor_names: tuple = field(default=())

    @property
    def n(self) -> int:
        return self.centers.shape[0]

    @property
    def m(self) -> int:
        return self.centers.shape[1]

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    @property
    def lower(self):
        return self.centers - self.half_ranges

    @property
    def upper(self):
        return self.centers + self.half_ranges

    @property
    def modes(self):
        if self.mode_pos is None:
            return None
        return np.clip(self.centers - self.half_ranges + 2.0 * self.half_ranges * self.mode_pos, self.lower, self.upper)

    def params(self, i: int, k: int) -> ScoreParams:
        mp = None if self.mode_pos is None else float(self.mode_pos[i, k])
        return ScoreParams(float(self.centers[i, k]), float(self.half_ranges[i, k]), mp)

    @property
    def grid(self) -> tuple[tuple[ScoreParams, ...], ...]:
        return tuple(tuple(self.params(i, k) for k in range(self.m)) for i in range(self.n))

    def to_dataset(self, units=None) -> IntervalDataset:
        names = self.factor_names or tuple(f"f{k + 1}" for k in range(self.m))
        return IntervalDataset(self.lower, self.upper, self.modes, names=names, units=units)

    @property
    def max_abs_correlation(self) -> float:
        if self.m < 2:
            return 0.0
        corr = score_correlations(self)
        return float(np.abs(corr[~np.eye(self.m, dtype=bool)]).max())


# -- objective kernels ----------------------------------------------------------


def _check_inputs(data_std: IntervalDataset, fm: FactorModel, model):
    model = DistributionModel.parse(model)
    L = np.asarray(fm.loadings, dtype=float)
    spec = np.asarray(fm.specific_variances, dtype=float)
    if L.ndim != 2 or L.shape[0] != data_std.p:
        raise DomainError(f"loadings have {L.shape[0] if L.ndim == 2 else '?'} rows for {data_std.p} variables")
    if L.shape[1] < 1:
        raise DomainError("at least one factor is required")
    if spec.shape != (data_std.p,):
        raise DomainError("specific variances do not match the number of variables")
    if model.needs_mode and not data_std.has_mode:
        raise ModelError("the Triangular model requires modes on the data")
    weights = 1.0 / np.maximum(spec, SPECIFIC_VARIANCE_FLOOR)
    return model, L, weights


def _n_params(model):
    return 3 if model is DistributionModel.TRIANGULAR else 2


def _split(x, m, model):
    c = x[..., :m]
    r = x[..., m : 2 * m]
    pi = x[..., 2 * m : 3 * m] if model is DistributionModel.TRIANGULAR else None
    return c, r, pi


class _UnitProblem:
    """Standardised data and loadings packaged for vectorised evaluation."""

    def __init__(self, data_std: IntervalDataset, fm: FactorModel, model, n_nodes=DEFAULT_NODES, angular=False):
        self.model, self.L, self.w = _check_inputs(data_std, fm, model)
        # angular: mode_pos = sin(theta)^2, which bounds the curvature of the
        # sqrt(mode_pos) terms near 0 and 1 (used by the joint search)
        self.angular = angular and self.model is DistributionModel.TRIANGULAR
        self.p, self.m = self.L.shape
        self.n = data_std.n
        self.zl = np.asarray(data_std.lower, dtype=float)
        self.zu = np.asarray(data_std.upper, dtype=float)
        self.zc = (self.zl + self.zu) / 2.0
        self.zr = (self.zu - self.zl) / 2.0
        self.zm = None
        if self.model is DistributionModel.TRIANGULAR:
            self.zm = np.asarray(data_std.mode, dtype=float)
            width = self.zu - self.zl
            safe = np.where(width > 0, width, 1.0)
            self.zt = np.where(width > 0, (self.zm - self.zl) / safe, 0.5)
            self.z_left = np.sqrt(np.maximum(width * (self.zm - self.zl), 0.0))
            self.z_right = np.sqrt(np.maximum(width * (self.zu - self.zm), 0.0))
            self.z_degenerate = width <= 0
        self.n_nodes = n_nodes
        self.q = _n_params(self.model)
        self.dim = self.q * self.m
        lb = np.full(self.dim, -np.inf)
        ub = np.full(self.dim, np.inf)
        lb[self.m : 2 * self.m] = 0.0
        if self.model is DistributionModel.TRIANGULAR:
            lb[2 * self.m :] = 0.0
            ub[2 * self.m :] = math.pi / 2.0 if self.angular else 1.0
        self.lb, self.ub = lb, ub

    def encode(self, X):
        """Public ``(c, r, mode_pos)`` columns to optimiser variables."""
        X = np.array(X, dtype=float)
        if self.angular:
            X[..., 2 * self.m :] = np.arcsin(np.sqrt(np.clip(X[..., 2 * self.m :], 0.0, 1.0)))
        return X

    def decode(self, X):
        X = np.array(X, dtype=float)
        if self.angular:
            X[..., 2 * self.m :] = np.clip(np.sin(X[..., 2 * self.m :]) ** 2, 0.0, 1.0)
        return X

    # objective of units `idx` (any leading batch shape) at parameters x (..., dim)
    def values(self, x, idx):
        c, r, pi = _split(x, self.m, self.model)
        if self.model is DistributionModel.TRIANGULAR:
            if self.angular:
                pi = np.sin(pi) ** 2
            d2 = self._tri_distances(c, r, pi, idx)
            return np.sum(self.w * d2, axis=-1)
        kappa = _KAPPA[self.model]
        ec = self.zc[idx] - c @ self.L.T
        er = self.zr[idx] - r @ np.abs(self.L).T
        return np.sum(self.w * (ec**2 + kappa * er**2), axis=-1)

    def values_and_grad(self, x, idx):
        """Objective and gradient; analytic for the symmetric laws."""
        if self.model is DistributionModel.TRIANGULAR:
            if self.angular:
                return self._tri_value_grad(x, idx)
            return self._fd_values_and_grad(x, idx)
        c, r, _ = _split(x, self.m, self.model)
        kappa = _KAPPA[self.model]
        ec = self.zc[idx] - c @ self.L.T
        er = self.zr[idx] - r @ np.abs(self.L).T
        f = np.sum(self.w * (ec**2 + kappa * er**2), axis=-1)
        gc = -2.0 * (self.w * ec) @ self.L
        gr = -2.0 * kappa * (self.w * er) @ np.abs(self.L)
        return f, np.concatenate([gc, gr], axis=-1)

    def _fd_values_and_grad(self, x, idx, h=1e-6):
        x = np.asarray(x, dtype=float)
        step = h * np.maximum(1.0, np.abs(x))
        hi = np.minimum(x + step, self.ub)
        lo = np.maximum(x - step, self.lb)
        eye = np.eye(self.dim, dtype=bool)
        # probes: (..., dim, dim) -- row q perturbs coordinate q
        xp = np.where(eye, hi[..., None, :], x[..., None, :])
        xm = np.where(eye, lo[..., None, :], x[..., None, :])
        batch = np.concatenate([x[..., None, :], xp, xm], axis=-2)
        idx_b = np.broadcast_to(np.asarray(idx)[..., None], batch.shape[:-1])
        vals = self.values(batch, idx_b)
        f = vals[..., 0]
        grad = (vals[..., 1 : 1 + self.dim] - vals[..., 1 + self.dim :]) / (hi - lo)
        return f, grad

    def _tri_segments(self, c, r, sp, sq, idx):
        """Merged breakpoints and basis coefficients of ``Z_ij - CL_ij``.

        ``sp`` and ``sq`` are ``sqrt(mode_pos)`` and ``sqrt(1 - mode_pos)``.
        Also returns, per factor, which piece of its quantile each segment
        uses.
        """
        L = self.L
        pos = L > 0  # (p, m)
        c = c[..., None, :]
        r = r[..., None, :]
        sp = sp[..., None, :]
        sq = sq[..., None, :]
        pi = sp**2
        tau = np.where(pos, pi, 1.0 - pi)  # breakpoint of each term in CL_j
        zt = self.zt[idx][..., None]
        shape = np.broadcast_shapes(tau.shape[:-1], zt.shape[:-1])
        bp = np.concatenate(
            [
                np.zeros(shape + (1,)),
                np.broadcast_to(zt, shape + (1,)),
                np.broadcast_to(tau, shape + (self.m,)),
                np.ones(shape + (1,)),
            ],
            axis=-1,
        )
        bp = np.sort(bp, axis=-1)
        mid = (bp[..., :-1] + bp[..., 1:]) / 2.0  # (..., p, S)

        # observed side
        zl = self.zl[idx][..., None]
        zu = self.zu[idx][..., None]
        zc = self.zc[idx][..., None]
        left = mid <= zt
        zero = np.zeros_like(mid)
        coef = np.stack(
            [
                np.where(left, zl, zu),
                zero,
                np.where(left, self.z_left[idx][..., None], 0.0),
                np.where(left, 0.0, -self.z_right[idx][..., None]),
            ],
            axis=-1,
        )
        coef = np.where(self.z_degenerate[idx][..., None, None], np.stack([zc + zero, zero, zero, zero], axis=-1), coef)

        # combined factor side, one term per factor
        sides = []
        for k in range(self.m):
            lam = L[:, k][:, None]  # (p, 1)
            ck, rk, pk = c[..., k : k + 1], r[..., k : k + 1], pi[..., k : k + 1]
            s_left = 2.0 * rk * sp[..., k : k + 1]
            s_right = 2.0 * rk * sq[..., k : k + 1]
            # positive loading: Q(t); negative: Q(1 - t) with reflected coefficients
            on_left = np.where(pos[:, k][:, None], mid <= pk, 1.0 - mid <= pk)
            a0 = np.where(on_left, ck - rk, ck + rk)
            sq_t = np.where(pos[:, k][:, None], np.where(on_left, s_left, 0.0), np.where(on_left, 0.0, -s_right))
            sq_1t = np.where(pos[:, k][:, None], np.where(on_left, 0.0, -s_right), np.where(on_left, s_left, 0.0))
            term = np.stack([a0 + zero, zero, sq_t + zero, sq_1t + zero], axis=-1)
            coef = coef - lam[..., None] * term
            sides.append(on_left)
        return bp, coef, sides

    def _tri_distances(self, c, r, pi, idx):
        """Squared Mallows distances ``(..., p)`` between Z_ij and CL_ij by quadrature."""
        bp, coef, _ = self._tri_segments(c, r, np.sqrt(pi), np.sqrt(1.0 - pi), idx)
        return integrate_sq(bp, coef, self.n_nodes)

    def _tri_value_grad(self, x, idx):
        """Objective and analytic gradient in the angular parameterisation.

        The integrand is continuous in ``t``, so moving breakpoints add no
        boundary terms and only the factor quantiles are differentiated.
        """
        c, r, theta = _split(x, self.m, self.model)
        sin, cos = np.sin(theta), np.cos(theta)
        bp, coef, sides = self._tri_segments(c, r, sin, cos, idx)
        st, ct, weight = quadrature_nodes(bp, self.n_nodes)  # (..., p, S, Q)
        diff = np.einsum("...sqk,...sk->...sq", basis_at(st, ct), coef)
        wd = weight * diff
        f = np.sum(self.w * np.sum(wd * diff, axis=(-2, -1)), axis=-1)
        grads = [np.empty(c.shape) for _ in range(3)]
        for k in range(self.m):
            # sqrt(s) and sqrt(1 - s) with s = t (positive loading) or 1 - t
            pos = (self.L[:, k] > 0)[:, None, None]
            rs = np.where(pos, st, ct)
            r1s = np.where(pos, ct, st)
            on_left = sides[k][..., None]
            sk = sin[..., k, None, None, None]
            ck = cos[..., k, None, None, None]
            rk = r[..., k, None, None, None]
            d_r = np.where(on_left, 2.0 * sk * rs - 1.0, 1.0 - 2.0 * ck * r1s)
            d_th = np.where(on_left, 2.0 * rk * ck * rs, 2.0 * rk * sk * r1s)
            scale = -2.0 * self.w * self.L[:, k]
            grads[0][..., k] = np.sum(scale * np.sum(wd, axis=(-2, -1)), axis=-1)
            grads[1][..., k] = np.sum(scale * np.sum(wd * d_r, axis=(-2, -1)), axis=-1)
            grads[2][..., k] = np.sum(scale * np.sum(wd * d_th, axis=(-2, -1)), axis=-1)
        return f, np.concatenate(grads, axis=-1)

    def start(self):
        if self.model is DistributionModel.UNIFORM:
            base = [0.5, 0.5]  # U(0, 1)
        else:
            base = [1.0, 1.0, 0.5]  # Tr(0, 1, 2)
        return np.repeat(np.asarray(base[: self.q]), self.m)

    def clip(self, x):
        return np.clip(x, self.lb, self.ub)


def _to_obs_row(row) -> list[IntervalObservation]:
    return [o if isinstance(o, IntervalObservation) else IntervalObservation(*o) for o in row]


def unit_objective(unit_row: Sequence[IntervalObservation], params: Sequence[ScoreParams], loadings, specific_variances, model) -> float:
    """Weighted sum of squared Mallows distances for one unit.

    This is the reference evaluation: each combination ``CL_j`` is built
    explicitly with :func:`combine`.  The Uniform and Symmetric Triangular
    cases reduce to closed forms because ``CL_j`` stays in the same family
    (center ``sum l c``, half-range ``sum |l| r``); the Triangular case uses
    quadrature.
    """
    model = DistributionModel.parse(model)
    row = _to_obs_row(unit_row)
    L = np.asarray(loadings, dtype=float)
    spec = np.maximum(np.asarray(specific_variances, dtype=float), SPECIFIC_VARIANCE_FLOOR)
    if L.ndim != 2 or L.shape[0] != len(row) or L.shape[1] != len(params) or spec.shape != (len(row),):
        raise DomainError("dimension mismatch between unit, scores, loadings and specific variances")
    total = 0.0
    if model is DistributionModel.TRIANGULAR:
        if any(o.mode is None for o in row) or any(s.mode_pos is None for s in params):
            raise ModelError("the Triangular model requires modes")
        parts = [lift(s.to_observation(), model) for s in params]
        for j, obs in enumerate(row):
            cl = combine(L[j], parts)
            total += mallows_sq_numeric(lift(obs, model), cl) / spec[j]
        return total
    c = np.array([s.center for s in params])
    r = np.array([s.half_range for s in params])
    for j, obs in enumerate(row):
        cc = float(L[j] @ c)
        rr = float(np.abs(L[j]) @ r)
        cl = IntervalObservation(cc - rr, cc + rr)
        total += mallows_sq(obs, cl, model) / spec[j]
    return total


def _descend(fun, x0, bounds, tol, max_iter, callback=None):
    """L-BFGS-B restarted from its own result until a pass gains less than ``tol``.

    A single pass stops on a relative objective change, which is too loose
    when the objective mixes well and poorly scaled directions; restarting
    also clears a stale curvature memory.  Returns ``(x, f, converged)`` with
    ``converged`` false when ``max_iter`` iterations are used up first.
    """
    x = np.asarray(x0, dtype=float)
    f = fun(x)[0]
    used = 0
    while used < max_iter:
        res = minimize(
            fun,
            x,
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            callback=callback,
            options={"maxiter": max_iter - used, "ftol": 1e-14, "gtol": 1e-12, "maxls": 50},
        )
        used += max(int(res.nit), 1)
        gain = f - res.fun
        if res.fun <= f:
            x, f = res.x, float(res.fun)
        if gain < tol:
            return x, f, True
    return x, f, False


def minimize_unit(problem: _UnitProblem, i: int, x0, cfg: OptConfig):
    """Bounded local minimisation for one unit.

    Returns ``(x_best, f_best, converged, trace)`` where ``trace`` lists the
    objective at the starting point and after every optimiser iteration.
    """
    bounds = list(zip(problem.lb, problem.ub))
    x0 = problem.clip(np.asarray(x0, dtype=float))
    trace = [float(problem.values(x0, i))]

    def fun(x):
        f, g = problem.values_and_grad(x, i)
        return float(f), np.asarray(g, dtype=float)

    x, f, ok = _descend(fun, x0, bounds, cfg.tol, cfg.max_iter, lambda xk: trace.append(float(problem.values(xk, i))))
    return x, f, ok, trace


def _pack(problem: _UnitProblem, X, method, converged, unit_f, penalty_term=0.0, penalty=0.0, restarts=0):
    c, r, pi = _split(problem.decode(X), problem.m, problem.model)
    return FactorScores(
        centers=np.array(c),
        half_ranges=np.array(r),
        mode_pos=None if pi is None else np.array(pi),
        model=problem.model,
        method=method,
        objective=float(np.sum(unit_f)),
        unit_objectives=np.asarray(unit_f, dtype=float),
        converged=np.asarray(converged, dtype=bool),
        penalty_term=float(penalty_term),
        penalty=float(penalty),
        restarts_used=restarts,
    )


def estimate_bartlett(data_std: IntervalDataset, factor_model: FactorModel, model, cfg: OptConfig | None = None) -> FactorScores:
    """Bartlett-style scores: one bounded local minimisation per unit.

    Every unit starts from U(0, 1) (Uniform) or Tr(0, 1, 2) (triangular laws)
    for each factor.  Units whose optimiser hits the iteration limit are
    flagged in ``converged``; their best iterate is kept.
    """
    cfg = cfg or OptConfig()
    problem = _UnitProblem(data_std, factor_model, model)
    x0 = problem.start()
    X = np.empty((problem.n, problem.dim))
    f = np.empty(problem.n)
    ok = np.empty(problem.n, dtype=bool)
    for i in range(problem.n):
        X[i], f[i], ok[i], _ = minimize_unit(problem, i, x0, cfg)
    return _pack(problem, X, "bartlett", ok, f)


# -- Anderson-Rubin -------------------------------------------------------------


def _score_moments(problem: _UnitProblem, X):
    """Per-score means and standard deviations plus their parameter derivatives."""
    m = problem.m
    c, r, pi = _split(X, m, problem.model)
    if problem.model is DistributionModel.TRIANGULAR:
        dpi = np.ones_like(pi)
        if problem.angular:
            pi, dpi = np.sin(pi) ** 2, np.sin(2.0 * pi)
        off = 2.0 * pi - 1.0
        g = np.sqrt(off**2 / 18.0 + 1.0 / 6.0)
        mu = c + r * off / 3.0
        sd = r * g
        dmu = (np.ones_like(c), off / 3.0, 2.0 * r / 3.0 * dpi)
        dsd = (np.zeros_like(c), g, r * off / (9.0 * g) * dpi)
    else:
        k = math.sqrt(_KAPPA[problem.model])
        mu, sd = c, r * k
        dmu = (np.ones_like(c), np.zeros_like(c))
        dsd = (np.zeros_like(c), np.full_like(c, k))
    return mu, sd, dmu, dsd


def _correlation_penalty(problem: _UnitProblem, X):
    """``sum_{k<k'} corr^2`` (Cov3) over the score columns, with its gradient."""
    n, m = X.shape[0], problem.m
    mu, sd, dmu, dsd = _score_moments(problem, X)
    d = mu - mu.mean(axis=0)
    cov = (sd.T @ sd + d.T @ d) / n
    var = np.maximum(np.diag(cov), 1e-300)
    denom = np.sqrt(np.outer(var, var))
    rho = cov / denom
    mask = np.triu(np.ones((m, m), dtype=bool), 1)
    value = float(np.sum(rho[mask] ** 2))
    # d(value)/d mu_ik and d sd_ik
    A = 2.0 * rho * mask
    A = A + A.T  # symmetric weights, zero diagonal
    B = A * rho  # weights for the variance terms
    g_mu = (d @ (A / denom)) / n - (d / var) * np.sum(B, axis=0) / n
    g_sd = (sd @ (A / denom)) / n - (sd / var) * np.sum(B, axis=0) / n
    grad = np.concatenate([g_mu * a + g_sd * b for a, b in zip(dmu, dsd)], axis=1)
    return value, grad, rho


def _ar_local_search(problem: _UnitProblem, X0, penalty, cfg: OptConfig):
    n, dim = problem.n, problem.dim
    idx = np.arange(n)
    bounds = list(zip(np.tile(problem.lb, n), np.tile(problem.ub, n)))
    best = {"f": math.inf, "x": None}

    def fun(flat, pen):
        X = flat.reshape(n, dim)
        f_units, g_units = problem.values_and_grad(X, idx)
        pv, pg, _ = _correlation_penalty(problem, X)
        total = float(np.sum(f_units) + pen * pv)
        if pen == penalty and total < best["f"]:
            best["f"], best["x"] = total, X.copy()
        return total, (g_units + pen * pg).ravel()

    x = problem.clip(X0).ravel()
    # continuation on the penalty weight keeps the final solve well conditioned
    schedule = (1e-2 * penalty, penalty)
    ok = True
    for pen in schedule:
        x, _, ok = _descend(lambda v, pen=pen: fun(v, pen), x, bounds, cfg.tol, cfg.max_iter * 4)
    fun(x, penalty)
    return best["x"], best["f"], ok


def _ar_total(problem, X, penalty):
    f_units = problem.values(X, np.arange(problem.n))
    pv, _, _ = _correlation_penalty(problem, X)
    return float(np.sum(f_units) + penalty * pv), f_units, pv


def estimate_anderson_rubin(
    data_std: IntervalDataset,
    factor_model: FactorModel,
    model,
    cfg: OptConfig | None = None,
    bartlett: FactorScores | None = None,
) -> FactorScores:
    """Anderson-Rubin-style scores: Bartlett objective plus a correlation penalty.

    Minimises ``sum_i unit_objective_i + penalty * sum_{k<k'} corr_kk'^2``
    jointly over all units, starting from the Bartlett solution and then from
    ``cfg.restarts`` Gaussian perturbations of it (centers and half-ranges).
    The best solution wins; ties keep the earliest start.
    """
    cfg = cfg or OptConfig()
    problem = _UnitProblem(data_std, factor_model, model, angular=True)
    n = problem.n
    if n < 2:
        raise DomainError("at least two units are needed to correlate scores")
    penalty = cfg.penalty_for(n)
    if bartlett is None:
        bartlett = estimate_bartlett(data_std, factor_model, model, cfg)
    parts = [bartlett.centers, bartlett.half_ranges]
    if problem.model is DistributionModel.TRIANGULAR:
        parts.append(bartlett.mode_pos)
    X0 = problem.encode(np.concatenate(parts, axis=1))

    best_total, _, best_pv = _ar_total(problem, X0, penalty)
    best_X, best_ok = X0, True
    if problem.m > 1 and best_pv > 0.0:
        starts = [X0]
        children = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
        for child in children:
            rng = np.random.default_rng(child)
            Xs = X0.copy()
            Xs[:, : 2 * problem.m] += rng.normal(0.0, cfg.perturbation_sd, size=(n, 2 * problem.m))
            starts.append(problem.clip(Xs))
        for Xs in starts:
            X, total, ok = _ar_local_search(problem, Xs, penalty, cfg)
            if total < best_total:
                best_total, best_X, best_ok = total, X, ok
    _, f_units, pv = _ar_total(problem, best_X, penalty)
    return _pack(
        problem,
        best_X,
        "anderson-rubin",
        np.array(best_ok),
        f_units,
        penalty_term=penalty * pv,
        penalty=penalty,
        restarts=cfg.restarts if problem.m > 1 else 0,
    )


def score_correlations(scores: FactorScores) -> np.ndarray:
    """Cov3 correlation matrix between the factor-score columns.

    Raises
    ------
    DegenerateVariableError
        If every unit has the same score distribution on some factor.
    """
    if scores.n < 2:
        raise DomainError("at least two units are needed to correlate scores")
    summary = correlation_matrix(scores.to_dataset(), scores.model, CovDef.COV3)
    return summary.correlation
