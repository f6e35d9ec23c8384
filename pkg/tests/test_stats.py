import numpy as np
import pytest
from conftest import MODELS, datasets, random_dataset, triples
from hypothesis import given
from hypothesis import strategies as st
from oracles import classical_cov, classical_mean, mc_mixture, sym_cov, sym_mean, sym_var

from intervalfa import (
    CovDef,
    DegenerateVariableError,
    DomainError,
    IntervalDataset,
    IntervalObservation,
    ModelError,
    correlation_matrix,
    covariance,
    covariance_matrix,
    sample_mean,
    sample_variance,
)
from intervalfa.core import moment_arrays

COVDEFS = ("cov1", "cov2", "cov3")


def col(*pairs):
    return [IntervalObservation(*p) for p in pairs]


def as_cells(triples_):
    return [IntervalObservation(l, u, m) for l, u, m in triples_]


# -- examples ---------------------------------------------------------------------


def test_mean_examples():
    assert sample_mean(col((0, 2)), "uniform") == 1.0
    assert sample_mean(col((0, 2, 0.5)), "tri") == pytest.approx(5 / 6, abs=1e-15)
    assert sample_mean(col((0, 2), (2, 6)), "uniform") == 2.5


def test_variance_examples():
    assert sample_variance(col((0, 2)), "uniform") == pytest.approx(1 / 3, abs=1e-15)
    for model in ("uniform", "symtri"):
        assert sample_variance(col((0, 0), (2, 2)), model) == 1.0
    assert sample_variance(col((0, 0, 0), (2, 2, 2)), "tri") == 1.0
    # (1/3 + 4/3)/2 + (1 + 16)/2 - 2.5**2
    assert sample_variance(col((0, 2), (2, 6)), "uniform") == pytest.approx(37 / 12, abs=1e-14)


def test_monte_carlo_examples():
    rng = np.random.default_rng(3)
    x = mc_mixture([(0, 2, None), (2, 6, None)], "uniform", 10**6, rng)
    assert abs(x.mean() - 2.5) < 1e-2 and abs(x.var() - 37 / 12) < 1e-2


def test_covariance_examples():
    a = col((0, 2), (2, 6))
    assert covariance(a, a, "uniform", "cov3") == pytest.approx(37 / 12, abs=1e-14)
    p, q = col((0, 0), (2, 2)), col((1, 1), (5, 5))
    for covdef in COVDEFS:
        assert covariance(p, q, "uniform", covdef) == pytest.approx(2.0, abs=1e-14)
    b = col((1, 3), (0, 2))
    assert covariance(a, b, "uniform", "cov1") == pytest.approx(-0.75, abs=1e-15)
    assert (1 * 2 + 4 * 1) / 2 - 2.5 * 1.5 == -0.75


def test_errors():
    with pytest.raises(DomainError):
        sample_mean([], "uniform")
    with pytest.raises(DomainError):
        sample_variance([], "uniform")
    with pytest.raises(DomainError):
        covariance(col((0, 1)), col((0, 1), (1, 2)), "uniform")
    with pytest.raises(ModelError):
        sample_mean(col((0, 1)), "tri")
    with pytest.raises(ValueError):
        CovDef.parse("cov4")


# -- bounds-form oracles ----------------------------------------------------------


@given(datasets(min_p=2, max_p=2), st.sampled_from(MODELS), st.sampled_from(COVDEFS))
def test_covariance_matches_bounds_forms(data, model, covdef):
    a, b = triples(data, 0), triples(data, 1)
    got = covariance(as_cells(a), as_cells(b), model, covdef)
    scale = max(1.0, float(np.abs(data.lower).max()), float(np.abs(data.upper).max())) ** 2
    assert got == pytest.approx(sym_cov(a, b, model, covdef), abs=1e-12 * scale)


@given(datasets(max_p=1), st.sampled_from(MODELS))
def test_mean_variance_match_bounds_forms(data, model):
    c = triples(data, 0)
    scale = max(1.0, float(np.abs(data.lower).max()), float(np.abs(data.upper).max()))
    assert sample_mean(as_cells(c), model) == pytest.approx(sym_mean(c, model), abs=1e-12 * scale)
    assert sample_variance(as_cells(c), model) == pytest.approx(sym_var(c, model), abs=1e-11 * scale**2)


@pytest.mark.parametrize("model", MODELS)
def test_mixture_oracle_within_three_standard_errors(model):
    rng = np.random.default_rng(11)
    data = random_dataset(rng, 6, 1)
    cells = triples(data, 0)
    x = mc_mixture(cells, model, 10**6, rng)
    obs = as_cells(cells)
    mean, var = sample_mean(obs, model), sample_variance(obs, model)
    n = x.size
    assert abs(x.mean() - mean) < 3 * np.sqrt(var / n)
    # standard error of the sample variance from the fourth central moment
    m4 = np.mean((x - x.mean()) ** 4)
    assert abs(x.var() - var) < 3 * np.sqrt((m4 - var**2) / n)


# -- identities ---------------------------------------------------------------------


@given(datasets(min_p=2), st.sampled_from(MODELS))
def test_cov3_is_within_plus_cov1(data, model):
    mu, var = moment_arrays(data.lower, data.upper, data.resolved_mode(model), model)
    within = np.sqrt(var).T @ np.sqrt(var) / data.n
    cov1 = covariance_matrix(data, model, "cov1")
    cov3 = covariance_matrix(data, model, "cov3")
    scale = max(1.0, float(np.abs(cov3).max()))
    np.testing.assert_allclose(cov3, within + cov1, rtol=0, atol=1e-12 * scale)


@given(datasets(), st.sampled_from(MODELS))
def test_cov2_cov3_diagonals_equal_variance(data, model):
    for j in range(data.p):
        c = data.column(j)
        v = sample_variance(c, model)
        for covdef in ("cov2", "cov3"):
            assert covariance(c, c, model, covdef) == pytest.approx(v, rel=1e-12, abs=1e-12)


@given(datasets())
def test_cov1_diagonal_is_variance_of_centers(data):
    for j in range(data.p):
        centers = list(data.center[:, j])
        got = covariance(data.column(j), data.column(j), "uniform", "cov1")
        assert got == pytest.approx(classical_cov(centers, centers), rel=1e-12, abs=1e-12)


@given(datasets(min_p=2), st.sampled_from(MODELS), st.sampled_from(COVDEFS))
def test_covariance_symmetric(data, model, covdef):
    a, b = data.column(0), data.column(1)
    assert covariance(a, b, model, covdef) == covariance(b, a, model, covdef)


@given(datasets(min_p=2), st.sampled_from(COVDEFS))
def test_symmetric_triangular_equals_triangular_at_center(data, covdef):
    centred = IntervalDataset(data.lower, data.upper, data.center)
    s = covariance_matrix(data, "symtri", covdef)
    t = covariance_matrix(centred, "tri", covdef)
    np.testing.assert_allclose(s, t, rtol=1e-12, atol=1e-12 * max(1.0, float(np.abs(s).max())))
    for j in range(data.p):
        assert sample_mean(data.column(j), "symtri") == pytest.approx(sample_mean(centred.column(j), "tri"), rel=1e-12, abs=1e-12)
        assert sample_variance(data.column(j), "symtri") == pytest.approx(sample_variance(centred.column(j), "tri"), rel=1e-12)


@given(st.lists(st.floats(-100, 100), min_size=2, max_size=10), st.sampled_from(MODELS), st.sampled_from(COVDEFS))
def test_degenerate_data_is_classical(xs, model, covdef):
    ys = [x * 0.5 - 3.0 + (i % 3) for i, x in enumerate(xs)]
    a = [IntervalObservation(x, x, x) for x in xs]
    b = [IntervalObservation(y, y, y) for y in ys]
    assert sample_mean(a, model) == pytest.approx(classical_mean(xs), abs=1e-12 * 100)
    assert sample_variance(a, model) == pytest.approx(classical_cov(xs, xs), rel=1e-12, abs=1e-9)
    assert covariance(a, b, model, covdef) == pytest.approx(classical_cov(xs, ys), rel=1e-12, abs=1e-9)


# -- correlation matrix -------------------------------------------------------------


def test_correlation_identical_columns():
    data = IntervalDataset([[0.0, 0.0], [1.0, 1.0], [3.0, 3.0]], [[1.0, 1.0], [4.0, 4.0], [3.5, 3.5]])
    s = correlation_matrix(data, "uniform", "cov3")
    assert s.correlation[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_correlation_opposite_degenerate_columns():
    data = IntervalDataset([[0.0, 2.0], [2.0, 0.0]], [[0.0, 2.0], [2.0, 0.0]])
    assert correlation_matrix(data, "uniform").correlation[0, 1] == pytest.approx(-1.0, abs=1e-15)


def test_correlation_spreadsheet_recomputation():
    lower = np.array([[1.0, 10.0], [2.5, 8.0], [4.0, 13.0]])
    upper = np.array([[3.0, 12.5], [3.0, 11.0], [7.0, 14.0]])
    s = correlation_matrix(IntervalDataset(lower, upper), "uniform", "cov3")
    n = 3
    means = (lower + upper).sum(axis=0) / (2 * n)
    var = [sum(lower[i, j] ** 2 + lower[i, j] * upper[i, j] + upper[i, j] ** 2 for i in range(n)) / (3 * n) - means[j] ** 2 for j in range(2)]
    within = sum((upper[i, 0] - lower[i, 0]) * (upper[i, 1] - lower[i, 1]) for i in range(n)) / (12 * n)
    between = sum((lower[i, 0] + upper[i, 0]) * (lower[i, 1] + upper[i, 1]) for i in range(n)) / (4 * n) - means[0] * means[1]
    expected = (within + between) / np.sqrt(var[0] * var[1])
    assert s.correlation[0, 1] == pytest.approx(expected, abs=1e-12)
    np.testing.assert_allclose(s.means, means, atol=1e-12)
    np.testing.assert_allclose(s.variances, var, atol=1e-12)


@given(datasets(min_p=2), st.sampled_from(MODELS), st.sampled_from(COVDEFS))
def test_correlation_matrix_invariants(data, model, covdef):
    try:
        s = correlation_matrix(data, model, covdef)
    except DegenerateVariableError:
        return
    R = s.correlation
    np.testing.assert_array_equal(R, R.T)
    assert np.all(np.abs(R) <= 1.0 + 1e-12)
    if covdef != "cov1":
        np.testing.assert_array_equal(np.diag(R), 1.0)
    np.testing.assert_allclose(np.diag(s.covariance)[: data.p] if covdef != "cov1" else s.variances, s.variances, rtol=1e-12, atol=1e-12)


def test_correlation_uses_variance_denominator_for_cov1():
    data = IntervalDataset([[0.0, 1.0], [2.0, 0.0], [5.0, 4.0]], [[2.0, 3.0], [6.0, 1.0], [6.0, 9.0]])
    s = correlation_matrix(data, "uniform", "cov1")
    expected = s.covariance / np.sqrt(np.outer(s.variances, s.variances))
    np.testing.assert_allclose(s.correlation, expected, rtol=1e-14)
    assert np.all(np.diag(s.correlation) < 1.0)


def test_correlation_zero_variance():
    data = IntervalDataset([[1.0, 0.0], [1.0, 1.0]], [[1.0, 1.0], [1.0, 2.0]], names=["x", "y"])
    with pytest.raises(DegenerateVariableError, match="x"):
        correlation_matrix(data, "uniform")
