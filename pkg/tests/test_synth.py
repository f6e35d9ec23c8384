import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from intervalfa import (
    DomainError,
    NumericalError,
    correlation_matrix,
)
from intervalfa.synth import (
    EXPECTED_FACTOR_COUNTS,
    MIN_EIGENVALUE,
    BlockSpec,
    ModePolicy,
    SynthConfig,
    case_spec,
    cholesky_upper,
    generate_block_correlation,
    generate_dataset,
    reference_matrices,
    run_case_experiment,
)


@st.composite
def block_specs(draw):
    blocks = []
    for _ in range(draw(st.integers(1, 3))):
        lo = draw(st.floats(-0.3, 0.95))
        hi = draw(st.floats(lo, 0.99))
        blocks.append((draw(st.integers(1, 4)), (lo, hi)))
    clo = draw(st.floats(-0.3, 0.3))
    return BlockSpec(tuple(blocks), (clo, draw(st.floats(clo, 0.4))))


# -- cholesky --------------------------------------------------------------------------


def test_cholesky_examples():
    np.testing.assert_array_equal(cholesky_upper(np.eye(3)), np.eye(3))
    U = cholesky_upper([[1.0, 0.5], [0.5, 1.0]])
    np.testing.assert_allclose(U, [[1.0, 0.5], [0.0, np.sqrt(0.75)]], atol=1e-15)


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_cholesky_reconstructs(p, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(p, p))
    R = A @ A.T + p * np.eye(p)
    U = cholesky_upper(R)
    np.testing.assert_array_equal(U, np.triu(U))
    assert np.all(np.diag(U) > 0)
    np.testing.assert_allclose(U.T @ U, R, atol=1e-10 * np.abs(R).max())


def test_cholesky_errors():
    with pytest.raises(NumericalError):
        cholesky_upper([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(DomainError):
        cholesky_upper([[1.0, 0.2], [0.3, 1.0]])


# -- block correlation -------------------------------------------------------------


@given(block_specs(), st.integers(0, 2**32 - 1))
def test_block_correlation_is_valid(spec, seed):
    R = generate_block_correlation(spec, np.random.default_rng(seed))
    assert R.shape == (spec.p, spec.p)
    np.testing.assert_array_equal(R, R.T)
    np.testing.assert_array_equal(np.diag(R), 1.0)
    assert np.linalg.eigvalsh(R).min() >= MIN_EIGENVALUE * (1 - 1e-6)
    np.linalg.cholesky(R)


def test_single_saturated_block_gets_ridge():
    R = generate_block_correlation(BlockSpec(((4, (1.0, 1.0)),)), np.random.default_rng(0))
    assert np.linalg.eigvalsh(R).min() >= MIN_EIGENVALUE * (1 - 1e-6)
    np.testing.assert_allclose(R, 1.0, atol=1e-7)


def test_block_pattern_respected_when_feasible():
    spec = BlockSpec(((3, (0.8, 0.99)), (7, (0.8, 0.99))), (0.1, 0.3))
    R = generate_block_correlation(spec, np.random.default_rng(1))
    lab = spec.labels
    same = (lab[:, None] == lab[None, :]) & ~np.eye(10, dtype=bool)
    cross = lab[:, None] != lab[None, :]
    # eigenvalue repair can move entries slightly outside their ranges
    assert R[same].min() > 0.7
    assert R[cross].max() < 0.4 and R[cross].min() > 0.0


def test_block_spec_validation():
    with pytest.raises(DomainError):
        BlockSpec(((0, (0.5, 0.8)),))
    with pytest.raises(DomainError):
        BlockSpec(((3, (0.8, 0.5)),))
    with pytest.raises(DomainError):
        BlockSpec(((3, (0.5, 1.2)),))
    with pytest.raises(DomainError):
        BlockSpec(())
    assert BlockSpec(((3, (0.5, 0.8)), (2, (0.8, 1.0)))).p == 5


def test_block_spec_from_matrix_spans_entries():
    Rc, _ = reference_matrices(3)
    spec, _ = case_spec(3)
    lab = spec.labels
    for b, (_, (lo, hi)) in enumerate(spec.blocks):
        sel = (lab[:, None] == b) & (lab[None, :] == b) & ~np.eye(lab.size, dtype=bool)
        assert Rc[sel].min() == lo and Rc[sel].max() == hi


# -- datasets --------------------------------------------------------------------------


def test_dataset_determinism():
    spec_c, spec_r = case_spec(4)
    cfg = SynthConfig(30, spec_c, spec_r, seed=9, mode_policy=ModePolicy.RANDOM)
    a, b = generate_dataset(cfg), generate_dataset(cfg)
    np.testing.assert_array_equal(a.lower, b.lower)
    np.testing.assert_array_equal(a.upper, b.upper)
    np.testing.assert_array_equal(a.mode, b.mode)
    c = generate_dataset(SynthConfig(30, spec_c, spec_r, seed=10))
    assert not np.array_equal(a.lower, c.lower)


def test_single_variable_dataset_is_plain_uniform_draws():
    spec = BlockSpec(((1, (0.0, 0.0)),))
    cfg = SynthConfig(2000, spec, spec, seed=2)
    data = generate_dataset(cfg)
    half = (data.upper - data.lower) / 2
    assert half.min() >= 0.1 - 1e-12 and half.max() <= 1.0 + 1e-12
    assert data.center.min() >= 0.0 and data.center.max() <= 15.0
    # U(0.1, 1) half-ranges have mean 0.55
    assert abs(half.mean() - 0.55) < 0.03


@pytest.mark.parametrize("policy", list(ModePolicy))
def test_mode_policies(policy):
    spec_c, spec_r = case_spec(2)
    data = generate_dataset(SynthConfig(20, spec_c, spec_r, seed=0, mode_policy=policy))
    if policy is ModePolicy.NONE:
        assert not data.has_mode
        return
    assert np.all((data.lower <= data.mode) & (data.mode <= data.upper))
    if policy is ModePolicy.CENTER:
        np.testing.assert_allclose(data.mode, data.center, atol=1e-12)


def test_case_one_correlations_are_high():
    spec_c, spec_r = case_spec(1)
    data = generate_dataset(SynthConfig(100, spec_c, spec_r, seed=4))
    R = correlation_matrix(data, "uniform", "cov3").correlation
    off = R[~np.eye(data.p, dtype=bool)]
    assert np.mean((off >= 0.5) & (off <= 1.0)) > 0.9


def test_synth_config_validation():
    spec_c, spec_r = case_spec(1)
    with pytest.raises(DomainError):
        SynthConfig(1, spec_c, spec_r)
    with pytest.raises(DomainError):
        SynthConfig(10, spec_c, BlockSpec(((2, (0.5, 0.8)),)))
    with pytest.raises(DomainError):
        case_spec(7)


# -- experiment ------------------------------------------------------------------------


def test_expected_counts():
    assert [EXPECTED_FACTOR_COUNTS[c] for c in range(1, 7)] == [1, 1, 2, 2, 2, 3]


@pytest.mark.parametrize("case", [1, 6])
def test_small_case_experiment(case):
    res = run_case_experiment(case, "uniform", "pcf", seeds=range(5))
    assert len(res.counts) == 5 and len(res.explained) == 5
    assert res.modal == EXPECTED_FACTOR_COUNTS[case]
    assert 0.0 <= res.agreement <= 1.0
    assert all(0.0 < e <= 1.0 + 1e-12 for e in res.explained)


def test_experiment_requires_seeds():
    with pytest.raises(DomainError):
        run_case_experiment(1, "uniform", "pcf", seeds=[])
