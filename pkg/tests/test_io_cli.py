import json

import numpy as np
import pytest
from click.testing import CliRunner
from conftest import datasets
from hypothesis import HealthCheck, given, settings

from intervalfa import IntervalDataset, correlation_matrix
from intervalfa.cli import EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_OK, main, run_pipeline
from intervalfa.errors import InputFormatError
from intervalfa.io import dumps_json, emit_csv, ingest_csv
from intervalfa.plot import factor_plane_svg

PAIRS = """unit,price.lower,price.upper,speed.lower,speed.upper
a,10,12,100,120
b,8,9.5,90,130
c,15,20,140,160
d,11,11,110,125
e,9,14,95,100
"""

TRIPLETS = """price.lower,price.mode,price.upper,speed.lower,speed.mode,speed.upper,weight.lower,weight.mode,weight.upper
10,11,12,100,105,120,1.0,1.1,1.5
8,8.5,9.5,90,120,130,0.9,1.0,1.0
15,19,20,140,150,160,1.6,1.8,2.0
11,11,11,110,111,125,1.2,1.2,1.4
9,13,14,95,97,100,1.0,1.3,1.3
12,12.5,16,118,130,150,1.4,1.5,1.9
"""


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def correlated_csv(tmp_path, n=40, seed=0):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=(n, 2))
    centers = np.hstack([f[:, :1] + 0.4 * rng.normal(size=(n, 3)), f[:, 1:] + 0.4 * rng.normal(size=(n, 3))])
    half = rng.uniform(0.05, 0.5, size=centers.shape)
    mode = centers + rng.uniform(-1, 1, size=centers.shape) * half
    data = IntervalDataset(centers - half, centers + half, mode, names=[f"v{j}" for j in range(6)])
    path = tmp_path / "corr.csv"
    emit_csv(data, path)
    return path


# -- ingestion -----------------------------------------------------------------------


def test_ingest_pairs(tmp_path):
    data = ingest_csv(write(tmp_path, PAIRS))
    assert data.names == ("price", "speed")
    assert data.units == ("a", "b", "c", "d", "e")
    assert not data.has_mode
    np.testing.assert_array_equal(data.lower[:, 0], [10, 8, 15, 11, 9])
    np.testing.assert_array_equal(data.upper[:, 1], [120, 130, 160, 125, 100])


def test_ingest_triplets(tmp_path):
    path = write(tmp_path, TRIPLETS)
    data = ingest_csv(path)
    assert data.has_mode and data.p == 3 and data.n == 6
    assert ingest_csv(path, "triplets").has_mode
    assert not ingest_csv(path, "pairs").has_mode
    with pytest.raises(InputFormatError):
        ingest_csv(write(tmp_path, PAIRS, "p.csv"), "triplets")


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("x.lower,x.upper\n1,2\n3,2\n", "row 3"),
        ("x.lower,x.upper\n1,2\n3\n", "row 3"),
        ("x.lower,x.upper\n1,abc\n", "abc"),
        ("x.lower,x.upper\n1,inf\n", "inf"),
        ("x.lower,x.mode,x.upper\n1,5,2\n", "mode"),
        ("x.lower\n1\n", "x"),
        ("x.lower,x.upper\n", "no data"),
        ("", "empty"),
    ],
)
def test_ingest_errors(tmp_path, text, fragment):
    with pytest.raises(InputFormatError, match=fragment):
        ingest_csv(write(tmp_path, text))


def test_lower_above_upper_names_the_cell(tmp_path):
    with pytest.raises(InputFormatError) as err:
        ingest_csv(write(tmp_path, "x.lower,x.upper,y.lower,y.upper\n1,2,0,1\n1,2,5,4\n"))
    assert err.value.row == 3 and err.value.column == "y"


def test_mixed_mode_columns_fall_back_to_pairs(tmp_path):
    data = ingest_csv(write(tmp_path, "x.lower,x.mode,x.upper,y.lower,y.upper\n0,1,2,0,1\n1,1,3,2,4\n"))
    assert not data.has_mode


@settings(suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(datasets())
def test_emit_ingest_round_trip(tmp_path, data):
    path = tmp_path / "round.csv"
    emit_csv(data, path)
    back = ingest_csv(path)
    np.testing.assert_array_equal(back.lower, data.lower)
    np.testing.assert_array_equal(back.upper, data.upper)
    if data.has_mode:
        np.testing.assert_array_equal(back.mode, data.mode)
    assert back.names == data.names


def test_json_is_stable_and_parseable():
    obj = {"b": np.float64(0.1), "a": [1, np.int64(2)], "m": np.eye(2), "nan": float("nan"), "ok": np.bool_(True)}
    text = dumps_json(obj)
    assert text == dumps_json(obj)
    back = json.loads(text)
    assert list(back) == ["b", "a", "m", "nan", "ok"]
    assert back["b"] == 0.1 and back["m"] == [[1.0, 0.0], [0.0, 1.0]] and back["nan"] is None


# -- plot ----------------------------------------------------------------------------


def test_svg_rectangles_and_segments():
    lower = np.array([[0.0, 0.0], [1.0, 2.0], [3.0, -1.0]])
    upper = np.array([[1.0, 1.0], [1.0, 3.0], [3.0, -1.0]])
    svg = factor_plane_svg(lower, upper, labels=["a", "b", "c"])
    assert svg.startswith("<svg") or svg.startswith("<?xml")
    assert 'fill-opacity="0.4"' in svg
    assert svg.count('class="unit"') == 3
    assert "<line class=\"unit\"" in svg


# -- pipeline and CLI ---------------------------------------------------------------


def test_run_pipeline_stats_only(tmp_path):
    data = ingest_csv(write(tmp_path, PAIRS))
    report = run_pipeline(data, "uniform", "cov3")
    np.testing.assert_array_equal(report.summary.correlation, correlation_matrix(data, "uniform", "cov3").correlation)
    assert report.model_fit is None and report.scores is None and report.converged


def test_cli_stats(tmp_path):
    path = write(tmp_path, PAIRS)
    out = tmp_path / "out"
    res = CliRunner().invoke(main, ["stats", str(path), "--out", str(out)])
    assert res.exit_code == EXIT_OK, res.output
    report = json.loads((out / "report.json").read_text())
    assert report["summary"]["model"] == "uniform" and report["summary"]["covdef"] == "cov3"
    assert report["factor_model"] is None
    R = np.array(report["summary"]["correlation"])
    np.testing.assert_allclose(R, correlation_matrix(ingest_csv(path), "uniform", "cov3").correlation, rtol=1e-15)
    assert (out / "timings.json").exists()


def test_cli_fit_triangular_paf(tmp_path):
    out = tmp_path / "out"
    res = CliRunner().invoke(main, ["fit", str(write(tmp_path, TRIPLETS)), "--model", "tri", "--extract", "paf", "--factors", "1", "--out", str(out)])
    assert res.exit_code in (EXIT_OK, EXIT_NOT_CONVERGED), res.output
    report = json.loads((out / "report.json").read_text())
    fm = report["factor_model"]
    assert fm["method"] == "paf" and fm["n_factors"] == 1
    assert len(fm["loadings"]) == 3
    lines = (out / "loadings.csv").read_text().splitlines()
    assert lines[0] == "variable,F1,communality,specific_variance" and len(lines) == 4


def test_cli_scores_anderson_rubin(tmp_path):
    out = tmp_path / "out"
    args = ["scores", str(correlated_csv(tmp_path)), "--scores", "anderson-rubin", "--factors", "2", "--restarts", "2", "--out", str(out)]
    res = CliRunner().invoke(main, args)
    assert res.exit_code == EXIT_OK, res.output
    report = json.loads((out / "report.json").read_text())
    sc = report["scores"]
    assert sc["method"] == "anderson-rubin"
    assert sc["max_abs_correlation"] is not None
    assert len(sc["score_means"]) == 2 and len(sc["score_variances"]) == 2
    scores = ingest_csv(out / "scores.csv")
    assert scores.n == 40 and scores.p == 2 and scores.has_mode
    assert "<svg" in (out / "factors.svg").read_text()
    assert sc["max_abs_correlation"] <= 0.01


def test_cli_synth_case_three(tmp_path):
    out = tmp_path / "out"
    res = CliRunner().invoke(main, ["synth", "--case", "3", "--seed", "7", "--out", str(out)])
    assert res.exit_code == EXIT_OK, res.output
    report = json.loads((out / "report.json").read_text())
    assert report["case"] == {"id": 3, "factor_count": 2, "expected_factor_count": 2}
    data = ingest_csv(out / "data.csv")
    assert data.n == 100 and data.p == 10


def test_cli_input_errors(tmp_path):
    runner = CliRunner()
    pairs = write(tmp_path, PAIRS)
    res = runner.invoke(main, ["fit", str(pairs), "--model", "tri", "--out", str(tmp_path / "o")])
    assert res.exit_code == EXIT_INPUT
    res = runner.invoke(main, ["stats", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "o")])
    assert res.exit_code == EXIT_INPUT
    bad = write(tmp_path, "x.lower,x.upper\n2,1\n", "bad.csv")
    res = runner.invoke(main, ["stats", str(bad), "--out", str(tmp_path / "o")])
    assert res.exit_code == EXIT_INPUT
    res = runner.invoke(main, ["fit", str(pairs), "--factors", "two", "--out", str(tmp_path / "o")])
    assert res.exit_code == EXIT_INPUT


def test_cli_degenerate_variable_is_numeric_failure(tmp_path):
    path = write(tmp_path, "x.lower,x.upper,y.lower,y.upper\n1,1,0,1\n1,1,2,3\n")
    res = CliRunner().invoke(main, ["stats", str(path), "--out", str(tmp_path / "o")])
    assert res.exit_code == 3


def test_cli_report_is_byte_identical(tmp_path):
    path = correlated_csv(tmp_path, n=25, seed=3)
    texts = []
    for k in range(2):
        out = tmp_path / f"out{k}"
        args = ["scores", str(path), "--scores", "anderson-rubin", "--restarts", "1", "--seed", "5", "--out", str(out)]
        CliRunner().invoke(main, args)
        texts.append(((out / "report.json").read_bytes(), (out / "scores.csv").read_bytes()))
    assert texts[0] == texts[1]
