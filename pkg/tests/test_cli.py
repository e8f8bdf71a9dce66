# -*- coding: utf-8 -*-

import json

import pytest
from typer.testing import CliRunner

from hawkdove import __version__
from hawkdove.cli import build_app
from hawkdove.core.artifacts import read_csv_frame, read_provenance
from hawkdove.core.step import StepManager
from hawkdove.steps import BuiltinSteps

PIPELINE = ("filter", "split", "classify", "eval", "measure", "correlate", "regress", "backtest", "report")


@pytest.fixture
def app():
    return build_app(StepManager([BuiltinSteps]))


@pytest.fixture
def runner():
    return CliRunner()


def _run(runner, app, *args):
    return runner.invoke(app, list(args), catch_exceptions=False)


def test_version(runner, app):
    result = _run(runner, app, "--version")
    assert result.exit_code == 0
    assert f"hawkdove {__version__}" in result.output


def test_filter(runner, app, config_file, tmp_path):
    result = _run(runner, app, "filter", "-c", str(config_file))
    assert result.exit_code == 0, result.output

    out = tmp_path / "out"
    report = json.loads((out / "filter_report.json").read_text(encoding="utf8"))
    # Off-topic sentences go, everything else mentions a panel A1 phrase.
    assert report["total"] == {"kept": 36 + 20 + 12, "dropped": 6 + 4 + 3, "files": 13}
    title_report = json.loads((out / "title_filter_report.json").read_text(encoding="utf8"))
    assert (title_report["kept"], title_report["dropped"]) == (3, 1)
    assert str(out / "filtered" / "meeting_minutes.csv") in result.output


def test_missing_corpus_path(runner, app, tmp_path):
    missing = tmp_path / "nowhere.csv"
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"corpora": {"MM": str(missing)}}), encoding="utf8")
    result = _run(runner, app, "filter", "-c", str(config), "-o", str(tmp_path / "out"))
    assert result.exit_code == 2
    assert str(missing) in result.output


def test_backtest_needs_prices(runner, app, config_file, tmp_path):
    config = json.loads(config_file.read_text(encoding="utf8"))
    del config["prices"]
    config_file.write_text(json.dumps(config), encoding="utf8")
    result = _run(runner, app, "backtest", "-c", str(config_file))
    assert result.exit_code == 2
    assert "prices" in result.output


def test_measure_before_classify(runner, app, config_file):
    assert _run(runner, app, "filter", "-c", str(config_file)).exit_code == 0
    result = _run(runner, app, "measure", "-c", str(config_file))
    assert result.exit_code == 2
    assert "'classify'" in result.output


def test_bad_option_value(runner, app, config_file):
    result = _run(runner, app, "classify", "-c", str(config_file), "--tie-rule", "coin-flip")
    assert result.exit_code == 2
    assert "tie_rule" in result.output


def test_full_pipeline(runner, app, config_file, tmp_path):
    for command in PIPELINE:
        result = _run(runner, app, command, "-c", str(config_file))
        assert result.exit_code == 0, f"{command}: {result.output}"

    out = tmp_path / "out"
    measure = read_csv_frame(out / "measure" / "meeting_minutes.csv")
    assert [float(v) for v in measure["value"]] == pytest.approx([-5 / 6, -3 / 6, -1 / 6, 1 / 6, 3 / 6, 5 / 6])
    assert measure.loc[0, "meeting_date"] == "2020-12-30"

    # Every target sentence is labeled as annotated.
    eval_mm = json.loads((out / "eval" / "mm.json").read_text(encoding="utf8"))
    assert eval_mm["mean_f1"] == pytest.approx(1.0)

    correlation = read_csv_frame(out / "correlation_table.csv")
    assert list(correlation["sample"])[:2] == ["Meeting Minutes (2021-2021)", "Powell (2018-present)"]
    assert float(correlation.loc[0, "CPI_r"]) > 0.9

    regression = read_csv_frame(out / "regression_table.csv")
    assert set(regression["maturity"]) == {"3m", "1y", "10y"}

    summary = json.loads((out / "backtest_summary.json").read_text(encoding="utf8"))
    assert summary["strategy"]["start"] == "2021-02-03"
    assert summary["excess_return_pct"] == pytest.approx(
        summary["strategy"]["final_return_pct"] - summary["buy_and_hold"]["final_return_pct"])

    index = json.loads((out / "figures" / "index.json").read_text(encoding="utf8"))
    assert index["figures"] == ["eval_table.csv", "measure_inflation.csv", "measure_series.csv",
                                "portfolio_value.csv"]
    assert read_provenance(out / "figures" / "measure_series.csv").version == __version__


def test_split_path(runner, app, config_file, tmp_path):
    for command in ("filter", "split", "classify", "measure"):
        assert _run(runner, app, command, "-c", str(config_file), "--use-split").exit_code == 0
    assert (tmp_path / "out" / "split_report.json").is_file()
    assert (tmp_path / "out" / "measure" / "press_conference.csv").is_file()


def test_runs_are_reproducible(runner, app, config_file, tmp_path):
    for name in ("a", "b"):
        for command in PIPELINE:
            result = _run(runner, app, command, "-c", str(config_file), "-o", str(tmp_path / name))
            assert result.exit_code == 0, f"{command}: {result.output}"

    a_files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    b_files = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*") if p.is_file())
    assert a_files == b_files
    for rel in a_files:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes(), rel
