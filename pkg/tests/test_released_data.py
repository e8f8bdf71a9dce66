# -*- coding: utf-8 -*-

"""
Checks against the released datasets. Every test skips unless HD_DATA_DIR names a directory holding the
files it needs:

    meeting_minutes.csv  press_conference.csv  speech.csv           annotated target sentences
    meeting_minutes-split.csv  ...                                  annotated split sentences
    meeting_minutes-labeled.csv  ...                                full filtered corpora with predicted_label
    cpi.csv  ppi.csv  treasury.csv  qqq.csv                         FRED / treasury / market exports
    raw/                                                            raw text exports with sidecars
"""

import datetime
from pathlib import Path

import pytest

from hawkdove.backtest import buy_and_hold, load_price_csv, run_strategy, ShortConvention
from hawkdove.core import startup_environment
from hawkdove.corpus import concat_corpora, DocumentKind, ingest_raw_directory, ingest_sentence_csv
from hawkdove.econometrics import correlate, load_econ_csv, load_treasury_csv, regress_yields, yoy_percent_change
from hawkdove.evaluation import seed_suite
from hawkdove.lexicon_filter import filter_corpus, filter_speech_titles
from hawkdove.measure import measure_series
from hawkdove.splitter import split_corpus
from hawkdove.stance_rules import RuleBasedSource

KINDS = (DocumentKind.MeetingMinutes, DocumentKind.PressConference, DocumentKind.Speech)
MATURITIES = ["3m", "1y", "10y"]


def _data_file(name: str) -> Path:
    root = startup_environment.get("DATA_DIR")
    if not root:
        pytest.skip("HD_DATA_DIR not set")
    path = Path(root) / name
    if not path.exists():
        pytest.skip(f"{path} not available")
    return path


def _inflation():
    return {name: yoy_percent_change(load_econ_csv(_data_file(f"{name.lower()}.csv"), name))
            for name in ("CPI", "PPI")}


def _labeled_series(kind: DocumentKind):
    corpus = ingest_sentence_csv(_data_file(f"{kind.slug}-labeled.csv"), kind)
    return measure_series(corpus, kind)


@pytest.mark.parametrize("kind, before, after", [
    (DocumentKind.MeetingMinutes, 1070, 1132),
    (DocumentKind.PressConference, 315, 322),
    (DocumentKind.Speech, 994, 1026),
])
def test_split_counts(kind, before, after):
    corpus = ingest_sentence_csv(_data_file(f"{kind.slug}.csv"), kind)
    _, report = split_corpus(corpus)
    assert report.before_count == before
    assert report.after_count == pytest.approx(after, rel=0.01)


def test_rule_based_benchmark_on_combined_split():
    corpora = [ingest_sentence_csv(_data_file(f"{kind.slug}-split.csv"), kind) for kind in KINDS]
    result = seed_suite(concat_corpora(corpora), RuleBasedSource())
    assert result.mean_f1 == pytest.approx(0.5165, abs=0.04)


def test_minutes_correlate_with_next_cpi():
    series = _labeled_series(DocumentKind.MeetingMinutes)
    row = correlate(series, _inflation())
    assert row.results["CPI"].r == pytest.approx(0.54, abs=0.06)
    assert row.results["CPI"].p_value < 1e-6
    assert row.avg_delay_days == pytest.approx(29.78, abs=1.0)


@pytest.mark.parametrize("kind", KINDS)
def test_yield_betas_positive(kind):
    results = regress_yields(_labeled_series(kind), load_treasury_csv(_data_file("treasury.csv")), MATURITIES)
    assert {m: r.beta > 0 for m, r in results.items()} == {m: True for m in MATURITIES}


def test_minutes_one_year_beta_above_ten_year():
    results = regress_yields(_labeled_series(DocumentKind.MeetingMinutes),
                             load_treasury_csv(_data_file("treasury.csv")), MATURITIES)
    assert results["1y"].beta > results["10y"].beta


def test_buy_and_hold_return():
    prices = load_price_csv(_data_file("qqq.csv"))
    ledger = buy_and_hold(prices, datetime.date(2011, 4, 27), datetime.date(2022, 9, 21))
    assert ledger.final_return_pct == pytest.approx(509.89, rel=0.03)


def test_strategy_return():
    prices = load_price_csv(_data_file("qqq.csv"))
    signals = _labeled_series(DocumentKind.PressConference)
    returns = [run_strategy(signals, prices, datetime.date(2022, 9, 21), c).final_return_pct
               for c in ShortConvention]
    best = min(returns, key=lambda r: abs(r - 673.29))
    assert best == pytest.approx(673.29, rel=0.10)


def test_raw_corpus_statistics():
    raw = ingest_raw_directory(_data_file("raw"))
    _, minutes = filter_corpus(raw.of_kind(DocumentKind.MeetingMinutes))
    assert minutes.kept == pytest.approx(20618, rel=0.02)

    _, titles = filter_speech_titles(raw.of_kind(DocumentKind.Speech))
    assert len(titles.kept_ids) == pytest.approx(201, abs=5)
