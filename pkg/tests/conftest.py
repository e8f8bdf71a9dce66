# -*- coding: utf-8 -*-

import datetime
import json
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd
import pytest

from hawkdove.corpus import Corpus, Document, DocumentKind, Sentence, StanceLabel

HAWKISH = "Inflation is rising quickly."
DOVISH = "Inflation declined this quarter."
NEUTRAL = "Employment data was reviewed."
OFF_TOPIC = "The committee met in Washington."


def _document(doc_id: str, texts: Sequence[str], kind: DocumentKind = DocumentKind.MeetingMinutes,
              release: datetime.date = datetime.date(2020, 1, 22), meeting: Optional[datetime.date] = None,
              title: Optional[str] = None, gold: Optional[Sequence[StanceLabel]] = None,
              predicted: Optional[Sequence[StanceLabel]] = None) -> Document:
    sentences = tuple(
        Sentence(doc_id, i, text, gold[i] if gold else None, None, predicted[i] if predicted else None)
        for i, text in enumerate(texts)
    )
    return Document(doc_id, kind, release, sentences, meeting, title)


@pytest.fixture
def make_document():
    return _document


@pytest.fixture
def write_csv(tmp_path):
    def write(name: str, rows: list[dict]) -> Path:
        path = tmp_path / name
        pd.DataFrame(rows).to_csv(path, index=False)
        return path
    return write


@pytest.fixture
def toy_corpus() -> Corpus:
    return Corpus([_document("d1", [DOVISH, HAWKISH, NEUTRAL])])


def _sentence_rows(doc_id: str, release: datetime.date, texts_and_labels, meeting=None, title=None) -> list[dict]:
    rows = []
    for i, (text, label) in enumerate(texts_and_labels):
        rows.append({
            "doc_id": doc_id,
            "release_date": release.isoformat(),
            "meeting_date": meeting.isoformat() if meeting else "",
            "title": title or "",
            "sentence_index": i,
            "text": text,
            "label": int(label),
        })
    return rows


def _stance_mix(n_hawkish: int, n_dovish: int):
    mix = [(HAWKISH, StanceLabel.Hawkish)] * n_hawkish + [(DOVISH, StanceLabel.Dovish)] * n_dovish
    return mix + [(NEUTRAL, StanceLabel.Neutral), (OFF_TOPIC, StanceLabel.Neutral)]


@pytest.fixture
def pipeline_inputs(tmp_path) -> dict[str, Path]:
    """
    A small but complete set of inputs: three sentence CSVs, CPI/PPI index levels, daily yields and prices.
    """
    data = tmp_path / "data"
    data.mkdir()

    mm_rows = []
    for i in range(6):
        release = datetime.date(2021, 1 + i, 20)
        mm_rows += _sentence_rows(f"mm-{i}", release, _stance_mix(i, 5 - i),
                                  meeting=release - datetime.timedelta(days=21))
    pd.DataFrame(mm_rows).to_csv(data / "mm.csv", index=False)

    pc_rows = []
    pc_dates = [datetime.date(2021, 2, 3), datetime.date(2021, 3, 17), datetime.date(2021, 4, 28),
                datetime.date(2021, 6, 16)]
    for i, release in enumerate(pc_dates):
        mix = _stance_mix(3, 1) if i % 2 == 0 else _stance_mix(1, 3)
        pc_rows += _sentence_rows(f"pc-{i}", release, mix)
    pd.DataFrame(pc_rows).to_csv(data / "pc.csv", index=False)

    sp_rows = []
    sp_titles = ["Inflation Outlook", "Monetary Policy and the Economy", "Remarks on Growth", "Opening Remarks"]
    for i, title in enumerate(sp_titles):
        release = datetime.date(2021, 2 + i, 10)
        sp_rows += _sentence_rows(f"sp-{i}", release, _stance_mix(i + 1, 1), title=title)
    pd.DataFrame(sp_rows).to_csv(data / "sp.csv", index=False)

    months = pd.date_range("2020-01-01", "2021-12-01", freq="MS")
    k = np.arange(len(months))
    cpi = np.where(k < 12, 100.0, 100.0 + 0.3 * (k - 11) ** 2)
    ppi = np.where(k < 12, 50.0 + 0.1 * k, 52.0 + 0.05 * (k - 11) ** 3)
    pd.DataFrame({"date": months.strftime("%Y-%m-%d"), "value": cpi}).to_csv(data / "cpi.csv", index=False)
    pd.DataFrame({"date": months.strftime("%Y-%m-%d"), "value": ppi}).to_csv(data / "ppi.csv", index=False)

    days = pd.bdate_range("2021-01-04", "2021-07-30")
    t = np.arange(len(days))
    pd.DataFrame({
        "date": days.strftime("%Y-%m-%d"),
        "yield_3m": 0.05 + 0.001 * t,
        "yield_1y": 0.10 + 0.002 * t + 0.01 * np.sin(t),
        "yield_10y": 1.00 + 0.004 * t,
    }).to_csv(data / "treasury.csv", index=False)
    pd.DataFrame({
        "date": days.strftime("%Y-%m-%d"),
        "adjusted_close": 300.0 + 10.0 * np.sin(t / 7.0) + 0.2 * t,
    }).to_csv(data / "qqq.csv", index=False)

    return {
        "MM": data / "mm.csv",
        "PC": data / "pc.csv",
        "SP": data / "sp.csv",
        "cpi": data / "cpi.csv",
        "ppi": data / "ppi.csv",
        "treasury": data / "treasury.csv",
        "prices": data / "qqq.csv",
    }


@pytest.fixture
def config_file(tmp_path, pipeline_inputs) -> Path:
    config = {
        "corpora": {k: str(pipeline_inputs[k]) for k in ("MM", "PC", "SP")},
        "cpi": str(pipeline_inputs["cpi"]),
        "ppi": str(pipeline_inputs["ppi"]),
        "treasury": str(pipeline_inputs["treasury"]),
        "prices": str(pipeline_inputs["prices"]),
        "output_dir": str(tmp_path / "out"),
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(config, indent=2), encoding="utf8")
    return path
