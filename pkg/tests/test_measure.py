# -*- coding: utf-8 -*-

import datetime

import pytest

from hawkdove.corpus import Corpus, DocumentKind, StanceLabel
from hawkdove.measure import (document_measure, load_series, MeasureError, MeasureFileError, MeasurePoint,
                              measure_series, series_frame)
from hawkdove.core.artifacts import write_artifact

D, H, N = StanceLabel.Dovish, StanceLabel.Hawkish, StanceLabel.Neutral


def _labeled(make_document, doc_id, labels, **kwargs):
    return make_document(doc_id, [f"Sentence {i}." for i in range(len(labels))], predicted=labels, **kwargs)


class TestDocumentMeasure:
    def test_formula(self, make_document):
        point = document_measure(_labeled(make_document, "d", [H, H, H, D, N, N]))
        assert (point.n_hawkish, point.n_dovish, point.n_total) == (3, 1, 6)
        assert point.value == pytest.approx(1 / 3)

    def test_extremes_and_balance(self, make_document):
        assert document_measure(_labeled(make_document, "d", [H, H])).value == 1.0
        assert document_measure(_labeled(make_document, "d", [D, D, D])).value == -1.0
        assert document_measure(_labeled(make_document, "d", [H, D, N])).value == 0.0

    def test_empty_document_is_undefined(self, make_document):
        point = document_measure(make_document("d", []))
        assert not point.defined
        assert point.value is None

    def test_unlabeled_sentence(self, make_document):
        with pytest.raises(MeasureError, match="d:0"):
            document_measure(make_document("d", ["Inflation rose."]))

    def test_antisymmetry(self, make_document):
        labels = [H, D, D, N, H, D, N]
        swapped = [label.flipped() for label in labels]
        a = document_measure(_labeled(make_document, "d", labels))
        b = document_measure(_labeled(make_document, "d", swapped))
        assert b.value == pytest.approx(-a.value)

    def test_scale_invariance(self, make_document):
        labels = [H, D, D, N, H]
        a = document_measure(_labeled(make_document, "d", labels))
        b = document_measure(_labeled(make_document, "d", labels * 2))
        assert b.value == pytest.approx(a.value)

    def test_delay(self, make_document):
        point = document_measure(_labeled(make_document, "d", [H], meeting=datetime.date(2020, 1, 1)))
        assert point.delay_days == 21

    def test_counts_checked(self):
        with pytest.raises(MeasureError):
            MeasurePoint("d", DocumentKind.Speech, datetime.date(2020, 1, 1), 2, 2, 3)


class TestSeries:
    def test_same_day_documents_pooled(self, make_document):
        day = datetime.date(2021, 3, 17)
        # 0.2 over 10 sentences and 0.6 over 30 sentences
        a = _labeled(make_document, "a", [H] * 3 + [D] + [N] * 6, kind=DocumentKind.PressConference, release=day)
        b = _labeled(make_document, "b", [H] * 20 + [D] * 2 + [N] * 8, kind=DocumentKind.PressConference,
                     release=day)
        series = measure_series(Corpus([b, a]))
        assert len(series) == 1
        assert series[0].value == pytest.approx(0.5)
        assert series[0].doc_id == "a+b"
        assert series[0].n_total == 40

    def test_sorted_by_release(self, make_document):
        corpus = Corpus([
            _labeled(make_document, "late", [H], release=datetime.date(2021, 5, 1)),
            _labeled(make_document, "early", [D], release=datetime.date(2021, 2, 1)),
        ])
        assert [p.doc_id for p in measure_series(corpus)] == ["early", "late"]

    def test_kind_filter_and_undefined_points(self, make_document):
        corpus = Corpus([
            _labeled(make_document, "m", [H]),
            _labeled(make_document, "s", [D], kind=DocumentKind.Speech),
            make_document("empty", []),
        ])
        assert [p.doc_id for p in measure_series(corpus, DocumentKind.MeetingMinutes)] == ["m"]
        assert [p.doc_id for p in measure_series(corpus)] == ["m", "s"]

    def test_empty_corpus(self):
        assert measure_series(Corpus()) == []

    def test_written_series_reads_back(self, tmp_path, make_document):
        corpus = Corpus([
            _labeled(make_document, "a", [H, D, N], meeting=datetime.date(2020, 1, 1)),
            _labeled(make_document, "b", [H, H], release=datetime.date(2020, 2, 19)),
        ])
        series = measure_series(corpus)
        path = write_artifact(tmp_path / "mm.csv", series_frame(series))
        assert load_series(path) == series

    def test_bad_file(self, tmp_path, make_document):
        frame = series_frame(measure_series(Corpus([_labeled(make_document, "a", [H])])))
        frame.loc[0, "kind"] = "XX"
        path = write_artifact(tmp_path / "bad.csv", frame)
        with pytest.raises(MeasureFileError, match="row 1"):
            load_series(path)
