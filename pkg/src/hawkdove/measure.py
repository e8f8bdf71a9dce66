# -*- coding: utf-8 -*-

"""
Document-level hawkishness measure and its time series.

    value = (n_hawkish - n_dovish) / n_total

n_total counts every filtered sentence of the document, Neutral ones included.
"""

import datetime
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import pandas as pd

from hawkdove.core import HawkdoveError, InputError
from hawkdove.core.artifacts import read_csv_frame
from hawkdove.core.logger import module_logger
from hawkdove.corpus import Corpus, Document, DocumentKind, StanceLabel

mlogger = module_logger(__name__)

SERIES_COLUMNS = ["date", "kind", "value", "n_hawkish", "n_dovish", "n_total", "doc_id", "meeting_date"]


class MeasureError(HawkdoveError):
    pass


class MeasureFileError(InputError, MeasureError):
    pass


@dataclass(frozen=True)
class MeasurePoint:
    doc_id: str
    kind: DocumentKind
    release_date: datetime.date
    n_hawkish: int
    n_dovish: int
    n_total: int
    meeting_date: Optional[datetime.date] = None

    def __post_init__(self):
        if min(self.n_hawkish, self.n_dovish, self.n_total) < 0:
            raise MeasureError("Negative count in measure point %s" % self.doc_id)
        if self.n_hawkish + self.n_dovish > self.n_total:
            raise MeasureError("Hawkish plus dovish exceed the total in %s" % self.doc_id)

    @property
    def defined(self) -> bool:
        return self.n_total > 0

    @property
    def value(self) -> Optional[float]:
        """None when the document has no filtered sentence."""
        if not self.n_total:
            return None
        return (self.n_hawkish - self.n_dovish) / self.n_total

    @property
    def delay_days(self) -> Optional[int]:
        if self.meeting_date is None:
            return None
        return (self.release_date - self.meeting_date).days


def document_measure(document: Document) -> MeasurePoint:
    n_hawkish = n_dovish = 0
    for s in document.sentences:
        if s.predicted_label is None:
            raise MeasureError("Sentence %s has no predicted label; run classify first" % s.sentence_id)
        if s.predicted_label is StanceLabel.Hawkish:
            n_hawkish += 1
        elif s.predicted_label is StanceLabel.Dovish:
            n_dovish += 1

    return MeasurePoint(document.id, document.kind, document.release_date, n_hawkish, n_dovish,
                        len(document.sentences), document.meeting_date)


def _pool(points: list[MeasurePoint]) -> MeasurePoint:
    if len(points) == 1:
        return points[0]
    # Summing counts is the count-weighted mean of the document values.
    meeting_dates = [p.meeting_date for p in points if p.meeting_date is not None]
    return MeasurePoint(
        "+".join(p.doc_id for p in points),
        points[0].kind,
        points[0].release_date,
        sum(p.n_hawkish for p in points),
        sum(p.n_dovish for p in points),
        sum(p.n_total for p in points),
        min(meeting_dates) if meeting_dates else None,
    )


def measure_series(corpus: Corpus, kind: Optional[DocumentKind] = None) -> list[MeasurePoint]:
    """
    Date-ordered measure points of one document kind (all kinds when None). Documents of the same kind
    released on the same day become one point; documents without filtered sentences are left out.
    """
    groups: dict[tuple[datetime.date, DocumentKind], list[MeasurePoint]] = {}
    for d in corpus:
        if kind is not None and d.kind is not kind:
            continue
        point = document_measure(d)
        if not point.defined:
            mlogger.warning("Document %s has no target sentences, left out of the series", d.id)
            continue
        groups.setdefault((point.release_date, point.kind), []).append(point)

    series = [_pool(sorted(group, key=lambda p: p.doc_id)) for _, group in sorted(groups.items())]
    mlogger.debug("Measure series %s: %d points", kind.name if kind else "all", len(series))
    return series


def series_frame(series: Iterable[MeasurePoint]) -> pd.DataFrame:
    rows = [{
        "date": p.release_date.isoformat(),
        "kind": p.kind.code,
        "value": p.value,
        "n_hawkish": p.n_hawkish,
        "n_dovish": p.n_dovish,
        "n_total": p.n_total,
        "doc_id": p.doc_id,
        "meeting_date": p.meeting_date.isoformat() if p.meeting_date else "",
    } for p in series]
    return pd.DataFrame(rows, columns=SERIES_COLUMNS)


def load_series(path: Union[str, Path]) -> list[MeasurePoint]:
    """Reads a series written with series_frame back into measure points."""
    path = Path(path)
    frame = read_csv_frame(path)
    missing = [c for c in SERIES_COLUMNS if c not in frame.columns]
    if missing:
        raise MeasureFileError("%s: missing columns %s" % (path, ", ".join(missing)))

    series = []
    for row_no, rec in enumerate(frame.to_dict("records"), start=1):
        try:
            series.append(MeasurePoint(
                rec["doc_id"],
                DocumentKind.parse(rec["kind"]),
                datetime.date.fromisoformat(rec["date"]),
                int(rec["n_hawkish"]),
                int(rec["n_dovish"]),
                int(rec["n_total"]),
                datetime.date.fromisoformat(rec["meeting_date"]) if rec["meeting_date"] else None,
            ))
        except (ValueError, HawkdoveError) as e:
            raise MeasureFileError("%s: row %d: %s" % (path, row_no, e)) from None
    return series
