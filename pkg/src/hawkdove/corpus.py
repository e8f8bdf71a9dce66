# -*- coding: utf-8 -*-

"""
FOMC documents, sentences and their ingestion.

Sentence CSV schema (UTF-8, header mandatory):
    doc_id, release_date, sentence_index, text                  required
    meeting_date, title, label, sub_index, predicted_label       optional

Raw text: one <stem>.txt per document plus a sidecar <stem>.meta holding a single line
    id|kind|release_date[|meeting_date][|title]
"""

import datetime
import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field, replace
from enum import IntEnum
from pathlib import Path
from typing import Optional, Union

import pandas as pd

from hawkdove.core import HawkdoveError, InputError
from hawkdove.core.artifacts import Provenance, read_csv_frame, write_artifact
from hawkdove.core.logger import module_logger
from hawkdove.core.rng import Lcg64

mlogger = module_logger(__name__)


class CorpusError(HawkdoveError):
    pass


class CorpusFormatError(InputError, CorpusError):
    """
    Rejects a whole input file. row is the 1-based data row (header excluded) if known.
    """

    def __init__(self, message: str, path: Optional[Path] = None, row: Optional[int] = None):
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        CorpusError.__init__(self, f"{': '.join(where)}: {message}" if where else message)
        self.path = path
        self.row = row


class DocumentKind(IntEnum):
    MeetingMinutes = 1
    PressConference = 2
    Speech = 3

    @property
    def code(self) -> str:
        return _KIND_CODES[self]

    @property
    def slug(self) -> str:
        return _KIND_SLUGS[self]

    @classmethod
    def parse(cls, value: Union[str, "DocumentKind"]) -> "DocumentKind":
        if isinstance(value, DocumentKind):
            return value
        try:
            return _KIND_ALIASES[value.strip().lower().replace("-", "_").replace(" ", "_")]
        except KeyError:
            raise CorpusFormatError("Unknown document kind: %r" % value) from None


_KIND_CODES = {
    DocumentKind.MeetingMinutes: "MM",
    DocumentKind.PressConference: "PC",
    DocumentKind.Speech: "SP",
}

_KIND_SLUGS = {
    DocumentKind.MeetingMinutes: "meeting_minutes",
    DocumentKind.PressConference: "press_conference",
    DocumentKind.Speech: "speech",
}

_KIND_ALIASES = {
    "mm": DocumentKind.MeetingMinutes,
    "minutes": DocumentKind.MeetingMinutes,
    "meeting_minutes": DocumentKind.MeetingMinutes,
    "meetingminutes": DocumentKind.MeetingMinutes,
    "pc": DocumentKind.PressConference,
    "press_conference": DocumentKind.PressConference,
    "press_conferences": DocumentKind.PressConference,
    "pressconference": DocumentKind.PressConference,
    "sp": DocumentKind.Speech,
    "speech": DocumentKind.Speech,
    "speeches": DocumentKind.Speech,
}


class StanceLabel(IntEnum):
    Dovish = 0
    Hawkish = 1
    Neutral = 2

    def flipped(self) -> "StanceLabel":
        if self is StanceLabel.Dovish:
            return StanceLabel.Hawkish
        if self is StanceLabel.Hawkish:
            return StanceLabel.Dovish
        return self

    @classmethod
    def decode(cls, code: Union[str, int]) -> "StanceLabel":
        try:
            return cls(int(code))
        except (TypeError, ValueError):
            raise ValueError("Unknown label code: %r (expected 0, 1 or 2)" % (code, )) from None


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    index: int
    text: str
    gold_label: Optional[StanceLabel] = None
    sub_index: Optional[int] = None
    predicted_label: Optional[StanceLabel] = None

    def __post_init__(self):
        if self.index < 0:
            raise CorpusError("Sentence index must be >= 0: %s" % self.index)
        if not self.text.strip():
            raise CorpusError("Empty sentence text in %s at index %d" % (self.doc_id, self.index))

    @property
    def position(self) -> tuple[int, int]:
        # Sort key inside a document. Unsplit sentences come before their sub segments.
        return self.index, -1 if self.sub_index is None else self.sub_index

    @property
    def key(self) -> tuple[str, int, Optional[int]]:
        return self.doc_id, self.index, self.sub_index

    @property
    def sentence_id(self) -> str:
        if self.sub_index is None:
            return f"{self.doc_id}:{self.index}"
        return f"{self.doc_id}:{self.index}.{self.sub_index}"

    @property
    def word_count(self) -> int:
        return len(self.text.split())


@dataclass(frozen=True)
class Document:
    id: str
    kind: DocumentKind
    release_date: datetime.date
    sentences: tuple[Sentence, ...] = ()
    meeting_date: Optional[datetime.date] = None
    title: Optional[str] = None

    def __post_init__(self):
        if self.meeting_date is not None and self.release_date < self.meeting_date:
            raise CorpusError("Document %s released (%s) before its meeting (%s)"
                              % (self.id, self.release_date, self.meeting_date))
        for s in self.sentences:
            if s.doc_id != self.id:
                raise CorpusError("Sentence %s does not belong to document %s" % (s.sentence_id, self.id))

    @property
    def delay_days(self) -> int:
        if self.meeting_date is None:
            return 0
        return (self.release_date - self.meeting_date).days

    def with_sentences(self, sentences: Iterable[Sentence]) -> "Document":
        return replace(self, sentences=tuple(sentences))


class Corpus:
    """
    Immutable, ordered collection of documents with unique ids.
    """

    __slots__ = "_documents", "_by_id"

    def __init__(self, documents: Iterable[Document] = ()):
        self._documents: tuple[Document, ...] = tuple(documents)
        self._by_id: dict[str, Document] = {}
        for d in self._documents:
            if d.id in self._by_id:
                raise CorpusError("Duplicate document id in corpus: %s" % d.id)
            self._by_id[d.id] = d

    @property
    def documents(self) -> tuple[Document, ...]:
        return self._documents

    def __iter__(self) -> Iterator[Document]:
        return iter(self._documents)

    def __len__(self):
        return len(self._documents)

    def __contains__(self, doc_id: str):
        return doc_id in self._by_id

    def __getitem__(self, doc_id: str) -> Document:
        return self._by_id[doc_id]

    def __eq__(self, other):
        if not isinstance(other, Corpus):
            return NotImplemented
        return self._documents == other._documents

    def __hash__(self):
        return hash(self._documents)

    def sentences(self) -> Iterator[Sentence]:
        for d in self._documents:
            yield from d.sentences

    @property
    def sentence_count(self) -> int:
        return sum(len(d.sentences) for d in self._documents)

    @property
    def kinds(self) -> tuple[DocumentKind, ...]:
        return tuple(sorted({d.kind for d in self._documents}))

    def of_kind(self, kind: DocumentKind) -> "Corpus":
        return Corpus(d for d in self._documents if d.kind is kind)

    def __repr__(self):
        return f"<{self.__class__.__name__} {len(self._documents)} documents, {self.sentence_count} sentences>"


def concat_corpora(corpora: Iterable[Corpus]) -> Corpus:
    documents = []
    for c in corpora:
        documents.extend(c.documents)
    return Corpus(documents)


# Sentence tokenizer

ABBREVIATIONS = frozenset((
    "Mr.", "Mrs.", "Dr.", "U.S.", "etc.", "e.g.", "i.e.", "vs.", "No.",
    "Jan.", "Feb.", "Mar.", "Apr.", "Jun.", "Jul.", "Aug.", "Sep.", "Sept.", "Oct.", "Nov.", "Dec.",
))

# Terminal mark, optional closing quotes/brackets, whitespace, then an uppercase letter or digit.
_RE_BOUNDARY = re.compile(r"[.?!][\"'”’)\]]*(?=\s+[A-Z0-9])")
_LEADING_PUNCT = "\"'(“‘["


def _ends_with_abbreviation(text: str, period_at: int) -> bool:
    start = period_at
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    token = text[start:period_at + 1].lstrip(_LEADING_PUNCT)
    return token in ABBREVIATIONS


def tokenize_sentences(raw_text: str) -> list[str]:
    """
    Deterministic sentence segmentation of plain text.

    Splits after '.', '?' or '!' when whitespace and an uppercase letter or digit follow.
    A period closing one of ABBREVIATIONS never splits. Segments are trimmed, empty ones dropped.
    """
    segments = []
    start = 0
    for m in _RE_BOUNDARY.finditer(raw_text):
        if raw_text[m.start()] == "." and _ends_with_abbreviation(raw_text, m.start()):
            continue
        segments.append(raw_text[start:m.end()])
        start = m.end()
    segments.append(raw_text[start:])

    return [s for s in (seg.strip() for seg in segments) if s]


# Ingestion

REQUIRED_COLUMNS = ("doc_id", "release_date", "sentence_index", "text")
OPTIONAL_COLUMNS = ("meeting_date", "title", "label", "sub_index", "predicted_label")


def _parse_date(value: str, column: str, path: Path, row: int) -> datetime.date:
    try:
        return datetime.date.fromisoformat(value.strip())
    except ValueError:
        raise CorpusFormatError(f"Malformed {column}: {value!r}", path, row) from None


def _parse_optional_date(value: str, column: str, path: Path, row: int) -> Optional[datetime.date]:
    if not value.strip():
        return None
    return _parse_date(value, column, path, row)


def _parse_label(value: str, column: str, path: Path, row: int) -> Optional[StanceLabel]:
    if not value.strip():
        return None
    try:
        return StanceLabel.decode(value.strip())
    except ValueError:
        raise CorpusFormatError(f"Unknown {column} code: {value!r}", path, row) from None


def _parse_index(value: str, column: str, path: Path, row: int) -> int:
    try:
        i = int(value.strip())
    except ValueError:
        raise CorpusFormatError(f"Malformed {column}: {value!r}", path, row) from None
    if i < 0:
        raise CorpusFormatError(f"Negative {column}: {i}", path, row)
    return i


@dataclass
class _DocumentRows:
    release_date: datetime.date
    meeting_date: Optional[datetime.date]
    title: Optional[str]
    sentences: list[Sentence] = field(default_factory=list)


def ingest_sentence_csv(path: Union[str, Path], kind: Union[DocumentKind, str]) -> Corpus:
    """
    Reads a sentence CSV into a corpus of one document kind.
    Any malformed row rejects the whole file; the error names the row.
    """
    path = Path(path)
    kind = DocumentKind.parse(kind)

    try:
        frame = read_csv_frame(path)
    except (OSError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise CorpusFormatError(f"Unreadable sentence CSV: {e}", path) from e

    missing = [c for c in REQUIRED_COLUMNS if c not in frame.columns]
    if missing:
        raise CorpusFormatError("Missing required columns: %s" % ", ".join(missing), path)

    has = {c: c in frame.columns for c in OPTIONAL_COLUMNS}
    docs: dict[str, _DocumentRows] = {}
    seen: dict[tuple, int] = {}

    for row_no, rec in enumerate(frame.to_dict("records"), start=1):
        doc_id = rec["doc_id"].strip()
        if not doc_id:
            raise CorpusFormatError("Empty doc_id", path, row_no)

        text = rec["text"].strip()
        if not text:
            raise CorpusFormatError("Empty sentence text", path, row_no)

        index = _parse_index(rec["sentence_index"], "sentence_index", path, row_no)
        sub_index = _parse_index(rec["sub_index"], "sub_index", path, row_no) \
            if has["sub_index"] and rec["sub_index"].strip() else None

        key = (doc_id, index, sub_index)
        if key in seen:
            raise CorpusFormatError(f"Duplicate (doc_id, sentence_index) {doc_id!r}, {index} "
                                    f"(first seen in row {seen[key]})", path, row_no)
        seen[key] = row_no

        release_date = _parse_date(rec["release_date"], "release_date", path, row_no)
        meeting_date = _parse_optional_date(rec["meeting_date"], "meeting_date", path, row_no) \
            if has["meeting_date"] else None
        title = (rec["title"].strip() or None) if has["title"] else None

        if meeting_date is not None and release_date < meeting_date:
            raise CorpusFormatError("release_date before meeting_date", path, row_no)

        gold = _parse_label(rec["label"], "label", path, row_no) if has["label"] else None
        predicted = _parse_label(rec["predicted_label"], "predicted_label", path, row_no) \
            if has["predicted_label"] else None

        d = docs.get(doc_id)
        if d is None:
            d = docs[doc_id] = _DocumentRows(release_date, meeting_date, title)
        elif d.release_date != release_date or d.meeting_date != meeting_date:
            raise CorpusFormatError(f"Inconsistent dates for document {doc_id!r}", path, row_no)
        elif title and d.title is None:
            d.title = title

        d.sentences.append(Sentence(doc_id, index, text, gold, sub_index, predicted))

    documents = []
    for doc_id, d in docs.items():
        d.sentences.sort(key=lambda s: s.position)
        documents.append(Document(doc_id, kind, d.release_date, tuple(d.sentences), d.meeting_date, d.title))

    corpus = Corpus(documents)
    mlogger.info("Ingested %s: %d documents, %d sentences (%s)", path, len(corpus), corpus.sentence_count,
                 kind.name)
    return corpus


def _iso(d: Optional[datetime.date]) -> str:
    return d.isoformat() if d is not None else ""


def _code(label: Optional[StanceLabel]) -> str:
    return str(int(label)) if label is not None else ""


def corpus_frame(corpus: Corpus) -> pd.DataFrame:
    rows = []
    for d in corpus:
        for s in d.sentences:
            rows.append({
                "doc_id": d.id,
                "release_date": _iso(d.release_date),
                "meeting_date": _iso(d.meeting_date),
                "title": d.title or "",
                "sentence_index": s.index,
                "sub_index": "" if s.sub_index is None else s.sub_index,
                "text": s.text,
                "label": _code(s.gold_label),
                "predicted_label": _code(s.predicted_label),
            })
    columns = ["doc_id", "release_date", "meeting_date", "title", "sentence_index", "sub_index", "text", "label",
               "predicted_label"]
    return pd.DataFrame(rows, columns=columns)


def export_sentence_csv(corpus: Corpus, path: Union[str, Path], provenance: Optional[Provenance] = None) -> Path:
    """
    Writes the sentence CSV schema. Documents without sentences cannot be represented and are left out.
    """
    empty = [d.id for d in corpus if not d.sentences]
    if empty:
        mlogger.debug("Not exporting %d documents without sentences", len(empty))
    return write_artifact(path, corpus_frame(corpus), provenance)


def _parse_meta_line(line: str, source: Path) -> tuple[str, DocumentKind, datetime.date,
                                                       Optional[datetime.date], Optional[str]]:
    # "id|kind|release_date[|meeting_date][|title]"
    parts = [p.strip() for p in line.strip().split("|", 4)]
    if len(parts) < 3 or not parts[0]:
        raise CorpusFormatError("Metadata line needs id|kind|release_date: %r" % line, source)

    doc_id, kind, release = parts[0], DocumentKind.parse(parts[1]), _parse_date(parts[2], "release_date", source, 1)
    meeting = _parse_optional_date(parts[3], "meeting_date", source, 1) if len(parts) > 3 else None
    title = (parts[4] or None) if len(parts) > 4 else None
    return doc_id, kind, release, meeting, title


def ingest_raw_text(path: Union[str, Path]) -> Document:
    """
    Reads one plain-text document. Its metadata comes from the sidecar <stem>.meta.
    """
    path = Path(path)
    meta = path.with_suffix(".meta")
    if not meta.is_file():
        raise CorpusFormatError("Missing sidecar metadata file %s" % meta, path)

    meta_lines = [ln for ln in meta.read_text(encoding="utf8").splitlines() if ln.strip()]
    if len(meta_lines) != 1:
        raise CorpusFormatError("Sidecar must hold exactly one metadata line", meta)

    doc_id, kind, release, meeting, title = _parse_meta_line(meta_lines[0], meta)
    try:
        text = path.read_text(encoding="utf8")
    except UnicodeDecodeError as e:
        raise CorpusFormatError("Not UTF-8 text: %s" % e, path) from e

    # Hard line breaks inside paragraphs are layout, not sentence ends.
    text = " ".join(text.split())
    sentences = tuple(Sentence(doc_id, i, s) for i, s in enumerate(tokenize_sentences(text)))

    try:
        return Document(doc_id, kind, release, sentences, meeting, title)
    except CorpusError as e:
        raise CorpusFormatError(str(e), meta) from e


def ingest_raw_directory(directory: Union[str, Path], kind: Optional[DocumentKind] = None) -> Corpus:
    directory = Path(directory)
    if not directory.is_dir():
        raise CorpusFormatError("Not a directory", directory)

    documents = []
    for txt in sorted(directory.glob("*.txt")):
        doc = ingest_raw_text(txt)
        if kind is None or doc.kind is kind:
            documents.append(doc)

    try:
        corpus = Corpus(documents)
    except CorpusError as e:
        raise CorpusFormatError(str(e), directory) from e

    mlogger.info("Ingested %d raw documents from %s", len(corpus), directory)
    return corpus


# Statistics and sampling

@dataclass(frozen=True)
class CorpusStats:
    file_count: int
    sentence_count: int
    word_count: int

    @property
    def avg_words_per_sentence(self) -> float:
        if self.sentence_count == 0:
            return 0.0
        return self.word_count / self.sentence_count

    def __add__(self, other: "CorpusStats") -> "CorpusStats":
        if not isinstance(other, CorpusStats):
            return NotImplemented
        return CorpusStats(self.file_count + other.file_count,
                           self.sentence_count + other.sentence_count,
                           self.word_count + other.word_count)

    def as_dict(self) -> dict:
        return {
            "file_count": self.file_count,
            "sentence_count": self.sentence_count,
            "word_count": self.word_count,
            "avg_words_per_sentence": self.avg_words_per_sentence,
        }


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Words are whitespace-delimited tokens, punctuation attached."""
    return CorpusStats(
        file_count=len(corpus),
        sentence_count=corpus.sentence_count,
        word_count=sum(s.word_count for s in corpus.sentences()),
    )


def sample_for_annotation(corpus: Corpus, per_file: int = 5, seed: int = 5768) -> Corpus:
    """
    Draws up to per_file sentences from each document (all of them if it has fewer),
    keeping source order inside a document. Documents left empty are dropped.
    """
    if per_file < 1:
        raise CorpusError("per_file must be >= 1")

    rng = Lcg64(seed)
    documents = []
    for d in corpus:
        if not d.sentences:
            continue
        if len(d.sentences) <= per_file:
            documents.append(d)
            continue
        positions = rng.shuffle(list(range(len(d.sentences))))[:per_file]
        documents.append(d.with_sentences(d.sentences[i] for i in sorted(positions)))
    return Corpus(documents)
