# -*- coding: utf-8 -*-

"""
Rule-based hawkish/dovish/neutral classification and label sources.

Combinations of a noun panel with a verb panel decide the raw stance:
    dovish   A1+A2 or B1+B2
    hawkish  A1+B2 or A2+B1
Exactly one firing side gives the provisional label; none gives Neutral; both is resolved by the
tie rule. A panel C negation flips a Dovish/Hawkish provisional label.
"""

from abc import ABCMeta, abstractmethod
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Optional, Type, Union

import pandas as pd

from hawkdove.core import HawkdoveError, InputError
from hawkdove.core.artifacts import read_csv_frame
from hawkdove.core.logger import module_logger
from hawkdove.corpus import Corpus, DocumentKind, Sentence, StanceLabel
from hawkdove.lexicon_filter import DEFAULT_LEXICON, Lexicon, Panel, PanelMatches

mlogger = module_logger(__name__)

DOVISH_PAIRS = ((Panel.A1, Panel.A2), (Panel.B1, Panel.B2))
HAWKISH_PAIRS = ((Panel.A1, Panel.B2), (Panel.A2, Panel.B1))


class LabelSourceError(HawkdoveError):
    pass


class LabelFileError(InputError, LabelSourceError):
    pass


class TieRule(Enum):
    NEUTRAL = "neutral"
    # Dovish combinations are checked first.
    FIRST_MATCH = "first-match"


@dataclass(frozen=True)
class RuleOptions:
    tie: TieRule = TieRule.NEUTRAL
    apply_negation: bool = True


@dataclass(frozen=True)
class Evidence:
    pair: tuple[Panel, Panel]
    phrases: frozenset[str]

    @property
    def name(self) -> str:
        return "+".join(p.value for p in self.pair)


@dataclass(frozen=True)
class RuleVerdict:
    label: StanceLabel
    dovish_evidence: frozenset[Evidence]
    hawkish_evidence: frozenset[Evidence]
    negation_flipped: bool = False
    negations: frozenset[str] = frozenset()

    @property
    def provisional_label(self) -> StanceLabel:
        return self.label.flipped() if self.negation_flipped else self.label


def _pair_evidence(matches: PanelMatches, pairs) -> frozenset[Evidence]:
    evidence = set()
    for first, second in pairs:
        a, b = matches[first], matches[second]
        if a and b:
            evidence.add(Evidence((first, second), a | b))
    return frozenset(evidence)


def verdict_from_matches(matches: PanelMatches, options: RuleOptions = RuleOptions()) -> RuleVerdict:
    dovish = _pair_evidence(matches, DOVISH_PAIRS)
    hawkish = _pair_evidence(matches, HAWKISH_PAIRS)

    if dovish and hawkish:
        label = StanceLabel.Dovish if options.tie is TieRule.FIRST_MATCH else StanceLabel.Neutral
    elif dovish:
        label = StanceLabel.Dovish
    elif hawkish:
        label = StanceLabel.Hawkish
    else:
        label = StanceLabel.Neutral

    flipped = False
    if options.apply_negation and matches.c and label is not StanceLabel.Neutral:
        label = label.flipped()
        flipped = True

    return RuleVerdict(label, dovish, hawkish, flipped, matches.c)


def rule_classify(sentence: str, lexicon: Optional[Lexicon] = None, options: RuleOptions = RuleOptions()) \
        -> RuleVerdict:
    lexicon = lexicon or DEFAULT_LEXICON
    return verdict_from_matches(lexicon.match_all(sentence), options)


# Label sources

class LabelSource(metaclass=ABCMeta):
    """
    Supplies a predicted label per sentence. Sources register under a short key.
    """

    KEY = ""
    _SOURCES: dict[str, Type["LabelSource"]] = {}

    @classmethod
    def register_source(cls, source_class: Type["LabelSource"]) -> Type["LabelSource"]:
        if source_class.KEY in cls._SOURCES:
            raise RuntimeError("Label source key already registered: " + source_class.KEY)
        cls._SOURCES[source_class.KEY] = source_class
        return source_class

    @classmethod
    def get_source_class(cls, key: str) -> Type["LabelSource"]:
        try:
            return cls._SOURCES[key]
        except KeyError:
            raise LabelSourceError("Unknown label source: %r" % key) from None

    @property
    def name(self) -> str:
        return self.KEY

    @abstractmethod
    def labels_for(self, sentences: Iterable[Sentence]) -> list[StanceLabel]:
        """One label per sentence, same order."""

    def __repr__(self):
        return f"{self.__class__.__name__}"


@LabelSource.register_source
class RuleBasedSource(LabelSource):
    KEY = "rule"

    def __init__(self, lexicon: Optional[Lexicon] = None, options: RuleOptions = RuleOptions()):
        self.lexicon = lexicon or DEFAULT_LEXICON
        self.options = options

    def labels_for(self, sentences: Iterable[Sentence]) -> list[StanceLabel]:
        return [rule_classify(s.text, self.lexicon, self.options).label for s in sentences]


SentenceKey = tuple[str, int, Optional[int]]


def read_label_file(path: Union[str, Path]) -> dict[SentenceKey, StanceLabel]:
    """
    Prediction CSV: doc_id, sentence_index, label[, sub_index] with 0/1/2 codes.
    """
    path = Path(path)
    try:
        frame = read_csv_frame(path)
    except (OSError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise LabelFileError("Unreadable label file %s: %s" % (path, e)) from e

    missing = [c for c in ("doc_id", "sentence_index", "label") if c not in frame.columns]
    if missing:
        raise LabelFileError("%s: missing columns %s" % (path, ", ".join(missing)))

    has_sub = "sub_index" in frame.columns
    labels: dict[SentenceKey, StanceLabel] = {}
    for row_no, rec in enumerate(frame.to_dict("records"), start=1):
        try:
            index = int(rec["sentence_index"])
            sub = int(rec["sub_index"]) if has_sub and rec["sub_index"].strip() else None
            label = StanceLabel.decode(rec["label"].strip())
        except ValueError as e:
            raise LabelFileError("%s: row %d: %s" % (path, row_no, e)) from None

        key = (rec["doc_id"].strip(), index, sub)
        if key in labels:
            raise LabelFileError("%s: row %d: duplicate sentence %s" % (path, row_no, key))
        labels[key] = label

    return labels


def _format_key(key: SentenceKey) -> str:
    doc_id, index, sub = key
    return f"{doc_id}:{index}" if sub is None else f"{doc_id}:{index}.{sub}"


@LabelSource.register_source
class ExternalFileSource(LabelSource):
    KEY = "file"

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._labels = read_label_file(self.path)

    @property
    def name(self) -> str:
        return f"{self.KEY}:{self.path.name}"

    def labels_for(self, sentences: Iterable[Sentence]) -> list[StanceLabel]:
        sentences = list(sentences)
        missing = [s.key for s in sentences if s.key not in self._labels]
        if missing:
            shown = ", ".join(_format_key(k) for k in missing[:10])
            raise LabelFileError("%s lacks labels for %d sentences, first: %s" % (self.path, len(missing), shown))
        return [self._labels[s.key] for s in sentences]

    def __repr__(self):
        return f"{self.__class__.__name__}({self.path})"


@dataclass(frozen=True)
class LabelDistribution:
    source: str
    counts: dict[DocumentKind, dict[StanceLabel, int]]

    def total(self, label: StanceLabel) -> int:
        return sum(c.get(label, 0) for c in self.counts.values())

    def share(self, label: StanceLabel) -> float:
        n = sum(sum(c.values()) for c in self.counts.values())
        return self.total(label) / n if n else 0.0

    def as_dict(self) -> dict:
        return {
            "source": self.source,
            "counts": {kind.slug: {label.name: c.get(label, 0) for label in StanceLabel}
                       for kind, c in self.counts.items()},
            "total": {label.name: self.total(label) for label in StanceLabel},
        }


def classify_corpus(corpus: Corpus, source: LabelSource) -> tuple[Corpus, LabelDistribution]:
    sentences = list(corpus.sentences())
    labels = source.labels_for(sentences)
    by_key = {s.key: label for s, label in zip(sentences, labels)}

    counts: dict[DocumentKind, Counter] = {}
    documents = []
    for d in corpus:
        c = counts.setdefault(d.kind, Counter())
        labeled = []
        for s in d.sentences:
            label = by_key[s.key]
            c[label] += 1
            labeled.append(replace(s, predicted_label=label))
        documents.append(d.with_sentences(labeled))

    distribution = LabelDistribution(source.name, {k: dict(v) for k, v in sorted(counts.items())})
    mlogger.info("Classified %d sentences with %s", len(sentences), source)
    return Corpus(documents), distribution


def make_label_source(spec: str, lexicon: Optional[Lexicon] = None, options: RuleOptions = RuleOptions()) \
        -> LabelSource:
    """
    "rule" or "file:<path>".
    """
    key, _, arg = spec.partition(":")
    source_class = LabelSource.get_source_class(key)
    if source_class is RuleBasedSource:
        return RuleBasedSource(lexicon, options)
    if not arg:
        raise LabelSourceError("Label source %r needs a path: %s:<path>" % (key, key))
    return source_class(arg)
