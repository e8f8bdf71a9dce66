# -*- coding: utf-8 -*-

"""
Monetary policy dictionary and the target-sentence / speech-title filters.

Matching policy:
  - The sentence is lowercased (curly apostrophes folded) and split into tokens on anything
    that is not a letter or digit; apostrophes inside a word stay ("don't" is one token).
  - A phrase matches a run of consecutive tokens. Only its final token may carry one of the
    suffixes in INFLECTIONS ("inflation expectations", "declined", "lower").
    Irregular, e-dropping and doubled-consonant forms are not derived: "declining", "cutting",
    "dropped" and "rose" match nothing unless the lexicon lists them (the default lists fell, rising,
    easing, pausing). Add such forms through a lexicon file.
  - Phrases containing an apostrophe are matched on the lowercased text with word boundaries.
  - Negation phrases (panel C) never inflect.
"""

import json
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Optional, Union

import pandas as pd

from hawkdove.core import HawkdoveError, InputError
from hawkdove.core.logger import module_logger
from hawkdove.core.security import canonical_hash
from hawkdove.corpus import Corpus, Document, DocumentKind, Sentence

mlogger = module_logger(__name__)

INFLECTIONS = ("s", "es", "d", "ed", "ing", "er", "est")

_RE_TOKEN = re.compile(r"[a-z0-9]+(?:'[a-z0-9]+)*")
_APOSTROPHES = str.maketrans({"’": "'", "‘": "'", "`": "'"})


class LexiconError(HawkdoveError):
    pass


class LexiconFormatError(InputError, LexiconError):
    pass


class FilterError(HawkdoveError):
    pass


class Panel(Enum):
    A1 = "A1"
    B1 = "B1"
    A2 = "A2"
    B2 = "B2"
    C = "C"

    @property
    def inflects(self) -> bool:
        return self is not Panel.C

    @classmethod
    def parse(cls, value: Union[str, "Panel"]) -> "Panel":
        if isinstance(value, Panel):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise LexiconError("Unknown panel id: %r" % (value, )) from None


DEFAULT_PANELS: dict[Panel, tuple[str, ...]] = {
    Panel.A1: ("inflation expectation", "interest rate", "bank rate", "fund rate", "price", "economic activity",
               "inflation", "employment"),
    Panel.B1: ("unemployment", "growth", "exchange rate", "productivity", "deficit", "demand", "job market",
               "monetary policy"),
    Panel.A2: ("anchor", "cut", "subdue", "decline", "decrease", "reduce", "low", "drop", "fall", "fell",
               "decelerate", "slow", "pause", "pausing", "stable", "non-accelerating", "downward", "tighten"),
    Panel.B2: ("ease", "easing", "rise", "rising", "increase", "expand", "improve", "strong", "upward", "raise",
               "high", "rapid"),
    Panel.C: ("weren't", "were not", "wasn't", "was not", "did not", "didn't", "do not", "don't", "will not",
              "won't"),
}

DEFAULT_SPLIT_KEYWORDS = ("but", "however", "even though", "although", "while", ";")
DEFAULT_VALIDITY_PANELS = (Panel.A1, Panel.B1)


def normalize_text(text: str) -> str:
    return text.translate(_APOSTROPHES).lower()


@dataclass(frozen=True)
class _PanelMatcher:
    panel: Panel
    # inflected variant of a single-token phrase -> phrases
    single: dict[str, tuple[str, ...]]
    # first token -> (phrase, remaining tokens)
    multi: dict[str, tuple[tuple[str, tuple[str, ...]], ...]]
    patterns: tuple[tuple[str, "re.Pattern"], ...]

    @classmethod
    def build(cls, panel: Panel, phrases: Iterable[str]) -> "_PanelMatcher":
        single: dict[str, list[str]] = {}
        multi: dict[str, list[tuple[str, tuple[str, ...]]]] = {}
        patterns = []

        for phrase in sorted(phrases):
            if "'" in phrase:
                patterns.append((phrase, re.compile(r"(?<![a-z0-9'])" + re.escape(phrase) + r"(?![a-z0-9'])")))
                continue

            tokens = tuple(_RE_TOKEN.findall(phrase))
            if len(tokens) == 1:
                variants = {tokens[0]}
                if panel.inflects:
                    variants.update(tokens[0] + suffix for suffix in INFLECTIONS)
                for v in variants:
                    single.setdefault(v, []).append(phrase)
            else:
                multi.setdefault(tokens[0], []).append((phrase, tokens[1:]))

        return cls(panel,
                   {k: tuple(v) for k, v in single.items()},
                   {k: tuple(v) for k, v in multi.items()},
                   tuple(patterns))

    def _last_matches(self, expected: str, token: str) -> bool:
        if token == expected:
            return True
        if not self.panel.inflects:
            return False
        return token[len(expected):] in INFLECTIONS and token.startswith(expected)

    def match(self, normalized: str, tokens: list[str]) -> frozenset[str]:
        found = set()
        n = len(tokens)

        for i, tok in enumerate(tokens):
            hit = self.single.get(tok)
            if hit:
                found.update(hit)

            for phrase, rest in self.multi.get(tok, ()):
                end = i + 1 + len(rest)
                if end > n:
                    continue
                if tuple(tokens[i + 1:end - 1]) == rest[:-1] and self._last_matches(rest[-1], tokens[end - 1]):
                    found.add(phrase)

        for phrase, pattern in self.patterns:
            if pattern.search(normalized):
                found.add(phrase)

        return frozenset(found)


@dataclass(frozen=True)
class PanelMatches:
    """Matched phrases of one sentence, by panel."""
    a1: frozenset[str] = frozenset()
    b1: frozenset[str] = frozenset()
    a2: frozenset[str] = frozenset()
    b2: frozenset[str] = frozenset()
    c: frozenset[str] = frozenset()

    def __getitem__(self, panel: Panel) -> frozenset[str]:
        return getattr(self, panel.value.lower())

    @property
    def targets(self) -> frozenset[str]:
        return self.a1 | self.b1


@dataclass(frozen=True)
class Lexicon:
    panel_a1: frozenset[str] = frozenset(DEFAULT_PANELS[Panel.A1])
    panel_b1: frozenset[str] = frozenset(DEFAULT_PANELS[Panel.B1])
    panel_a2: frozenset[str] = frozenset(DEFAULT_PANELS[Panel.A2])
    panel_b2: frozenset[str] = frozenset(DEFAULT_PANELS[Panel.B2])
    panel_c: frozenset[str] = frozenset(DEFAULT_PANELS[Panel.C])
    split_keywords: tuple[str, ...] = DEFAULT_SPLIT_KEYWORDS
    validity_panels: tuple[Panel, ...] = DEFAULT_VALIDITY_PANELS

    def __post_init__(self):
        panels = {p: self.panel(p) for p in Panel}
        for p, phrases in panels.items():
            for phrase in phrases:
                if not phrase.strip() or phrase != normalize_text(phrase).strip():
                    raise LexiconError("Panel %s phrase must be non-empty, trimmed and lowercase: %r"
                                       % (p.value, phrase))

        ordered = list(Panel)
        for i, p in enumerate(ordered):
            for q in ordered[i + 1:]:
                overlap = panels[p] & panels[q]
                if overlap:
                    raise LexiconError("Panels %s and %s share phrases: %s"
                                       % (p.value, q.value, ", ".join(sorted(overlap))))

        if not self.split_keywords or any(not k.strip() for k in self.split_keywords):
            raise LexiconError("split_keywords must be a non-empty list of non-empty strings")
        if not self.validity_panels:
            raise LexiconError("validity_panels must name at least one panel")

    @classmethod
    def from_mapping(cls, data: Mapping) -> "Lexicon":
        known = {p.value for p in Panel} | {"split_keywords", "validity_panels"}
        unknown = set(data) - known
        if unknown:
            raise LexiconFormatError("Unknown lexicon keys: %s" % ", ".join(sorted(unknown)))

        def phrases(p: Panel) -> frozenset[str]:
            values = data.get(p.value, DEFAULT_PANELS[p])
            if isinstance(values, str) or not isinstance(values, Iterable):
                raise LexiconFormatError("Panel %s must be a list of phrases" % p.value)
            return frozenset(normalize_text(str(v)).strip() for v in values)

        try:
            return cls(
                panel_a1=phrases(Panel.A1),
                panel_b1=phrases(Panel.B1),
                panel_a2=phrases(Panel.A2),
                panel_b2=phrases(Panel.B2),
                panel_c=phrases(Panel.C),
                split_keywords=tuple(str(k).lower() for k in data.get("split_keywords", DEFAULT_SPLIT_KEYWORDS)),
                validity_panels=tuple(Panel.parse(p) for p in data.get("validity_panels",
                                                                        [p.value for p in DEFAULT_VALIDITY_PANELS])),
            )
        except LexiconError as e:
            if isinstance(e, InputError):
                raise
            raise LexiconFormatError(str(e)) from e

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "Lexicon":
        path = Path(path)
        try:
            with path.open("rt", encoding="utf8") as fp:
                data = json.load(fp)
        except (OSError, json.JSONDecodeError) as e:
            raise LexiconFormatError("Cannot read lexicon %s: %s" % (path, e)) from e
        if not isinstance(data, Mapping):
            raise LexiconFormatError("Lexicon file %s must hold a JSON object" % path)
        return cls.from_mapping(data)

    def to_dict(self) -> dict:
        d = {p.value: sorted(self.panel(p)) for p in Panel}
        d["split_keywords"] = list(self.split_keywords)
        d["validity_panels"] = [p.value for p in self.validity_panels]
        return d

    def to_json(self, path: Union[str, Path]):
        with Path(path).open("wt", encoding="utf8") as fp:
            json.dump(self.to_dict(), fp, indent=2)
            fp.write("\n")

    @cached_property
    def digest(self) -> str:
        return canonical_hash(self.to_dict())

    def panel(self, panel: Union[Panel, str]) -> frozenset[str]:
        return getattr(self, "panel_" + Panel.parse(panel).value.lower())

    @cached_property
    def _matchers(self) -> dict[Panel, _PanelMatcher]:
        return {p: _PanelMatcher.build(p, self.panel(p)) for p in Panel}

    def match_panel(self, sentence: str, panel: Union[Panel, str]) -> frozenset[str]:
        panel = Panel.parse(panel)
        normalized = normalize_text(sentence)
        return self._matchers[panel].match(normalized, _RE_TOKEN.findall(normalized))

    def match_all(self, sentence: str) -> PanelMatches:
        normalized = normalize_text(sentence)
        tokens = _RE_TOKEN.findall(normalized)
        m = {p.value.lower(): self._matchers[p].match(normalized, tokens) for p in Panel}
        return PanelMatches(**m)

    def match_panels(self, sentence: str, panels: Iterable[Panel]) -> frozenset[str]:
        normalized = normalize_text(sentence)
        tokens = _RE_TOKEN.findall(normalized)
        found = frozenset()
        for p in panels:
            found |= self._matchers[p].match(normalized, tokens)
        return found

    def target_evidence(self, sentence: str) -> frozenset[str]:
        return self.match_panels(sentence, (Panel.A1, Panel.B1))

    def is_target_sentence(self, sentence: str) -> bool:
        return bool(self.target_evidence(sentence))


DEFAULT_LEXICON = Lexicon()


def match_panel(sentence: str, panel: Union[Panel, str], lexicon: Optional[Lexicon] = None) -> frozenset[str]:
    return (lexicon or DEFAULT_LEXICON).match_panel(sentence, panel)


def is_target_sentence(sentence: str, lexicon: Optional[Lexicon] = None) -> bool:
    return (lexicon or DEFAULT_LEXICON).is_target_sentence(sentence)


@dataclass(frozen=True)
class FilterReport:
    kept: int
    dropped: int
    kept_per_file: dict[str, int]
    total_per_file: dict[str, int]
    empty_documents: tuple[str, ...]
    # sentence id -> matched target phrases
    evidence: dict[str, tuple[str, ...]] = field(repr=False, default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "kept": self.kept,
            "dropped": self.dropped,
            "files": len(self.kept_per_file),
            "empty_documents": list(self.empty_documents),
            "kept_per_file": dict(self.kept_per_file),
        }

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"doc_id": doc_id, "sentences": self.total_per_file[doc_id], "kept": kept,
              "empty": doc_id in self.empty_documents}
             for doc_id, kept in self.kept_per_file.items()],
            columns=["doc_id", "sentences", "kept", "empty"],
        )

    def evidence_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"sentence_id": sid, "phrases": ";".join(phrases)} for sid, phrases in self.evidence.items()],
            columns=["sentence_id", "phrases"],
        )

    def __add__(self, other: "FilterReport") -> "FilterReport":
        return FilterReport(self.kept + other.kept, self.dropped + other.dropped,
                            {**self.kept_per_file, **other.kept_per_file},
                            {**self.total_per_file, **other.total_per_file},
                            self.empty_documents + other.empty_documents,
                            {**self.evidence, **other.evidence})


def _filter_document(document: Document, lexicon: Lexicon, evidence: dict[str, tuple[str, ...]]) -> Document:
    kept: list[Sentence] = []
    for s in document.sentences:
        hits = lexicon.target_evidence(s.text)
        if hits:
            kept.append(s)
            evidence[s.sentence_id] = tuple(sorted(hits))
    return document.with_sentences(kept)


def filter_corpus(corpus: Corpus, lexicon: Optional[Lexicon] = None) -> tuple[Corpus, FilterReport]:
    """
    Keeps target sentences only. Documents left without sentences stay in the corpus and are
    listed in FilterReport.empty_documents.
    """
    lexicon = lexicon or DEFAULT_LEXICON
    evidence: dict[str, tuple[str, ...]] = {}
    documents = []
    kept_per_file = {}
    total_per_file = {}
    empty = []

    for d in corpus:
        fd = _filter_document(d, lexicon, evidence)
        documents.append(fd)
        kept_per_file[d.id] = len(fd.sentences)
        total_per_file[d.id] = len(d.sentences)
        if not fd.sentences:
            empty.append(d.id)

    kept = sum(kept_per_file.values())
    report = FilterReport(kept, corpus.sentence_count - kept, kept_per_file, total_per_file, tuple(empty), evidence)
    if empty:
        mlogger.warning("%d documents have no target sentences: %s", len(empty), ", ".join(empty[:10]))
    mlogger.info("Filter kept %d of %d sentences", report.kept, corpus.sentence_count)
    return Corpus(documents), report


@dataclass(frozen=True)
class GroupDensity:
    files: int
    sentences: int
    target_sentences: int

    @property
    def targets_per_file(self) -> float:
        return self.target_sentences / self.files if self.files else 0.0

    def as_dict(self) -> dict:
        return {"files": self.files, "sentences": self.sentences, "target_sentences": self.target_sentences,
                "targets_per_file": self.targets_per_file}


@dataclass(frozen=True)
class TitleFilterReport:
    kept_ids: tuple[str, ...]
    dropped_ids: tuple[str, ...]
    untitled_ids: tuple[str, ...]
    all: GroupDensity
    kept: GroupDensity
    dropped: GroupDensity

    def as_dict(self) -> dict:
        return {
            "kept": len(self.kept_ids),
            "dropped": len(self.dropped_ids),
            "untitled": list(self.untitled_ids),
            "groups": {"all": self.all.as_dict(), "kept": self.kept.as_dict(), "dropped": self.dropped.as_dict()},
        }

    def frame(self) -> pd.DataFrame:
        rows = []
        for name, g in (("All Speech Titles", self.all), ("Non-Filtered Speech Titles", self.dropped),
                        ("Filtered Speech Titles", self.kept)):
            rows.append({"type": name, **g.as_dict()})
        return pd.DataFrame(rows, columns=["type", "files", "sentences", "target_sentences", "targets_per_file"])


def _density(documents: list[Document], lexicon: Lexicon) -> GroupDensity:
    sentences = sum(len(d.sentences) for d in documents)
    targets = sum(1 for d in documents for s in d.sentences if lexicon.is_target_sentence(s.text))
    return GroupDensity(len(documents), sentences, targets)


def filter_speech_titles(corpus: Corpus, lexicon: Optional[Lexicon] = None) -> tuple[Corpus, TitleFilterReport]:
    """
    Keeps speeches whose title is a target sentence. Untitled speeches count as dropped.
    """
    lexicon = lexicon or DEFAULT_LEXICON

    not_speech = [d.id for d in corpus if d.kind is not DocumentKind.Speech]
    if not_speech:
        raise FilterError("Title filter applies to speeches only; got other kinds: %s" % ", ".join(not_speech[:10]))

    kept, dropped, untitled = [], [], []
    for d in corpus:
        if not d.title:
            untitled.append(d.id)
            dropped.append(d)
        elif lexicon.is_target_sentence(d.title):
            kept.append(d)
        else:
            dropped.append(d)

    if untitled:
        mlogger.warning("%d speeches have no title and were dropped: %s", len(untitled), ", ".join(untitled[:10]))

    report = TitleFilterReport(
        kept_ids=tuple(d.id for d in kept),
        dropped_ids=tuple(d.id for d in dropped),
        untitled_ids=tuple(untitled),
        all=_density(list(corpus), lexicon),
        kept=_density(kept, lexicon),
        dropped=_density(dropped, lexicon),
    )
    mlogger.info("Title filter kept %d of %d speeches", len(kept), len(corpus))
    return Corpus(kept), report
