# -*- coding: utf-8 -*-

"""
Splits sentences with opposing sub-stances at contrast keywords.

A split at a keyword occurrence is valid when the text on both sides contains a phrase from the
lexicon's validity panels (A1 and B1 by default). Occurrences are tried left to right; the first
valid one splits, its left side is final and the right side is split again.
Word keywords match whole words only ("while" never inside "meanwhile"); ";" matches the character.
"""

import re
from dataclasses import dataclass
from typing import Optional, Union

import pandas as pd

from hawkdove.core.logger import module_logger
from hawkdove.corpus import Corpus, Document, Sentence
from hawkdove.lexicon_filter import DEFAULT_LEXICON, Lexicon

mlogger = module_logger(__name__)


@dataclass(frozen=True)
class SplitResult:
    original: Union[str, Sentence]
    segments: tuple[str, ...]
    keywords_used: tuple[str, ...] = ()

    @property
    def split_applied(self) -> bool:
        return len(self.segments) >= 2

    @property
    def keyword_used(self) -> Optional[str]:
        return self.keywords_used[0] if self.keywords_used else None


@dataclass(frozen=True)
class SplitReport:
    before_count: int
    after_count: int
    split_sentences: int

    def as_dict(self) -> dict:
        return {"before_count": self.before_count, "after_count": self.after_count,
                "split_sentences": self.split_sentences}

    def __add__(self, other: "SplitReport") -> "SplitReport":
        return SplitReport(self.before_count + other.before_count, self.after_count + other.after_count,
                           self.split_sentences + other.split_sentences)


def _keyword_pattern(keyword: str) -> "re.Pattern":
    if not any(c.isalnum() for c in keyword):
        return re.compile(re.escape(keyword))
    words = r"\s+".join(re.escape(w) for w in keyword.split())
    return re.compile(r"(?<![\w'])" + words + r"(?![\w'])", re.IGNORECASE)


_pattern_cache: dict[tuple[str, ...], tuple[tuple[str, "re.Pattern"], ...]] = {}


def _patterns(keywords: tuple[str, ...]) -> tuple[tuple[str, "re.Pattern"], ...]:
    compiled = _pattern_cache.get(keywords)
    if compiled is None:
        compiled = _pattern_cache[keywords] = tuple((k, _keyword_pattern(k)) for k in keywords)
    return compiled


def _occurrences(text: str, keywords: tuple[str, ...]) -> list[tuple[int, int, str]]:
    found = []
    for keyword, pattern in _patterns(keywords):
        for m in pattern.finditer(text):
            found.append((m.start(), m.end(), keyword))

    # Left to right; at one position the longer keyword wins ("even though" before "though").
    found.sort(key=lambda o: (o[0], -(o[1] - o[0])))
    occurrences = []
    last_end = -1
    for start, end, keyword in found:
        if start < last_end:
            continue
        occurrences.append((start, end, keyword))
        last_end = end
    return occurrences


def _split_text(text: str, lexicon: Lexicon) -> tuple[list[str], list[str]]:
    for start, end, keyword in _occurrences(text, lexicon.split_keywords):
        left = text[:start].strip()
        right = text[end:].strip()
        if not left or not right:
            continue
        if not lexicon.match_panels(left, lexicon.validity_panels):
            continue
        if not lexicon.match_panels(right, lexicon.validity_panels):
            continue

        tail, tail_keywords = _split_text(right, lexicon)
        return [left] + tail, [keyword] + tail_keywords

    return [text.strip()], []


def split_sentence(sentence: Union[str, Sentence], lexicon: Optional[Lexicon] = None) -> SplitResult:
    lexicon = lexicon or DEFAULT_LEXICON
    text = sentence.text if isinstance(sentence, Sentence) else sentence
    segments, keywords = _split_text(text, lexicon)
    return SplitResult(sentence, tuple(segments), tuple(keywords))


def _split_document(document: Document, lexicon: Lexicon) -> tuple[Document, int]:
    sentences = []
    split_count = 0
    for s in document.sentences:
        if s.sub_index is not None:
            # Already a segment of an earlier split.
            sentences.append(s)
            continue

        result = split_sentence(s, lexicon)
        if not result.split_applied:
            sentences.append(s)
            continue

        split_count += 1
        # Segments need re-annotation: the gold label of the whole sentence is not carried over.
        sentences.extend(Sentence(s.doc_id, s.index, seg, None, sub) for sub, seg in enumerate(result.segments))

    return document.with_sentences(sentences), split_count


def split_corpus(corpus: Corpus, lexicon: Optional[Lexicon] = None) -> tuple[Corpus, SplitReport]:
    lexicon = lexicon or DEFAULT_LEXICON
    documents = []
    split_total = 0
    for d in corpus:
        sd, n = _split_document(d, lexicon)
        documents.append(sd)
        split_total += n

    result = Corpus(documents)
    report = SplitReport(corpus.sentence_count, result.sentence_count, split_total)
    mlogger.info("Split %d sentences: %d -> %d", split_total, report.before_count, report.after_count)
    return result, report


def split_frame(corpus: Corpus, lexicon: Optional[Lexicon] = None) -> pd.DataFrame:
    """One row per sentence that was split, with its segments and keywords."""
    lexicon = lexicon or DEFAULT_LEXICON
    rows = []
    for s in corpus.sentences():
        result = split_sentence(s, lexicon)
        if result.split_applied:
            rows.append({"sentence_id": s.sentence_id, "keywords": "|".join(result.keywords_used),
                         "segments": len(result.segments), "text": s.text})
    return pd.DataFrame(rows, columns=["sentence_id", "keywords", "segments", "text"])
