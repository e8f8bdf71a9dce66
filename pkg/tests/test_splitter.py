# -*- coding: utf-8 -*-

from collections import Counter

from hawkdove.corpus import Corpus, StanceLabel
from hawkdove.lexicon_filter import DEFAULT_LEXICON, Lexicon, Panel
from hawkdove.splitter import split_corpus, split_frame, split_sentence


def test_split_at_but():
    result = split_sentence("Inflation rose, but unemployment also increased")
    assert result.segments == ("Inflation rose,", "unemployment also increased")
    assert result.split_applied
    assert result.keyword_used == "but"


def test_invalid_right_segment():
    result = split_sentence("We met in June, but adjourned early")
    assert result.segments == ("We met in June, but adjourned early", )
    assert not result.split_applied
    assert result.keyword_used is None


def test_no_keyword():
    result = split_sentence("No keywords here about inflation")
    assert not result.split_applied


def test_semicolon():
    result = split_sentence("Growth was strong; inflation stayed low")
    assert result.segments == ("Growth was strong", "inflation stayed low")
    assert result.keyword_used == ";"


def test_while_is_a_whole_word():
    assert not split_sentence("Inflation rose meanwhile unemployment fell").split_applied
    assert split_sentence("Inflation rose while unemployment fell").segments == \
        ("Inflation rose", "unemployment fell")


def test_later_occurrence_tried_after_invalid_one():
    result = split_sentence("But for now inflation is high, but growth is slow")
    assert result.segments == ("But for now inflation is high,", "growth is slow")


def test_right_segment_split_again():
    result = split_sentence("Inflation rose, but unemployment fell, however demand was strong")
    assert result.segments == ("Inflation rose,", "unemployment fell,", "demand was strong")
    assert result.keywords_used == ("but", "however")


def test_longer_keyword_wins_at_same_position():
    lexicon = Lexicon(split_keywords=("though", "even though"))
    result = split_sentence("Inflation is high even though growth is weak", lexicon)
    assert result.segments == ("Inflation is high", "growth is weak")
    assert result.keyword_used == "even though"


def test_validity_panels_override():
    a1_only = Lexicon(validity_panels=(Panel.A1, ))
    assert split_sentence("Inflation rose, but unemployment increased").split_applied
    assert not split_sentence("Inflation rose, but unemployment increased", a1_only).split_applied
    assert split_sentence("Inflation rose, but prices fell", a1_only).split_applied


def test_segments_restore_original_words():
    text = "Inflation rose, but unemployment fell, however demand was strong"
    result = split_sentence(text)
    words = Counter(w for seg in result.segments for w in seg.split())
    words.update(w for k in result.keywords_used for w in k.split())
    assert words == Counter(text.split())


def test_segments_are_target_sentences():
    result = split_sentence("Inflation rose, but unemployment fell, however demand was strong")
    assert all(DEFAULT_LEXICON.is_target_sentence(seg) for seg in result.segments)


class TestSplitCorpus:
    def _corpus(self, make_document):
        return Corpus([make_document(
            "d1",
            ["Inflation rose, but unemployment also increased", "Prices were stable."],
            gold=[StanceLabel.Hawkish, StanceLabel.Dovish],
        )])

    def test_segments_become_sentences(self, make_document):
        result, report = split_corpus(self._corpus(make_document))
        sentences = result["d1"].sentences
        assert [(s.index, s.sub_index) for s in sentences] == [(0, 0), (0, 1), (1, None)]
        assert [s.sentence_id for s in sentences] == ["d1:0.0", "d1:0.1", "d1:1"]
        assert (report.before_count, report.after_count, report.split_sentences) == (2, 3, 1)

    def test_gold_labels_not_copied(self, make_document):
        result, _ = split_corpus(self._corpus(make_document))
        assert [s.gold_label for s in result["d1"].sentences] == [None, None, StanceLabel.Dovish]

    def test_second_run_changes_nothing(self, make_document):
        once, _ = split_corpus(self._corpus(make_document))
        twice, report = split_corpus(once)
        assert twice == once
        assert report.before_count == report.after_count

    def test_no_keywords(self, make_document):
        corpus = Corpus([make_document("d", ["Inflation rose.", "Growth slowed."])])
        result, report = split_corpus(corpus)
        assert result == corpus
        assert report.after_count == report.before_count

    def test_split_frame(self, make_document):
        frame = split_frame(self._corpus(make_document))
        assert frame.to_dict("records") == [{"sentence_id": "d1:0", "keywords": "but", "segments": 2,
                                             "text": "Inflation rose, but unemployment also increased"}]
