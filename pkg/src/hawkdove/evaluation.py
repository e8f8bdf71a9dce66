# -*- coding: utf-8 -*-

"""
Evaluation protocol: seeded 80:20 splits (and a temporal split), weighted F1 over several seeds,
and annotation agreement.
"""

import datetime
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
import pandas as pd
from sklearn.metrics import confusion_matrix, f1_score

from hawkdove.core import HawkdoveError, InputError
from hawkdove.core.logger import module_logger
from hawkdove.core.rng import Lcg64
from hawkdove.corpus import Corpus, Sentence, StanceLabel
from hawkdove.stance_rules import LabelSource

mlogger = module_logger(__name__)

DEFAULT_SEEDS = (5768, 78516, 944601)
LABELS = [int(label) for label in StanceLabel]


class EvaluationError(HawkdoveError):
    pass


class EvaluationInputError(InputError, EvaluationError):
    pass


class SplitMode(Enum):
    RANDOM_SEEDED = "random"
    TEMPORAL = "temporal"


@dataclass(frozen=True)
class SplitSpec:
    mode: SplitMode = SplitMode.RANDOM_SEEDED
    seed: int = DEFAULT_SEEDS[0]
    train_fraction: float = 0.8
    val_fraction_of_train: float = 0.8
    temporal_boundary: Optional[datetime.date] = None

    def __post_init__(self):
        for name in ("train_fraction", "val_fraction_of_train"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise EvaluationError("%s must lie in (0, 1): %s" % (name, value))
        if self.mode is SplitMode.TEMPORAL and self.temporal_boundary is None:
            raise EvaluationError("Temporal split needs a temporal_boundary")


@dataclass(frozen=True)
class DataPartition:
    spec: SplitSpec
    train: tuple[Sentence, ...]
    val: tuple[Sentence, ...]
    test: tuple[Sentence, ...]

    @property
    def sizes(self) -> dict[str, int]:
        return {"train": len(self.train), "val": len(self.val), "test": len(self.test)}


def _floor_share(n: int, fraction: float) -> int:
    # n * 0.8 may land a hair under an integer in binary floating point.
    return math.floor(n * fraction + 1e-9)


def _labeled_sentences(corpus: Corpus) -> list[Sentence]:
    sentences = list(corpus.sentences())
    unlabeled = [s.sentence_id for s in sentences if s.gold_label is None]
    if unlabeled:
        raise EvaluationInputError("%d sentences lack a gold label, first: %s"
                                   % (len(unlabeled), ", ".join(unlabeled[:10])))
    return sentences


def make_split(corpus: Corpus, spec: SplitSpec) -> DataPartition:
    """
    RANDOM_SEEDED: seeded Fisher-Yates shuffle; the first train_fraction is the train pool, the rest test;
    the pool is cut again into train and val. TEMPORAL: train holds sentences released on or before the
    boundary, test the later ones; val stays empty.
    """
    sentences = _labeled_sentences(corpus)

    if spec.mode is SplitMode.TEMPORAL:
        released = {d.id: d.release_date for d in corpus}
        train = tuple(s for s in sentences if released[s.doc_id] <= spec.temporal_boundary)
        test = tuple(s for s in sentences if released[s.doc_id] > spec.temporal_boundary)
        partition = DataPartition(spec, train, (), test)
        required = ("train", "test")
    else:
        order = Lcg64(spec.seed).shuffle(list(range(len(sentences))))
        n_pool = _floor_share(len(sentences), spec.train_fraction)
        pool, test_idx = order[:n_pool], order[n_pool:]
        n_train = _floor_share(len(pool), spec.val_fraction_of_train)
        partition = DataPartition(
            spec,
            tuple(sentences[i] for i in pool[:n_train]),
            tuple(sentences[i] for i in pool[n_train:]),
            tuple(sentences[i] for i in test_idx),
        )
        required = ("train", "val", "test")

    empty = [name for name in required if not getattr(partition, name)]
    if empty:
        raise EvaluationInputError("Empty partition(s) %s for %d sentences (%s)"
                                   % (", ".join(empty), len(sentences), spec))

    mlogger.debug("Split %s: %s", spec, partition.sizes)
    return partition


def _check_pair(gold: Sequence, pred: Sequence):
    if len(gold) != len(pred):
        raise EvaluationError("Length mismatch: %d gold vs %d predicted" % (len(gold), len(pred)))
    if not gold:
        raise EvaluationError("Nothing to evaluate")


def weighted_f1(gold: Sequence[StanceLabel], pred: Sequence[StanceLabel]) -> float:
    """Support-weighted mean of per-class F1; a class with precision + recall = 0 scores 0."""
    _check_pair(gold, pred)
    return float(f1_score([int(g) for g in gold], [int(p) for p in pred], labels=LABELS, average="weighted",
                          zero_division=0))


def confusion(gold: Sequence[StanceLabel], pred: Sequence[StanceLabel]) -> np.ndarray:
    """3x3 counts, rows gold, columns predicted, in label code order."""
    _check_pair(gold, pred)
    return confusion_matrix([int(g) for g in gold], [int(p) for p in pred], labels=LABELS)


def agreement(labels_a: Sequence[StanceLabel], labels_b: Sequence[StanceLabel]) -> float:
    """Percentage of positions where both annotators agree."""
    _check_pair(labels_a, labels_b)
    matching = sum(1 for a, b in zip(labels_a, labels_b) if a == b)
    return 100.0 * matching / len(labels_a)


@dataclass(frozen=True)
class EvalResult:
    source: str
    mode: SplitMode
    per_seed_f1: dict[int, float]
    confusion: np.ndarray = field(compare=False)
    ddof: int = 0
    test_sizes: dict[int, int] = field(default_factory=dict)

    @property
    def mean_f1(self) -> float:
        return float(np.mean(list(self.per_seed_f1.values())))

    @property
    def stddev_f1(self) -> float:
        values = list(self.per_seed_f1.values())
        if len(values) <= self.ddof:
            return 0.0
        return float(np.std(values, ddof=self.ddof))

    def as_dict(self) -> dict:
        return {
            "source": self.source,
            "mode": self.mode.value,
            "seeds": list(self.per_seed_f1),
            "per_seed_f1": {str(k): v for k, v in self.per_seed_f1.items()},
            "mean_f1": self.mean_f1,
            "stddev_f1": self.stddev_f1,
            "stddev_ddof": self.ddof,
            "test_sizes": {str(k): v for k, v in self.test_sizes.items()},
            "confusion": {"labels": [label.name for label in StanceLabel], "counts": self.confusion.tolist()},
        }


def seed_suite(corpus: Corpus, source: LabelSource, seeds: Sequence[int] = DEFAULT_SEEDS,
               template: SplitSpec = SplitSpec(), ddof: int = 0) -> EvalResult:
    """
    Builds one split per seed, labels its test partition with the source and scores weighted F1.
    Results are kept in seed order.
    """
    if not seeds:
        raise EvaluationError("seed_suite needs at least one seed")

    per_seed = {}
    sizes = {}
    total = np.zeros((len(LABELS), len(LABELS)), dtype=int)
    for seed in seeds:
        spec = SplitSpec(template.mode, seed, template.train_fraction, template.val_fraction_of_train,
                         template.temporal_boundary)
        partition = make_split(corpus, spec)
        gold = [s.gold_label for s in partition.test]
        pred = source.labels_for(partition.test)
        per_seed[seed] = weighted_f1(gold, pred)
        sizes[seed] = len(partition.test)
        total += confusion(gold, pred)
        mlogger.info("seed %d: weighted F1 %.4f on %d test sentences", seed, per_seed[seed], len(gold))

    return EvalResult(source.name, template.mode, per_seed, total, ddof, sizes)


def table_row(model: str, results: dict[str, EvalResult]) -> pd.DataFrame:
    """
    One model row with a mean column and a stddev column per dataset (MM, PC, SP, Combined, ...).
    """
    row = {"model": model}
    for dataset, r in results.items():
        row[dataset] = round(r.mean_f1, 4)
        row[f"{dataset}_std"] = round(r.stddev_f1, 4)
    return pd.DataFrame([row])
