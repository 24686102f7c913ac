"""Weighted-sum sentence vectors and pair features (cosine, sum, |diff|, MT-style metrics)."""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from phrasekld.embeddings import EmbeddingTable, cosine
from phrasekld.weighting import UnitWeightModel, WeightResolver

MT_METRIC_NAMES = ("bleu1", "bleu2", "bleu3", "bleu4", "wer", "per", "lcs_ratio", "unigram_f1")
N_MT = len(MT_METRIC_NAMES)

# value each metric takes when a sentence is empty
_WORST = (0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0)


def _as_resolver(weights, table) -> WeightResolver:
    if isinstance(weights, WeightResolver):
        return weights
    if isinstance(weights, UnitWeightModel):
        return WeightResolver(weights, table)
    raise TypeError(f"expected UnitWeightModel or WeightResolver, got {type(weights).__name__}")


def sentence_vector(
    units: Sequence[str],
    weights: UnitWeightModel | WeightResolver,
    table: EmbeddingTable,
    count_once: bool = False,
) -> np.ndarray:
    """Sum of weight * embedding over unit occurrences.

    Repeated units add once per occurrence unless ``count_once``. Units
    without an embedding contribute nothing.
    """
    resolve = _as_resolver(weights, table)
    vec = np.zeros(table.dim)
    seen: set[str] = set()
    for i, unit in enumerate(units):
        emb = table.get(unit)
        if emb is None:
            continue
        if count_once:
            if unit in seen:
                continue
            seen.add(unit)
        left = units[i - 1] if i > 0 else None
        right = units[i + 1] if i + 1 < len(units) else None
        w = resolve(unit, left, right)
        if w:
            vec += w * emb
    return vec


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def sentence_bleu(ref: Sequence[str], hyp: Sequence[str], max_n: int = 4) -> float:
    """Add-one smoothed sentence BLEU up to ``max_n``-grams with brevity penalty."""
    if not ref or not hyp:
        return 0.0
    log_p = 0.0
    for n in range(1, max_n + 1):
        h = _ngrams(hyp, n)
        r = _ngrams(ref, n)
        matches = sum(min(c, r[g]) for g, c in h.items())
        total = sum(h.values())
        log_p += math.log((matches + 1) / (total + 1))
    bp = 1.0 if len(hyp) >= len(ref) else math.exp(1.0 - len(ref) / len(hyp))
    return bp * math.exp(log_p / max_n)


def levenshtein(a: Sequence[str], b: Sequence[str]) -> int:
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i]
        for j, y in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def _bag_overlap(a: Sequence[str], b: Sequence[str]) -> int:
    return sum((Counter(a) & Counter(b)).values())


def wer(ref: Sequence[str], hyp: Sequence[str]) -> float:
    if not ref:
        return 1.0
    return min(1.0, levenshtein(ref, hyp) / len(ref))


def per(ref: Sequence[str], hyp: Sequence[str]) -> float:
    """Position-independent error rate: bag-of-words errors over reference length, capped at 1."""
    if not ref:
        return 1.0
    errors = max(len(ref), len(hyp)) - _bag_overlap(ref, hyp)
    return min(1.0, errors / len(ref))


def _directed(ref: Sequence[str], hyp: Sequence[str]) -> list[float]:
    return [sentence_bleu(ref, hyp, n) for n in range(1, 5)] + [wer(ref, hyp), per(ref, hyp)]


def mt_metrics(ref: Sequence[str], hyp: Sequence[str]) -> np.ndarray:
    """Eight surface-overlap metrics, each symmetric in its arguments and in [0, 1].

    Order follows ``MT_METRIC_NAMES``. Directional metrics (BLEU-n, WER, PER)
    are averaged over both directions.
    """
    ref, hyp = list(ref), list(hyp)
    if not ref or not hyp:
        return np.array(_WORST)
    fwd = _directed(ref, hyp)
    bwd = _directed(hyp, ref)
    mean_len = (len(ref) + len(hyp)) / 2
    lcs = lcs_length(ref, hyp) / mean_len
    f1 = _bag_overlap(ref, hyp) / mean_len
    return np.array([(x + y) / 2 for x, y in zip(fwd, bwd)] + [lcs, f1])


@dataclass(frozen=True)
class PairFeatures:
    cosine: float
    sum: np.ndarray
    absdiff: np.ndarray
    mt: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.cosine], self.sum, self.absdiff, self.mt])

    def __len__(self) -> int:
        return 1 + len(self.sum) + len(self.absdiff) + len(self.mt)


def pair_feature_vector(
    s1_units: Sequence[str],
    s2_units: Sequence[str],
    s1_words: Sequence[str],
    s2_words: Sequence[str],
    weights: UnitWeightModel | WeightResolver,
    table: EmbeddingTable,
    count_once: bool = False,
) -> PairFeatures:
    resolve = _as_resolver(weights, table)
    v1 = sentence_vector(s1_units, resolve, table, count_once)
    v2 = sentence_vector(s2_units, resolve, table, count_once)
    return PairFeatures(
        cosine=cosine(v1, v2),
        sum=v1 + v2,
        absdiff=np.abs(v1 - v2),
        mt=mt_metrics(s1_words, s2_words),
    )
