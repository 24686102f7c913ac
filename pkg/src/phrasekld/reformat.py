"""Rewrite token sequences so that lexicon phrases become single units."""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from phrasekld.lexicon import ContinuityClass, PhraseLexicon, join_phrase, normalize

# positional distance between the two parts of a discontinuous phrase (1 to 4 words between)
DISCONTINUOUS_DISTANCES = range(2, 6)

_C = ContinuityClass


def reformat_sentence(tokens: Sequence[str], lexicon: PhraseLexicon) -> list[str]:
    """Return the unit sequence for ``tokens``.

    Two greedy left-to-right passes. The first merges adjacent pairs of any
    known class into one ``a_b`` token. The second looks, for each remaining
    raw word ``a``, for the nearest raw ``b`` two to five units to the right
    such that (a, b) is discontinuous, and replaces both words with ``a_b``.
    Distances in the second pass are measured over the merged sequence, which
    keeps the function idempotent.
    """
    toks = [normalize(t) for t in tokens]
    if not lexicon.entries or len(toks) < 2:
        return toks

    merged: list[str] = []
    raw: list[bool] = []
    i = 0
    while i < len(toks):
        if i + 1 < len(toks) and _mergeable(lexicon.class_of(toks[i], toks[i + 1])):
            merged.append(join_phrase(toks[i], toks[i + 1]))
            raw.append(False)
            i += 2
        else:
            merged.append(toks[i])
            raw.append(True)
            i += 1

    out = list(merged)
    n = len(out)
    for i in range(n):
        if not raw[i]:
            continue
        a = merged[i]
        for d in DISCONTINUOUS_DISTANCES:
            j = i + d
            if j >= n:
                break
            if raw[j] and lexicon.class_of(a, merged[j]) is _C.DISCONTINUOUS:
                out[i] = out[j] = join_phrase(a, merged[j])
                raw[i] = raw[j] = False
                break
    return out


def _mergeable(cls: ContinuityClass) -> bool:
    return cls is _C.CONTINUOUS or cls is _C.DISCONTINUOUS


def reformat_corpus(corpus: Iterable[Sequence[str]], lexicon: PhraseLexicon) -> list[list[str]]:
    return [reformat_sentence(s, lexicon) for s in corpus]
