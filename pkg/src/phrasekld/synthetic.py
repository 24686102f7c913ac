"""Seeded synthetic paraphrase corpus with planted discriminative units and role-clustered embeddings.

Every sentence is a shuffled bag of slots:

* two *key* slots. Both sentences of a pair share a "common" key.
  Paraphrase pairs also share the second key; non-paraphrase pairs draw a
  private second key per sentence. Keys are single words, continuous
  phrases ("ckNa ckNb") or discontinuous phrases ("dkNa ... dkNb" with one
  to three fillers in between).
* shared *neutral* words, present in both sentences of every pair (one
  more in non-paraphrase pairs so that raw overlap counts match).
* private *filler* words. Some filler pairs are listed as distractor
  lexicon entries.

Test pairs draw each unit from a held-out pool with probability
``unseen_rate``, so that share of test units never occurs in training.
Embeddings are ``0.8 * role_centroid + 0.6 * noise``, normalized, so units
of the same role are nearest neighbors of each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from phrasekld.embeddings import EmbeddingTable
from phrasekld.lexicon import join_phrase
from phrasekld.pipeline import SentencePair

ROLE_WEIGHT = 0.8


@dataclass
class Pools:
    words: list[str]
    cont: list[tuple[str, str]]
    disc: list[tuple[str, str]]


@dataclass
class SyntheticCorpus:
    train: list[SentencePair]
    test: list[SentencePair]
    lexicon: list[tuple[str, str]]
    # unlabeled text used for continuity statistics
    corpus: list[list[str]]
    table: EmbeddingTable
    seen_units: set[str]
    unseen_units: set[str]


def _key_pool(prefix: str, n_words: int, n_cont: int, n_disc: int) -> Pools:
    return Pools(
        words=[f"{prefix}key{i}" for i in range(n_words)],
        cont=[(f"{prefix}ck{i}a", f"{prefix}ck{i}b") for i in range(n_cont)],
        disc=[(f"{prefix}dk{i}a", f"{prefix}dk{i}b") for i in range(n_disc)],
    )


class _Generator:
    def __init__(self, seed: int, unseen_rate: float, n_neutral: int = 4, n_filler: int = 3):
        self.rng = np.random.default_rng(seed)
        self.n_neutral = n_neutral
        self.n_filler = n_filler
        self.unseen_rate = unseen_rate
        self.keys = {False: _key_pool("", 40, 10, 10), True: _key_pool("u", 10, 3, 3)}
        self.neutral = {False: [f"neu{i}" for i in range(100)], True: [f"uneu{i}" for i in range(25)]}
        self.filler = {False: [f"fil{i}" for i in range(200)], True: [f"ufil{i}" for i in range(50)]}

    def _unseen(self, test: bool) -> bool:
        return test and self.rng.random() < self.unseen_rate

    def _pick(self, pool: list):
        return pool[self.rng.integers(len(pool))]

    def key(self, test: bool):
        """A key slot: ("w", word) or ("c"|"d", (a, b))."""
        pools = self.keys[self._unseen(test)]
        kind = self.rng.choice(["w", "w", "c", "d"])
        src = {"w": pools.words, "c": pools.cont, "d": pools.disc}[kind]
        return kind, self._pick(src)

    def word(self, kind: str, test: bool) -> str:
        pools = self.neutral if kind == "neutral" else self.filler
        return self._pick(pools[self._unseen(test)])

    def render(self, keys, neutrals, n_filler: int, test: bool) -> tuple[str, ...]:
        slots = [[n] for n in neutrals]
        slots += [[self.word("filler", test)] for _ in range(n_filler)]
        for kind, val in keys:
            if kind == "w":
                slots.append([val])
            elif kind == "c":
                slots.append(list(val))
            else:
                gap = [self.word("filler", test) for _ in range(self.rng.integers(1, 4))]
                slots.append([val[0], *gap, val[1]])
        order = self.rng.permutation(len(slots))
        return tuple(w for i in order for w in slots[i])

    def pair(self, idx: int, label: int, test: bool) -> SentencePair:
        common = self.key(test)
        if label == 1:
            k1 = k2 = [common, self.key(test)]
        else:
            k1 = [common, self.key(test)]
            k2 = [common, self.key(test)]
        n_shared = self.n_neutral + (label == 0)
        shared = [self.word("neutral", test) for _ in range(n_shared)]
        s1 = self.render(k1, shared, self.n_filler, test)
        s2 = self.render(k2, shared, self.n_filler, test)
        tag = "te" if test else "tr"
        return SentencePair(label, f"{tag}{idx}a", f"{tag}{idx}b", s1, s2)


def _role_vectors(tokens_by_role: dict[str, list[str]], dim: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
    noise_weight = np.sqrt(1.0 - ROLE_WEIGHT**2)
    out = {}
    for role, tokens in tokens_by_role.items():
        c = rng.standard_normal(dim)
        c /= np.linalg.norm(c)
        for t in tokens:
            u = rng.standard_normal(dim)
            u /= np.linalg.norm(u)
            v = ROLE_WEIGHT * c + noise_weight * u
            out[t] = v / np.linalg.norm(v)
    return out


def make_corpus(
    seed: int = 0,
    n_train: int = 400,
    n_test: int = 200,
    dim: int = 50,
    unseen_rate: float = 0.2,
    pos_rate: float = 0.5,
    n_unlabeled: int = 2000,
    n_neutral: int = 4,
    n_filler: int = 6,
) -> SyntheticCorpus:
    gen = _Generator(seed, unseen_rate, n_neutral, n_filler)
    rng = gen.rng
    train = [gen.pair(i, int(rng.random() < pos_rate), False) for i in range(n_train)]
    test = [gen.pair(i, int(rng.random() < pos_rate), True) for i in range(n_test)]

    phrases = []
    key_tokens = []
    for pools in gen.keys.values():
        phrases += pools.cont + pools.disc
        key_tokens += pools.words + [join_phrase(a, b) for a, b in pools.cont + pools.disc]
        key_tokens += [w for ab in pools.cont + pools.disc for w in ab]
    # distractor entries from filler words; mostly never observed, so they stay Unknown
    fillers = gen.filler[False] + gen.filler[True]
    for i in range(0, 40, 2):
        phrases.append((fillers[i], fillers[i + 1]))

    # unlabeled text so every phrase has continuity evidence, including held-out ones
    unlabeled = []
    for _ in range(n_unlabeled):
        test_side = bool(rng.random() < 0.5)
        keys = [gen.key(test_side) for _ in range(2)]
        unlabeled.append(list(gen.render(keys, [gen.word("neutral", test_side)], 3, test_side)))

    tokens_by_role = {
        "key": key_tokens,
        "neutral": gen.neutral[False] + gen.neutral[True],
        "filler": fillers,
    }
    vecs = _role_vectors(tokens_by_role, dim, rng)
    table = EmbeddingTable.from_dict(dict(sorted(vecs.items())), dim)

    seen = {w for p in train for w in (*p.words1, *p.words2)}
    test_words = {w for p in test for w in (*p.words1, *p.words2)}
    return SyntheticCorpus(
        train=train,
        test=test,
        lexicon=phrases,
        corpus=unlabeled,
        table=table,
        seen_units=seen,
        unseen_units=test_words - seen,
    )
