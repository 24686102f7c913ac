"""Two-word phrase lexicon, ordered co-occurrence distance profiles and the continuity rule."""

from __future__ import annotations

import enum
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from phrasekld.errors import MalformedInputError

MAX_DIST = 5
CONTINUITY_RATIO = 10.0

Phrase = tuple[str, str]


class ContinuityClass(enum.Enum):
    CONTINUOUS = "continuous"
    DISCONTINUOUS = "discontinuous"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class PhraseLexicon:
    entries: frozenset[Phrase] = frozenset()
    profiles: dict[Phrase, np.ndarray] = field(default_factory=dict)
    classes: dict[Phrase, ContinuityClass] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, phrase: Phrase) -> bool:
        return phrase in self.entries

    def class_of(self, a: str, b: str) -> ContinuityClass:
        return self.classes.get((a, b), ContinuityClass.UNKNOWN)

    def phrase_tokens(self) -> set[str]:
        return {join_phrase(a, b) for a, b in self.entries}


def join_phrase(a: str, b: str) -> str:
    return f"{a}_{b}"


def is_phrase_token(token: str) -> bool:
    return "_" in token


def normalize(token: str) -> str:
    return token.lower()


def _valid_token(tok: str) -> bool:
    return bool(tok) and "_" not in tok and not any(c.isspace() for c in tok)


def _split_phrase(text: str) -> list[str]:
    text = text.strip()
    if " " in text or "\t" in text:
        return text.split()
    return text.split("_")


def from_pairs(pairs: Iterable[Phrase]) -> PhraseLexicon:
    entries = frozenset((normalize(a), normalize(b)) for a, b in pairs)
    for a, b in entries:
        if not (_valid_token(a) and _valid_token(b)):
            raise ValueError(f"invalid phrase tokens: {a!r} {b!r}")
    return PhraseLexicon(
        entries=entries,
        profiles={p: np.zeros(MAX_DIST, dtype=np.int64) for p in entries},
        classes={p: ContinuityClass.UNKNOWN for p in entries},
    )


def load_lexicon(path) -> PhraseLexicon:
    """Read one two-word phrase per line (``a b`` or ``a_b``); blank lines are skipped."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = [normalize(t) for t in _split_phrase(line)]
            if len(parts) != 2 or not all(_valid_token(t) for t in parts):
                raise MalformedInputError(
                    f"expected exactly two tokens, got {line.strip()!r}", path, lineno
                )
            pairs.append((parts[0], parts[1]))
    return from_pairs(pairs)


def count_distance_profile(
    corpus: Iterable[Iterable[str]], lexicon: PhraseLexicon, max_dist: int = MAX_DIST
) -> PhraseLexicon:
    """Count ordered (a ... b) co-occurrences at each distance 1..max_dist within sentences.

    Every index pair counts, so "pick pick off" adds to both c1 and c2 of
    (pick, off). Returns a new lexicon with classes recomputed; the input is
    left untouched.
    """
    if max_dist < 1:
        raise ValueError("max_dist must be >= 1")
    entries = lexicon.entries
    firsts = {a for a, _ in entries}
    counts = {p: np.zeros(max_dist, dtype=np.int64) for p in entries}
    for sentence in corpus:
        toks = [normalize(t) for t in sentence]
        n = len(toks)
        for i, a in enumerate(toks):
            if a not in firsts:
                continue
            for d in range(1, min(max_dist, n - 1 - i) + 1):
                prof = counts.get((a, toks[i + d]))
                if prof is not None:
                    prof[d - 1] += 1
    return with_profiles(lexicon, counts)


def with_profiles(lexicon: PhraseLexicon, profiles: dict[Phrase, np.ndarray]) -> PhraseLexicon:
    classes = {p: classify_continuity(prof) for p, prof in profiles.items()}
    return replace(lexicon, profiles=profiles, classes=classes)


def merge_profiles(*lexicons: PhraseLexicon) -> PhraseLexicon:
    """Element-wise sum of shard profiles over the same entry set."""
    base = lexicons[0]
    merged = {p: sum(lex.profiles[p] for lex in lexicons) for p in base.entries}
    return with_profiles(base, merged)


def continuity_average(profile) -> float:
    c = np.asarray(profile)
    return float(c[1:].sum()) / (len(c) - 1)


def classify_continuity(profile) -> ContinuityClass:
    """Continuous iff c1 >= 10 * mean(c2..c5); Unknown when there is no evidence at all."""
    c = np.asarray(profile)
    if len(c) != MAX_DIST or np.any(c < 0):
        raise ValueError(f"profile must be {MAX_DIST} nonnegative counts, got {profile!r}")
    if not c.any():
        return ContinuityClass.UNKNOWN
    # compare 4*c1 >= 10*(c2+..+c5) to stay in integers
    if (len(c) - 1) * int(c[0]) >= CONTINUITY_RATIO * int(c[1:].sum()):
        return ContinuityClass.CONTINUOUS
    return ContinuityClass.DISCONTINUOUS


def write_profiles(lexicon: PhraseLexicon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a, b in sorted(lexicon.entries):
            prof = lexicon.profiles.get((a, b), np.zeros(MAX_DIST, dtype=np.int64))
            counts = "\t".join(str(int(c)) for c in prof)
            fh.write(f"{join_phrase(a, b)}\t{counts}\t{lexicon.class_of(a, b).value}\n")


def read_profiles(path) -> PhraseLexicon:
    """Read a profile dump. The class column is optional and recomputed from counts when absent."""
    profiles: dict[Phrase, np.ndarray] = {}
    classes: dict[Phrase, ContinuityClass] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.split()
            if not fields or fields[0].startswith("#"):
                continue
            if len(fields) not in (1 + MAX_DIST, 2 + MAX_DIST):
                raise MalformedInputError(
                    f"expected phrase, {MAX_DIST} counts and optional class", path, lineno
                )
            parts = [normalize(t) for t in fields[0].split("_")]
            if len(parts) != 2 or not all(parts):
                raise MalformedInputError(f"bad phrase {fields[0]!r}", path, lineno)
            try:
                counts = np.array([int(x) for x in fields[1 : 1 + MAX_DIST]], dtype=np.int64)
            except ValueError:
                raise MalformedInputError("counts must be integers", path, lineno) from None
            if np.any(counts < 0):
                raise MalformedInputError("counts must be nonnegative", path, lineno)
            phrase = (parts[0], parts[1])
            if len(fields) == 2 + MAX_DIST:
                try:
                    classes[phrase] = ContinuityClass(fields[-1].lower())
                except ValueError:
                    raise MalformedInputError(f"unknown class {fields[-1]!r}", path, lineno) from None
            else:
                classes[phrase] = classify_continuity(counts)
            profiles[phrase] = counts
    return PhraseLexicon(entries=frozenset(profiles), profiles=profiles, classes=classes)


def read_corpus(path) -> list[list[str]]:
    with open(path, encoding="utf-8") as fh:
        return [[normalize(t) for t in line.split()] for line in fh]
