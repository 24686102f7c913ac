"""Unit discriminativity weights: TF-KLD, TF-IDF, NOWEIGHT, and back-off for unseen units."""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from phrasekld.embeddings import EmbeddingTable, TokenFilter, _top_k
from phrasekld.errors import MalformedInputError, ValidationError

DEFAULT_K = 3
DEFAULT_ALPHA = 0.5


class Scheme(enum.Enum):
    TFKLD = "tfkld"
    TFIDF = "tfidf"
    NOWEIGHT = "noweight"


class UnseenPolicy(enum.Enum):
    KNN = "knn"
    ZERO = "zero"
    TYPE_AVERAGE = "type-average"
    CONTEXT_AVERAGE = "context-average"


@dataclass(frozen=True)
class LabeledPair:
    u_units: tuple[str, ...]
    v_units: tuple[str, ...]
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")


@dataclass
class BernoulliCounts:
    pos_trials: int = 0
    pos_successes: int = 0
    neg_trials: int = 0
    neg_successes: int = 0


@dataclass(frozen=True)
class UnitWeightModel:
    weights: dict[str, float]
    scheme: Scheme = Scheme.TFKLD
    unseen_policy: UnseenPolicy = UnseenPolicy.KNN
    k: int = DEFAULT_K
    alpha: float = DEFAULT_ALPHA
    dim: int | None = None
    counts: dict[str, BernoulliCounts] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "unseen_policy", UnseenPolicy(self.unseen_policy))
        if self.k < 1:
            raise ValidationError("k must be >= 1")
        if any(not (w >= 0.0 and math.isfinite(w)) for w in self.weights.values()):
            raise ValidationError("weights must be finite and nonnegative")

    def __contains__(self, unit: str) -> bool:
        return unit in self.weights

    def with_policy(self, policy: UnseenPolicy | str | None = None, k: int | None = None) -> UnitWeightModel:
        return replace(
            self,
            unseen_policy=UnseenPolicy(policy) if policy is not None else self.unseen_policy,
            k=self.k if k is None else k,
        )


def bernoulli_kld(p: float, q: float) -> float:
    """KL(Bern(p) || Bern(q)) in nats. Both arguments must lie strictly inside (0, 1)."""
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise ValueError(f"probabilities must be in (0, 1), got p={p!r}, q={q!r}")
    kl = p * math.log(p / q) + (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    # rounding can push identical-ish distributions a hair below zero
    return max(kl, 0.0)


def _check_labels(pairs: Sequence[LabeledPair]) -> None:
    labels = {p.label for p in pairs}
    if labels != {0, 1}:
        raise ValidationError("training pairs must contain both labels")


def bernoulli_counts(pairs: Iterable[LabeledPair]) -> dict[str, BernoulliCounts]:
    """Directed trial/success counts, symmetrized over the two sentences of every pair.

    Instance (x|y) is a trial for unit w when w occurs in y, and a success
    when w also occurs in x.
    """
    counts: dict[str, BernoulliCounts] = defaultdict(BernoulliCounts)
    for pair in pairs:
        u, v = set(pair.u_units), set(pair.v_units)
        for x, y in ((u, v), (v, u)):
            for w in y:
                c = counts[w]
                hit = w in x
                if pair.label == 1:
                    c.pos_trials += 1
                    c.pos_successes += hit
                else:
                    c.neg_trials += 1
                    c.neg_successes += hit
    return dict(counts)


def kld_weight(c: BernoulliCounts, alpha: float = DEFAULT_ALPHA) -> float:
    """Add-alpha smoothed p (paraphrase) and q (non-paraphrase), then KL(p || q)."""
    p = (c.pos_successes + alpha) / (c.pos_trials + 2 * alpha)
    q = (c.neg_successes + alpha) / (c.neg_trials + 2 * alpha)
    return bernoulli_kld(p, q)


def fit_tf_kld(
    pairs: Sequence[LabeledPair],
    alpha: float = DEFAULT_ALPHA,
    k: int = DEFAULT_K,
    unseen_policy: UnseenPolicy | str = UnseenPolicy.KNN,
) -> UnitWeightModel:
    if alpha <= 0:
        raise ValidationError("alpha must be > 0")
    _check_labels(pairs)
    counts = bernoulli_counts(pairs)
    weights = {w: kld_weight(c, alpha) for w, c in counts.items()}
    return UnitWeightModel(
        weights=weights,
        scheme=Scheme.TFKLD,
        unseen_policy=UnseenPolicy(unseen_policy),
        k=k,
        alpha=alpha,
        counts=counts,
    )


def smoothed_idf(n_sentences: int, df: int) -> float:
    return math.log((n_sentences + 1) / (df + 1)) + 1.0


def fit_tf_idf(
    pairs: Sequence[LabeledPair],
    k: int = DEFAULT_K,
    unseen_policy: UnseenPolicy | str = UnseenPolicy.KNN,
) -> UnitWeightModel:
    """Smoothed IDF, ln((N+1)/(df+1)) + 1, with N counting both sentences of each pair."""
    if not pairs:
        raise ValidationError("empty training set")
    df: dict[str, int] = defaultdict(int)
    for pair in pairs:
        for sent in (pair.u_units, pair.v_units):
            for w in set(sent):
                df[w] += 1
    n = 2 * len(pairs)
    weights = {w: smoothed_idf(n, d) for w, d in df.items()}
    return UnitWeightModel(weights=weights, scheme=Scheme.TFIDF, unseen_policy=UnseenPolicy(unseen_policy), k=k)


def fit_no_weight(pairs: Sequence[LabeledPair] = ()) -> UnitWeightModel:
    units = {w for p in pairs for w in (*p.u_units, *p.v_units)}
    return UnitWeightModel(weights=dict.fromkeys(units, 1.0), scheme=Scheme.NOWEIGHT)


def fit_weights(
    pairs: Sequence[LabeledPair],
    scheme: Scheme | str,
    alpha: float = DEFAULT_ALPHA,
    k: int = DEFAULT_K,
    unseen_policy: UnseenPolicy | str = UnseenPolicy.KNN,
) -> UnitWeightModel:
    scheme = Scheme(scheme)
    if scheme is Scheme.TFKLD:
        return fit_tf_kld(pairs, alpha=alpha, k=k, unseen_policy=unseen_policy)
    if scheme is Scheme.TFIDF:
        return fit_tf_idf(pairs, k=k, unseen_policy=unseen_policy)
    return fit_no_weight(pairs)


class WeightResolver:
    """Resolves weights for known and unseen units against one embedding table.

    ``candidates`` restricts the KNN neighbor range (e.g. single words only).
    ``test_units`` is the set of unit types in the evaluation data, used by
    the type-average policy; when None, all known types are averaged.
    Results of KNN lookups are cached per unit.
    """

    def __init__(
        self,
        model: UnitWeightModel,
        table: EmbeddingTable | None = None,
        candidates: TokenFilter | None = None,
        test_units: Iterable[str] | None = None,
    ):
        self.model = model
        self.table = table
        self.candidates = candidates
        self._test_units = None if test_units is None else set(test_units)
        self._knn_cache: dict[str, float] = {}
        self._type_average: float | None = None
        self._known_idx: np.ndarray | None = None

    def known(self, unit: str) -> bool:
        return unit in self.model.weights

    def __call__(self, unit: str, left_ctx: str | None = None, right_ctx: str | None = None) -> float:
        model = self.model
        if model.scheme is Scheme.NOWEIGHT:
            return 1.0
        w = model.weights.get(unit)
        if w is not None:
            return w
        policy = model.unseen_policy
        if policy is UnseenPolicy.ZERO:
            return 0.0
        if policy is UnseenPolicy.TYPE_AVERAGE:
            return self.type_average()
        if policy is UnseenPolicy.CONTEXT_AVERAGE:
            ctx = [model.weights[c] for c in (left_ctx, right_ctx) if c is not None and c in model.weights]
            return sum(ctx) / len(ctx) if ctx else 0.0
        return self.knn_weight(unit)

    def type_average(self) -> float:
        if self._type_average is None:
            weights = self.model.weights
            if self._test_units is None:
                vals = list(weights.values())
            else:
                vals = [weights[u] for u in self._test_units if u in weights]
            self._type_average = float(math.fsum(vals) / len(vals)) if vals else 0.0
        return self._type_average

    def _known_candidates(self) -> np.ndarray:
        if self._known_idx is None:
            weights = self.model.weights
            pred = self.candidates
            self._known_idx = np.array(
                [
                    i
                    for i, t in enumerate(self.table.tokens)
                    if t in weights and (pred is None or pred(t))
                ],
                dtype=np.int64,
            )
        return self._known_idx

    def neighbors(self, unit: str):
        table = self.table
        if table is None or unit not in table:
            return []
        idx = self._known_candidates()
        qi = table.index[unit]
        idx = idx[idx != qi]
        return _top_k(table, table.matrix[qi], idx, self.model.k)

    def knn_weight(self, unit: str) -> float:
        cached = self._knn_cache.get(unit)
        if cached is not None:
            return cached
        nbrs = self.neighbors(unit)
        # units without an embedding (or without any weighted neighbor) are ignored
        w = float(math.fsum(self.model.weights[n.token] for n in nbrs) / len(nbrs)) if nbrs else 0.0
        self._knn_cache[unit] = w
        return w


def resolve_weight(
    unit: str,
    model: UnitWeightModel,
    table: EmbeddingTable | None = None,
    candidates: TokenFilter | None = None,
    left_ctx: str | None = None,
    right_ctx: str | None = None,
    test_units: Iterable[str] | None = None,
) -> float:
    return WeightResolver(model, table, candidates, test_units)(unit, left_ctx, right_ctx)


def save_weights(model: UnitWeightModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# scheme={model.scheme.value}\n")
        fh.write(f"# alpha={model.alpha!r}\n")
        fh.write(f"# k={model.k}\n")
        fh.write(f"# unseen_policy={model.unseen_policy.value}\n")
        if model.dim is not None:
            fh.write(f"# dim={model.dim}\n")
        for unit in sorted(model.weights):
            fh.write(f"{unit}\t{model.weights[unit]!r}\n")


def load_weights(path) -> UnitWeightModel:
    meta: dict[str, str] = {}
    weights: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, sep, val = line[1:].strip().partition("=")
                if not sep:
                    raise MalformedInputError(f"bad metadata line {line!r}", path, lineno)
                meta[key.strip()] = val.strip()
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise MalformedInputError("expected unit<TAB>weight", path, lineno)
            try:
                w = float(fields[1])
            except ValueError:
                raise MalformedInputError(f"bad weight {fields[1]!r}", path, lineno) from None
            if not (w >= 0 and math.isfinite(w)):
                raise MalformedInputError(f"weight must be finite and >= 0, got {w!r}", path, lineno)
            if fields[0] in weights:
                raise MalformedInputError(f"duplicate unit {fields[0]!r}", path, lineno)
            weights[fields[0]] = w
    try:
        return UnitWeightModel(
            weights=weights,
            scheme=Scheme(meta.get("scheme", Scheme.TFKLD.value)),
            unseen_policy=UnseenPolicy(meta.get("unseen_policy", UnseenPolicy.KNN.value)),
            k=int(meta.get("k", DEFAULT_K)),
            alpha=float(meta.get("alpha", DEFAULT_ALPHA)),
            dim=int(meta["dim"]) if "dim" in meta else None,
        )
    except (ValueError, ValidationError) as exc:
        raise MalformedInputError(f"bad metadata: {exc}", path) from None


def word_only(token: str) -> bool:
    """Candidate filter restricting KNN neighbors to single words."""
    return "_" not in token

