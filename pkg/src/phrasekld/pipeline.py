"""End-to-end paraphrase pipeline: MSRP I/O, featurization, tuning, and the comparison experiment."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from phrasekld.classifier import DEFAULT_C_GRID, DEFAULT_SEED, train_linear, tune
from phrasekld.embeddings import EmbeddingTable, cosine
from phrasekld.errors import MalformedInputError, ValidationError
from phrasekld.evaluation import DEFAULT_ITERATIONS, EvalReport, approx_randomization, evaluate
from phrasekld.lexicon import PhraseLexicon, is_phrase_token, normalize
from phrasekld.reformat import reformat_sentence
from phrasekld.representation import N_MT, mt_metrics, sentence_vector
from phrasekld.weighting import (
    DEFAULT_ALPHA,
    DEFAULT_K,
    LabeledPair,
    Scheme,
    UnitWeightModel,
    UnseenPolicy,
    WeightResolver,
    fit_weights,
    word_only,
)

log = logging.getLogger(__name__)

MSRP_HEADER = ("Quality", "#1 ID", "#2 ID", "#1 String", "#2 String")
DEFAULT_K_GRID = (1, 3, 5)


@dataclass(frozen=True)
class SentencePair:
    label: int
    id1: str
    id2: str
    words1: tuple[str, ...]
    words2: tuple[str, ...]


def tokenize(text: str) -> tuple[str, ...]:
    return tuple(normalize(t) for t in text.split())


def read_msrp(path) -> list[SentencePair]:
    """Read an MSRP-style TSV (header row, then Quality, #1 ID, #2 ID, #1 String, #2 String)."""
    pairs = []
    with open(path, encoding="utf-8-sig") as fh:
        header = fh.readline().rstrip("\r\n").split("\t")
        if tuple(h.strip() for h in header) != MSRP_HEADER:
            raise MalformedInputError(f"expected header {chr(9).join(MSRP_HEADER)!r}", path, 1)
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 5:
                raise MalformedInputError(f"expected 5 tab-separated fields, got {len(fields)}", path, lineno)
            if fields[0].strip() not in ("0", "1"):
                raise MalformedInputError(f"Quality must be 0 or 1, got {fields[0]!r}", path, lineno)
            pairs.append(
                SentencePair(int(fields[0]), fields[1], fields[2], tokenize(fields[3]), tokenize(fields[4]))
            )
    return pairs


def write_msrp(pairs: Sequence[SentencePair], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(MSRP_HEADER) + "\n")
        for p in pairs:
            fh.write(f"{p.label}\t{p.id1}\t{p.id2}\t{' '.join(p.words1)}\t{' '.join(p.words2)}\n")


def to_units(pairs: Sequence[SentencePair], lexicon: PhraseLexicon | None) -> list[LabeledPair]:
    """Unit sequences per pair: plain words, or reformatted with ``lexicon``."""
    if lexicon is None:
        return [LabeledPair(p.words1, p.words2, p.label) for p in pairs]
    return [
        LabeledPair(tuple(reformat_sentence(p.words1, lexicon)), tuple(reformat_sentence(p.words2, lexicon)), p.label)
        for p in pairs
    ]


def has_phrase(pair: LabeledPair) -> bool:
    return any(is_phrase_token(u) for u in (*pair.u_units, *pair.v_units))


def subset_indices(unit_pairs: Sequence[LabeledPair]) -> list[int]:
    """Pairs in which at least one sentence contains a detected phrase."""
    return [i for i, p in enumerate(unit_pairs) if has_phrase(p)]


@lru_cache(maxsize=1 << 16)
def _mt_cached(words1: tuple[str, ...], words2: tuple[str, ...]) -> np.ndarray:
    row = mt_metrics(words1, words2)
    row.setflags(write=False)
    return row


@dataclass(frozen=True)
class FeatureLayout:
    dim: int
    m: int
    embedding: bool = True
    mt: bool = True

    @property
    def width(self) -> int:
        return (1 + 2 * self.dim if self.embedding else 0) + (self.m if self.mt else 0)


def featurize(
    unit_pairs: Sequence[LabeledPair],
    word_pairs: Sequence[SentencePair],
    resolver: WeightResolver | None,
    table: EmbeddingTable | None,
    layout: FeatureLayout,
    count_once: bool = False,
) -> np.ndarray:
    """Feature matrix [cosine, sum, |diff|, mt] per pair; parts omitted per ``layout``."""
    rows = []
    for up, wp in zip(unit_pairs, word_pairs):
        parts = []
        if layout.embedding:
            v1 = sentence_vector(up.u_units, resolver, table, count_once)
            v2 = sentence_vector(up.v_units, resolver, table, count_once)
            parts += [[cosine(v1, v2)], v1 + v2, np.abs(v1 - v2)]
        if layout.mt:
            parts.append(_mt_cached(wp.words1, wp.words2))
        rows.append(np.concatenate(parts) if parts else np.zeros(0))
    return np.vstack(rows) if rows else np.zeros((0, layout.width))


def write_features(X: np.ndarray, labels, layout: FeatureLayout, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# dim={layout.dim}\tm={layout.m}\tembedding={int(layout.embedding)}\tmt={int(layout.mt)}\n")
        for y, row in zip(labels, X):
            fh.write(str(int(y)) + "".join("\t" + repr(float(v)) for v in row) + "\n")


def read_features(path) -> tuple[np.ndarray, np.ndarray, FeatureLayout]:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise MalformedInputError("missing '# dim=.. m=..' metadata line", path, 1)
        try:
            meta = dict(kv.split("=", 1) for kv in first[1:].split())
            layout = FeatureLayout(
                dim=int(meta["dim"]),
                m=int(meta["m"]),
                embedding=bool(int(meta.get("embedding", 1))),
                mt=bool(int(meta.get("mt", 1))),
            )
        except (KeyError, ValueError):
            raise MalformedInputError(f"bad metadata line {first.strip()!r}", path, 1) from None
        labels, rows = [], []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 1 + layout.width:
                raise MalformedInputError(
                    f"expected {layout.width} features, got {len(fields) - 1}", path, lineno
                )
            try:
                y = int(fields[0])
                row = [float(v) for v in fields[1:]]
            except ValueError:
                raise MalformedInputError("non-numeric field", path, lineno) from None
            if y not in (0, 1):
                raise MalformedInputError(f"label must be 0/1, got {y}", path, lineno)
            labels.append(y)
            rows.append(row)
    X = np.array(rows, dtype=np.float64).reshape(len(rows), layout.width)
    return X, np.array(labels, dtype=np.int64), layout


@dataclass(frozen=True)
class MethodConfig:
    name: str
    phrases: bool = True
    scheme: Scheme = Scheme.TFKLD
    policy: UnseenPolicy = UnseenPolicy.KNN
    embedding: bool = True
    mt: bool = True


METHODS = {
    m.name: m
    for m in (
        MethodConfig("NOWEIGHT", scheme=Scheme.NOWEIGHT, mt=False),
        MethodConfig("MT", embedding=False),
        MethodConfig("WORD", phrases=False),
        MethodConfig("WORD+PHRASE"),
        MethodConfig("NOWEIGHT+MT", scheme=Scheme.NOWEIGHT),
        MethodConfig("TF-IDF+MT", scheme=Scheme.TFIDF, policy=UnseenPolicy.ZERO),
        MethodConfig("TF-KLD+MT", policy=UnseenPolicy.ZERO),
        MethodConfig("TYPE-AVERAGE", policy=UnseenPolicy.TYPE_AVERAGE),
        MethodConfig("CONTEXT-AVERAGE", policy=UnseenPolicy.CONTEXT_AVERAGE),
    )
}

# report sections: (title, [(row label, method name)])
REPORT_SECTIONS = (
    (
        "methods",
        [("baseline", None), ("NOWEIGHT", "NOWEIGHT"), ("MT", "MT"), ("WORD", "WORD"), ("WORD+PHRASE", "WORD+PHRASE")],
    ),
    (
        "reweighting (with MT features)",
        [("NOWEIGHT", "NOWEIGHT+MT"), ("TF-IDF", "TF-IDF+MT"), ("TF-KLD", "TF-KLD+MT"), ("TF-KLD-KNN", "WORD+PHRASE")],
    ),
    (
        "unseen-unit schemes",
        [
            ("Zero", "TF-KLD+MT"),
            ("Type-average", "TYPE-AVERAGE"),
            ("Context-average", "CONTEXT-AVERAGE"),
            ("KNN", "WORD+PHRASE"),
        ],
    ),
)


@dataclass
class MethodResult:
    name: str
    report: EvalReport
    preds: np.ndarray
    C: float | None
    k: int | None


class Experiment:
    """Runs method configurations on one train/test split with shared preprocessing."""

    def __init__(
        self,
        train: Sequence[SentencePair],
        test: Sequence[SentencePair],
        lexicon: PhraseLexicon,
        table: EmbeddingTable,
        seed: int = DEFAULT_SEED,
        C_grid: Sequence[float] = DEFAULT_C_GRID,
        k_grid: Sequence[int] = DEFAULT_K_GRID,
        alpha: float = DEFAULT_ALPHA,
        subset: bool = False,
        count_once: bool = False,
        loss: str = "hinge",
    ):
        self.seed = seed
        self.C_grid = tuple(C_grid)
        self.k_grid = tuple(k_grid)
        self.alpha = alpha
        self.count_once = count_once
        self.loss = loss
        self.table = table
        units = {
            True: (to_units(train, lexicon), to_units(test, lexicon)),
            False: (to_units(train, None), to_units(test, None)),
        }
        if subset:
            keep_train = subset_indices(units[True][0])
            keep_test = subset_indices(units[True][1])
            train = [train[i] for i in keep_train]
            test = [test[i] for i in keep_test]
            units = {
                ph: ([tr[i] for i in keep_train], [te[i] for i in keep_test]) for ph, (tr, te) in units.items()
            }
        if not train or not test:
            raise ValidationError("empty train or test set")
        self.train, self.test = list(train), list(test)
        self.units = units
        self.y_train = np.array([p.label for p in self.train])
        self.y_test = np.array([p.label for p in self.test])
        self.results: dict[str, MethodResult] = {}

    def _layout(self, cfg: MethodConfig) -> FeatureLayout:
        return FeatureLayout(dim=self.table.dim, m=N_MT, embedding=cfg.embedding, mt=cfg.mt)

    def _features(self, cfg, fit_idx, eval_idx, eval_is_test: bool, k: int):
        tr_units, te_units = self.units[cfg.phrases]
        fit_units = [tr_units[i] for i in fit_idx]
        fit_words = [self.train[i] for i in fit_idx]
        if eval_is_test:
            ev_units, ev_words = te_units, self.test
        else:
            ev_units = [tr_units[i] for i in eval_idx]
            ev_words = [self.train[i] for i in eval_idx]
        layout = self._layout(cfg)
        resolver = None
        if cfg.embedding:
            model = fit_weights(fit_units, cfg.scheme, alpha=self.alpha, k=k, unseen_policy=cfg.policy)
            test_types = {u for p in ev_units for u in (*p.u_units, *p.v_units)}
            resolver = WeightResolver(
                model, self.table, candidates=None if cfg.phrases else word_only, test_units=test_types
            )
        X_fit = featurize(fit_units, fit_words, resolver, self.table, layout, self.count_once)
        X_ev = featurize(ev_units, ev_words, resolver, self.table, layout, self.count_once)
        return X_fit, X_ev

    def run(self, name: str) -> MethodResult:
        if name in self.results:
            return self.results[name]
        cfg = METHODS[name]
        uses_k = cfg.embedding and cfg.scheme is not Scheme.NOWEIGHT and cfg.policy is UnseenPolicy.KNN
        k_grid = self.k_grid if uses_k else (DEFAULT_K,)
        tuned = tune(
            self.y_train,
            lambda f, d, k: self._features(cfg, f, d, False, k),
            C_grid=self.C_grid,
            k_grid=k_grid,
            seed=self.seed,
            loss=self.loss,
        )
        all_idx = np.arange(len(self.train))
        X_tr, X_te = self._features(cfg, all_idx, None, True, tuned.k)
        model = train_linear(X_tr, self.y_train, C=tuned.C, seed=self.seed, loss=self.loss)
        preds = model.predict(X_te)
        res = MethodResult(name, evaluate(preds, self.y_test), preds, tuned.C, tuned.k if uses_k else None)
        log.info("%s: acc=%.4f f1=%.4f C=%s k=%s", name, res.report.accuracy, res.report.f1, res.C, res.k)
        self.results[name] = res
        return res

    def majority(self) -> MethodResult:
        label = int(np.sum(self.y_train == 1) >= np.sum(self.y_train == 0))
        preds = np.full(len(self.y_test), label)
        return MethodResult("baseline", evaluate(preds, self.y_test), preds, None, None)

    def report(self, iterations: int = DEFAULT_ITERATIONS) -> str:
        """Table-style text report; p-values compare each row against the MT-only system."""
        mt = self.run("MT")
        lines = [
            f"# train={len(self.train)} test={len(self.test)} seed={self.seed} dim={self.table.dim}",
        ]
        for title, rows in REPORT_SECTIONS:
            lines.append("")
            lines.append(f"## {title}")
            lines.append(f"{'method':<16} {'acc':>6} {'F1':>6} {'p_acc':>7} {'p_F1':>7} {'C':>7} {'k':>3}")
            for label, name in rows:
                res = self.majority() if name is None else self.run(name)
                pv = approx_randomization(res.preds, mt.preds, self.y_test, iterations=iterations, seed=self.seed)
                C = "-" if res.C is None else f"{res.C:g}"
                k = "-" if res.k is None else str(res.k)
                lines.append(
                    f"{label:<16} {res.report.accuracy:6.3f} {res.report.f1:6.3f} "
                    f"{pv['accuracy']:7.4f} {pv['f1']:7.4f} {C:>7} {k:>3}"
                )
        return "\n".join(lines) + "\n"
