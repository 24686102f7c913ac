"""Accuracy / F1 reports and the paired approximate randomization test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from phrasekld.errors import ValidationError

DEFAULT_ITERATIONS = 10_000
_CHUNK = 1024


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    f1: float
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def confusion(self) -> tuple[int, int, int, int]:
        return self.tp, self.fp, self.tn, self.fn

    def as_text(self) -> str:
        return (
            f"accuracy  {self.accuracy:.4f}\n"
            f"f1        {self.f1:.4f}\n"
            f"tp        {self.tp}\nfp        {self.fp}\ntn        {self.tn}\nfn        {self.fn}\n"
            f"n         {self.n}\n"
        )

    def as_tsv(self) -> str:
        rows = [("accuracy", repr(self.accuracy)), ("f1", repr(self.f1))]
        rows += [(k, str(v)) for k, v in zip(("tp", "fp", "tn", "fn", "n"), (*self.confusion, self.n))]
        return "".join(f"{k}\t{v}\n" for k, v in rows)


def _binary(x, name: str) -> np.ndarray:
    a = np.asarray(x)
    if a.ndim != 1 or not np.all((a == 0) | (a == 1)):
        raise ValidationError(f"{name} must be a 1-d 0/1 sequence")
    return a.astype(np.int64)


def evaluate(preds, gold) -> EvalReport:
    """Accuracy and F1 with "paraphrase" (label 1) as the positive class."""
    p = _binary(preds, "preds")
    g = _binary(gold, "gold")
    if len(p) != len(g):
        raise ValidationError(f"length mismatch: {len(p)} predictions vs {len(g)} gold labels")
    if len(g) == 0:
        raise ValidationError("empty evaluation set")
    tp = int(np.sum((p == 1) & (g == 1)))
    fp = int(np.sum((p == 1) & (g == 0)))
    tn = int(np.sum((p == 0) & (g == 0)))
    fn = int(np.sum((p == 0) & (g == 1)))
    denom = 2 * tp + fp + fn
    return EvalReport(
        accuracy=(tp + tn) / len(g),
        f1=2 * tp / denom if denom else 0.0,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
    )


def _metrics_batch(P: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Accuracy and F1 for each row of a prediction matrix."""
    g1 = g == 1
    tp = np.sum((P == 1) & g1, axis=1)
    fp = np.sum((P == 1) & ~g1, axis=1)
    fn = np.sum((P == 0) & g1, axis=1)
    acc = np.mean(P == g, axis=1)
    denom = 2 * tp + fp + fn
    f1 = np.where(denom > 0, 2 * tp / np.maximum(denom, 1), 0.0)
    return acc, f1


def swap_statistics(a: np.ndarray, b: np.ndarray, g: np.ndarray, swaps: np.ndarray) -> dict[str, np.ndarray]:
    """|metric(a') - metric(b')| for each row of a boolean swap mask."""
    A = np.where(swaps, b, a)
    B = np.where(swaps, a, b)
    acc_a, f1_a = _metrics_batch(A, g)
    acc_b, f1_b = _metrics_batch(B, g)
    return {"accuracy": np.abs(acc_a - acc_b), "f1": np.abs(f1_a - f1_b)}


def approx_randomization(
    preds_a, preds_b, gold, iterations: int = DEFAULT_ITERATIONS, seed: int = 0
) -> dict[str, float]:
    """Two-sided paired approximate randomization p-values for accuracy and F1.

    Each iteration swaps the two systems' outputs at every position with
    probability 1/2. p = (#{pseudo >= observed} + 1) / (iterations + 1).
    """
    a = _binary(preds_a, "preds_a")
    b = _binary(preds_b, "preds_b")
    g = _binary(gold, "gold")
    if not (len(a) == len(b) == len(g)):
        raise ValidationError("preds_a, preds_b and gold must have equal lengths")
    if iterations < 1:
        raise ValidationError("iterations must be >= 1")
    observed = swap_statistics(a, b, g, np.zeros((1, len(g)), dtype=bool))
    observed = {m: v[0] for m, v in observed.items()}
    hits = {m: 0 for m in observed}
    rng = np.random.default_rng(seed)
    done = 0
    while done < iterations:
        m = min(_CHUNK, iterations - done)
        swaps = rng.random((m, len(g))) < 0.5
        stats = swap_statistics(a, b, g, swaps)
        for name, vals in stats.items():
            # absorb float noise in the equality case (identical outputs give equal stats)
            hits[name] += int(np.sum(vals >= observed[name] - 1e-12))
        done += m
    return {name: (hits[name] + 1) / (iterations + 1) for name in observed}
