"""Independent reference implementations used only by the tests."""

import itertools
import math
from functools import lru_cache

import mpmath


def cosine_ref(u, v):
    dot = math.fsum(a * b for a, b in zip(u, v))
    nu = math.sqrt(math.fsum(a * a for a in u))
    nv = math.sqrt(math.fsum(b * b for b in v))
    if nu == 0 or nv == 0:
        return 0.0
    return dot / (nu * nv)


def knn_ref(vectors: dict, query_token, k, allowed=None):
    q = vectors[query_token]
    scored = [
        (cosine_ref(q, vec), tok)
        for tok, vec in vectors.items()
        if tok != query_token and (allowed is None or allowed(tok))
    ]
    scored.sort(key=lambda st: (-st[0], st[1]))
    return [tok for _, tok in scored[:k]]


def kld_ref(p, q, dps=50):
    with mpmath.workdps(dps):
        p, q = mpmath.mpf(p), mpmath.mpf(q)
        return float(p * mpmath.log(p / q) + (1 - p) * mpmath.log((1 - p) / (1 - q)))


def edit_distance_ref(a, b):
    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))

    return d(len(a), len(b))


def _acc_f1(preds, gold):
    tp = sum(p == 1 and g == 1 for p, g in zip(preds, gold))
    fp = sum(p == 1 and g == 0 for p, g in zip(preds, gold))
    fn = sum(p == 0 and g == 1 for p, g in zip(preds, gold))
    acc = sum(p == g for p, g in zip(preds, gold)) / len(gold)
    f1 = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) else 0.0
    return acc, f1


def exact_randomization_p(a, b, gold):
    """Fraction of all 2^n swap patterns whose |metric difference| reaches the observed one."""
    obs_acc = abs(_acc_f1(a, gold)[0] - _acc_f1(b, gold)[0])
    obs_f1 = abs(_acc_f1(a, gold)[1] - _acc_f1(b, gold)[1])
    hit_acc = hit_f1 = 0
    total = 0
    for mask in itertools.product((False, True), repeat=len(gold)):
        aa = [y if s else x for x, y, s in zip(a, b, mask)]
        bb = [x if s else y for x, y, s in zip(a, b, mask)]
        (acc_a, f1_a), (acc_b, f1_b) = _acc_f1(aa, gold), _acc_f1(bb, gold)
        hit_acc += abs(acc_a - acc_b) >= obs_acc - 1e-12
        hit_f1 += abs(f1_a - f1_b) >= obs_f1 - 1e-12
        total += 1
    return {"accuracy": hit_acc / total, "f1": hit_f1 / total}
