import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from oracles import knn_ref
from phrasekld.embeddings import (
    EmbeddingTable,
    cosine,
    load_embeddings,
    nearest_neighbors,
    save_embeddings,
    synthetic_table,
)
from phrasekld.errors import MalformedInputError


def _write(tmp_path, text, name="v.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_word2vec_text(tmp_path):
    t = load_embeddings(_write(tmp_path, "2 3\na 1 0 0\nb 0 1 0\n"))
    assert t.dim == 3 and len(t) == 2
    assert t["a"].tolist() == [1, 0, 0]
    assert t["b"].tolist() == [0, 1, 0]


@pytest.mark.parametrize(
    "text, line",
    [
        ("1 3\na 1 0\n", 2),  # dimension mismatch
        ("2 2\na 1 0\na 0 1\n", 3),  # duplicate token
        ("3 2\na 1 0\nb 0 1\n", None),  # vocab size mismatch
        ("2 2\na 1 0\nb 0 x\n", 3),
    ],
)
def test_load_errors(tmp_path, text, line):
    with pytest.raises(MalformedInputError) as exc:
        load_embeddings(_write(tmp_path, text))
    assert exc.value.line == line


def test_headerless_variant(tmp_path):
    t = load_embeddings(_write(tmp_path, "a 1 0\nb 0 1\n"), header=False)
    assert t.dim == 2 and t.tokens == ("a", "b")


def test_save_load_roundtrip(tmp_path):
    t = synthetic_table(["x", "y_z", "w"], dim=7, seed=3)
    path = tmp_path / "out.txt"
    save_embeddings(t, path)
    back = load_embeddings(path)
    assert back.tokens == t.tokens
    assert np.array_equal(back.matrix, t.matrix)


def test_synthetic_table_is_seeded_and_normalized():
    a = synthetic_table(["p", "q"], dim=200, seed=1)
    b = synthetic_table(["p", "q"], dim=200, seed=1)
    assert np.array_equal(a.matrix, b.matrix)
    assert np.allclose(np.linalg.norm(a.matrix, axis=1), 1.0)
    assert a.dim == 200


def test_cosine_examples():
    assert cosine([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)
    assert cosine([1, 0], [0, 1]) == 0.0
    assert cosine([1, 0], [1, 1]) == pytest.approx(1 / math.sqrt(2), abs=1e-8)
    assert cosine([0, 0], [1, 1]) == 0.0


def test_cosine_length_mismatch():
    with pytest.raises(ValueError):
        cosine([1, 2], [1, 2, 3])


vecs = hnp.arrays(np.float64, 6, elements=st.floats(-100, 100))


@given(vecs, vecs, st.floats(1e-3, 1e3))
def test_cosine_symmetric_scale_invariant_bounded(u, v, alpha):
    c = cosine(u, v)
    assert -1.0 <= c <= 1.0
    assert c == cosine(v, u)
    assert cosine(alpha * u, v) == pytest.approx(c, abs=1e-9)


TOY = EmbeddingTable.from_dict({"a": [1, 0], "b": [0.9, 0.1], "c": [0, 1]})


def test_knn_examples():
    assert [n.token for n in nearest_neighbors(TOY, "a", 1)] == ["b"]
    assert [n.token for n in nearest_neighbors(TOY, "a", 5, lambda t: t in {"b", "c"})] == ["b", "c"]
    assert nearest_neighbors(TOY, "a", 3, lambda t: False) == []


def test_knn_candidate_filter_words_only():
    t = synthetic_table(["side", "effects", "side_effects", "pick_off", "runner"], dim=10, seed=0)
    nbrs = nearest_neighbors(t, t["side_effects"], 10, lambda tok: "_" not in tok)
    assert nbrs and all("_" not in n.token for n in nbrs)


def test_knn_excludes_query_and_sorted():
    t = synthetic_table([f"w{i}" for i in range(50)], dim=8, seed=5)
    nbrs = nearest_neighbors(t, "w3", 10)
    assert "w3" not in [n.token for n in nbrs]
    sims = [n.similarity for n in nbrs]
    assert sims == sorted(sims, reverse=True)


def test_knn_tie_break_lexicographic():
    t = EmbeddingTable.from_dict({"q": [1, 0], "zz": [1, 1], "aa": [1, 1], "mm": [2, 2]})
    assert [n.token for n in nearest_neighbors(t, "q", 2)] == ["aa", "mm"]


def test_knn_errors():
    with pytest.raises(KeyError):
        nearest_neighbors(TOY, "nope", 1)
    with pytest.raises(ValueError):
        nearest_neighbors(TOY, "a", 0)


@given(st.integers(0, 10_000), st.integers(2, 60), st.integers(1, 12), st.integers(1, 10))
def test_knn_matches_full_scan(seed, n, dim, k):
    rng = np.random.default_rng(seed)
    m = rng.integers(-3, 4, size=(n, dim)).astype(float)  # small ints: plenty of exact ties
    vectors = {f"t{i:03d}": m[i] for i in range(n)}
    table = EmbeddingTable.from_dict(vectors)
    q = f"t{rng.integers(n):03d}"
    allowed = (lambda tok: int(tok[1:]) % 3 != 0) if seed % 2 else None
    assert [x.token for x in nearest_neighbors(table, q, k, allowed)] == knn_ref(vectors, q, k, allowed)
