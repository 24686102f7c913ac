"""Dense unit vectors with cosine similarity and exact k-nearest-neighbor search."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from phrasekld.errors import MalformedInputError

DEFAULT_DIM = 200

TokenFilter = Callable[[str], bool]


class Neighbor(NamedTuple):
    token: str
    similarity: float


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    """Immutable token -> vector store.

    ``matrix`` rows follow ``tokens``; row norms are precomputed once so that
    scans are a single matrix-vector product.
    """

    tokens: tuple[str, ...]
    matrix: np.ndarray
    index: Mapping[str, int]
    norms: np.ndarray

    @classmethod
    def from_dict(cls, vectors: Mapping[str, Iterable[float]], dim: int | None = None) -> EmbeddingTable:
        tokens = tuple(vectors)
        rows = [np.asarray(vectors[t], dtype=np.float64) for t in tokens]
        if dim is None:
            dim = len(rows[0]) if rows else DEFAULT_DIM
        for t, r in zip(tokens, rows):
            if r.shape != (dim,):
                raise ValueError(f"vector for {t!r} has shape {r.shape}, expected ({dim},)")
        matrix = np.vstack(rows) if rows else np.zeros((0, dim))
        return cls._build(tokens, matrix)

    @classmethod
    def _build(cls, tokens: tuple[str, ...], matrix: np.ndarray) -> EmbeddingTable:
        index = {t: i for i, t in enumerate(tokens)}
        if len(index) != len(tokens):
            raise ValueError("duplicate tokens")
        matrix = np.ascontiguousarray(matrix, dtype=np.float64)
        matrix.setflags(write=False)
        norms = np.linalg.norm(matrix, axis=1)
        norms.setflags(write=False)
        return cls(tokens, matrix, index, norms)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def __getitem__(self, token: str) -> np.ndarray:
        return self.matrix[self.index[token]]

    def get(self, token: str) -> np.ndarray | None:
        i = self.index.get(token)
        return None if i is None else self.matrix[i]


def load_embeddings(path, header: bool = True) -> EmbeddingTable:
    """Parse word2vec text format. With ``header=False`` the dimension is inferred from line one."""
    tokens: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    expected_n = None
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.rstrip("\n").split()
            if lineno == 1 and header:
                try:
                    expected_n, dim = int(fields[0]), int(fields[1])
                except (ValueError, IndexError):
                    raise MalformedInputError("header must be '<vocab_size> <dim>'", path, 1) from None
                if len(fields) != 2 or dim < 1 or expected_n < 0:
                    raise MalformedInputError("header must be '<vocab_size> <dim>'", path, 1)
                continue
            if not fields:
                continue
            token, values = fields[0], fields[1:]
            if dim is None:
                dim = len(values)
                if dim < 1:
                    raise MalformedInputError("no vector values", path, lineno)
            if len(values) != dim:
                raise MalformedInputError(
                    f"dimension mismatch for {token!r}: {len(values)} values, expected {dim}",
                    path,
                    lineno,
                )
            if token in seen:
                raise MalformedInputError(f"duplicate token {token!r}", path, lineno)
            try:
                rows.append([float(v) for v in values])
            except ValueError:
                raise MalformedInputError(f"non-numeric value for {token!r}", path, lineno) from None
            seen.add(token)
            tokens.append(token)
    if expected_n is not None and expected_n != len(tokens):
        raise MalformedInputError(f"header announces {expected_n} vectors, found {len(tokens)}", path)
    matrix = np.array(rows, dtype=np.float64) if rows else np.zeros((0, dim or DEFAULT_DIM))
    if not np.all(np.isfinite(matrix)):
        raise MalformedInputError("non-finite vector value", path)
    return EmbeddingTable._build(tuple(tokens), matrix)


def save_embeddings(table: EmbeddingTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table)} {table.dim}\n")
        for tok, row in zip(table.tokens, table.matrix):
            fh.write(tok + " " + " ".join(repr(float(x)) for x in row) + "\n")


def cosine(u, v) -> float:
    """Cosine similarity; 0 when either vector has zero norm."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def nearest_neighbors(
    table: EmbeddingTable,
    query: str | np.ndarray,
    k: int,
    candidates: TokenFilter | None = None,
) -> list[Neighbor]:
    """Exact top-k by cosine among tokens accepted by ``candidates`` (all tokens if None).

    The query token itself is never returned. Ties go to the
    lexicographically smaller token.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    exclude = None
    if isinstance(query, str):
        if query not in table:
            raise KeyError(f"query token {query!r} not in embedding table")
        exclude = table.index[query]
        qvec = table.matrix[exclude]
    else:
        qvec = np.asarray(query, dtype=np.float64)
        if qvec.shape != (table.dim,):
            raise ValueError(f"query has shape {qvec.shape}, expected ({table.dim},)")
    idx = np.array(
        [
            i
            for i, t in enumerate(table.tokens)
            if i != exclude and (candidates is None or candidates(t))
        ],
        dtype=np.int64,
    )
    return _top_k(table, qvec, idx, k)


def _top_k(table: EmbeddingTable, qvec: np.ndarray, idx: np.ndarray, k: int) -> list[Neighbor]:
    if idx.size == 0:
        return []
    sims = cosine_scan(table, qvec, idx)
    if idx.size > k:
        # keep everything tied with the k-th best so the token tie-break stays exact
        kth = np.partition(sims, idx.size - k)[idx.size - k]
        rows = np.flatnonzero(sims >= kth)
    else:
        rows = np.arange(idx.size)
    order = sorted(rows, key=lambda r: (-sims[r], table.tokens[idx[r]]))[:k]
    return [Neighbor(table.tokens[idx[r]], float(sims[r])) for r in order]


def cosine_scan(table: EmbeddingTable, qvec: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Cosine of ``qvec`` against rows ``idx``, with the zero-norm convention."""
    qn = np.linalg.norm(qvec)
    norms = table.norms[idx]
    dots = table.matrix[idx] @ qvec
    denom = norms * qn
    with np.errstate(invalid="ignore", divide="ignore"):
        sims = np.where(denom > 0, dots / np.where(denom > 0, denom, 1.0), 0.0)
    return np.clip(sims, -1.0, 1.0)


def synthetic_table(tokens: Iterable[str], dim: int = DEFAULT_DIM, seed: int = 0) -> EmbeddingTable:
    """Seeded unit-normal vectors scaled to unit length, one per token."""
    tokens = tuple(tokens)
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((len(tokens), dim))
    m /= np.linalg.norm(m, axis=1, keepdims=True)
    return EmbeddingTable._build(tokens, m)
