"""Count-based word vectors: window co-occurrence counts, positive PMI and a
seeded Gaussian random projection down to a dense embedding."""

from __future__ import annotations

import gzip
import os
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp

from .embeddings import EmbeddingModel
from .parallel import pmap

_TOKEN = re.compile(r"[^\W_]+")
PROJECTION_BLOCK = 256


def tokenize(text: str) -> list[str]:
    """Lowercase and split on runs of non-alphanumeric characters."""
    return _TOKEN.findall(text.lower())


def read_corpus(path: str | os.PathLike) -> Iterator[list[str]]:
    """One tokenized document per line of a UTF-8 text file (``.gz`` allowed)."""
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rt", encoding="utf-8") as fh:
        for line in fh:
            toks = tokenize(line)
            if toks:
                yield toks


@dataclass
class CooccurrenceCounts:
    vocab: list[str]
    counts: sp.csr_matrix

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def row_sums(self) -> np.ndarray:
        return np.asarray(self.counts.sum(axis=1)).ravel()

    @property
    def col_sums(self) -> np.ndarray:
        return np.asarray(self.counts.sum(axis=0)).ravel()

    def get(self, a: str, b: str) -> int:
        i, j = self.vocab.index(a), self.vocab.index(b)
        return int(self.counts[i, j])


@dataclass
class PpmiMatrix:
    vocab: list[str]
    values: sp.csr_matrix

    def get(self, a: str, b: str) -> float:
        i, j = self.vocab.index(a), self.vocab.index(b)
        return float(self.values[i, j])


def count_cooccurrences(corpus: Iterable[Sequence[str]], window: int = 2, min_count: int = 5) -> CooccurrenceCounts:
    """Symmetric, unweighted window counts.

    Each sequence is a document; windows never span two documents. Tokens
    rarer than ``min_count`` are removed from the sequences before counting.
    Vocabulary is ordered by descending frequency, then alphabetically.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    docs = [list(d) for d in corpus]
    freq = Counter(t for d in docs for t in d)
    vocab = sorted((t for t, n in freq.items() if n >= min_count), key=lambda t: (-freq[t], t))
    index = {t: i for i, t in enumerate(vocab)}

    rows, cols = [], []
    for d in docs:
        ids = np.fromiter((index[t] for t in d if t in index), dtype=np.int64)
        for off in range(1, window + 1):
            if len(ids) <= off:
                break
            left, right = ids[:-off], ids[off:]
            rows += [left, right]
            cols += [right, left]
    n = len(vocab)
    if rows:
        r, c = np.concatenate(rows), np.concatenate(cols)
    else:
        r = c = np.zeros(0, dtype=np.int64)
    counts = sp.coo_matrix((np.ones(len(r), dtype=np.int64), (r, c)), shape=(n, n)).tocsr()
    counts.sum_duplicates()
    counts.sort_indices()
    return CooccurrenceCounts(vocab, counts)


def ppmi(counts: CooccurrenceCounts) -> PpmiMatrix:
    """max(0, ln p(a,b) / (p(a) p(b))) with probabilities from the count marginals."""
    total = counts.total
    if total <= 0:
        raise ValueError("cannot compute PMI from empty counts")
    C = counts.counts.tocoo()
    row, col = counts.row_sums.astype(np.float64), counts.col_sums.astype(np.float64)
    p_ab = C.data / total
    p_a = row[C.row] / total
    p_b = col[C.col] / total
    pmi = np.log(p_ab / (p_a * p_b))
    keep = pmi > 0
    vals = sp.coo_matrix((pmi[keep], (C.row[keep], C.col[keep])), shape=C.shape).tocsr()
    vals.sort_indices()
    return PpmiMatrix(list(counts.vocab), vals)


def projection_block(n_rows: int, target_dim: int, seed: int, block: int) -> np.ndarray:
    """Columns ``[block*B, (block+1)*B)`` of the projection matrix.

    Each block has its own generator keyed on (seed, block), so any subset of
    blocks can be produced independently and in any order.
    """
    lo = block * PROJECTION_BLOCK
    width = min(PROJECTION_BLOCK, target_dim - lo)
    rng = np.random.default_rng([seed, block])
    return rng.standard_normal((n_rows, width)) / np.sqrt(target_dim)


def random_projection(matrix: PpmiMatrix, target_dim: int = 2000, seed: int = 0, threads: int = 1) -> EmbeddingModel:
    """Project sparse rows with an N(0, 1/target_dim) Gaussian matrix."""
    if target_dim < 1:
        raise ValueError("target_dim must be >= 1")
    X = matrix.values.tocsr()
    n = X.shape[1]
    n_blocks = -(-target_dim // PROJECTION_BLOCK)
    out = np.empty((X.shape[0], target_dim), dtype=np.float64)

    def one(b):
        lo = b * PROJECTION_BLOCK
        R = projection_block(n, target_dim, seed, b)
        out[:, lo:lo + R.shape[1]] = X @ R

    pmap(one, range(n_blocks), threads)
    return EmbeddingModel(matrix.vocab, out)


def build_pmi_model(docs: Iterable[Sequence[str]], window: int = 2, min_count: int = 5,
                    target_dim: int = 2000, seed: int = 0, threads: int = 1) -> EmbeddingModel:
    counts = count_cooccurrences(docs, window=window, min_count=min_count)
    if not counts.vocab:
        raise ValueError("empty vocabulary")
    return random_projection(ppmi(counts), target_dim=target_dim, seed=seed, threads=threads)


def write_sparse(vocab: Sequence[str], matrix: sp.spmatrix, path: str | os.PathLike) -> None:
    """``#vocab N`` header, then ``token_a<TAB>token_b<TAB>value`` per nonzero."""
    M = sp.csr_matrix(matrix)
    M.sort_indices()
    is_int = np.issubdtype(M.dtype, np.integer)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"#vocab {len(vocab)}\n")
        for i in range(M.shape[0]):
            lo, hi = M.indptr[i], M.indptr[i + 1]
            for j, v in zip(M.indices[lo:hi], M.data[lo:hi]):
                val = str(int(v)) if is_int else format(float(v), ".17g")
                fh.write(f"{vocab[i]}\t{vocab[j]}\t{val}\n")


def read_sparse(path: str | os.PathLike, vocab: Sequence[str]) -> sp.csr_matrix:
    index = {t: i for i, t in enumerate(vocab)}
    rows, cols, vals = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2 or header[0] != "#vocab":
            raise ValueError(f"{path}: missing '#vocab N' header")
        if int(header[1]) != len(vocab):
            raise ValueError(f"{path}: header says {header[1]} tokens, vocab has {len(vocab)}")
        for line in fh:
            a, b, v = line.rstrip("\n").split("\t")
            rows.append(index[a])
            cols.append(index[b])
            vals.append(float(v))
    n = len(vocab)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
