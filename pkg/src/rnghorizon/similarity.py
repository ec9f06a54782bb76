"""Similarity spaces, exact k-NN, radius queries and neighbor ranks.

Similarity is the single primitive: "closer" always means strictly greater
similarity. Ties are broken by ascending word id everywhere.

Kernels avoid BLAS on purpose. Each similarity is an elementwise product
followed by a row sum, so ``s(a, b)`` and ``s(b, a)`` are bitwise equal and do
not depend on how many rows were evaluated in the same call. The strict
comparisons in the graph code rely on that.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingModel

_CHUNK_ROWS = 2048


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = math.sqrt(float(np.sum(u * u)))
    nv = math.sqrt(float(np.sum(v * v)))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine is undefined for a zero vector")
    return max(-1.0, min(1.0, float(np.sum(u * v)) / (nu * nv)))


class SimilaritySpace:
    """Point set plus a symmetric similarity over point ids.

    ``evaluations`` counts pairwise similarity computations; tests use it to
    check the cost of graph construction.
    """

    kind: str = "abstract"

    def __init__(self, points: np.ndarray, active: np.ndarray, vocab=None):
        self._points = points
        self._active_mask = active
        self._active = np.flatnonzero(active)
        self.vocab = vocab
        self._lock = threading.Lock()
        self.evaluations = 0

    def __len__(self) -> int:
        return self._points.shape[0]

    @property
    def active_ids(self) -> np.ndarray:
        """Ids that take part in queries (zero vectors excluded for cosine)."""
        return self._active

    @property
    def n_active(self) -> int:
        return len(self._active)

    def label(self, i: int) -> str:
        return self.vocab[i] if self.vocab is not None else str(i)

    def reset_counter(self) -> None:
        with self._lock:
            self.evaluations = 0

    def _count(self, n: int) -> None:
        with self._lock:
            self.evaluations += n

    def check_id(self, i) -> int:
        i = int(i)
        if not 0 <= i < len(self):
            raise IndexError(f"invalid word id {i} (space has {len(self)} points)")
        if not self._active_mask[i]:
            raise ValueError(f"point {self.label(i)!r} is a zero vector; similarity undefined")
        return i

    def _kernel(self, rows: np.ndarray, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _rows(self, ids) -> np.ndarray:
        return self._points[ids]

    def sims(self, a: int, ids) -> np.ndarray:
        """Similarities of ``a`` to each id in ``ids`` (order preserved)."""
        ids = np.asarray(ids, dtype=np.intp)
        x = self._rows(a)
        out = np.empty(len(ids), dtype=np.float64)
        for lo in range(0, len(ids), _CHUNK_ROWS):
            hi = lo + _CHUNK_ROWS
            out[lo:hi] = self._kernel(self._rows(ids[lo:hi]), x)
        self._count(len(ids))
        return out

    def sim(self, a: int, b: int) -> float:
        return float(self.sims(a, [b])[0])

    def scan(self, a: int) -> tuple[np.ndarray, np.ndarray]:
        """Similarities of ``a`` to every other active point: (ids, sims)."""
        a = self.check_id(a)
        x = self._rows(a)
        n = len(self)
        out = np.empty(n, dtype=np.float64)
        for lo in range(0, n, _CHUNK_ROWS):
            out[lo:lo + _CHUNK_ROWS] = self._kernel(self._points[lo:lo + _CHUNK_ROWS], x)
        mask = self._active_mask.copy()
        mask[a] = False
        ids = np.flatnonzero(mask)
        self._count(len(ids))
        return ids, out[ids]

    def pairwise(self, ids) -> np.ndarray:
        """Symmetric similarity matrix over ``ids``; diagonal is NaN.

        Costs len(ids) * (len(ids) - 1) / 2 evaluations.
        """
        ids = np.asarray(ids, dtype=np.intp)
        m = len(ids)
        out = np.full((m, m), np.nan)
        for i in range(m - 1):
            row = self.sims(ids[i], ids[i + 1:])
            out[i, i + 1:] = row
            out[i + 1:, i] = row
        return out


class CosineSpace(SimilaritySpace):
    kind = "cosine"

    def __init__(self, model: EmbeddingModel):
        norms = model.norms
        active = ~model.zero_mask
        safe = np.where(active, norms, 1.0)
        unit = model.matrix / safe[:, None]
        unit.flags.writeable = False
        super().__init__(unit, active, vocab=model.vocab)
        self.model = model

    def _kernel(self, rows, x):
        return np.clip((rows * x).sum(axis=1), -1.0, 1.0)


class EuclideanSpace(SimilaritySpace):
    """Negated Euclidean distance over raw coordinates."""

    kind = "euclidean"

    def __init__(self, points, vocab=None):
        points = np.array(points, dtype=np.float64)
        if points.ndim != 2:
            raise ValueError("points must be an (n, dim) array")
        points.flags.writeable = False
        super().__init__(points, np.ones(len(points), dtype=bool), vocab=vocab)

    @classmethod
    def from_model(cls, model: EmbeddingModel) -> "EuclideanSpace":
        return cls(model.matrix, vocab=model.vocab)

    def _kernel(self, rows, x):
        d = rows - x
        return -np.sqrt((d * d).sum(axis=1))


def make_space(model: EmbeddingModel, kind: str = "cosine") -> SimilaritySpace:
    if kind == "cosine":
        return CosineSpace(model)
    if kind == "euclidean":
        return EuclideanSpace.from_model(model)
    raise ValueError(f"unknown similarity kind {kind!r}")


@dataclass(frozen=True)
class NeighborList:
    reference: int
    ids: np.ndarray
    sims: np.ndarray
    k: int

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def entries(self) -> list[tuple[int, float]]:
        return [(int(i), float(s)) for i, s in zip(self.ids, self.sims)]

    def rank(self, word_id: int) -> int:
        """1-based position of ``word_id`` in this list."""
        hit = np.flatnonzero(self.ids == word_id)
        if not len(hit):
            raise KeyError(word_id)
        return int(hit[0]) + 1


def _order(ids: np.ndarray, sims: np.ndarray) -> np.ndarray:
    # descending similarity, ascending id
    return np.lexsort((ids, -sims))


def knn(space: SimilaritySpace, ref: int, k: int) -> NeighborList:
    """The ``k`` most similar points to ``ref``.

    One scan over the point set, then a linear-time partial selection of the
    top ``k`` and a sort of those ``k`` only. ``k`` larger than the number of
    other points is truncated.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    ids, sims = space.scan(ref)
    n = len(ids)
    if k < n:
        # threshold = k-th largest; everything above it is in, ties at the
        # threshold are filled by ascending id
        kth = np.partition(sims, n - k)[n - k]
        above = np.flatnonzero(sims > kth)
        tied = np.flatnonzero(sims == kth)[: k - len(above)]
        keep = np.concatenate([above, tied])
        ids, sims = ids[keep], sims[keep]
    order = _order(ids, sims)
    return NeighborList(int(ref), ids[order], sims[order], k)


def exhaustive(space: SimilaritySpace, ref: int) -> NeighborList:
    return knn(space, ref, max(space.n_active - 1, 1))


def rank_of(space: SimilaritySpace, a: int, b: int) -> int:
    """Position of ``b`` in ``a``'s full neighbor list (1 = nearest)."""
    if int(a) == int(b):
        raise ValueError("rank_of needs two distinct points")
    b = space.check_id(b)
    ids, sims = space.scan(a)
    sb = sims[np.searchsorted(ids, b)]
    closer = np.count_nonzero(sims > sb)
    tied_before = np.count_nonzero((sims == sb) & (ids < b))
    return int(closer + tied_before + 1)


def within_threshold(space: SimilaritySpace, ref: int, t: float) -> NeighborList:
    """All points with similarity to ``ref`` at least ``t``, nearest first."""
    ids, sims = space.scan(ref)
    keep = sims >= t
    ids, sims = ids[keep], sims[keep]
    order = _order(ids, sims)
    return NeighborList(int(ref), ids[order], sims[order], len(ids))
