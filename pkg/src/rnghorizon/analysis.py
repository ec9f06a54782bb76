"""Neighborhood diagnostics: reciprocity of ranks, density of random vs.
nearest-neighbor similarities, and similarity decay curves.

Sampling is sequential and seeded; the per-sample work may run on threads.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .parallel import pmap
from .similarity import SimilaritySpace, knn, rank_of


@dataclass(frozen=True)
class ReciprocityPair:
    a: int
    b: int
    x: int  # rank of b among a's neighbors
    y: int  # rank of a among b's neighbors


@dataclass(frozen=True)
class FiveNumber:
    min: float
    q1: float
    median: float
    q3: float
    max: float

    @classmethod
    def of(cls, values) -> "FiveNumber":
        v = np.asarray(values, dtype=np.float64)
        q = np.quantile(v, [0.0, 0.25, 0.5, 0.75, 1.0])
        return cls(*(float(x) for x in q))


@dataclass
class DensitySummary:
    random_pair_sims: np.ndarray
    knn_mean_sims: np.ndarray

    @property
    def random_pair_summary(self) -> FiveNumber:
        return FiveNumber.of(self.random_pair_sims)

    @property
    def knn_mean_summary(self) -> FiveNumber:
        return FiveNumber.of(self.knn_mean_sims)


def _unrank_ordered(q: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    a = q // (n - 1)
    r = q % (n - 1)
    b = np.where(r < a, r, r + 1)
    return a, b


def _unrank_unordered(q: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # row a holds the pairs (a, a+1), ..., (a, n-1)
    starts = np.concatenate([[0], np.cumsum(np.arange(n - 1, 0, -1))])
    a = np.searchsorted(starts, q, side="right") - 1
    b = q - starts[a] + a + 1
    return a, b


def sample_pairs(n: int, n_pairs: int, rng: np.random.Generator, ordered: bool) -> tuple[np.ndarray, np.ndarray]:
    """``n_pairs`` distinct index pairs from ``range(n)`` without replacement."""
    total = n * (n - 1) if ordered else n * (n - 1) // 2
    if n_pairs > total:
        raise ValueError(f"requested {n_pairs} pairs but only {total} distinct pairs exist")
    q = rng.choice(total, size=n_pairs, replace=False)
    return _unrank_ordered(q, n) if ordered else _unrank_unordered(q, n)


def reciprocity_sample(space: SimilaritySpace, n_pairs: int, seed: int = 0, threads: int = 1) -> list[ReciprocityPair]:
    """Random ordered pairs (a, b), each annotated with both neighbor ranks."""
    ids = space.active_ids
    if len(ids) < 2:
        raise ValueError("need at least 2 points")
    rng = np.random.default_rng(seed)
    ia, ib = sample_pairs(len(ids), n_pairs, rng, ordered=True)

    def one(pair):
        a, b = int(ids[pair[0]]), int(ids[pair[1]])
        return ReciprocityPair(a, b, rank_of(space, a, b), rank_of(space, b, a))

    return pmap(one, zip(ia, ib), threads)


def density_stats(space: SimilaritySpace, n_words: int = 1000, n_pairs: int = 1000, k: int = 10,
                  seed: int = 0, threads: int = 1) -> DensitySummary:
    """Similarities of random word pairs and mean top-k similarities of random words."""
    ids = space.active_ids
    if len(ids) <= k:
        raise ValueError(f"vocabulary too small: {len(ids)} usable words, need more than k={k}")
    if n_words > len(ids):
        raise ValueError(f"vocabulary too small: cannot sample {n_words} distinct words from {len(ids)}")
    pair_seq, word_seq = np.random.SeedSequence(seed).spawn(2)
    ia, ib = sample_pairs(len(ids), n_pairs, np.random.default_rng(pair_seq), ordered=False)
    words = np.random.default_rng(word_seq).choice(len(ids), size=n_words, replace=False)

    pair_sims = np.array([space.sim(int(ids[a]), int(ids[b])) for a, b in zip(ia, ib)])
    knn_means = pmap(lambda w: float(np.mean(knn(space, int(ids[w]), k).sims)), words, threads)
    return DensitySummary(pair_sims, np.array(knn_means))


def similarity_curve(space: SimilaritySpace, word: int, k: int = 100) -> np.ndarray:
    """Similarities of the top-k neighbors, nearest first."""
    return knn(space, word, k).sims.copy()


def curve_drops_fast(curve, head: int = 2, tail: tuple[int, int] = (10, 100)) -> bool:
    """True when the first ``head`` rank gaps sum to more than the mean gap
    over ranks ``tail`` (1-based, inclusive)."""
    s = np.asarray(curve)
    lo, hi = tail
    if len(s) < hi or len(s) < head + 1:
        raise ValueError(f"curve too short: {len(s)} points")
    head_drop = s[0] - s[head]
    mean_gap = (s[lo - 1] - s[hi - 1]) / (hi - lo)
    return bool(head_drop > mean_gap)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def reciprocity_csv(space: SimilaritySpace, pairs: list[ReciprocityPair]) -> str:
    return _csv(["a", "b", "x", "y"], [(space.label(p.a), space.label(p.b), p.x, p.y) for p in pairs])


def density_csvs(summary: DensitySummary) -> tuple[str, str]:
    return (
        _csv(["pair_sim"], [(_fmt(s),) for s in summary.random_pair_sims]),
        _csv(["knn_mean_sim"], [(_fmt(s),) for s in summary.knn_mean_sims]),
    )


def curve_csv(curve) -> str:
    return _csv(["rank", "sim"], [(i + 1, _fmt(s)) for i, s in enumerate(curve)])
