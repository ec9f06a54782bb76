"""Relative neighborhood graphs over a similarity space.

A point ``b`` lies between ``a`` and ``c`` when it is strictly more similar to
both of them than they are to each other. ``c`` is a relative neighbor of
``a`` when nothing lies between them. Restricting candidates and blockers to
the k nearest neighbors of ``a`` gives the k-RNG neighborhood; doing it with
every other point gives the semantic horizon.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .parallel import pmap
from .similarity import NeighborList, SimilaritySpace, knn


@dataclass(frozen=True)
class Neighbor:
    id: int
    sim: float
    rank: int


@dataclass
class RngEdgeSet:
    edges: set[tuple[int, int]]
    point_set_size: int

    def __contains__(self, pair) -> bool:
        a, b = pair
        return (min(a, b), max(a, b)) in self.edges

    def __len__(self) -> int:
        return len(self.edges)

    def neighbors(self, a: int) -> set[int]:
        return {y if x == a else x for x, y in self.edges if a in (x, y)}


@dataclass
class RngTree:
    root: int
    parent: dict[int, int]
    sims: dict[int, float]
    ranks: dict[int, int] = field(default_factory=dict)

    @property
    def nodes(self) -> set[int]:
        return {self.root, *self.parent}

    def children(self, node: int) -> list[int]:
        """Children of ``node`` ordered by descending similarity to the root."""
        kids = [c for c, p in self.parent.items() if p == node]
        return sorted(kids, key=lambda c: (-self.sims[c], c))

    def depth(self, node: int) -> int:
        d = 0
        while node != self.root:
            node = self.parent[node]
            d += 1
        return d

    def height(self) -> int:
        return max((self.depth(c) for c in self.parent), default=0)


@dataclass
class Horizon:
    reference: int
    neighbors: list[Neighbor]

    @property
    def ids(self) -> set[int]:
        return {n.id for n in self.neighbors}


def betweens(space: SimilaritySpace, candidates: Iterable[int], a: int, c: int) -> set[int]:
    """Points of ``candidates`` (minus a and c) lying strictly between a and c."""
    a, c = int(a), int(c)
    if a == c:
        raise ValueError("betweens needs two distinct points")
    cand = np.array(sorted({int(b) for b in candidates} - {a, c}), dtype=np.intp)
    if not len(cand):
        return set()
    s_ac = space.sim(a, c)
    s_ab = space.sims(a, cand)
    s_cb = space.sims(c, cand)
    return {int(b) for b in cand[(s_ab > s_ac) & (s_cb > s_ac)]}


def _unblocked(space: SimilaritySpace, ids: np.ndarray, sims: np.ndarray) -> np.ndarray:
    """Mask of candidates with no blocker among the other candidates.

    ``ids``/``sims`` hold the candidates sorted by descending similarity to
    the reference. Only candidates strictly closer to the reference than ``c``
    can block ``c``, so the blocker search for ``c`` scans that prefix in
    growing chunks and stops at the first hit. Total cost is at most
    k(k-1)/2 evaluations.
    """
    k = len(ids)
    # prefix[r] = number of candidates strictly more similar than candidate r
    prefix = np.searchsorted(-sims, -sims, side="left")
    keep = np.ones(k, dtype=bool)
    for r in range(k):
        p = int(prefix[r])
        if p == 0:
            continue
        c, s_ac = int(ids[r]), sims[r]
        lo, step = 0, 8
        while lo < p:
            hi = min(p, lo + step)
            if np.any(space.sims(c, ids[lo:hi]) > s_ac):
                keep[r] = False
                break
            lo, step = hi, min(step * 2, 4096)
    return keep


def _sorted_candidates(space: SimilaritySpace, a: int, points) -> tuple[np.ndarray, np.ndarray]:
    cand = np.array(sorted({int(p) for p in points} - {a}), dtype=np.intp)
    for p in cand:
        space.check_id(p)
    sims = space.sims(a, cand)
    order = np.lexsort((cand, -sims))
    return cand[order], sims[order]


def rng_neighbors(space: SimilaritySpace, points: Iterable[int], a: int) -> set[int]:
    """Relative neighbors of ``a`` within ``points``."""
    a = space.check_id(a)
    ids, sims = _sorted_candidates(space, a, points)
    return {int(i) for i in ids[_unblocked(space, ids, sims)]}


def _neighbors_from_matrix(S: np.ndarray, i: int) -> np.ndarray:
    # blocked[c] = exists b: S[i,b] > S[i,c] and S[c,b] > S[i,c]
    row = S[i]
    with np.errstate(invalid="ignore"):
        closer_to_i = row[None, :] > row[:, None]
        closer_to_c = S > row[:, None]
    blocked = np.any(closer_to_i & closer_to_c, axis=1)
    ok = ~blocked
    ok[i] = False
    return np.flatnonzero(ok)


def rng_edges(space: SimilaritySpace, points: Iterable[int] | None = None, threads: int = 1) -> RngEdgeSet:
    """Full relative neighborhood graph over ``points`` (default: all active).

    Builds the pairwise similarity matrix once, then tests every reference
    point against it; O(n^3) comparisons, parallel across reference points.
    """
    pts = space.active_ids if points is None else np.array(sorted({int(p) for p in points}), dtype=np.intp)
    if len(pts) < 2:
        raise ValueError("rng_edges needs at least 2 points")
    for p in pts:
        space.check_id(p)
    S = space.pairwise(pts)

    def one(i):
        return i, _neighbors_from_matrix(S, i)

    results = pmap(one, range(len(pts)), threads)
    edges = set()
    for i, nbrs in results:
        a = int(pts[i])
        for j in nbrs:
            b = int(pts[j])
            edges.add((min(a, b), max(a, b)))
    return RngEdgeSet(edges, len(pts))


def krng_neighbors(space: SimilaritySpace, a: int, k: int) -> list[Neighbor]:
    """Relative neighbors of ``a`` among its k nearest neighbors.

    Returned nearest first, each with its k-NN rank.
    """
    nl = knn(space, a, k)
    return _krng_from_list(space, nl)


def _krng_from_list(space: SimilaritySpace, nl: NeighborList) -> list[Neighbor]:
    keep = _unblocked(space, nl.ids, nl.sims)
    return [
        Neighbor(int(nl.ids[r]), float(nl.sims[r]), int(r) + 1)
        for r in np.flatnonzero(keep)
    ]


def horizon(space: SimilaritySpace, a: int) -> Horizon:
    """k-RNG neighborhood with k covering the whole vocabulary."""
    if space.n_active < 2:
        raise ValueError("horizon needs at least 2 points")
    return Horizon(int(a), krng_neighbors(space, a, space.n_active - 1))


def rn_tree(space: SimilaritySpace, a: int, k: int) -> RngTree:
    """Relative neighborhood tree rooted at ``a`` over its k nearest neighbors.

    Each candidate's parent is the member of {a} plus the points between a and
    it that is most similar to it (ties: lowest id). Blockers come from the
    same k-NN candidate set.
    """
    nl = knn(space, a, k)
    ids, s_a = nl.ids, nl.sims
    m = len(ids)
    S = space.pairwise(ids)
    parent: dict[int, int] = {}
    with np.errstate(invalid="ignore"):
        for r in range(m):
            between = (s_a > s_a[r]) & (S[r] > s_a[r])
            best_id, best_sim = int(a), s_a[r]
            for j in np.flatnonzero(between):
                sj, bj = S[r, j], int(ids[j])
                if sj > best_sim or (sj == best_sim and bj < best_id):
                    best_id, best_sim = bj, sj
            parent[int(ids[r])] = best_id
    sims = {int(i): float(s) for i, s in zip(ids, s_a)}
    ranks = {int(i): r + 1 for r, i in enumerate(ids)}
    return RngTree(int(a), parent, sims, ranks)


def tree_depth_slice(tree: RngTree, depth: int) -> set[int]:
    """Non-root nodes at most ``depth`` edges below the root."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return {c for c in tree.parent if tree.depth(c) <= depth}
