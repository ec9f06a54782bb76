import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import knn_sorted, random_space
from rnghorizon.embeddings import EmbeddingModel
from rnghorizon.similarity import (
    CosineSpace,
    EuclideanSpace,
    exhaustive,
    cosine,
    knn,
    rank_of,
    within_threshold,
)


@pytest.mark.parametrize("u,v,expected", [
    ((1, 0), (1, 0), 1.0),
    ((1, 0), (0, 1), 0.0),
    ((1, 0), (-1, 0), -1.0),
    ((1, 0), (1, 1), 1 / math.sqrt(2)),
])
def test_cosine_values(u, v, expected):
    assert cosine(u, v) == pytest.approx(expected, abs=1e-15)


def test_cosine_errors():
    with pytest.raises(ValueError, match="zero"):
        cosine((0, 0), (1, 0))
    with pytest.raises(ValueError, match="dimension"):
        cosine((1, 0), (1, 0, 0))


def test_knn_collinear(collinear):
    assert knn(collinear, 0, 1).ids.tolist() == [1]
    nl = knn(collinear, 0, 5)
    assert nl.ids.tolist() == [1, 2]
    assert nl.sims.tolist() == [-1.0, -3.0]


def test_knn_rejects_bad_input(collinear):
    with pytest.raises(ValueError):
        knn(collinear, 0, 0)
    with pytest.raises(IndexError):
        knn(collinear, 7, 1)


def test_knn_matches_full_sort(rng):
    space = random_space(rng, 50, 5, "euclidean")
    assert knn(space, 0, 10).ids.tolist() == knn_sorted(space, 0, 10)


def test_knn_tie_break_by_id():
    # points 1..4 all at distance 1 from the origin
    space = EuclideanSpace([[0, 0], [0, 1], [1, 0], [0, -1], [-1, 0], [5, 5]])
    assert knn(space, 0, 2).ids.tolist() == [1, 2]
    assert knn(space, 0, 4).ids.tolist() == [1, 2, 3, 4]
    assert rank_of(space, 0, 3) == 3


def test_rank_of(collinear):
    assert rank_of(collinear, 0, 1) == 1
    assert rank_of(collinear, 0, 2) == 2
    assert rank_of(collinear, 2, 1) == 1
    with pytest.raises(ValueError):
        rank_of(collinear, 1, 1)


def test_rank_of_matches_knn_positions(rng):
    space = random_space(rng, 100, 8, "cosine")
    full = knn(space, 3, 99)
    for b in [0, 17, 42, 99]:
        assert rank_of(space, 3, b) == full.rank(b)


def test_rank_is_not_symmetric():
    # b is a's nearest point, but a is the farthest from b's point of view
    space = EuclideanSpace([[0, 0], [3, 0], [3.5, 0], [4, 0], [4.5, 0]])
    assert rank_of(space, 0, 1) == 1
    assert rank_of(space, 1, 0) == 4


def test_within_threshold_cosine(rng):
    space = random_space(rng, 40, 6, "cosine")
    assert len(within_threshold(space, 0, 1.0 + 1e-9)) == 0
    assert len(within_threshold(space, 0, -1.0)) == 39
    full = exhaustive(space, 0)
    t = float(np.median(full.sims))
    got = within_threshold(space, 0, t)
    assert got.ids.tolist() == [i for i, s in full.entries if s >= t]


def test_zero_vectors_excluded():
    m = EmbeddingModel(["a", "z", "b"], [[1.0, 0.0], [0.0, 0.0], [0.5, 0.5]])
    space = CosineSpace(m)
    assert knn(space, 0, 5).ids.tolist() == [2]
    with pytest.raises(ValueError, match="zero vector"):
        knn(space, 1, 1)


def test_cosine_space_agrees_with_formula(rng):
    pts = rng.standard_normal((20, 7))
    space = CosineSpace(EmbeddingModel([str(i) for i in range(20)], pts))
    for a in range(5):
        for b in range(20):
            ref = float(np.dot(pts[a], pts[b]) / (np.linalg.norm(pts[a]) * np.linalg.norm(pts[b])))
            assert space.sim(a, b) == pytest.approx(ref, abs=1e-12)
    assert space.sim(3, 3) == pytest.approx(1.0, abs=1e-12)


def test_euclidean_space_agrees_with_formula(rng):
    pts = rng.standard_normal((20, 3))
    space = EuclideanSpace(pts)
    assert space.sim(2, 9) == pytest.approx(-math.dist(pts[2], pts[9]), abs=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(2, 40), st.sampled_from([2, 10, 50, 300]),
       st.sampled_from(["cosine", "euclidean"]))
def test_similarity_bitwise_symmetric(seed, n, dim, kind):
    space = random_space(np.random.default_rng(seed), n, dim, kind)
    ids = np.arange(n)
    for a in range(min(n, 5)):
        row = space.sims(a, ids)
        col = np.array([space.sims(b, [a])[0] for b in ids])
        assert row.tobytes() == col.tobytes()
        scanned_ids, scanned = space.scan(a)
        assert scanned.tobytes() == row[scanned_ids].tobytes()


@given(st.integers(0, 2**32 - 1), st.integers(2, 60), st.integers(1, 70))
def test_knn_prefix_consistency(seed, n, k2):
    space = random_space(np.random.default_rng(seed), n, 4, "cosine")
    big = knn(space, 0, k2).ids.tolist()
    for k1 in range(1, k2 + 1):
        assert knn(space, 0, k1).ids.tolist() == big[:k1]
    assert rank_of(space, 0, big[0]) == 1


@given(st.integers(0, 2**32 - 1), st.integers(2, 30))
def test_knn_with_heavy_ties(seed, n):
    # integer grid coordinates give many exactly-equal distances
    pts = np.random.default_rng(seed).integers(-2, 3, size=(n, 2))
    space = EuclideanSpace(pts)
    for k in (1, 3, n):
        assert knn(space, 0, k).ids.tolist() == knn_sorted(space, 0, k)


def test_evaluation_counter(collinear):
    collinear.reset_counter()
    knn(collinear, 0, 1)
    assert collinear.evaluations == 2
