"""Structure-level smoke tests on the desk-corpus PPMI model."""

import numpy as np
import pytest

from rnghorizon.rng import horizon, krng_neighbors, rn_tree
from rnghorizon.similarity import knn

pytestmark = pytest.mark.corpus


def test_heart_tree_branches(corpus_space):
    vocab = corpus_space.vocab
    a = vocab.index("heart")
    t = rn_tree(corpus_space, a, 100)
    root_children = t.children(a)
    assert len(t.nodes) == 101
    # the root sees only a minority of its 100 neighbors directly
    assert 1 <= len(root_children) <= 50
    assert set(root_children) == {n.id for n in krng_neighbors(corpus_space, a, 100)}
    # the rest hang below, through nodes that branch
    assert t.height() >= 2
    assert sum(1 for n in t.nodes - {a} if len(t.children(n)) >= 2) >= 2


@pytest.mark.parametrize("word", ["bank", "interest", "court", "spring"])
def test_ambiguous_horizon_has_dissimilar_neighbors(corpus_space, word):
    a = corpus_space.vocab.index(word)
    ids = [n.id for n in horizon(corpus_space, a).neighbors]
    baseline = float(np.mean(knn(corpus_space, a, 10).sims))
    dissimilar = [
        (x, y) for i, x in enumerate(ids) for y in ids[i + 1:] if corpus_space.sim(x, y) < baseline
    ]
    assert len(ids) >= 2 and dissimilar


def test_horizon_ranks_start_at_nearest(corpus_space):
    a = corpus_space.vocab.index("whale")
    h = horizon(corpus_space, a)
    assert h.neighbors[0].rank == 1
    assert h.neighbors[0].id == int(knn(corpus_space, a, 1).ids[0])
    ranks = [n.rank for n in h.neighbors]
    assert ranks == sorted(ranks) and len(set(ranks)) == len(ranks)
