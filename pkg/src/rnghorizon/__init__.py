"""Relative neighborhood graphs, k-RNG neighborhoods and semantic horizons
over word embeddings, with a PPMI model builder and neighborhood diagnostics."""

from .embeddings import EmbeddingModel, load_text_embeddings, lookup, write_text_embeddings
from .rng import (
    Horizon,
    RngEdgeSet,
    RngTree,
    betweens,
    horizon,
    krng_neighbors,
    rn_tree,
    rng_edges,
    rng_neighbors,
    tree_depth_slice,
)
from .similarity import (
    CosineSpace,
    EuclideanSpace,
    NeighborList,
    SimilaritySpace,
    cosine,
    knn,
    make_space,
    rank_of,
    within_threshold,
)

__version__ = "0.1.0"
