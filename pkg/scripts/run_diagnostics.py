#!/usr/bin/env python3
"""Build a PPMI model from the desk corpus and run the neighborhood diagnostics.

Writes into --outdir:
  model.txt                 the projected embeddings (word2vec text, with header)
  pair_sim.csv              similarities of random word pairs
  knn_mean_sim.csv          mean similarity to each sampled word's k nearest neighbors
  reciprocity.csv           rank pairs (x, y) for random ordered word pairs
  curves.csv                top-100 similarity curves of sampled words (word,rank,sim)
  tree_<word>.dot           relative neighborhood trees for the --tree words
  summary.json              five-number summaries and the headline numbers

Everything is seeded; rerunning with the same arguments reproduces the files.
"""

import argparse
import csv
import json
import time
from pathlib import Path

import numpy as np

from rnghorizon import analysis, cli
from rnghorizon.embeddings import load_text_embeddings, write_text_embeddings
from rnghorizon.parallel import default_threads
from rnghorizon.pmi import build_pmi_model, read_corpus
from rnghorizon.rng import horizon, rn_tree
from rnghorizon.similarity import CosineSpace

ROOT = Path(__file__).resolve().parent.parent


def parse_args():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0],
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--corpus", default=str(ROOT / "data" / "corpus.txt.gz"))
    p.add_argument("--model", default=None, help="reuse an existing embedding file instead of building one")
    p.add_argument("--outdir", default="results")
    p.add_argument("--window", type=int, default=2)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--target-dim", type=int, default=2000)
    p.add_argument("--n-words", type=int, default=1000)
    p.add_argument("--n-pairs", type=int, default=1000)
    p.add_argument("--k", type=int, default=10, help="neighbors averaged for the density statistic")
    p.add_argument("--n-curves", type=int, default=100)
    p.add_argument("--tree", nargs="*", default=["heart", "bank", "court"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=default_threads())
    return p.parse_args()


def log(msg, t0):
    print(f"[{time.perf_counter() - t0:7.1f}s] {msg}", flush=True)


def main():
    args = parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()

    if args.model:
        model = load_text_embeddings(args.model, has_header=True)
    else:
        model = build_pmi_model(read_corpus(args.corpus), window=args.window, min_count=args.min_count,
                                target_dim=args.target_dim, seed=args.seed, threads=args.threads)
        write_text_embeddings(model, out / "model.txt")
    space = CosineSpace(model)
    log(f"model: {len(model)} words, {model.dim} dims", t0)

    dens = analysis.density_stats(space, args.n_words, args.n_pairs, args.k, seed=args.seed, threads=args.threads)
    pair_csv, mean_csv = analysis.density_csvs(dens)
    (out / "pair_sim.csv").write_text(pair_csv, encoding="utf-8")
    (out / "knn_mean_sim.csv").write_text(mean_csv, encoding="utf-8")
    log("density done", t0)

    pairs = analysis.reciprocity_sample(space, args.n_pairs, seed=args.seed, threads=args.threads)
    (out / "reciprocity.csv").write_text(analysis.reciprocity_csv(space, pairs), encoding="utf-8")
    log("reciprocity done", t0)

    rng = np.random.default_rng(args.seed)
    words = rng.choice(space.active_ids, min(args.n_curves, space.n_active), replace=False)
    drops = 0
    with open(out / "curves.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["word", "rank", "sim"])
        for word in words:
            curve = analysis.similarity_curve(space, int(word), 100)
            drops += analysis.curve_drops_fast(curve)
            w.writerows((model.vocab[word], r, f"{s:.17g}") for r, s in enumerate(curve, start=1))
    log("curves done", t0)

    trees = {}
    for word in args.tree:
        if word not in model:
            print(f"  skipping tree for unknown word {word!r}")
            continue
        a = model.lookup(word)
        t = rn_tree(space, a, 100)
        (out / f"tree_{word}.dot").write_text(cli.tree_to_dot(t, model.vocab), encoding="utf-8")
        trees[word] = {
            "root_children": [model.vocab[c] for c in t.children(a)],
            "height": t.height(),
            "horizon_size": len(horizon(space, a).neighbors),
        }
    log("trees done", t0)

    x = np.array([p.x for p in pairs])
    y = np.array([p.y for p in pairs])
    summary = {
        "vocab": len(model),
        "dim": model.dim,
        "random_pair_sim": vars(dens.random_pair_summary),
        "knn_mean_sim": vars(dens.knn_mean_summary),
        "density_separated": bool(np.median(dens.knn_mean_sims) > np.median(dens.random_pair_sims)),
        "curves_dropping_fast": f"{drops}/{len(words)}",
        "reciprocity_median_abs_log_ratio": float(np.median(np.abs(np.log(x / y)))),
        "trees": trees,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(json.dumps({k: v for k, v in summary.items() if k != "trees"}, indent=2))


if __name__ == "__main__":
    main()
