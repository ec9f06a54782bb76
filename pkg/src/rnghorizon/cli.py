"""rnghorizon: relative neighborhoods and semantic horizons of word embeddings.

Every subcommand reads its flags from the command line and, optionally, from
a ``--config`` file of ``key = value`` lines; command-line flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, fields
from pathlib import Path

from . import analysis
from .embeddings import EmbeddingModel, UnknownTokenError, format_embeddings, load_text_embeddings
from .parallel import default_threads
from .pmi import build_pmi_model, read_corpus
from .rng import horizon, krng_neighbors, rn_tree
from .similarity import SimilaritySpace, knn, make_space

PROG = "rnghorizon"
COMMANDS = ("build-pmi", "knn", "krng", "horizon", "tree", "reciprocity", "density", "simcurve")


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    model_path: str | None = None
    model_format: str = "auto"
    similarity: str = "cosine"
    k: int = 100
    depth: int | None = None
    seed: int = 0
    output_format: str = "text"
    min_count: int = 5
    window: int = 2
    target_dim: int = 2000
    threads: int = 1
    lowercase_fallback: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        vals = {k: v for k, v in vars(args).items() if k in names and v is not None}
        if getattr(args, "format", None):
            vals["output_format"] = args.format
        if getattr(args, "model", None):
            vals["model_path"] = args.model
        cfg = cls(**vals)
        if cfg.depth is not None and cfg.depth <= 0:
            cfg.depth = None
        return cfg


# --------------------------------------------------------------------------- io


def _warn(msg: str) -> None:
    print(f"{PROG}: warning: {msg}", file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    """Write ``text`` to ``out`` atomically, or to stdout."""
    if out in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sniff_header(path: str) -> bool:
    with open(path, "r", encoding="utf-8") as fh:
        parts = fh.readline().split()
    return len(parts) == 2 and all(p.isdigit() for p in parts)


def load_model(cfg: RunConfig) -> EmbeddingModel:
    if cfg.model_format == "auto":
        has_header = _sniff_header(cfg.model_path)
    else:
        has_header = cfg.model_format == "header"
    model = load_text_embeddings(cfg.model_path, has_header=has_header)
    # the origin is an ordinary point under Euclidean similarity
    if cfg.similarity == "cosine":
        for msg in model.report.messages:
            _warn(msg)
    return model


def load_space(cfg: RunConfig, warn_duplicates: bool = False) -> tuple[EmbeddingModel, SimilaritySpace]:
    model = load_model(cfg)
    if warn_duplicates:
        for group in model.duplicate_groups():
            words = ", ".join(model.vocab[i] for i in group[:5])
            _warn(f"duplicate vectors ({len(group)} words: {words}); twins never block each other and share one neighborhood")
    return model, make_space(model, cfg.similarity)


def resolve(model: EmbeddingModel, word: str, cfg: RunConfig) -> int:
    try:
        return model.lookup(word)
    except UnknownTokenError:
        low = word.lower()
        if low != word and low in model:
            if cfg.lowercase_fallback:
                _warn(f"{word!r} not found, using {low!r}")
                return model.lookup(low)
            raise CliError(f"unknown word {word!r} (did you mean {low!r}? try --lowercase-fallback)") from None
        raise CliError(f"unknown word {word!r}") from None


def _check_k(space: SimilaritySpace, k: int) -> None:
    if k < 1:
        raise CliError("k must be >= 1")
    if k > space.n_active - 1:
        _warn(f"k={k} exceeds the {space.n_active - 1} available neighbors; list truncated")


# --------------------------------------------------------------------- commands


def cmd_build_pmi(args, cfg: RunConfig) -> int:
    corpus = args.corpus
    try:
        docs = list(read_corpus(corpus))
    except OSError as e:
        raise CliError(f"cannot read corpus {corpus}: {e.strerror}") from None
    if not docs:
        raise CliError(f"corpus {corpus} is empty")
    try:
        model = build_pmi_model(docs, window=cfg.window, min_count=cfg.min_count,
                                target_dim=cfg.target_dim, seed=cfg.seed, threads=cfg.threads)
    except ValueError as e:
        raise CliError(f"{corpus}: {e}") from None
    header = cfg.model_format != "headerless"
    _emit("".join(format_embeddings(model, header=header)), args.out)
    print(f"vocab {len(model)} dim {model.dim}", file=sys.stderr if args.out == "-" else sys.stdout)
    return 0


def cmd_knn(args, cfg: RunConfig) -> int:
    model, space = load_space(cfg)
    ref = resolve(model, args.word, cfg)
    _check_k(space, cfg.k)
    nl = knn(space, ref, cfg.k)
    if cfg.output_format == "json":
        doc = {
            "query": model.vocab[ref],
            "k": cfg.k,
            "similarity": space.kind,
            "neighbors": [
                {"rank": r + 1, "word": model.vocab[i], "similarity": float(s)}
                for r, (i, s) in enumerate(nl.entries)
            ],
        }
        text = json.dumps(doc, ensure_ascii=False, indent=2) + "\n"
    else:
        text = "".join(f"{r + 1}\t{model.vocab[i]}\t{s:.6f}\n" for r, (i, s) in enumerate(nl.entries))
    _emit(text, args.out)
    return 0


def _neighborhood_output(model, space, ref, neighbors, k, cfg) -> str:
    if cfg.output_format == "json":
        doc = {
            "query": model.vocab[ref],
            "k": k,
            "similarity": space.kind,
            "neighbors": [
                {"word": model.vocab[n.id], "rank": n.rank, "similarity": float(n.sim)} for n in neighbors
            ],
        }
        return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"
    return "".join(f"{model.vocab[n.id]} ({n.rank})\n" for n in neighbors)


def cmd_krng(args, cfg: RunConfig) -> int:
    model, space = load_space(cfg, warn_duplicates=True)
    ref = resolve(model, args.word, cfg)
    _check_k(space, cfg.k)
    nbrs = krng_neighbors(space, ref, cfg.k)
    _emit(_neighborhood_output(model, space, ref, nbrs, cfg.k, cfg), args.out)
    return 0


def cmd_horizon(args, cfg: RunConfig) -> int:
    model, space = load_space(cfg, warn_duplicates=True)
    ref = resolve(model, args.word, cfg)
    h = horizon(space, ref)
    _emit(_neighborhood_output(model, space, ref, h.neighbors, space.n_active - 1, cfg), args.out)
    return 0


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def tree_to_dot(tree, vocab, depth: int | None = None) -> str:
    lines = ["digraph rn_tree {", f"  {_dot_id(vocab[tree.root])} [shape=box];"]
    stack = [(tree.root, 0)]
    while stack:
        node, d = stack.pop(0)
        if depth is not None and d >= depth:
            continue
        for c in tree.children(node):
            lines.append(f"  {_dot_id(vocab[node])} -> {_dot_id(vocab[c])};")
            stack.append((c, d + 1))
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_to_json(tree, vocab, depth: int | None = None, root_sim: float = 1.0) -> dict:
    def node(n, d):
        out = {"word": vocab[n], "sim": root_sim if n == tree.root else float(tree.sims[n])}
        if n != tree.root:
            out["rank"] = tree.ranks[n]
        kids = [] if depth is not None and d >= depth else tree.children(n)
        out["children"] = [node(c, d + 1) for c in kids]
        return out

    return node(tree.root, 0)


def cmd_tree(args, cfg: RunConfig) -> int:
    model, space = load_space(cfg, warn_duplicates=True)
    ref = resolve(model, args.word, cfg)
    _check_k(space, cfg.k)
    tree = rn_tree(space, ref, cfg.k)
    if cfg.output_format == "json":
        root_sim = 1.0 if space.kind == "cosine" else 0.0
        doc = tree_to_json(tree, model.vocab, cfg.depth, root_sim=root_sim)
        text = json.dumps(doc, ensure_ascii=False, indent=2) + "\n"
    else:
        text = tree_to_dot(tree, model.vocab, cfg.depth)
    _emit(text, args.out)
    return 0


def cmd_reciprocity(args, cfg: RunConfig) -> int:
    _, space = load_space(cfg)
    pairs = analysis.reciprocity_sample(space, args.n_pairs, seed=cfg.seed, threads=cfg.threads)
    _emit(analysis.reciprocity_csv(space, pairs), args.out)
    return 0


def cmd_density(args, cfg: RunConfig) -> int:
    _, space = load_space(cfg)
    summary = analysis.density_stats(space, n_words=args.n_words, n_pairs=args.n_pairs, k=cfg.k,
                                     seed=cfg.seed, threads=cfg.threads)
    pairs_csv, knn_csv = analysis.density_csvs(summary)
    _emit(pairs_csv, f"{args.out}_pair_sim.csv")
    try:
        _emit(knn_csv, f"{args.out}_knn_mean_sim.csv")
    except BaseException:
        os.unlink(f"{args.out}_pair_sim.csv")
        raise
    for name, five in (("pair_sim", summary.random_pair_summary), ("knn_mean_sim", summary.knn_mean_summary)):
        stats = " ".join(f"{f}={getattr(five, f):.4f}" for f in ("min", "q1", "median", "q3", "max"))
        print(f"{name}: {stats}", file=sys.stderr)
    return 0


def cmd_simcurve(args, cfg: RunConfig) -> int:
    model, space = load_space(cfg)
    ref = resolve(model, args.word, cfg)
    _check_k(space, cfg.k)
    _emit(analysis.curve_csv(analysis.similarity_curve(space, ref, cfg.k)), args.out)
    return 0


# ----------------------------------------------------------------------- parser


def _threads(s: str) -> int:
    n = int(s)
    if n < 1:
        raise argparse.ArgumentTypeError("threads must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = argparse.ArgumentParser(prog=PROG, description=__doc__.splitlines()[0], formatter_class=fmt)
    p.add_argument("--version", action="version", version="%(prog)s 0.1.0")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    base = argparse.ArgumentParser(add_help=False)
    base.add_argument("--config", help="file of 'key = value' lines; command-line flags override it", default=None)
    base.add_argument("--threads", type=_threads, default=default_threads(), help="worker threads")
    base.add_argument("--seed", type=int, default=0, help="random seed")

    mdl = argparse.ArgumentParser(add_help=False, parents=[base])
    mdl.add_argument("--model", required=True, help="text embedding file")
    mdl.add_argument("--model-format", choices=["auto", "header", "headerless"], default="auto",
                     help="'header' = word2vec style first line '<count> <dim>'")
    mdl.add_argument("--similarity", choices=["cosine", "euclidean"], default="cosine",
                     help="cosine, or negated Euclidean distance over the raw vectors")
    mdl.add_argument("--lowercase-fallback", action="store_true", default=False,
                     help="retry unknown query words lowercased")
    mdl.add_argument("--out", default=None, help="output file; None or - means stdout")

    def add(name, func, parents, help_):
        sp = sub.add_parser(name, parents=parents, help=help_, description=help_, formatter_class=fmt)
        sp.set_defaults(func=func)
        return sp

    sp = add("build-pmi", cmd_build_pmi, [base], "build a PPMI + random projection model from a corpus")
    sp.add_argument("corpus", help="UTF-8 text, one document per line (.gz allowed)")
    sp.add_argument("out", help="embedding file to write")
    sp.add_argument("--window", type=int, default=2, help="context words on each side")
    sp.add_argument("--min-count", type=int, default=5, help="drop rarer tokens before counting")
    sp.add_argument("--target-dim", type=int, default=2000, help="projected dimensionality")
    sp.add_argument("--model-format", choices=["header", "headerless"], default="header",
                    help="write a '<count> <dim>' header line or not")

    sp = add("knn", cmd_knn, [mdl], "k nearest neighbors of a word")
    sp.add_argument("word")
    sp.add_argument("--k", type=int, default=100, help="number of neighbors")
    sp.add_argument("--format", choices=["text", "json"], default="text", help="output format")

    sp = add("krng", cmd_krng, [mdl], "relative neighbors of a word among its k nearest neighbors")
    sp.add_argument("word")
    sp.add_argument("--k", type=int, default=100, help="size of the candidate neighborhood")
    sp.add_argument("--format", choices=["text", "json"], default="text", help="output format")

    sp = add("horizon", cmd_horizon, [mdl], "relative neighbors of a word over the whole vocabulary")
    sp.add_argument("word")
    sp.add_argument("--format", choices=["text", "json"], default="text", help="output format")

    sp = add("tree", cmd_tree, [mdl], "relative neighborhood tree rooted at a word")
    sp.add_argument("word")
    sp.add_argument("--k", type=int, default=100, help="size of the candidate neighborhood")
    sp.add_argument("--depth", type=int, default=0, help="maximum depth to emit (0 = unbounded)")
    sp.add_argument("--format", choices=["dot", "json"], default="dot", help="output format")

    sp = add("reciprocity", cmd_reciprocity, [mdl], "CSV of neighbor ranks for random word pairs")
    sp.add_argument("--n-pairs", type=int, default=1000, help="number of sampled pairs")

    sp = add("density", cmd_density, [mdl], "CSVs of random-pair and k-NN mean similarities")
    sp.add_argument("--n-words", type=int, default=1000, help="words sampled for k-NN means")
    sp.add_argument("--n-pairs", type=int, default=1000, help="random word pairs")
    sp.add_argument("--k", type=int, default=10, help="neighbors per k-NN mean")
    sp.set_defaults(out=None)

    sp = add("simcurve", cmd_simcurve, [mdl], "CSV of similarities to the top-k neighbors")
    sp.add_argument("word")
    sp.add_argument("--k", type=int, default=100, help="number of neighbors")
    return p


def read_config(path: str) -> list[str]:
    """Turn ``key = value`` lines into command-line tokens."""
    argv = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (x.strip() for x in line.split("=", 1))
            flag = "--" + key.replace("_", "-")
            if val.lower() in ("true", "yes", "on"):
                argv.append(flag)
            elif val.lower() in ("false", "no", "off"):
                continue
            else:
                argv += [flag, val]
    return argv


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        if known.config and argv and argv[0] in COMMANDS:
            # config values go right after the subcommand so later flags override them
            argv = argv[:1] + read_config(known.config) + argv[1:]
        args = parser.parse_args(argv)
        if args.command == "density" and not args.out:
            raise CliError("density needs --out PREFIX (writes PREFIX_pair_sim.csv and PREFIX_knn_mean_sim.csv)")
        cfg = RunConfig.from_args(args)
        return args.func(args, cfg)
    except CliError as e:
        print(f"{PROG}: error: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError, IndexError) as e:
        print(f"{PROG}: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
