"""Loading, storing and looking up dense word vectors.

Two plain-text layouts are understood: word2vec style (first line is
``<count> <dim>``) and GloVe style (no header). Every data line is a token
followed by its components, separated by single ASCII spaces.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class EmbeddingFormatError(ValueError):
    """Malformed embedding file."""


class UnknownTokenError(KeyError):
    def __init__(self, token: str):
        super().__init__(token)
        self.token = token

    def __str__(self) -> str:
        return f"unknown token {self.token!r}"


@dataclass
class LoadReport:
    path: str | None = None
    zero_rows: list[str] = field(default_factory=list)

    @property
    def messages(self) -> list[str]:
        return [f"zero vector excluded from similarity queries: {t!r}" for t in self.zero_rows]


class EmbeddingModel:
    """Immutable vocabulary plus vector matrix.

    Rows with zero norm are kept but flagged in ``zero_mask``; cosine
    spaces built on the model leave them out.
    """

    def __init__(self, vocab: Sequence[str], matrix, report: LoadReport | None = None):
        matrix = np.array(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        vocab = tuple(vocab)
        if len(vocab) != matrix.shape[0]:
            raise ValueError(f"{len(vocab)} tokens but {matrix.shape[0]} rows")
        if matrix.shape[1] < 1:
            raise ValueError("dimension must be positive")
        index: dict[str, int] = {}
        for i, tok in enumerate(vocab):
            if tok in index:
                raise EmbeddingFormatError(f"duplicate token {tok!r}")
            index[tok] = i

        matrix.flags.writeable = False
        norms = np.sqrt(np.einsum("ij,ij->i", matrix, matrix))
        norms.flags.writeable = False
        zero_mask = norms == 0.0
        zero_mask.flags.writeable = False

        self._vocab = vocab
        self._index = index
        self._matrix = matrix
        self._norms = norms
        self._zero_mask = zero_mask
        self.report = report if report is not None else LoadReport()
        self.report.zero_rows = [vocab[i] for i in np.flatnonzero(zero_mask)]

    @property
    def vocab(self) -> tuple[str, ...]:
        return self._vocab

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def norms(self) -> np.ndarray:
        return self._norms

    @property
    def zero_mask(self) -> np.ndarray:
        return self._zero_mask

    @property
    def dim(self) -> int:
        return self._matrix.shape[1]

    def __len__(self) -> int:
        return len(self._vocab)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def __repr__(self) -> str:
        return f"EmbeddingModel(|V|={len(self)}, dim={self.dim})"

    def lookup(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise UnknownTokenError(token) from None

    def duplicate_groups(self) -> list[list[int]]:
        """Groups of row ids whose vectors are bitwise identical."""
        seen: dict[bytes, list[int]] = {}
        for i in range(len(self)):
            seen.setdefault(self._matrix[i].tobytes(), []).append(i)
        return [ids for ids in seen.values() if len(ids) > 1]


def lookup(model: EmbeddingModel, token: str) -> int:
    return model.lookup(token)


def _parse_floats(parts: list[str], lineno: int) -> list[float]:
    try:
        return [float(x) for x in parts]
    except ValueError:
        bad = next(x for x in parts if not _is_float(x))
        raise EmbeddingFormatError(f"line {lineno}: non-numeric field {bad!r}") from None


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def load_text_embeddings(path: str | os.PathLike, has_header: bool = False) -> EmbeddingModel:
    """Read a text embedding file.

    Raises EmbeddingFormatError for an empty file, a bad header, a row whose
    length disagrees with the dimension (the message names the line number),
    a non-numeric component or a repeated token.
    """
    path = Path(path)
    vocab: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    dim = None
    expected_rows = None

    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if has_header and lineno == 1:
                parts = line.split(" ")
                if len(parts) != 2 or not all(p.isdigit() for p in parts):
                    raise EmbeddingFormatError(f"line 1: bad header {line!r}, expected '<count> <dim>'")
                expected_rows, dim = int(parts[0]), int(parts[1])
                if dim < 1:
                    raise EmbeddingFormatError("line 1: dimension must be positive")
                continue
            if not line:
                continue
            parts = line.split(" ")
            token, comps = parts[0], parts[1:]
            if dim is None:
                if not comps:
                    raise EmbeddingFormatError(f"line {lineno}: no vector components")
                dim = len(comps)
            if len(comps) != dim:
                raise EmbeddingFormatError(
                    f"line {lineno}: dimension mismatch, expected {dim} components, got {len(comps)}"
                )
            if token in seen:
                raise EmbeddingFormatError(f"line {lineno}: duplicate token {token!r}")
            seen.add(token)
            vocab.append(token)
            rows.append(_parse_floats(comps, lineno))

    if not rows:
        raise EmbeddingFormatError(f"{path}: empty embedding file")
    if expected_rows is not None and expected_rows != len(rows):
        raise EmbeddingFormatError(f"header announces {expected_rows} rows, file has {len(rows)}")
    return EmbeddingModel(vocab, np.array(rows, dtype=np.float64), LoadReport(path=str(path)))


def format_embeddings(model: EmbeddingModel, header: bool = True) -> Iterable[str]:
    if header:
        yield f"{len(model)} {model.dim}\n"
    for tok, row in zip(model.vocab, model.matrix):
        yield tok + " " + " ".join(format(float(x), ".17g") for x in row) + "\n"


def write_text_embeddings(model: EmbeddingModel, path: str | os.PathLike, header: bool = True) -> None:
    """Write ``model`` with 17 significant digits so a reload is bit-exact."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(format_embeddings(model, header=header))
