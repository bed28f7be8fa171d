"""Loader for textual word-vector files and cosine nearest-neighbour lookup.

File format: a header line ``<count> <dimension>`` followed by one line per
word, ``word v1 v2 ... vd``, whitespace-separated, UTF-8.  Multiword entries
use underscores (``semantic_web``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class EmbeddingError(ValueError):
    """Malformed embedding file or inconsistent dimensions."""


@dataclass(frozen=True)
class EmbeddingModel:
    dim: int
    words: tuple[str, ...]
    matrix: np.ndarray  # L2-normalized rows, one per word
    index: dict[str, int]

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def __len__(self) -> int:
        return len(self.words)

    def vector(self, word: str) -> np.ndarray | None:
        i = self.index.get(word)
        return None if i is None else self.matrix[i]


def _normalize_rows(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return mat / norms


def load_embeddings(path: str) -> EmbeddingModel:
    """Read a textual vector file; validates header, widths, and finiteness."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise EmbeddingError(f"bad header {header!r}; expected '<count> <dim>'")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise EmbeddingError(f"non-integer header {header!r}") from None
        if dim < 1:
            raise EmbeddingError(f"dimension must be >= 1, got {dim}")
        words: list[str] = []
        rows: list[list[float]] = []
        index: dict[str, int] = {}
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            word = parts[0]
            if len(parts) != dim + 1:
                raise EmbeddingError(
                    f"line {lineno}: expected {dim} values for {word!r}, "
                    f"got {len(parts) - 1}"
                )
            if word in index:
                raise EmbeddingError(f"line {lineno}: duplicate word {word!r}")
            try:
                values = [float(v) for v in parts[1:]]
            except ValueError:
                raise EmbeddingError(f"line {lineno}: non-numeric value") from None
            index[word] = len(words)
            words.append(word)
            rows.append(values)
    if len(words) != count:
        raise EmbeddingError(f"header declares {count} words, file has {len(words)}")
    if not words:
        raise EmbeddingError("empty vocabulary")
    mat = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(mat)):
        raise EmbeddingError("non-finite vector component")
    return EmbeddingModel(dim, tuple(words), _normalize_rows(mat), index)


def embed_ngram(model: EmbeddingModel, tokens: tuple[str, ...]) -> np.ndarray | None:
    """Vector for an n-gram: the underscore-joined entry when the vocabulary
    has one, else the average over member tokens present in the vocabulary.
    None when nothing is covered."""
    joined = model.vector("_".join(tokens))
    if joined is not None:
        return joined
    members = [v for t in tokens if (v := model.vector(t)) is not None]
    if not members:
        return None
    return np.mean(members, axis=0)


def most_similar(
    model: EmbeddingModel, vector: np.ndarray, top_k: int, floor: float
) -> list[tuple[str, float]]:
    """Top-k vocabulary words by cosine similarity, keeping scores >= floor.

    Output is sorted by descending similarity with lexicographic tie-break,
    so results are deterministic.
    """
    if vector.shape != (model.dim,):
        raise EmbeddingError(
            f"query vector has shape {vector.shape}, model dimension is {model.dim}"
        )
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        return []
    sims = model.matrix @ (vector / norm)
    order = sorted(range(len(sims)), key=lambda i: (-sims[i], model.words[i]))
    out: list[tuple[str, float]] = []
    for i in order[: max(top_k, 0)]:
        if sims[i] < floor:
            break
        out.append((model.words[i], float(sims[i])))
    return out
