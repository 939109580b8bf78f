"""Vocabulary construction and TF-IDF feature extraction.

Term frequency is the in-document count divided by the document's total
token count; inverse document frequency is ln(num_docs / (1 + doc_freq)).
The product is used as the feature weight, with no further normalization.
A term present in every document therefore gets a *negative* idf
(ln(n/(n+1)) < 0); the formula is applied as-is rather than clamped.
"""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import EmptyVocabularyError, ModelFormatError
from .textprep import TokenizedDoc


@dataclass
class Vocabulary:
    """Term -> column index map with per-term document frequencies."""

    terms: tuple[str, ...]
    doc_freq: np.ndarray
    num_docs: int
    term_to_index: dict[str, int] = field(init=False, repr=False)
    idf_values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.doc_freq = np.asarray(self.doc_freq, dtype=np.int64)
        if len(self.terms) != len(self.doc_freq):
            raise ValueError("terms and doc_freq lengths differ")
        if len(self.terms) != len(set(self.terms)):
            raise ValueError("vocabulary terms are not unique")
        if len(self.doc_freq) and not (
            (self.doc_freq >= 1).all() and (self.doc_freq <= self.num_docs).all()
        ):
            raise ValueError("doc_freq values must lie in [1, num_docs]")
        self.term_to_index = {t: i for i, t in enumerate(self.terms)}
        # math.log keeps scalar and vector idf paths bitwise identical
        self.idf_values = np.array(
            [math.log(self.num_docs / (1 + int(df))) for df in self.doc_freq],
            dtype=np.float64,
        )

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class SparseVector:
    """Sorted (index, weight) pairs; explicit zeros are never stored."""

    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.indices.shape != self.values.shape:
            raise ValueError("indices and values lengths differ")
        if self.indices.size:
            if not (np.diff(self.indices) > 0).all():
                raise ValueError("indices must be sorted strictly increasing")
            if self.indices[0] < 0 or self.indices[-1] >= self.dim:
                raise ValueError("index out of range")
            if (self.values == 0.0).any():
                raise ValueError("explicit zero weights are not allowed")

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dim, dtype=np.float64)
        dense[self.indices] = self.values
        return dense

    @classmethod
    def empty(cls, dim: int) -> "SparseVector":
        return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64), dim)


def build_vocabulary(
    docs: list[TokenizedDoc],
    min_df: int = 2,
    max_terms: int | None = 10000,
) -> Vocabulary:
    """Count document frequencies and select the retained term set.

    Terms below ``min_df`` are dropped; if more than ``max_terms`` remain,
    the highest-df terms are kept (ties broken lexicographically).  Column
    indices are assigned in lexicographic term order.
    """
    if not docs:
        raise EmptyVocabularyError("cannot build a vocabulary from zero documents")
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(doc.tokens))
    selected = [(t, c) for t, c in df.items() if c >= min_df]
    if not selected:
        raise EmptyVocabularyError(
            f"no term reaches min_df={min_df} across {len(docs)} documents"
        )
    if max_terms is not None and len(selected) > max_terms:
        selected.sort(key=lambda tc: (-tc[1], tc[0]))
        selected = selected[:max_terms]
    selected.sort(key=lambda tc: tc[0])
    terms = tuple(t for t, _ in selected)
    freqs = np.array([c for _, c in selected], dtype=np.int64)
    return Vocabulary(terms=terms, doc_freq=freqs, num_docs=len(docs))


def tf(doc: TokenizedDoc) -> dict[str, float]:
    """Per-term frequency: count / total token count; {} for an empty doc."""
    n = len(doc.tokens)
    if n == 0:
        return {}
    return {t: c / n for t, c in Counter(doc.tokens).items()}


def idf(vocab: Vocabulary, term_index: int) -> float:
    """ln(num_docs / (1 + doc_freq)) for the given term column."""
    return math.log(vocab.num_docs / (1 + int(vocab.doc_freq[term_index])))


def transform(doc: TokenizedDoc, vocab: Vocabulary) -> SparseVector:
    """TF-IDF weights for one document against a built vocabulary.

    Out-of-vocabulary tokens contribute only to the tf denominator;
    exactly-zero weights are omitted from the result.
    """
    n = len(doc.tokens)
    if n == 0:
        return SparseVector.empty(len(vocab))
    lookup = vocab.term_to_index
    counts = Counter(t for t in doc.tokens if t in lookup)
    if not counts:
        return SparseVector.empty(len(vocab))
    pairs = sorted((lookup[t], c) for t, c in counts.items())
    indices = []
    values = []
    for i, c in pairs:
        w = (c / n) * float(vocab.idf_values[i])
        if w != 0.0:
            indices.append(i)
            values.append(w)
    return SparseVector(
        np.array(indices, dtype=np.int64), np.array(values, dtype=np.float64), len(vocab)
    )


def transform_matrix(docs: list[TokenizedDoc], vocab: Vocabulary) -> list[SparseVector]:
    return [transform(doc, vocab) for doc in docs]


def stack_csr(vectors: list[SparseVector], dim: int | None = None) -> sparse.csr_matrix:
    """Stack sparse vectors into one CSR matrix (row order preserved)."""
    if dim is None:
        if not vectors:
            raise ValueError("cannot infer dimension from an empty vector list")
        dim = vectors[0].dim
    if any(v.dim != dim for v in vectors):
        raise ValueError("inconsistent vector dimensions")
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    np.cumsum([v.nnz for v in vectors], out=indptr[1:])
    if vectors:
        indices = np.concatenate([v.indices for v in vectors])
        data = np.concatenate([v.values for v in vectors])
    else:
        indices = np.empty(0, dtype=np.int64)
        data = np.empty(0, dtype=np.float64)
    return sparse.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))


# ---------------------------------------------------------------------------
# Artifact files


def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    payload = {
        "num_docs": vocab.num_docs,
        "terms": [
            {"term": t, "index": i, "df": int(vocab.doc_freq[i])}
            for i, t in enumerate(vocab.terms)
        ],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False)


def load_vocabulary(path: str | Path) -> Vocabulary:
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    try:
        entries = sorted(payload["terms"], key=lambda e: e["index"])
        if [e["index"] for e in entries] != list(range(len(entries))):
            raise ModelFormatError(f"{path}: vocabulary indices are not contiguous")
        terms = tuple(e["term"] for e in entries)
        freqs = np.array([e["df"] for e in entries], dtype=np.int64)
        return Vocabulary(terms=terms, doc_freq=freqs, num_docs=int(payload["num_docs"]))
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"{path}: not a vocabulary file ({exc})") from exc


def write_features(path: str | Path, ids: list[int], vectors: list[SparseVector]) -> None:
    """One header line {"dim": V}, then one JSON object per document."""
    if len(ids) != len(vectors):
        raise ValueError("ids and vectors lengths differ")
    dim = vectors[0].dim if vectors else 0
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps({"dim": dim}) + "\n")
        for doc_id, vec in zip(ids, vectors):
            f.write(
                json.dumps(
                    {
                        "id": doc_id,
                        "idx": vec.indices.tolist(),
                        "val": vec.values.tolist(),
                    }
                )
                + "\n"
            )


def read_features(path: str | Path) -> tuple[list[int], list[SparseVector]]:
    with open(path, encoding="utf-8") as f:
        header = f.readline()
        if not header.strip():
            raise ModelFormatError(f"{path}: missing features header line")
        dim = int(json.loads(header)["dim"])
        ids = []
        vectors = []
        for line in f:
            if not line.strip():
                continue
            obj = json.loads(line)
            ids.append(int(obj["id"]))
            vectors.append(
                SparseVector(
                    np.array(obj["idx"], dtype=np.int64),
                    np.array(obj["val"], dtype=np.float64),
                    dim,
                )
            )
    return ids, vectors


def write_labels(path: str | Path, ids: list[int], labels) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["id", "label"])
        for doc_id, label in zip(ids, labels):
            writer.writerow([doc_id, int(label)])


def read_labels(path: str | Path) -> tuple[list[int], np.ndarray]:
    ids = []
    labels = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        next(reader)
        for row in reader:
            if not row:
                continue
            ids.append(int(row[0]))
            labels.append(int(row[1]))
    return ids, np.array(labels, dtype=np.int64)
