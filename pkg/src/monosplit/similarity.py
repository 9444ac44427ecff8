"""Class representations: point encodings and similarity matrices."""
from __future__ import annotations

import math
from collections import Counter
from typing import Mapping, Sequence

import numpy as np

from .model import CallMatrix, Encoding, InputError, SimilarityMatrix, TokenCorpus


def naive_encoding(calls: CallMatrix) -> Encoding:
    """Each class becomes [incoming call volume, outgoing call volume]."""
    points = np.column_stack([calls.call_in, calls.call_out]).astype(float)
    return Encoding(calls.names, points, "naive")


def codependent_partner(calls: CallMatrix, a: int) -> int | None:
    """Class sharing the most callers with ``a``, or None if no caller is shared.

    Ties go to the larger call volume from the shared callers, then to the
    lower index.
    """
    c = calls.calls
    callers = c > 0
    mine = callers[:, a]
    if not mine.any():
        return None
    best, best_key = None, None
    for x in range(calls.n):
        if x == a:
            continue
        common = mine & callers[:, x]
        overlap = int(common.sum())
        if overlap == 0:
            continue
        key = (overlap, int(c[common, x].sum()))
        if best_key is None or key > best_key:
            best, best_key = x, key
    return best


def codependent_encoding(calls: CallMatrix) -> Encoding:
    """Encode class A against its codependent partner B.

    a = calls from the callers A and B share, into both A and B;
    b = call_in(A) / call_in(B). Classes with no shared caller map to [0, 0]
    and are listed in ``Encoding.degenerate``.
    """
    c = calls.calls
    call_in = calls.call_in
    callers = c > 0
    points = np.zeros((calls.n, 2))
    degenerate = []
    for a in range(calls.n):
        b = codependent_partner(calls, a)
        if b is None:
            degenerate.append(calls.names[a])
            continue
        common = callers[:, a] & callers[:, b]
        points[a, 0] = float(c[common, a].sum() + c[common, b].sum())
        points[a, 1] = call_in[a] / call_in[b]
    return Encoding(calls.names, points, "codependent", tuple(degenerate))


def normalize_encoding(enc: Encoding) -> Encoding:
    """Min-max scale each coordinate into [0, 1]; constant columns become 0."""
    p = enc.points
    if len(p) == 0:
        return enc
    lo, hi = p.min(axis=0), p.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    return Encoding(enc.names, (p - lo) / span, enc.scheme, enc.degenerate)


def structural_similarity(calls: CallMatrix, mode: str = "total") -> SimilarityMatrix:
    """Call-ratio similarity between every pair of classes.

    ``mode="total"`` counts calls in both directions in each numerator.
    ``mode="directed"`` uses calls i->j over call_in(j) and calls j->i over
    call_in(i). Values are clamped to [0, 1]; the diagonal is 1.
    """
    c = calls.calls.astype(float)
    cin = calls.call_in.astype(float)
    n = calls.n
    out = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            if mode == "total":
                fwd = back = c[i, j] + c[j, i]
            elif mode == "directed":
                fwd, back = c[i, j], c[j, i]
            else:
                raise ValueError(f"unknown structural mode {mode!r}")
            if cin[i] and cin[j]:
                s = 0.5 * (fwd / cin[j] + back / cin[i])
            elif cin[j]:
                s = fwd / cin[j]
            elif cin[i]:
                s = back / cin[i]
            else:
                s = 0.0
            out[i, j] = out[j, i] = min(max(s, 0.0), 1.0)
    return SimilarityMatrix(calls.names, out, "structural")


def tfidf(corpus: TokenCorpus) -> dict[str, np.ndarray]:
    """L2-normalised tf-idf vector per class over the corpus vocabulary.

    tf is the raw count, idf = ln((1 + D) / (1 + df)) + 1.
    """
    vocab = corpus.vocabulary
    if not vocab:
        raise InputError("empty vocabulary")
    col = {w: k for k, w in enumerate(vocab)}
    n_docs = len(corpus.docs)
    df = Counter(w for words in corpus.docs.values() for w in set(words))
    idf = np.array([math.log((1 + n_docs) / (1 + df[w])) + 1 for w in vocab])
    out = {}
    for name, words in corpus.docs.items():
        v = np.zeros(len(vocab))
        for w, k in Counter(words).items():
            v[col[w]] = k
        v *= idf
        norm = np.linalg.norm(v)
        out[name] = v / norm if norm > 0 else v
    return out


def semantic_similarity(vectors: Mapping[str, np.ndarray],
                        names: Sequence[str] | None = None) -> SimilarityMatrix:
    """Cosine similarity of tf-idf vectors.

    ``names`` fixes the row order (e.g. the call matrix's); classes without
    a vector count as empty documents.
    """
    names = tuple(names) if names is not None else tuple(vectors)
    dims = {len(v) for v in vectors.values()}
    if len(dims) > 1:
        raise InputError("vectors do not share one vocabulary")
    dim = dims.pop() if dims else 0
    m = np.array([vectors.get(name, np.zeros(dim)) for name in names], dtype=float)
    m = m.reshape(len(names), dim)
    norms = np.linalg.norm(m, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = m / safe[:, None]
    sim = np.clip(unit @ unit.T, 0.0, 1.0)
    sim[norms == 0, :] = 0.0
    sim[:, norms == 0] = 0.0
    np.fill_diagonal(sim, 1.0)
    return SimilarityMatrix(names, sim, "semantic")


def class_similarity(structural: SimilarityMatrix, semantic: SimilarityMatrix,
                     alpha: float = 0.5, beta: float | None = None) -> SimilarityMatrix:
    """Weighted blend ``alpha * structural + beta * semantic``."""
    if beta is None:
        beta = 1.0 - alpha
    if abs(alpha + beta - 1) > 1e-9:
        raise ValueError(f"alpha + beta must equal 1, got {alpha} + {beta}")
    if structural.names != semantic.names:
        raise InputError("similarity matrices cover different classes")
    return SimilarityMatrix(structural.names,
                            alpha * structural.sim + beta * semantic.sim, "blended")


def project_similarity(calls: CallMatrix, corpus: TokenCorpus | None, alpha: float = 0.5,
                       structural_mode: str = "total") -> SimilarityMatrix:
    """Blended similarity for a project; structural only when no corpus is given."""
    s = structural_similarity(calls, structural_mode)
    if corpus is None:
        return s
    sem = semantic_similarity(tfidf(corpus), calls.names)
    return class_similarity(s, sem, alpha)
