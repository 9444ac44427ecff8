"""Synthetic monoliths with planted service blocks, for experiments and tests."""
from __future__ import annotations

import numpy as np

from .model import CallMatrix, TokenCorpus


def planted_monolith(blocks: int = 4, size: int = 8, p_in: float = 0.6, p_out: float = 0.05,
                     max_calls: int = 5, seed: int = 0, vocab_per_block: int = 12,
                     words_per_class: int = 8, shared_words: int = 10):
    """Returns ``(calls, corpus, planted_labels)``.

    Each ordered pair of distinct classes gets a call edge with probability
    ``p_in`` inside a block and ``p_out`` across blocks; edge counts are
    uniform in 1..max_calls. Each class draws most of its words from its
    block's vocabulary plus a few from a shared pool.
    """
    rng = np.random.default_rng(seed)
    n = blocks * size
    labels = np.repeat(np.arange(blocks), size)
    same = labels[:, None] == labels[None, :]
    prob = np.where(same, p_in, p_out)
    edges = rng.random((n, n)) < prob
    counts = rng.integers(1, max_calls + 1, size=(n, n))
    calls = np.where(edges, counts, 0)
    np.fill_diagonal(calls, 0)
    names = tuple(f"svc{b}.Class{i}" for i, b in enumerate(labels))
    docs = {}
    for i, b in enumerate(labels):
        own = rng.integers(0, vocab_per_block, size=words_per_class)
        common = rng.integers(0, shared_words, size=max(1, words_per_class // 4))
        docs[names[i]] = tuple(sorted([f"blk{b}w{w}" for w in own]
                                      + [f"common{w}" for w in common]))
    return CallMatrix(names, calls), TokenCorpus(docs), labels
