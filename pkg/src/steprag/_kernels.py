"""Hot scoring kernels for the BM25 index.

The JIT-compiled path is the default. Set STEPRAG_PURE_NUMPY=1 to force the
pure-numpy fallback (also used automatically when numba is unavailable).
Both paths accumulate per query term in query order, so they produce
bit-identical float64 scores.
"""
from __future__ import annotations

import os

import numpy as np


def _score_terms_py(term_ids, term_offsets, post_docs, post_tfs, df, doc_len, avgdl, k1, b):
    n_docs = doc_len.shape[0]
    scores = np.zeros(n_docs, dtype=np.float64)
    for i in range(term_ids.shape[0]):
        t = term_ids[i]
        dfi = df[t]
        idf = np.log(1.0 + (n_docs - dfi + 0.5) / (dfi + 0.5))
        for p in range(term_offsets[t], term_offsets[t + 1]):
            d = post_docs[p]
            tf = post_tfs[p]
            denom = tf + k1 * (1.0 - b + b * doc_len[d] / avgdl)
            scores[d] += idf * (tf * (k1 + 1.0)) / denom
    return scores


def score_terms_numpy(term_ids, term_offsets, post_docs, post_tfs, df, doc_len, avgdl, k1, b):
    """Vectorized fallback: one posting-list slice per query term.

    A document appears at most once per posting list, so fancy-indexed
    += is safe within a term.
    """
    n_docs = doc_len.shape[0]
    scores = np.zeros(n_docs, dtype=np.float64)
    for t in term_ids:
        dfi = df[t]
        idf = np.log(1.0 + (n_docs - dfi + 0.5) / (dfi + 0.5))
        sl = slice(term_offsets[t], term_offsets[t + 1])
        docs = post_docs[sl]
        tfs = post_tfs[sl]
        denom = tfs + k1 * (1.0 - b + b * doc_len[docs] / avgdl)
        scores[docs] += idf * (tfs * (k1 + 1.0)) / denom
    return scores


_FORCE_NUMPY = bool(os.environ.get("STEPRAG_PURE_NUMPY"))

if not _FORCE_NUMPY:
    try:
        from numba import njit

        score_terms_numba = njit(cache=True)(_score_terms_py)
        score_terms = score_terms_numba
        BACKEND = "numba"
    except ImportError:
        score_terms_numba = None
        score_terms = score_terms_numpy
        BACKEND = "numpy"
else:
    score_terms_numba = None
    score_terms = score_terms_numpy
    BACKEND = "numpy"
