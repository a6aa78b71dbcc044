"""Okapi BM25 inverted index over a passage corpus.

Scoring: sum over query tokens (duplicates counted per occurrence) of

    idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len(d) / avgdl))

with idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)), k1 = 1.2, b = 0.75 by
default. This idf variant is non-negative, so all scores are >= 0. Results
are ordered by (score desc, passage id asc); zero-score passages are never
returned. The index is immutable after build and safe for concurrent
searches.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import jsonl
from ._kernels import score_terms
from .corpus import CorpusStore, tokenize
from .errors import ConfigError, ParseError

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75
MAX_QUERY_TOKENS = 512

_FORMAT = "steprag-bm25"
_VERSION = 1


@dataclass(frozen=True)
class ScoredHit:
    passage_id: str
    score: float


class BM25Index:
    """CSR-style postings plus per-passage lengths; built once, queried many times."""

    def __init__(
        self,
        doc_ids: list[str],
        doc_len: np.ndarray,
        vocab: dict[str, int],
        term_offsets: np.ndarray,
        post_docs: np.ndarray,
        post_tfs: np.ndarray,
        k1: float = DEFAULT_K1,
        b: float = DEFAULT_B,
    ):
        self.doc_ids = doc_ids
        self.doc_len = doc_len
        self.vocab = vocab
        self.term_offsets = term_offsets
        self.post_docs = post_docs
        self.post_tfs = post_tfs
        self.k1 = float(k1)
        self.b = float(b)
        self.n_docs = len(doc_ids)
        self.avgdl = float(doc_len.mean()) if self.n_docs else 0.0
        self.df = np.diff(term_offsets).astype(np.float64)

    @classmethod
    def build(cls, corpus: CorpusStore, k1: float = DEFAULT_K1, b: float = DEFAULT_B) -> "BM25Index":
        """Index title + text of every passage. Deterministic for a given corpus:
        internal document order is ascending passage id."""
        if len(corpus) == 0:
            raise ConfigError("cannot build an index over an empty corpus")
        doc_ids = sorted(corpus.ids())
        doc_len = np.zeros(len(doc_ids), dtype=np.float64)
        postings: dict[str, list[tuple[int, int]]] = {}
        for d, pid in enumerate(doc_ids):
            passage = corpus.get_passage(pid)
            tokens = tokenize(passage.title + " " + passage.text)
            doc_len[d] = len(tokens)
            counts: dict[str, int] = {}
            for tok in tokens:
                counts[tok] = counts.get(tok, 0) + 1
            for term, tf in counts.items():
                postings.setdefault(term, []).append((d, tf))

        vocab = {term: i for i, term in enumerate(sorted(postings))}
        term_offsets = np.zeros(len(vocab) + 1, dtype=np.int64)
        total = sum(len(v) for v in postings.values())
        post_docs = np.zeros(total, dtype=np.int64)
        post_tfs = np.zeros(total, dtype=np.float64)
        pos = 0
        for term in sorted(postings):
            plist = postings[term]
            for d, tf in plist:
                post_docs[pos] = d
                post_tfs[pos] = tf
                pos += 1
            term_offsets[vocab[term] + 1] = pos
        return cls(doc_ids, doc_len, vocab, term_offsets, post_docs, post_tfs, k1, b)

    def idf(self, term: str) -> float:
        t = self.vocab.get(term)
        if t is None:
            return 0.0
        dfi = self.df[t]
        return float(np.log(1.0 + (self.n_docs - dfi + 0.5) / (dfi + 0.5)))

    def term_frequency(self, term: str, passage_id: str) -> int:
        t = self.vocab.get(term)
        if t is None:
            return 0
        d = self.doc_ids.index(passage_id)
        sl = slice(self.term_offsets[t], self.term_offsets[t + 1])
        hits = np.nonzero(self.post_docs[sl] == d)[0]
        if hits.size == 0:
            return 0
        return int(self.post_tfs[sl][hits[0]])

    def scores(self, query: str) -> np.ndarray:
        """Raw BM25 scores for every document, in internal document order."""
        tokens = tokenize(query)[:MAX_QUERY_TOKENS]
        term_ids = np.array(
            [self.vocab[t] for t in tokens if t in self.vocab], dtype=np.int64
        )
        if term_ids.size == 0 or self.n_docs == 0:
            return np.zeros(self.n_docs, dtype=np.float64)
        return score_terms(
            term_ids,
            self.term_offsets,
            self.post_docs,
            self.post_tfs,
            self.df,
            self.doc_len,
            self.avgdl,
            self.k1,
            self.b,
        )

    def search(self, query: str, k: int) -> list[ScoredHit]:
        """Top-k hits with positive score, ordered by (score desc, id asc)."""
        if k < 1:
            raise ConfigError(f"k must be >= 1, got {k}")
        scores = self.scores(query)
        ranked = sorted(
            (
                ScoredHit(self.doc_ids[d], float(scores[d]))
                for d in np.nonzero(scores > 0.0)[0]
            ),
            key=lambda h: (-h.score, h.passage_id),
        )
        return ranked[:k]

    def save(self, path: str | Path) -> None:
        """Single line-delimited sidecar file with a version header."""
        def lines():
            yield {
                "format": _FORMAT,
                "version": _VERSION,
                "k1": self.k1,
                "b": self.b,
                "n_docs": self.n_docs,
            }
            for d, pid in enumerate(self.doc_ids):
                yield {"doc": pid, "len": int(self.doc_len[d])}
            for term in sorted(self.vocab):
                t = self.vocab[term]
                sl = slice(int(self.term_offsets[t]), int(self.term_offsets[t + 1]))
                yield {
                    "term": term,
                    "postings": [
                        [int(d), int(tf)]
                        for d, tf in zip(self.post_docs[sl], self.post_tfs[sl])
                    ],
                }

        jsonl.write_lines(path, lines())

    @classmethod
    def load(cls, path: str | Path) -> "BM25Index":
        reader = jsonl.read_lines(path)
        try:
            line_no, header = next(reader)
        except StopIteration:
            raise ParseError(path, 1, "empty index file") from None
        if header.get("format") != _FORMAT:
            raise ParseError(path, line_no, f"not a {_FORMAT} file")
        if header.get("version") != _VERSION:
            raise ParseError(path, line_no, f"unsupported version {header.get('version')!r}")
        n_docs = header["n_docs"]
        doc_ids: list[str] = []
        lens: list[int] = []
        terms: list[tuple[str, list[list[int]]]] = []
        for line_no, obj in reader:
            if "doc" in obj:
                doc_ids.append(obj["doc"])
                lens.append(obj["len"])
            elif "term" in obj:
                terms.append((obj["term"], obj["postings"]))
            else:
                raise ParseError(path, line_no, "expected a doc or term record")
        if len(doc_ids) != n_docs:
            raise ParseError(path, 1, f"header says {n_docs} docs, file has {len(doc_ids)}")
        vocab = {term: i for i, (term, _) in enumerate(terms)}
        term_offsets = np.zeros(len(terms) + 1, dtype=np.int64)
        total = sum(len(p) for _, p in terms)
        post_docs = np.zeros(total, dtype=np.int64)
        post_tfs = np.zeros(total, dtype=np.float64)
        pos = 0
        for i, (_, plist) in enumerate(terms):
            for d, tf in plist:
                post_docs[pos] = d
                post_tfs[pos] = tf
                pos += 1
            term_offsets[i + 1] = pos
        return cls(
            doc_ids,
            np.array(lens, dtype=np.float64),
            vocab,
            term_offsets,
            post_docs,
            post_tfs,
            header["k1"],
            header["b"],
        )
