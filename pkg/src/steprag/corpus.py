"""Passage corpora and QA datasets: ingestion, lookup, tokenization.

File formats (UTF-8, one JSON object per line):
  corpus:  {"id": str, "title": str, "text": str}
  dataset: {"id": str, "question": str, "answers": [str, ...],
            "supporting_ids": [str, ...]}   # supporting_ids optional

Stores are immutable after ingestion and safe for concurrent readers.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from . import jsonl
from .errors import DuplicateIdError, NotFoundError, ParseError

log = logging.getLogger(__name__)

# Unicode letters and digits; underscore excluded on purpose so that
# tokenization splits on every non-alphanumeric boundary.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase, Unicode-aware word segmentation. Deterministic, no stemming.

    Lowercasing happens before segmentation so the output re-tokenizes to
    itself (idempotence under space-joining).
    """
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Passage:
    """One retrievable corpus unit."""

    id: str
    title: str
    text: str


@dataclass(frozen=True)
class QASample:
    """One question with its acceptable answers and optional gold passage ids."""

    id: str
    question: str
    answers: tuple[str, ...]
    supporting_ids: tuple[str, ...] | None = None


def _require_str(obj: dict, key: str, path, line_no: int, allow_empty: bool = False) -> str:
    if key not in obj:
        raise ParseError(path, line_no, f"missing field {key!r}")
    value = obj[key]
    if not isinstance(value, str):
        raise ParseError(path, line_no, f"field {key!r} must be a string")
    if not allow_empty and not value.strip():
        raise ParseError(path, line_no, f"field {key!r} must be non-empty")
    return value


@dataclass
class CorpusStore:
    """Immutable mapping from passage id to Passage, in ingestion order."""

    passages: dict[str, Passage] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.passages)

    def __iter__(self) -> Iterator[Passage]:
        return iter(self.passages.values())

    def __contains__(self, passage_id: str) -> bool:
        return passage_id in self.passages

    def ids(self) -> list[str]:
        return list(self.passages)

    def get_passage(self, passage_id: str) -> Passage:
        try:
            return self.passages[passage_id]
        except KeyError:
            raise NotFoundError("passage", passage_id) from None

    def write(self, path: str | Path) -> int:
        return jsonl.write_lines(
            path, ({"id": p.id, "title": p.title, "text": p.text} for p in self)
        )


@dataclass
class QADataset:
    """Immutable mapping from sample id to QASample, in ingestion order."""

    samples: dict[str, QASample] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[QASample]:
        return iter(self.samples.values())

    def get_sample(self, sample_id: str) -> QASample:
        try:
            return self.samples[sample_id]
        except KeyError:
            raise NotFoundError("sample", sample_id) from None

    def unresolved_supporting_ids(self, corpus: CorpusStore) -> dict[str, list[str]]:
        """Supporting ids that do not resolve in the paired corpus, per sample."""
        missing: dict[str, list[str]] = {}
        for sample in self:
            if not sample.supporting_ids:
                continue
            bad = [pid for pid in sample.supporting_ids if pid not in corpus]
            if bad:
                missing[sample.id] = bad
        return missing

    def write(self, path: str | Path) -> int:
        def to_obj(s: QASample) -> dict:
            obj = {"id": s.id, "question": s.question, "answers": list(s.answers)}
            if s.supporting_ids is not None:
                obj["supporting_ids"] = list(s.supporting_ids)
            return obj

        return jsonl.write_lines(path, (to_obj(s) for s in self))


def ingest_corpus(path: str | Path) -> CorpusStore:
    """Load a passage corpus file. Rejects duplicate ids, names bad lines."""
    passages: dict[str, Passage] = {}
    first_line: dict[str, int] = {}
    for line_no, obj in jsonl.read_lines(path):
        pid = _require_str(obj, "id", path, line_no)
        title = _require_str(obj, "title", path, line_no, allow_empty=True)
        text = _require_str(obj, "text", path, line_no)
        if pid in passages:
            raise DuplicateIdError(path, pid, first_line[pid], line_no)
        passages[pid] = Passage(id=pid, title=title, text=text)
        first_line[pid] = line_no
    if not passages:
        log.warning("corpus %s is empty", path)
    else:
        log.info("ingested %d passages from %s", len(passages), path)
    return CorpusStore(passages)


def ingest_dataset(path: str | Path) -> QADataset:
    """Load a QA dataset file. Every sample needs at least one answer."""
    samples: dict[str, QASample] = {}
    first_line: dict[str, int] = {}
    for line_no, obj in jsonl.read_lines(path):
        sid = _require_str(obj, "id", path, line_no)
        question = _require_str(obj, "question", path, line_no)
        answers = obj.get("answers")
        if not isinstance(answers, list) or not answers:
            raise ParseError(path, line_no, "field 'answers' must be a non-empty list")
        if not all(isinstance(a, str) for a in answers):
            raise ParseError(path, line_no, "field 'answers' must contain only strings")
        supporting = obj.get("supporting_ids")
        if supporting is not None:
            if not isinstance(supporting, list) or not all(
                isinstance(x, str) for x in supporting
            ):
                raise ParseError(path, line_no, "field 'supporting_ids' must be a list of strings")
            supporting = tuple(supporting)
        if sid in samples:
            raise DuplicateIdError(path, sid, first_line[sid], line_no)
        samples[sid] = QASample(
            id=sid, question=question, answers=tuple(answers), supporting_ids=supporting
        )
        first_line[sid] = line_no
    if not samples:
        log.warning("dataset %s is empty", path)
    else:
        log.info("ingested %d samples from %s", len(samples), path)
    return QADataset(samples)
