import json

import pytest
from hypothesis import given, strategies as st

from steprag.corpus import (
    CorpusStore,
    Passage,
    QASample,
    ingest_corpus,
    ingest_dataset,
    tokenize,
)
from steprag.errors import DuplicateIdError, NotFoundError, ParseError


def write_file(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def corpus_line(pid, title="T", text="some text"):
    return json.dumps({"id": pid, "title": title, "text": text})


class TestTokenize:
    def test_word_segmentation(self):
        assert tokenize("Savannah College of Art") == ["savannah", "college", "of", "art"]

    def test_punctuation_stripped(self):
        assert tokenize("Lacoste, France.") == ["lacoste", "france"]

    def test_empty(self):
        assert tokenize("") == []

    def test_underscore_splits(self):
        assert tokenize("foo_bar") == ["foo", "bar"]

    @given(st.text(max_size=200))
    def test_idempotent_on_own_output(self, text):
        tokens = tokenize(text)
        assert tokenize(" ".join(tokens)) == tokens
        assert all(tokens), "no empty tokens"


class TestIngestCorpus:
    def test_three_records(self, tmp_path):
        p = write_file(tmp_path / "c.jsonl", [corpus_line(f"p{i}") for i in range(3)])
        store = ingest_corpus(p)
        assert len(store) == 3

    def test_duplicate_id_names_both_lines(self, tmp_path):
        p = write_file(
            tmp_path / "c.jsonl",
            [corpus_line("p1"), corpus_line("p2"), corpus_line("p1")],
        )
        with pytest.raises(DuplicateIdError) as exc:
            ingest_corpus(p)
        assert exc.value.first_line == 1
        assert exc.value.second_line == 3
        assert "p1" in str(exc.value)

    def test_empty_file_warns_and_succeeds(self, tmp_path, caplog):
        p = tmp_path / "c.jsonl"
        p.write_text("", encoding="utf-8")
        with caplog.at_level("WARNING"):
            store = ingest_corpus(p)
        assert len(store) == 0
        assert any("empty" in r.message for r in caplog.records)

    def test_malformed_line_names_line_number(self, tmp_path):
        p = write_file(tmp_path / "c.jsonl", [corpus_line("p1"), "{not json"])
        with pytest.raises(ParseError) as exc:
            ingest_corpus(p)
        assert exc.value.line_no == 2

    def test_missing_field(self, tmp_path):
        p = write_file(tmp_path / "c.jsonl", [json.dumps({"id": "p1", "title": "T"})])
        with pytest.raises(ParseError) as exc:
            ingest_corpus(p)
        assert "text" in str(exc.value)

    def test_whitespace_only_text_rejected(self, tmp_path):
        p = write_file(tmp_path / "c.jsonl", [corpus_line("p1", text="   ")])
        with pytest.raises(ParseError):
            ingest_corpus(p)

    def test_get_round_trip(self, tmp_path):
        p = write_file(tmp_path / "c.jsonl", [corpus_line("p1", "Rome", "Rome is a city.")])
        store = ingest_corpus(p)
        got = store.get_passage("p1")
        assert got == Passage("p1", "Rome", "Rome is a city.")

    def test_unknown_id(self, tmp_path):
        p = write_file(tmp_path / "c.jsonl", [corpus_line("p1")])
        store = ingest_corpus(p)
        with pytest.raises(NotFoundError) as exc:
            store.get_passage("zzz")
        assert "zzz" in str(exc.value)

    def test_write_read_round_trip(self, tmp_path):
        p = write_file(
            tmp_path / "c.jsonl",
            [corpus_line("p1", "Ami", "héllo wörld"), corpus_line("p2", "", "x")],
        )
        store = ingest_corpus(p)
        out = tmp_path / "copy.jsonl"
        store.write(out)
        again = ingest_corpus(out)
        assert again.passages == store.passages


class TestIngestDataset:
    def sample_line(self, sid="q1", **kw):
        obj = {"id": sid, "question": "Who?", "answers": ["Rome"]}
        obj.update(kw)
        return json.dumps(obj)

    def test_basic(self, tmp_path):
        p = write_file(
            tmp_path / "d.jsonl",
            [self.sample_line("q1"), self.sample_line("q2", supporting_ids=["p1"])],
        )
        ds = ingest_dataset(p)
        assert len(ds) == 2
        assert ds.get_sample("q2").supporting_ids == ("p1",)
        assert ds.get_sample("q1").supporting_ids is None

    def test_empty_answers_rejected(self, tmp_path):
        p = write_file(tmp_path / "d.jsonl", [self.sample_line(answers=[])])
        with pytest.raises(ParseError):
            ingest_dataset(p)

    def test_unresolved_supporting_ids(self, tmp_path):
        c = write_file(tmp_path / "c.jsonl", [corpus_line("p1")])
        d = write_file(
            tmp_path / "d.jsonl", [self.sample_line("q1", supporting_ids=["p1", "p9"])]
        )
        missing = ingest_dataset(d).unresolved_supporting_ids(ingest_corpus(c))
        assert missing == {"q1": ["p9"]}

    def test_write_round_trip(self, tmp_path):
        p = write_file(
            tmp_path / "d.jsonl",
            [self.sample_line("q1", answers=["a", "b"]), self.sample_line("q2")],
        )
        ds = ingest_dataset(p)
        out = tmp_path / "copy.jsonl"
        ds.write(out)
        assert ingest_dataset(out).samples == ds.samples
