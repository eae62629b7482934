import pytest

from linefix.corpus import make_corpus, make_program
from linefix.datagen import (DatasetFormatError, DatasetManifest,
                             derive_gold, filter_corpus, generate_examples,
                             read_dataset, split_dataset, write_dataset)
from linefix.diagnostics import ErrorCategory, category_stats
from linefix.evaluator import EvaluatorSpec, evaluate, mini_check
from linefix.lang import program_from_lines
from linefix.perturb import rng_from

MINI = EvaluatorSpec(kind="minicheck")


def test_make_corpus_deterministic_and_compiling():
    corpus = make_corpus(25, seed=0)
    again = make_corpus(25, seed=0)
    assert [p.to_text() for p in corpus] == [p.to_text() for p in again]
    assert len({p.to_text() for p in corpus}) == 25
    for prog in corpus:
        assert mini_check(prog).compiles
        assert 3 <= prog.line_count <= 20


def test_filter_corpus_drops_long_and_failing():
    ok = make_program(rng_from(1, 0))
    long_prog = program_from_lines(["int a ;"] * 101)
    failing = program_from_lines(["a = 1 ;"])
    kept = list(filter_corpus([ok, long_prog, failing], MINI))
    assert kept == [ok]
    hundred = program_from_lines(
        [f"int v{i} ;" for i in range(100)])
    assert list(filter_corpus([hundred], MINI)) == [hundred]


def test_generate_examples_all_fail_and_bounded():
    corpus = make_corpus(5, seed=3)
    examples = generate_examples(corpus, MINI, per_program_target=10, seed=3)
    assert len(examples) <= 50
    assert len(examples) >= 40  # most corruption attempts should break something
    for ex in examples:
        assert not evaluate(ex.broken, MINI).compiles
        assert 1 <= ex.error_line <= ex.broken.line_count
        assert ex.broken.line_count == ex.fixed.line_count


def test_single_edit_gold_is_edited_line():
    corpus = make_corpus(10, seed=4)
    examples = generate_examples(corpus, MINI, per_program_target=20, seed=4)
    singles = [ex for ex in examples if len(ex.provenance) == 1]
    assert singles
    for ex, original in ((ex, corpus[int(ex.source_id[3:])]) for ex in singles):
        assert ex.error_line == ex.provenance[0].line
        assert ([t.text for t in ex.repaired_line]
                == [t.text for t in original.lines[ex.error_line - 1]])


def test_repairing_gold_line_reduces_corruption():
    corpus = make_corpus(6, seed=5)
    examples = generate_examples(corpus, MINI, per_program_target=8, seed=5)
    for ex in examples:
        original = corpus[int(ex.source_id[3:])]
        before = sum(
            [t.text for t in ex.broken.lines[i]] != [t.text for t in original.lines[i]]
            for i in range(original.line_count))
        after = sum(
            [t.text for t in ex.fixed.lines[i]] != [t.text for t in original.lines[i]]
            for i in range(original.line_count))
        assert after == before - 1


def test_iterative_replay_restores_compilation():
    corpus = make_corpus(8, seed=6)
    examples = generate_examples(corpus, MINI, per_program_target=6, seed=6)
    for ex in examples:
        original = corpus[int(ex.source_id[3:])]
        current = ex.broken
        for i in range(1, original.line_count + 1):
            current = current.with_line(i, list(original.lines[i - 1]))
        assert evaluate(current, MINI).compiles


def test_derive_gold_tie_breaks_to_smaller_line():
    original = program_from_lines(["int a ;", "a = 1 ;", "a = 2 ;"])
    broken = original.with_line(1, ["int", "a"]).with_line(3, ["a", "=", ";"])
    fb = mini_check(broken).feedback
    # reported line 2 ("expected ';' before 'a'"): lines 1 and 3 tie at distance 1
    assert fb.i_err == 2
    assert derive_gold(original, broken, fb) == 1


def test_dataset_roundtrip(tmp_path):
    corpus = make_corpus(6, seed=7)
    examples = generate_examples(corpus, MINI, per_program_target=10, seed=7)
    path = tmp_path / "data.jsonl"
    count = write_dataset(examples, path)
    assert count == len(examples)
    again = read_dataset(path)
    assert len(again) == len(examples)
    for a, b in zip(examples, again):
        assert a.to_record() == b.to_record()
    # byte stability under double serialization
    path2 = tmp_path / "data2.jsonl"
    write_dataset(again, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_empty_dataset_roundtrip(tmp_path):
    path = tmp_path / "empty.jsonl"
    write_dataset([], path)
    assert read_dataset(path) == []


def test_version_mismatch_rejected(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"format_version": 99, "kind": "repair-dataset"}\n')
    with pytest.raises(DatasetFormatError):
        read_dataset(path)


def test_malformed_line_names_line_number(tmp_path):
    path = tmp_path / "bad2.jsonl"
    path.write_text('{"format_version": 1, "kind": "repair-dataset"}\n{oops\n')
    with pytest.raises(DatasetFormatError, match="line 2"):
        read_dataset(path)


def test_split_no_leakage_and_deterministic():
    corpus = make_corpus(20, seed=8)
    examples = generate_examples(corpus, MINI, per_program_target=5, seed=8)
    train, dev = split_dataset(examples, (0.9, 1.0 - 0.9), seed=8)
    train2, dev2 = split_dataset(examples, (0.9, 1.0 - 0.9), seed=8)
    assert [e.example_id for e in train] == [e.example_id for e in train2]
    train_sources = {e.source_id for e in train}
    dev_sources = {e.source_id for e in dev}
    assert not (train_sources & dev_sources)
    assert len(train_sources) == 18
    assert len(train) + len(dev) == len(examples)


def test_category_diversity_at_scale():
    corpus = make_corpus(30, seed=0)
    examples = generate_examples(corpus, MINI, per_program_target=40, seed=0)
    stats = category_stats(ex.feedback for ex in examples)
    assert stats.total > 1000
    present = {cat for cat, c in stats.counts.items() if c > 0}
    assert present == set(ErrorCategory)


def test_manifest_roundtrip(tmp_path):
    manifest = DatasetManifest("corpus0", "minicheck", 0, 50,
                               counts={"train": 10}, config={"seed": 0})
    path = tmp_path / "m.json"
    manifest.write(path)
    again = DatasetManifest.read(path)
    assert again == manifest
