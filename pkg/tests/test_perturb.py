import pytest

from linefix.corpus import make_corpus
from linefix.lang import program_from_lines
from linefix.perturb import (MODULE_WEIGHTS, EditRecord, NoEligibleSite,
                             PerturbModule, apply_module, corrupt,
                             invert_edits, rng_from)

RICH = program_from_lines([
    "int a , b ;",
    "string s ;",
    "a = 1 ;",
    "b = a + 2 ;",
    "if ( a < b ) {",
    "a = b ;",
    "}",
    "return 0 ;",
])


def texts(program):
    return [[t.text for t in line] for line in program.lines]


def test_syntax_delete_semicolon():
    prog = program_from_lines(["int a ;"])
    rng = rng_from(0)
    for _ in range(200):
        out, rec = apply_module(prog, PerturbModule.SYNTAX, rng)
        if rec.action == "delete" and rec.before == ";":
            assert texts(out) == [["int", "a"]]
            return
    pytest.fail("never sampled the ';' delete")


def test_id_type_replace():
    prog = program_from_lines(["char tmp , a , b ;"])
    rng = rng_from(1)
    for _ in range(300):
        out, rec = apply_module(prog, PerturbModule.ID_TYPE, rng)
        if rec.action == "replace":
            assert rec.before == "char"
            assert rec.after != "char"
            assert texts(out)[0][1:] == ["tmp", ",", "a", ",", "b", ";"]
            return
    pytest.fail("never sampled a replace")


def test_id_typo_pool_is_program_identifiers():
    prog = program_from_lines(["int aa ;", "int bb ;", "aa = bb ;"])
    rng = rng_from(2)
    seen = set()
    for _ in range(10_000):
        _, rec = apply_module(prog, PerturbModule.ID_TYPO, rng)
        if rec.after is not None:
            seen.add(rec.after)
    assert seen == {"aa", "bb"}


def test_replace_never_noop():
    rng = rng_from(3)
    for _ in range(2000):
        out, rec = apply_module(RICH, PerturbModule.SYNTAX, rng)
        if rec.action == "replace":
            assert rec.before != rec.after
        assert texts(out) != texts(RICH)


def test_single_token_difference():
    rng = rng_from(4)
    for module in PerturbModule:
        for _ in range(300):
            out, rec = apply_module(RICH, module, rng)
            flat_in = [t for line in texts(RICH) for t in line + ["\n"]]
            flat_out = [t for line in texts(out) for t in line + ["\n"]]
            assert abs(len(flat_out) - len(flat_in)) <= 1
            assert out.line_count == RICH.line_count
            diffs = [i for i, (a, b) in enumerate(zip(texts(RICH), texts(out)))
                     if a != b]
            assert diffs == [rec.line - 1]


def test_no_eligible_site():
    empty = program_from_lines([""])
    with pytest.raises(NoEligibleSite):
        apply_module(empty, PerturbModule.ID_TYPO, empty and rng_from(5))
    # Syntax can still insert into an empty line.
    out, rec = apply_module(empty, PerturbModule.SYNTAX, rng_from(5))
    assert rec.action == "insert"


def test_corrupt_determinism():
    for seed in range(5):
        a = corrupt(RICH, rng_from(seed))
        b = corrupt(RICH, rng_from(seed))
        assert texts(a[0]) == texts(b[0])
        assert a[1] == b[1]


def test_corrupt_edit_count_range():
    for seed in range(50):
        _, edits = corrupt(RICH, rng_from(seed, 7))
        assert 1 <= len(edits) <= 5


def test_invertibility():
    for idx, prog in enumerate(make_corpus(40, seed=11)):
        broken, edits = corrupt(prog, rng_from(11, idx))
        restored = invert_edits(broken, edits)
        assert texts(restored) == texts(prog)


def test_edit_record_validation():
    with pytest.raises(ValueError):
        EditRecord(PerturbModule.SYNTAX, "delete", 1, 0, None, ";")
    with pytest.raises(ValueError):
        EditRecord(PerturbModule.SYNTAX, "insert", 1, 0, ";", None)
    with pytest.raises(ValueError):
        EditRecord(PerturbModule.SYNTAX, "replace", 1, 0, ";", None)


def test_module_frequencies_small():
    # 20k rounds at +-0.02; the acceptance suite runs the 100k +-0.01 check.
    rng = rng_from(12)
    counts = {m: 0 for m in PerturbModule}
    rounds = 0
    while rounds < 20_000:
        _, edits = corrupt(RICH, rng)
        for e in edits:
            counts[e.module] += 1
            rounds += 1
    total = sum(counts.values())
    for module, weight in MODULE_WEIGHTS.items():
        assert abs(counts[PerturbModule(module)] / total - weight) < 0.02


def test_seed_split_function_independence():
    a = rng_from(100, 0).integers(0, 1 << 30, 8)
    b = rng_from(100, 1).integers(0, 1 << 30, 8)
    assert list(a) != list(b)
    again = rng_from(100, 0).integers(0, 1 << 30, 8)
    assert list(a) == list(again)
