from linefix.corpus import make_corpus
from linefix.datagen import generate_examples
from linefix.driver import (IdentityPolicy, OracleGoldPolicy, eval_by_category,
                            eval_full, eval_single, iterative_repair)
from linefix.evaluator import EvaluatorSpec, evaluate
from linefix.lang import program_from_lines
from linefix.perturb import corrupt, rng_from

MINI = EvaluatorSpec(kind="minicheck")


def test_already_compiling_zero_attempts():
    prog = program_from_lines(["int a ;", "a = 1 ;"])
    out = iterative_repair(prog, MINI, IdentityPolicy())
    assert out.success
    assert out.attempts_used == 0
    assert out.trace == []


def test_single_corruption_oracle_one_attempt():
    corpus = make_corpus(30, seed=21)
    fixed_in_one = 0
    for idx, prog in enumerate(corpus):
        rng = rng_from(21, idx)
        while True:
            broken, edits = corrupt(prog, rng)
            diff_lines = [i for i in range(prog.line_count)
                          if [t.text for t in prog.lines[i]]
                          != [t.text for t in broken.lines[i]]]
            if len(edits) == 1 and not evaluate(broken, MINI).compiles:
                break
        out = iterative_repair(broken, MINI, OracleGoldPolicy(prog))
        assert out.success
        assert out.attempts_used == 1
        fixed_in_one += 1
    assert fixed_in_one == 30


def test_multi_edit_oracle_within_five():
    corpus = make_corpus(40, seed=22)
    for idx, prog in enumerate(corpus):
        broken, edits = corrupt(prog, rng_from(22, idx))
        if evaluate(broken, MINI).compiles:
            continue
        out = iterative_repair(broken, MINI, OracleGoldPolicy(prog))
        assert out.success
        assert out.attempts_used <= 5


def test_noop_policy_terminates_early_as_failure():
    prog = program_from_lines(["a = 1 ;"])
    out = iterative_repair(prog, MINI, IdentityPolicy(), max_attempts=5)
    assert not out.success
    assert out.attempts_used == 0


def test_trace_single_line_per_step():
    corpus = make_corpus(5, seed=23)
    prog = corpus[0]
    broken, _ = corrupt(prog, rng_from(23, 0))
    if evaluate(broken, MINI).compiles:
        return
    out = iterative_repair(broken, MINI, OracleGoldPolicy(prog))
    current = broken
    for step in out.trace:
        nxt = current.with_line(step.k_hat, step.new_line.split())
        diff = [i for i in range(current.line_count)
                if current.line_texts()[i] != nxt.line_texts()[i]]
        assert diff == [step.k_hat - 1]
        current = nxt
    assert current.line_texts() == out.final_program.line_texts()


def make_dataset(n_programs, seed, per=5):
    corpus = make_corpus(n_programs, seed=seed)
    examples = generate_examples(corpus, MINI, per_program_target=per, seed=seed)
    return corpus, examples


def test_eval_single_oracle_perfect():
    corpus, examples = make_dataset(10, 24)
    class GoldFromExample:
        def propose(self, program, feedback):
            ex = by_broken[program.to_text()]
            return ex.error_line, [t.text for t in ex.repaired_line]
    by_broken = {ex.broken.to_text(): ex for ex in examples}
    metrics = eval_single(examples, GoldFromExample())
    assert metrics == {"localize_acc": 1.0, "repair_acc": 1.0}


def test_eval_single_identity_zero_repair():
    _, examples = make_dataset(10, 25)
    examples = [ex for ex in examples
                if [t.text for t in ex.repaired_line]
                != [t.text for t in ex.broken.lines[ex.error_line - 1]]]
    metrics = eval_single(examples, IdentityPolicy())
    assert metrics["repair_acc"] == 0.0


def test_eval_full_oracle_and_identity():
    corpus, examples = make_dataset(12, 26)
    brokens = [ex.broken for ex in examples[:30]]
    policies = [OracleGoldPolicy(corpus[int(ex.source_id[3:])])
                for ex in examples[:30]]
    report = eval_full(brokens, MINI, policies)
    assert report["full_repair_rate"] == 1.0
    identity = eval_full(brokens, MINI, IdentityPolicy())
    assert identity["full_repair_rate"] == 0.0


def test_eval_by_category_partition_and_oracle():
    corpus, examples = make_dataset(20, 27, per=8)
    by_broken = {ex.broken.to_text(): ex for ex in examples}
    class GoldFromExample:
        def propose(self, program, feedback):
            ex = by_broken[program.to_text()]
            return ex.error_line, [t.text for t in ex.repaired_line]
    report = eval_by_category(examples, GoldFromExample())
    assert sum(m["count"] for m in report.values()) == len(examples)
    for metrics in report.values():
        assert metrics["localize_acc"] == 1.0
        assert metrics["repair_acc"] == 1.0
