"""The full-repair loop: evaluate, predict one line fix, substitute, repeat.

With the gold-oracle policy this isolates the driver itself: every
single-corruption program is fixed in one attempt, multi-corruption
programs within the five-attempt limit.
"""

from linefix.corpus import make_corpus
from linefix.driver import OracleGoldPolicy, eval_full, iterative_repair
from linefix.evaluator import EvaluatorSpec, evaluate
from linefix.perturb import corrupt, rng_from

spec = EvaluatorSpec(kind="minicheck")
corpus = make_corpus(60, seed=11)

gold = corpus[0]
broken, edits = corrupt(gold, rng_from(11, 0))
print("gold program corrupted with "
      f"{len(edits)} edit(s) on line(s) {sorted({e.line for e in edits})}:")
print(broken.to_text())

outcome = iterative_repair(broken, spec, OracleGoldPolicy(gold))
print(f"\nrepair trace ({outcome.attempts_used} attempt(s)):")
for i, step in enumerate(outcome.trace, start=1):
    print(f"  {i}. feedback line {step.feedback_line}: {step.feedback_message}")
    print(f"     edit line {step.k_hat}: {step.old_line!r} -> {step.new_line!r}")
print(f"success: {outcome.success}")

brokens, policies = [], []
for idx, program in enumerate(corpus):
    candidate, _ = corrupt(program, rng_from(11, idx))
    if not evaluate(candidate, spec).compiles:
        brokens.append(candidate)
        policies.append(OracleGoldPolicy(program))
report = eval_full(brokens, spec, policies, max_attempts=5)
print(f"\noracle full repair over {len(brokens)} corrupted programs: "
      f"{report['full_repair_rate']:.0%} "
      f"(mean {report['mean_attempts']:.2f} attempts)")
