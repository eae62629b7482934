"""Breaking working programs on purpose: the four perturbation modules.

Each application changes exactly one token. A corruption run samples 1-5
module applications with weights (0.30, 0.50, 0.15, 0.05) chosen to match
the real-world mix of compiler errors.
"""

from collections import Counter

from linefix.corpus import make_corpus
from linefix.evaluator import mini_check
from linefix.lang import program_from_lines
from linefix.perturb import PerturbModule, apply_module, corrupt, rng_from

program = program_from_lines([
    "int a , b ;",
    "string s ;",
    "a = 1 ;",
    "b = a + 2 ;",
    "s = \"ab\" ;",
])

print("one application per module:")
for module in PerturbModule:
    edited, record = apply_module(program, module, rng_from(7, module.value.__hash__() % 97))
    print(f"  {module.value:8s} {record.action:7s} "
          f"line {record.line}: {program.line_texts()[record.line - 1]!r}"
          f" -> {edited.line_texts()[record.line - 1]!r}")

print("\na full corruption run (and what the checker says):")
broken, edits = corrupt(program, rng_from(7, 1))
for e in edits:
    print(f"  {e.module.value}/{e.action} line {e.line} tok {e.token_index}"
          f" {e.before!r} -> {e.after!r}")
verdict = mini_check(broken)
if not verdict.compiles:
    print(f"  checker: line {verdict.feedback.i_err}: {verdict.feedback.raw_message}")

print("\nmodule mix over 20k sampled rounds (weights 0.30/0.50/0.15/0.05):")
rng = rng_from(7, 2)
counts = Counter()
rounds = 0
corpus_prog = make_corpus(1, seed=7)[0]
while rounds < 20000:
    _, edits = corrupt(corpus_prog, rng)
    for e in edits:
        counts[e.module.value] += 1
        rounds += 1
total = sum(counts.values())
for module in PerturbModule:
    print(f"  {module.value:8s} {counts[module.value] / total:.3f}"
          f"  (target {module.weight})")
