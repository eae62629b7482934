"""End-to-end self-supervised data pipeline.

Corrupt compiling programs, keep corruptions that fail, label each with
the corrupted line nearest the reported error and its original content,
then persist and split without leaking source programs across splits.
"""

import tempfile
from pathlib import Path

from linefix.corpus import make_corpus
from linefix.datagen import (generate_examples, read_dataset, split_dataset,
                             write_dataset)
from linefix.diagnostics import category_stats
from linefix.evaluator import EvaluatorSpec

spec = EvaluatorSpec(kind="minicheck")
corpus = make_corpus(40, seed=0)
examples = generate_examples(corpus, spec, per_program_target=20, seed=0)
print(f"{len(corpus)} source programs -> {len(examples)} repair examples")

stats = category_stats(ex.feedback for ex in examples)
print("\nerror-category mix:")
for category, frac in stats.fractions.items():
    print(f"  {category.value:24s} {stats.counts[category]:5d}  {frac:.3f}")

ex = examples[0]
print("\none example:")
print(f"  broken line {ex.error_line}: "
      f"{ex.broken.line_texts()[ex.error_line - 1]!r}")
print(f"  gold   line {ex.error_line}: "
      f"{' '.join(t.text for t in ex.repaired_line)!r}")
print(f"  feedback: line {ex.feedback.i_err}: {ex.feedback.raw_message}")
print(f"  provenance: {[(e.module.value, e.action, e.line) for e in ex.provenance]}")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "dataset.jsonl"
    write_dataset(examples, path)
    again = read_dataset(path)
    print(f"\nwrote + reread {len(again)} records "
          f"({path.stat().st_size} bytes); field-for-field equal: "
          f"{all(a.to_record() == b.to_record() for a, b in zip(examples, again))}")

train, dev = split_dataset(examples, (0.9, 0.1), seed=0)
train_sources = {e.source_id for e in train}
dev_sources = {e.source_id for e in dev}
print(f"split: {len(train)} train / {len(dev)} dev; "
      f"shared source programs: {len(train_sources & dev_sources)}")
