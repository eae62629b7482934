"""Training a reduced-size repair model in about a minute.

The full-size configuration (embeddings 200/100, state 200, layer depths
3/2/1/2) is the package default; this demo shrinks the dimensions so the
whole loop runs quickly while exercising the identical code path.
"""

from linefix.corpus import make_corpus
from linefix.datagen import generate_examples, split_dataset
from linefix.evaluator import EvaluatorSpec
from linefix.model import ModelConfig, TrainConfig, train

spec = EvaluatorSpec(kind="minicheck")
corpus = make_corpus(30, seed=3)
examples = generate_examples(corpus, spec, per_program_target=15, seed=3)
train_set, dev_set = split_dataset(examples, (0.9, 0.1), seed=3)
print(f"{len(train_set)} train / {len(dev_set)} dev examples")

config = ModelConfig(token_embed_dim=48, pos_embed_dim=16, state_dim=48,
                     max_decode_len=16)
# lr raised for the tiny model; the full-size default is 1e-4
tcfg = TrainConfig(epochs=8, batch_size=25, lr=2e-3, seed=3)
net, logs = train(train_set, dev_set, config, tcfg)
for entry in logs:
    print(f"  epoch {entry.epoch}: loss {entry.train_loss:7.3f} "
          f"dev localize {entry.dev_localize:.2f} "
          f"dev repair {entry.dev_repair:.2f}  ({entry.seconds:.0f}s)")

print("\nsample predictions on dev:")
for ex in dev_set[:4]:
    pred = net.predict(ex.broken, ex.feedback)
    gold = " ".join(t.text for t in ex.repaired_line)
    got = " ".join(pred.repaired_tokens)
    mark = "=" if (pred.k_hat == ex.error_line and got == gold) else "x"
    print(f"  [{mark}] line {pred.k_hat} (gold {ex.error_line}) "
          f"-> {got!r} (gold {gold!r})")
