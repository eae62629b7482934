"""Training loop: minibatch Adam with clipping, per-epoch dev metrics,
best-checkpoint tracking, and optional warm start for fine-tuning."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import numcore as nc
from ..datagen import RepairExample
from .config import ModelConfig, TrainConfig
from .network import RepairNetwork
from .packing import PackedExample, decoder_inputs, pack_example
from .vocab import Vocabulary

log = logging.getLogger(__name__)


@dataclass
class EpochLog:
    epoch: int
    train_loss: float
    dev_localize: float
    dev_repair: float
    seconds: float

    def to_record(self) -> dict:
        return {"epoch": self.epoch, "train_loss": round(self.train_loss, 6),
                "dev_localize": round(self.dev_localize, 6),
                "dev_repair": round(self.dev_repair, 6),
                "seconds": round(self.seconds, 3)}


def pack_dataset(examples: list[RepairExample], vocab: Vocabulary,
                 with_gold: bool = True) -> list[PackedExample]:
    return [pack_example(ex.broken, ex.feedback, vocab,
                         gold_k=ex.error_line if with_gold else None,
                         gold_texts=[t.text for t in ex.repaired_line]
                         if with_gold else None)
            for ex in examples]


def evaluate_packed(net: RepairNetwork, packed: list[PackedExample],
                    batch_size: int = 50) -> tuple[float, float]:
    """(localization accuracy, exact-repair accuracy) with predicted lines."""
    if not packed:
        return 0.0, 0.0
    loc_hits = 0
    repair_hits = 0
    with nc.no_grad():
        for start in range(0, len(packed), batch_size):
            chunk = packed[start:start + batch_size]
            enc = net.encode(chunk, training=False)
            probs = net.localize_probs(enc).data
            k_hat = probs.argmax(axis=-1) + 1
            dec = decoder_inputs(chunk, enc.batch, k_hat, net.vocab,
                                 with_targets=False)
            tokens, _, _ = net.decode_greedy(enc, dec)
            for e, p in enumerate(chunk):
                if int(k_hat[e]) != p.gold_k:
                    continue
                loc_hits += 1
                if tokens[e] == p.gold_texts:
                    repair_hits += 1
    return loc_hits / len(packed), repair_hits / len(packed)


def train(train_set: list[RepairExample], dev_set: list[RepairExample],
          model_config: ModelConfig, train_config: TrainConfig,
          init_checkpoint: str | Path | None = None,
          log_sink=None) -> tuple[RepairNetwork, list[EpochLog]]:
    """Train (or fine-tune when init_checkpoint is given) and return the
    best-dev network plus per-epoch logs."""
    if not train_set:
        raise ValueError("empty training set")

    if init_checkpoint is not None:
        net = RepairNetwork.load(init_checkpoint)
        net.config.dropout = model_config.dropout
        vocab = net.vocab  # fine-tuning reuses the pre-training vocabulary
    else:
        vocab = Vocabulary.build(train_set, min_freq=2)
        model_config.vocab_size = 0
        net = RepairNetwork(model_config, vocab,
                            rng=np.random.default_rng(train_config.seed))

    packed_train = pack_dataset(train_set, vocab)
    packed_dev = pack_dataset(dev_set, vocab)

    state = nc.AdamState(lr=train_config.lr, clip_norm=train_config.clip_norm)
    rng = np.random.default_rng(train_config.seed + 1)
    order_rng = np.random.default_rng(train_config.seed + 2)

    best_score = -1.0
    best_params = net.parameter_arrays()
    logs: list[EpochLog] = []
    sink = None
    if train_config.log_path:
        sink = open(train_config.log_path, "a")

    try:
        for epoch in range(1, train_config.epochs + 1):
            t0 = time.time()
            order = order_rng.permutation(len(packed_train))
            total_loss = 0.0
            n_batches = 0
            bs = train_config.batch_size
            for start in range(0, len(order), bs):
                chunk = [packed_train[i] for i in order[start:start + bs]]
                nc.zero_grads(net.params.values())
                loss, _ = net.loss(chunk, training=True, rng=rng)
                nc.backward(loss)
                nc.adam_step(net.params, state)
                total_loss += float(loss.data)
                n_batches += 1
            train_loss = total_loss / max(n_batches, 1)

            dev_loc, dev_rep = (0.0, 0.0)
            if packed_dev and epoch % train_config.eval_every == 0:
                dev_loc, dev_rep = evaluate_packed(net, packed_dev)
                score = dev_loc + dev_rep
                if score > best_score:
                    best_score = score
                    best_params = net.parameter_arrays()

            entry = EpochLog(epoch, train_loss, dev_loc, dev_rep,
                             time.time() - t0)
            logs.append(entry)
            if sink:
                sink.write(json.dumps(entry.to_record()) + "\n")
                sink.flush()
            if log_sink:
                log_sink(entry)
            log.info("epoch %d: loss %.4f dev_loc %.3f dev_rep %.3f (%.1fs)",
                     epoch, train_loss, dev_loc, dev_rep, entry.seconds)
    finally:
        if sink:
            sink.close()

    if not packed_dev:
        best_params = net.parameter_arrays()
    best_net = RepairNetwork(net.config, vocab, params=best_params)
    return best_net, logs
