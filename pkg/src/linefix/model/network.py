"""Encoder / graph-attention / decoder network for line repair.

Pipeline per batch: token embeddings -> per-line and message bidirectional
LSTM stacks with line-offset encodings -> attention over same-symbol
groups (or per-token feed-forward layers for the no-graph variant) ->
line re-encoding into per-line embeddings -> a line pointer (softmax over
lines) and a pointer-generator decoder over the chosen line plus message.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import numcore as nc
from ..diagnostics import Feedback
from ..lang import SourceProgram
from ..numcore import Tensor, tensor
from .config import ModelConfig
from .packing import (DecoderBatch, EncoderBatch, PackedExample, collate,
                      decoder_inputs, pack_example)
from .vocab import BOS, EOS, PAD, UNK, Vocabulary

NEG_INF = -1e30
PROB_FLOOR = 1e-12


@dataclass
class Prediction:
    line_distribution: np.ndarray   # (L,), sums to 1
    k_hat: int                      # 1-based argmax line
    repaired_tokens: list[str]      # surface forms, EOS stripped
    sequence_log_prob: float
    stopped_on_eos: bool


@dataclass
class EncState:
    batch: EncoderBatch
    packed: list[PackedExample]
    flat_g: Tensor                  # (N, D) token states after graph stage
    r: Tensor                       # (BL, 2D) per-line code+message vectors
    s: Tensor                       # (B, Lmax, D) line embeddings
    line_logit_mask: np.ndarray     # (B, Lmax) additive mask


def _glorot(rng: np.random.Generator, n_in: int, n_out: int) -> np.ndarray:
    bound = math.sqrt(6.0 / (n_in + n_out))
    return rng.uniform(-bound, bound, size=(n_in, n_out))


class RepairNetwork:
    def __init__(self, config: ModelConfig, vocab: Vocabulary,
                 rng: np.random.Generator | None = None,
                 params: dict[str, np.ndarray] | None = None):
        if config.vocab_size and config.vocab_size != len(vocab):
            raise ValueError(
                f"config vocab_size {config.vocab_size} != vocabulary {len(vocab)}")
        config.vocab_size = len(vocab)
        self.config = config
        self.vocab = vocab
        self.params: dict[str, Tensor] = {}
        if params is not None:
            nc.validate_shapes(params, self.expected_shapes())
            for name, data in params.items():
                self.params[name] = tensor(data.copy(), requires_grad=True)
        else:
            self._init_params(rng if rng is not None else np.random.default_rng(0))

    # --- parameters --------------------------------------------------------

    def _lstm_shapes(self, prefix: str, n_layers: int, d_in: int,
                     hidden: int) -> dict[str, tuple]:
        shapes = {}
        for layer in range(n_layers):
            for d in ("f", "b"):
                base = f"{prefix}.l{layer}.{d}"
                shapes[f"{base}.wx"] = (d_in if layer == 0 else 2 * hidden, 4 * hidden)
                shapes[f"{base}.wh"] = (hidden, 4 * hidden)
                shapes[f"{base}.b"] = (4 * hidden,)
        return shapes

    def expected_shapes(self) -> dict[str, tuple]:
        cfg = self.config
        dim, emb, pos = cfg.state_dim, cfg.token_embed_dim, cfg.pos_embed_dim
        half = dim // 2
        vsize = len(self.vocab)
        shapes: dict[str, tuple] = {"embed": (vsize, emb)}
        shapes.update(self._lstm_shapes("enc_code", cfg.lstm1_layers, emb, half))
        shapes.update(self._lstm_shapes("enc_msg", cfg.lstm1_layers, emb, half))
        shapes["posff.w"] = (dim + pos, dim)
        shapes["posff.b"] = (dim,)
        for layer in range(cfg.graph_layers):
            if cfg.use_graph:
                for mat in ("wq", "wk", "wv"):
                    shapes[f"gat.l{layer}.{mat}"] = (dim, dim)
                shapes[f"gat.l{layer}.mlp.w1"] = (2 * dim, dim)
                shapes[f"gat.l{layer}.mlp.b1"] = (dim,)
                shapes[f"gat.l{layer}.mlp.w2"] = (dim, dim)
                shapes[f"gat.l{layer}.mlp.b2"] = (dim,)
            else:
                shapes[f"gat.l{layer}.ff.w"] = (dim, dim)
                shapes[f"gat.l{layer}.ff.b"] = (dim,)
        shapes.update(self._lstm_shapes("rc_code", cfg.lstm2_layers, dim, half))
        shapes.update(self._lstm_shapes("rc_msg", cfg.lstm2_layers, dim, half))
        shapes.update(self._lstm_shapes("ctx", cfg.lstm3_layers, 2 * dim, half))
        shapes["loc.w1"] = (dim, dim)
        shapes["loc.b1"] = (dim,)
        shapes["loc.w2"] = (dim, 1)
        shapes["loc.b2"] = (1,)
        shapes["dec.init_h.w"] = (dim, dim)
        shapes["dec.init_h.b"] = (dim,)
        shapes["dec.init_c.w"] = (dim, dim)
        shapes["dec.init_c.b"] = (dim,)
        shapes["dec.cell.wx"] = (emb + dim, 4 * dim)
        shapes["dec.cell.wh"] = (dim, 4 * dim)
        shapes["dec.cell.b"] = (4 * dim,)
        shapes["dec.att.wq"] = (dim, dim)
        shapes["dec.att.wk"] = (dim, dim)
        shapes["dec.att.wv"] = (dim, dim)
        shapes["dec.out.w"] = (2 * dim, vsize)
        shapes["dec.out.b"] = (vsize,)
        shapes["dec.pgen.w"] = (2 * dim + emb + dim, 1)
        shapes["dec.pgen.b"] = (1,)
        return shapes

    def _init_params(self, rng: np.random.Generator):
        for name, shape in self.expected_shapes().items():
            if name == "embed":
                data = rng.normal(0.0, 0.1, size=shape)
            elif len(shape) == 1:
                data = np.zeros(shape)
                if name.endswith(".b") and ".l" in name and shape[0] % 4 == 0 \
                        and ("enc_" in name or "rc_" in name or "ctx." in name
                             or "cell" in name):
                    hidden = shape[0] // 4
                    data[hidden:2 * hidden] = 1.0  # forget-gate bias
            else:
                data = _glorot(rng, shape[0], shape[1])
            self.params[name] = tensor(data, requires_grad=True)

    def parameter_arrays(self) -> dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.params.items()}

    # --- encoder -----------------------------------------------------------

    def _bilstm_stack(self, x: Tensor, lengths: np.ndarray, prefix: str,
                      n_layers: int, training: bool, rng):
        """Returns (outputs (B,T,D), finals (B,D)) of the last layer."""
        p = self.params
        half = self.config.state_dim // 2
        finals = None
        for layer in range(n_layers):
            base = f"{prefix}.l{layer}"
            raw = nc.bilstm_seq(x, lengths,
                                p[f"{base}.f.wx"], p[f"{base}.f.wh"],
                                p[f"{base}.f.b"], p[f"{base}.b.wx"],
                                p[f"{base}.b.wh"], p[f"{base}.b.b"])
            if layer == n_layers - 1:
                last = np.maximum(lengths - 1, -1)
                first = np.where(lengths > 0, 0, -1)
                finals = nc.concat(
                    [nc.slice_axis(nc.select_steps(raw, last), -1, 0, half),
                     nc.slice_axis(nc.select_steps(raw, first), -1, half, 2 * half)],
                    axis=-1)
            x = nc.dropout(raw, self.config.dropout, rng, training)
        return x, finals

    def _graph_stage(self, flat_h: Tensor, batch: EncoderBatch,
                     training: bool, rng) -> Tensor:
        cfg = self.config
        p = self.params
        if not cfg.use_graph:
            out = flat_h
            for layer in range(cfg.graph_layers):
                out = nc.tanh(nc.add(nc.matmul(out, p[f"gat.l{layer}.ff.w"]),
                                     p[f"gat.l{layer}.ff.b"]))
                out = nc.dropout(out, cfg.dropout, rng, training)
            return out
        if len(batch.node_flat_idx) == 0:
            return flat_h
        C, smax = batch.clique_members.shape
        dim = cfg.state_dim
        key_mask = ((1.0 - batch.clique_mask) * NEG_INF)[:, None, :]  # (C,1,S)
        scale = 1.0 / math.sqrt(dim)
        out = flat_h
        for layer in range(cfg.graph_layers):
            base = f"gat.l{layer}"
            xn = nc.gather_rows(out, batch.node_flat_idx)          # (K, D)
            q = nc.matmul(xn, p[f"{base}.wq"])
            kk = nc.matmul(xn, p[f"{base}.wk"])
            vv = nc.matmul(xn, p[f"{base}.wv"])
            qc = nc.reshape(nc.gather_rows(q, batch.clique_members.reshape(-1)),
                            (C, smax, dim))
            kc = nc.reshape(nc.gather_rows(kk, batch.clique_members.reshape(-1)),
                            (C, smax, dim))
            vc = nc.reshape(nc.gather_rows(vv, batch.clique_members.reshape(-1)),
                            (C, smax, dim))
            scores = nc.add(nc.mul(nc.matmul(qc, nc.swapaxes(kc, 1, 2)), scale),
                            key_mask)
            att = nc.softmax(scores, axis=-1)                       # (C,S,S)
            ctx = nc.reshape(nc.matmul(att, vc), (C * smax, dim))
            ctx_n = nc.gather_rows(ctx, batch.node_slot)            # (K, D)
            mid = nc.relu(nc.add(nc.matmul(nc.concat([xn, ctx_n], axis=-1),
                                           p[f"{base}.mlp.w1"]),
                                 p[f"{base}.mlp.b1"]))
            hn = nc.tanh(nc.add(nc.matmul(mid, p[f"{base}.mlp.w2"]),
                                p[f"{base}.mlp.b2"]))
            hn = nc.dropout(hn, cfg.dropout, rng, training)
            out = nc.scatter_rows(out, batch.node_flat_idx, hn)
        return out

    def encode(self, packed: list[PackedExample], training: bool = False,
               rng: np.random.Generator | None = None) -> EncState:
        cfg = self.config
        p = self.params
        batch = collate(packed, use_feedback=cfg.use_feedback)
        B = batch.size
        bl, tmax = batch.line_tok_idx.shape

        emb = nc.embedding(p["embed"], batch.token_ids)             # (N, E)
        if not cfg.use_feedback:
            emb = nc.mul(emb, tensor(batch.msg_token_keep))

        # stage 1: per-line and message encoders
        line_x = nc.mul(nc.gather_rows(emb, batch.line_tok_idx),
                        tensor(batch.line_mask[..., None]))
        line_out, _ = self._bilstm_stack(line_x, batch.line_lengths, "enc_code",
                                         cfg.lstm1_layers, training, rng)
        pos = nc.offset_encoding_matrix(batch.line_offsets, cfg.pos_embed_dim)
        if not cfg.use_feedback:
            pos = np.zeros_like(pos)
        pos_tiled = np.broadcast_to(pos[:, None, :], (bl, tmax, cfg.pos_embed_dim))
        with_pos = nc.concat([line_out, tensor(np.ascontiguousarray(pos_tiled))],
                             axis=-1)
        h_code = nc.tanh(nc.add(
            nc.matmul(nc.reshape(with_pos, (bl * tmax, cfg.state_dim + cfg.pos_embed_dim)),
                      p["posff.w"]), p["posff.b"]))
        h_code = nc.dropout(h_code, cfg.dropout, rng, training)
        h_code = nc.mul(nc.reshape(h_code, (bl, tmax, cfg.state_dim)),
                        tensor(batch.line_mask[..., None]))

        msg_x = nc.mul(nc.gather_rows(emb, batch.msg_tok_idx),
                       tensor(batch.msg_mask[..., None]))
        msg_out, _ = self._bilstm_stack(msg_x, batch.msg_lengths, "enc_msg",
                                        cfg.lstm1_layers, training, rng)

        # merge into the flat token stream: every token appears exactly once
        code_valid = batch.line_mask.reshape(-1) > 0
        code_rows = nc.gather_rows(nc.reshape(h_code, (bl * tmax, cfg.state_dim)),
                                   np.nonzero(code_valid)[0])
        msg_valid = batch.msg_mask.reshape(-1) > 0
        msg_rows = nc.gather_rows(
            nc.reshape(msg_out, (B * batch.msg_tok_idx.shape[1], cfg.state_dim)),
            np.nonzero(msg_valid)[0])
        all_rows = nc.concat([code_rows, msg_rows], axis=0)
        all_idx = np.concatenate([batch.line_tok_idx.reshape(-1)[code_valid],
                                  batch.msg_tok_idx.reshape(-1)[msg_valid]])
        flat_h = nc.scatter_rows(tensor(np.zeros((len(batch.token_ids),
                                                  cfg.state_dim))),
                                 all_idx, all_rows)

        # stage 2: symbol-graph attention (or per-token FF)
        flat_g = self._graph_stage(flat_h, batch, training, rng)

        # stage 3: re-encode lines and message over graph-updated states
        line_g = nc.mul(nc.gather_rows(flat_g, batch.line_tok_idx),
                        tensor(batch.line_mask[..., None]))
        _, code_finals = self._bilstm_stack(line_g, batch.line_lengths, "rc_code",
                                            cfg.lstm2_layers, training, rng)
        msg_g = nc.mul(nc.gather_rows(flat_g, batch.msg_tok_idx),
                       tensor(batch.msg_mask[..., None]))
        _, msg_finals = self._bilstm_stack(msg_g, batch.msg_lengths, "rc_msg",
                                           cfg.lstm2_layers, training, rng)
        r = nc.concat([code_finals, nc.gather_rows(msg_finals, batch.line_ex)],
                      axis=-1)                                      # (BL, 2D)
        r = nc.dropout(r, cfg.dropout, rng, training)

        lmax = batch.line_row_idx.shape[1]
        r_lines = nc.mul(nc.gather_rows(r, batch.line_row_idx),
                         tensor(batch.line_row_mask[..., None]))    # (B,Lmax,2D)
        s, _ = self._bilstm_stack(r_lines, batch.ex_lines, "ctx",
                                  cfg.lstm3_layers, training, rng)

        line_logit_mask = (1.0 - batch.line_row_mask) * NEG_INF
        return EncState(batch, packed, flat_g, r, s, line_logit_mask)

    # --- localization -------------------------------------------------------

    def localize_probs(self, enc: EncState) -> Tensor:
        """(B, Lmax) probabilities over lines; padding gets ~0 mass."""
        cfg, p = self.config, self.params
        B, lmax, dim = enc.s.shape
        hid = nc.relu(nc.add(nc.matmul(nc.reshape(enc.s, (B * lmax, dim)),
                                       p["loc.w1"]), p["loc.b1"]))
        logits = nc.add(nc.matmul(hid, p["loc.w2"]), p["loc.b2"])
        logits = nc.reshape(logits, (B, lmax))
        return nc.softmax(nc.add(logits, tensor(enc.line_logit_mask)), axis=-1)

    # --- decoder ------------------------------------------------------------

    def _decoder_memory(self, enc: EncState, dec: DecoderBatch):
        p = self.params
        dim = self.config.state_dim
        B, mem = dec.mem_idx.shape
        mvec = nc.mul(nc.gather_rows(enc.flat_g, dec.mem_idx),
                      tensor(dec.mem_mask[..., None]))              # (B,M,D)
        m2 = nc.reshape(mvec, (B * mem, dim))
        keys = nc.reshape(nc.matmul(m2, p["dec.att.wk"]), (B, mem, dim))
        vals = nc.reshape(nc.matmul(m2, p["dec.att.wv"]), (B, mem, dim))
        att_mask = ((1.0 - dec.mem_mask) * NEG_INF)[:, None, :]     # (B,1,M)
        return keys, vals, att_mask

    def _decoder_init(self, enc: EncState, dec: DecoderBatch):
        p = self.params
        B, lmax, dim = enc.s.shape
        s2 = nc.reshape(enc.s, (B * lmax, dim))
        flat_pos = np.arange(B) * lmax + (dec.k - 1)
        s_k = nc.gather_rows(s2, flat_pos)
        h = nc.tanh(nc.add(nc.matmul(s_k, p["dec.init_h.w"]), p["dec.init_h.b"]))
        c = nc.tanh(nc.add(nc.matmul(s_k, p["dec.init_c.w"]), p["dec.init_c.b"]))
        return h, c

    def _decode_step(self, prev_ids: np.ndarray, h, c, ctx, keys, vals,
                     att_mask, dec: DecoderBatch, training: bool, rng):
        cfg, p = self.config, self.params
        B = len(prev_ids)
        dim = cfg.state_dim
        x = nc.concat([nc.embedding(p["embed"], prev_ids), ctx], axis=-1)
        h, c = nc.lstm_cell(x, h, c, p["dec.cell.wx"], p["dec.cell.wh"],
                            p["dec.cell.b"])
        h = nc.dropout(h, cfg.dropout, rng, training)
        q = nc.reshape(nc.matmul(h, p["dec.att.wq"]), (B, 1, dim))
        scores = nc.add(nc.mul(nc.matmul(q, nc.swapaxes(keys, 1, 2)),
                               1.0 / math.sqrt(dim)), tensor(att_mask))
        alpha = nc.softmax(scores, axis=-1)                          # (B,1,M)
        ctx = nc.reshape(nc.matmul(alpha, vals), (B, dim))
        hc = nc.concat([h, ctx], axis=-1)
        p_vocab = nc.softmax(nc.add(nc.matmul(hc, p["dec.out.w"]),
                                    p["dec.out.b"]), axis=-1)        # (B,V)
        p_gen = nc.sigmoid(nc.add(nc.matmul(nc.concat([hc, x], axis=-1),
                                            p["dec.pgen.w"]), p["dec.pgen.b"]))
        gen_part = nc.mul(p_vocab, p_gen)
        copy_w = nc.mul(nc.reshape(alpha, (B, keys.shape[1])),
                        nc.sub(1.0, p_gen))                          # (B,M)
        base = nc.concat([gen_part,
                          tensor(np.zeros((B, dec.n_oov_max + 1)))], axis=-1)
        dist = nc.row_scatter_add(base, dec.mem_ext_ids, copy_w)     # (B,Vext)
        return h, c, ctx, dist

    def decode_teacher_loss(self, enc: EncState, dec: DecoderBatch,
                            training: bool, rng) -> Tensor:
        """Sum over batch and steps of -log p(gold token)."""
        B, tdec = dec.in_ids.shape
        dim = self.config.state_dim
        keys, vals, att_mask = self._decoder_memory(enc, dec)
        h, c = self._decoder_init(enc, dec)
        ctx = tensor(np.zeros((B, dim)))
        total = None
        for t in range(tdec):
            h, c, ctx, dist = self._decode_step(dec.in_ids[:, t], h, c, ctx,
                                                keys, vals, att_mask, dec,
                                                training, rng)
            picked = nc.clamp_min(nc.pick(dist, dec.target_ext[:, t]), PROB_FLOOR)
            step_nll = nc.neg(nc.sum_all(nc.mul(nc.log(picked),
                                                tensor(dec.target_mask[:, t]))))
            total = step_nll if total is None else nc.add(total, step_nll)
        return total

    def loss(self, packed: list[PackedExample], training: bool = True,
             rng: np.random.Generator | None = None) -> tuple[Tensor, dict]:
        """Mean over examples of -log p(k) - log p(y_k | k)."""
        enc = self.encode(packed, training=training, rng=rng)
        B = enc.batch.size
        gold_k = np.array([p.gold_k for p in packed], dtype=np.int64)
        probs = self.localize_probs(enc)
        picked = nc.clamp_min(nc.pick(probs, gold_k - 1), PROB_FLOOR)
        loc_nll = nc.neg(nc.sum_all(nc.log(picked)))
        dec = decoder_inputs(packed, enc.batch, gold_k, self.vocab,
                             with_targets=True)
        dec_nll = self.decode_teacher_loss(enc, dec, training, rng)
        total = nc.mul(nc.add(loc_nll, dec_nll), 1.0 / B)
        stats = {
            "loc_nll": float(loc_nll.data) / B,
            "dec_nll": float(dec_nll.data) / B,
            "floor_targets": dec.n_floor_targets,
        }
        return total, stats

    # --- inference ----------------------------------------------------------

    def _emission_mask(self, dec: DecoderBatch) -> np.ndarray:
        """(B, Vext) boolean: which extended columns may be emitted."""
        B = len(dec.k)
        vext = len(self.vocab) + dec.n_oov_max + 1
        mask = np.ones((B, vext), dtype=bool)
        mask[:, [PAD, UNK, BOS]] = False
        mask[:, dec.sentinel] = False
        for e, oov in enumerate(dec.oov_lists):
            mask[e, len(self.vocab) + len(oov):len(self.vocab) + dec.n_oov_max] = False
        return mask

    def _ext_token(self, ext_id: int, oov: list[str]) -> str:
        if ext_id < len(self.vocab):
            return self.vocab.token(ext_id)
        return oov[ext_id - len(self.vocab)]

    def decode_greedy(self, enc: EncState, dec: DecoderBatch) -> tuple[list[list[str]], np.ndarray, np.ndarray]:
        """Batched greedy decode -> (token texts, log probs, eos flags)."""
        B = len(dec.k)
        dim = self.config.state_dim
        keys, vals, att_mask = self._decoder_memory(enc, dec)
        h, c = self._decoder_init(enc, dec)
        ctx = tensor(np.zeros((B, dim)))
        prev = np.full(B, BOS, dtype=np.int64)
        done = np.zeros(B, dtype=bool)
        out_tokens: list[list[str]] = [[] for _ in range(B)]
        log_probs = np.zeros(B)
        emit_ok = self._emission_mask(dec)
        for _ in range(self.config.max_decode_len):
            h, c, ctx, dist = self._decode_step(prev, h, c, ctx, keys, vals,
                                                att_mask, dec, False, None)
            scores = np.where(emit_ok, dist.data, -1.0)
            choice = scores.argmax(axis=-1)
            chosen_p = np.maximum(dist.data[np.arange(B), choice], PROB_FLOOR)
            next_prev = np.full(B, EOS, dtype=np.int64)
            for e in range(B):
                if done[e]:
                    continue
                log_probs[e] += float(np.log(chosen_p[e]))
                if choice[e] == EOS:
                    done[e] = True
                    continue
                text = self._ext_token(int(choice[e]), dec.oov_lists[e])
                out_tokens[e].append(text)
                next_prev[e] = self.vocab.id(text)
            prev = next_prev
            if done.all():
                break
        return out_tokens, log_probs, done.copy()

    def decode_beam(self, enc: EncState, dec: DecoderBatch,
                    beam: int) -> tuple[list[str], float, bool]:
        """Length-normalized beam search for a single example (B = 1)."""
        assert len(dec.k) == 1
        dim = self.config.state_dim
        keys, vals, att_mask = self._decoder_memory(enc, dec)
        h, c = self._decoder_init(enc, dec)
        emit_ok = self._emission_mask(dec)[0]
        start = (0.0, [], h, c, tensor(np.zeros((1, dim))), BOS, False)
        beams = [start]
        finished = []
        for _ in range(self.config.max_decode_len):
            candidates = []
            for logp, toks, bh, bc, bctx, prev, done in beams:
                if done:
                    finished.append((logp, toks, True))
                    continue
                nh, ncell, nctx, dist = self._decode_step(
                    np.array([prev]), bh, bc, bctx, keys, vals, att_mask,
                    dec, False, None)
                probs = np.where(emit_ok, dist.data[0], 0.0)
                top = np.argsort(-probs)[:beam]
                for ext_id in top:
                    p_tok = max(float(probs[ext_id]), PROB_FLOOR)
                    if ext_id == EOS:
                        candidates.append((logp + np.log(p_tok), toks, nh,
                                           ncell, nctx, EOS, True))
                    else:
                        text = self._ext_token(int(ext_id), dec.oov_lists[0])
                        candidates.append((logp + np.log(p_tok), toks + [text],
                                           nh, ncell, nctx,
                                           self.vocab.id(text), False))
            if not candidates:
                break
            candidates.sort(key=lambda b: b[0] / max(len(b[1]) + 1, 1),
                            reverse=True)
            beams = candidates[:beam]
            if all(b[6] for b in beams):
                finished.extend((b[0], b[1], True) for b in beams)
                break
        finished.extend((b[0], b[1], False) for b in beams if not b[6])
        logp, toks, ended = max(
            finished, key=lambda f: f[0] / max(len(f[1]) + 1, 1))
        return toks, float(logp), ended

    def predict(self, program: SourceProgram, feedback: Feedback,
                beam: int = 1) -> Prediction:
        with nc.no_grad():
            packed = [pack_example(program, feedback, self.vocab)]
            enc = self.encode(packed, training=False)
            probs = self.localize_probs(enc).data[0][:program.line_count]
            k_hat = int(probs.argmax()) + 1
            dec = decoder_inputs(packed, enc.batch, np.array([k_hat]),
                                 self.vocab, with_targets=False)
            if beam <= 1:
                tokens, logps, eos = self.decode_greedy(enc, dec)
                return Prediction(probs, k_hat, tokens[0], float(logps[0]),
                                  bool(eos[0]))
            toks, logp, ended = self.decode_beam(enc, dec, beam)
            return Prediction(probs, k_hat, toks, logp, ended)

    # --- persistence ---------------------------------------------------------

    def save(self, path):
        header = {"model": self.config.to_dict(),
                  "vocab": self.vocab.non_reserved()}
        nc.save_checkpoint(path, header, self.params)

    @staticmethod
    def load(path) -> "RepairNetwork":
        header, arrays = nc.load_checkpoint(path)
        config = ModelConfig.from_dict(header["model"])
        vocab = Vocabulary(header["vocab"])
        return RepairNetwork(config, vocab, params=arrays)
