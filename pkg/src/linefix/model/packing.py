"""Index bookkeeping that turns repair examples into padded batch arrays.

The batch keeps one flat token stream (all code tokens example-major and
line-major, then all message tokens). Line/message/clique/decoder-memory
views are integer index matrices into that stream, so every model stage
is a gather, a fused LSTM over a padded batch, or a scatter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..diagnostics import Feedback
from ..graph import build_graph
from ..lang import SourceProgram
from .vocab import BOS, EOS, UNK, Vocabulary


@dataclass
class PackedExample:
    code_ids: np.ndarray          # (n_code,) vocab ids, line-major
    msg_ids: np.ndarray           # (n_msg,)
    line_lengths: np.ndarray      # (L,)
    line_starts: np.ndarray       # (L,) offsets into code_ids
    offsets: np.ndarray           # (L,) i_err - i
    cliques: list[np.ndarray]     # local token positions; msg tokens offset by n_code
    line_texts: list[list[str]]
    msg_texts: list[str]
    gold_k: int | None            # 1-based
    gold_texts: list[str] | None

    @property
    def n_code(self) -> int:
        return len(self.code_ids)

    @property
    def n_msg(self) -> int:
        return len(self.msg_ids)

    @property
    def n_lines(self) -> int:
        return len(self.line_lengths)


def pack_example(program: SourceProgram, feedback: Feedback, vocab: Vocabulary,
                 gold_k: int | None = None,
                 gold_texts: list[str] | None = None) -> PackedExample:
    feedback = feedback.clamped(program.line_count)
    line_texts = [[t.text for t in line] for line in program.lines]
    msg_texts = [t.text for t in feedback.m_err]
    code_ids = np.array([vocab.id(t) for line in line_texts for t in line],
                        dtype=np.int64)
    msg_ids = np.array([vocab.id(t) for t in msg_texts], dtype=np.int64)
    lengths = np.array([len(line) for line in line_texts], dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(lengths)[:-1]]).astype(np.int64)
    offsets = feedback.i_err - np.arange(1, program.line_count + 1, dtype=np.int64)

    g = build_graph(program, feedback)
    n_code = len(code_ids)
    local_pos = []
    for node in g.nodes:
        if node.origin == "code":
            local_pos.append(starts[node.line - 1] + node.index)
        else:
            local_pos.append(n_code + node.index)
    local_pos = np.array(local_pos, dtype=np.int64)
    cliques = [local_pos[idx] for idx in g.cliques()]

    return PackedExample(code_ids, msg_ids, lengths, starts, offsets, cliques,
                         line_texts, msg_texts, gold_k, gold_texts)


@dataclass
class EncoderBatch:
    size: int
    token_ids: np.ndarray         # (N,)
    n_code_total: int
    code_base: np.ndarray         # (B,)
    msg_base: np.ndarray          # (B,)
    line_tok_idx: np.ndarray      # (BL, Tmax) flat indices, pad 0
    line_mask: np.ndarray         # (BL, Tmax) float
    line_lengths: np.ndarray      # (BL,)
    line_offsets: np.ndarray      # (BL,)
    line_ex: np.ndarray           # (BL,)
    line_row_idx: np.ndarray      # (B, Lmax) row into BL, pad 0
    line_row_mask: np.ndarray     # (B, Lmax) float
    ex_lines: np.ndarray          # (B,)
    msg_tok_idx: np.ndarray       # (B, Mmax)
    msg_mask: np.ndarray          # (B, Mmax)
    msg_lengths: np.ndarray       # (B,)
    clique_members: np.ndarray    # (C, Smax) node order positions, pad 0
    clique_mask: np.ndarray       # (C, Smax)
    node_flat_idx: np.ndarray     # (K,) flat token index per node
    node_slot: np.ndarray         # (K,) row-major position of each node in (C, Smax)
    msg_token_keep: np.ndarray    # (N, 1): zeros at message rows when feedback off


def collate(packed: list[PackedExample], use_feedback: bool = True) -> EncoderBatch:
    B = len(packed)
    n_code_total = sum(p.n_code for p in packed)
    code_base = np.zeros(B, dtype=np.int64)
    msg_base = np.zeros(B, dtype=np.int64)
    acc = 0
    for e, p in enumerate(packed):
        code_base[e] = acc
        acc += p.n_code
    acc = n_code_total
    for e, p in enumerate(packed):
        msg_base[e] = acc
        acc += p.n_msg
    token_ids = np.concatenate(
        [p.code_ids for p in packed] + [p.msg_ids for p in packed])
    n_total = len(token_ids)

    # line rows
    bl = sum(p.n_lines for p in packed)
    tmax = max(1, max((int(p.line_lengths.max(initial=0)) for p in packed),
                      default=1))
    line_tok_idx = np.zeros((bl, tmax), dtype=np.int64)
    line_mask = np.zeros((bl, tmax))
    line_lengths = np.zeros(bl, dtype=np.int64)
    line_offsets = np.zeros(bl, dtype=np.int64)
    line_ex = np.zeros(bl, dtype=np.int64)
    lmax = max(p.n_lines for p in packed)
    line_row_idx = np.zeros((B, lmax), dtype=np.int64)
    line_row_mask = np.zeros((B, lmax))
    ex_lines = np.array([p.n_lines for p in packed], dtype=np.int64)
    row = 0
    for e, p in enumerate(packed):
        for li in range(p.n_lines):
            ln = int(p.line_lengths[li])
            if ln:
                flat0 = code_base[e] + p.line_starts[li]
                line_tok_idx[row, :ln] = np.arange(flat0, flat0 + ln)
                line_mask[row, :ln] = 1.0
            line_lengths[row] = ln
            line_offsets[row] = p.offsets[li]
            line_ex[row] = e
            line_row_idx[e, li] = row
            line_row_mask[e, li] = 1.0
            row += 1

    # messages
    mmax = max(1, max(p.n_msg for p in packed))
    msg_tok_idx = np.zeros((B, mmax), dtype=np.int64)
    msg_mask = np.zeros((B, mmax))
    msg_lengths = np.array([p.n_msg for p in packed], dtype=np.int64)
    for e, p in enumerate(packed):
        if p.n_msg:
            msg_tok_idx[e, :p.n_msg] = np.arange(msg_base[e], msg_base[e] + p.n_msg)
            msg_mask[e, :p.n_msg] = 1.0

    # cliques (attention groups); node order is clique-major
    all_cliques = []
    for e, p in enumerate(packed):
        for cl in p.cliques:
            flat = np.where(cl < p.n_code, cl + code_base[e],
                            cl - p.n_code + msg_base[e])
            all_cliques.append(flat)
    C = len(all_cliques)
    smax = max(1, max((len(c) for c in all_cliques), default=1))
    clique_members = np.zeros((C, smax), dtype=np.int64)
    clique_mask = np.zeros((C, smax))
    node_flat, node_slot = [], []
    k = 0
    for ci, members in enumerate(all_cliques):
        for si, flat in enumerate(members):
            clique_members[ci, si] = k
            clique_mask[ci, si] = 1.0
            node_flat.append(flat)
            node_slot.append(ci * smax + si)
            k += 1
    node_flat_idx = np.array(node_flat, dtype=np.int64)
    node_slot = np.array(node_slot, dtype=np.int64)

    keep = np.ones((n_total, 1))
    if not use_feedback:
        keep[n_code_total:] = 0.0
        line_offsets = np.zeros_like(line_offsets)

    return EncoderBatch(B, token_ids, n_code_total, code_base, msg_base,
                        line_tok_idx, line_mask, line_lengths, line_offsets,
                        line_ex, line_row_idx, line_row_mask, ex_lines,
                        msg_tok_idx, msg_mask, msg_lengths,
                        clique_members, clique_mask, node_flat_idx, node_slot,
                        keep)


@dataclass
class DecoderBatch:
    k: np.ndarray                 # (B,) 1-based chosen line per example
    mem_idx: np.ndarray           # (B, Mem) flat token indices
    mem_mask: np.ndarray          # (B, Mem)
    mem_ext_ids: np.ndarray       # (B, Mem) extended-vocab column per slot
    mem_texts: list[list[str]]    # surface form per valid slot
    oov_lists: list[list[str]]    # per-example copy-only tokens
    n_oov_max: int
    sentinel: int                 # ext column holding zero probability
    in_ids: np.ndarray | None     # (B, T) teacher-forcing inputs
    target_ext: np.ndarray | None  # (B, T) extended-vocab targets
    target_mask: np.ndarray | None
    n_floor_targets: int          # gold tokens with no vocab/copy route


def decoder_inputs(packed: list[PackedExample], batch: EncoderBatch,
                   k: np.ndarray, vocab: Vocabulary,
                   with_targets: bool) -> DecoderBatch:
    B = len(packed)
    mem_flat: list[np.ndarray] = []
    mem_texts: list[list[str]] = []
    for e, p in enumerate(packed):
        ki = int(k[e])
        start = p.line_starts[ki - 1]
        ln = int(p.line_lengths[ki - 1])
        code_part = np.arange(start, start + ln) + batch.code_base[e]
        msg_part = np.arange(p.n_msg) + batch.msg_base[e]
        mem_flat.append(np.concatenate([code_part, msg_part]))
        mem_texts.append(p.line_texts[ki - 1] + p.msg_texts)

    mem_max = max(1, max(len(m) for m in mem_flat))
    mem_idx = np.zeros((B, mem_max), dtype=np.int64)
    mem_mask = np.zeros((B, mem_max))
    oov_lists: list[list[str]] = []
    vsize = len(vocab)
    ext_rows = np.zeros((B, mem_max), dtype=np.int64)
    for e in range(B):
        m = len(mem_flat[e])
        mem_idx[e, :m] = mem_flat[e]
        mem_mask[e, :m] = 1.0
        oov: list[str] = []
        for j, text in enumerate(mem_texts[e]):
            vid = vocab.id(text)
            if vid != UNK:
                ext_rows[e, j] = vid
            else:
                if text not in oov:
                    oov.append(text)
                ext_rows[e, j] = vsize + oov.index(text)
        oov_lists.append(oov)
    n_oov_max = max((len(o) for o in oov_lists), default=0)
    sentinel = vsize + n_oov_max
    for e in range(B):
        m = int(mem_mask[e].sum())
        ext_rows[e, m:] = sentinel  # padded slots carry ~zero attention mass

    in_ids = target_ext = target_mask = None
    n_floor = 0
    if with_targets:
        golds = [p.gold_texts for p in packed]
        tdec = max(len(g) for g in golds) + 1
        in_ids = np.zeros((B, tdec), dtype=np.int64)
        target_ext = np.full((B, tdec), sentinel, dtype=np.int64)
        target_mask = np.zeros((B, tdec))
        for e, gold in enumerate(golds):
            seq_in = [BOS] + [vocab.id(t) for t in gold]
            in_ids[e, :len(seq_in)] = seq_in
            for t, text in enumerate(gold + ["<eos>"]):
                if text == "<eos>":
                    target_ext[e, t] = EOS
                else:
                    vid = vocab.id(text)
                    if vid != UNK:
                        target_ext[e, t] = vid
                    elif text in oov_lists[e]:
                        target_ext[e, t] = vsize + oov_lists[e].index(text)
                    else:
                        n_floor += 1  # stays at the sentinel: probability floor
                target_mask[e, t] = 1.0

    return DecoderBatch(np.asarray(k, dtype=np.int64), mem_idx, mem_mask,
                        ext_rows, mem_texts, oov_lists, n_oov_max, sentinel,
                        in_ids, target_ext, target_mask, n_floor)
