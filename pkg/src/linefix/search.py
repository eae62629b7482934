"""Best-first synthesis search over per-line candidate pools, with
optional repair-in-the-loop pool augmentation.

A full program is one candidate per line, scored by the product of its
line probabilities. Plain best-first pops programs in non-increasing
score order (one-coordinate successor expansion over the product
lattice). The augmented variant feeds every failed pop to a repair
policy and inserts the proposed line into that line's pool, inheriting
the replaced candidate's score; repair calls cost no budget.
"""

from __future__ import annotations

import heapq
import math
from bisect import insort
from dataclasses import dataclass, field

import numpy as np

from .driver import RepairPolicy
from .evaluator import EvaluatorSpec, evaluate
from .lang import SourceProgram, program_from_lines
from .perturb import NoEligibleSite, PerturbModule, apply_module


@dataclass(frozen=True)
class Candidate:
    texts: tuple[str, ...]
    p: float

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"candidate probability {self.p} outside (0, 1]")


CandidatePool = list[list[Candidate]]


@dataclass
class SynthOutcome:
    success: bool
    program: SourceProgram | None
    iterations_used: int
    repairs_added: int = 0
    pop_scores: list[float] = field(default_factory=list)


class _Lattice:
    """Mutable pools with per-line score order and a best-first frontier.

    Frontier entries are candidate-ID vectors; successor expansion walks to
    the next-lower-scored candidate per line, so insertions (which append
    new IDs) never invalidate queued vectors.
    """

    def __init__(self, pools: CandidatePool):
        if any(not pool for pool in pools):
            raise ValueError("every line needs at least one candidate")
        self.pools = [list(pool) for pool in pools]
        # per line: list of (-p, candidate_id), kept sorted
        self.order = [sorted((-c.p, ci) for ci, c in enumerate(pool))
                      for pool in self.pools]
        self.heap: list[tuple[float, int, tuple[int, ...]]] = []
        self.seen: set[tuple[int, ...]] = set()
        self.counter = 0
        top = tuple(order[0][1] for order in self.order)
        self.push(top)

    def score(self, ids: tuple[int, ...]) -> float:
        return math.prod(self.pools[i][ci].p for i, ci in enumerate(ids))

    def push(self, ids: tuple[int, ...]):
        if ids in self.seen:
            return
        self.seen.add(ids)
        self.counter += 1
        heapq.heappush(self.heap, (-self.score(ids), self.counter, ids))

    def pop(self) -> tuple[float, tuple[int, ...]] | None:
        if not self.heap:
            return None
        neg, _, ids = heapq.heappop(self.heap)
        return -neg, ids

    def expand(self, ids: tuple[int, ...]):
        for i, ci in enumerate(ids):
            order = self.order[i]
            pos = order.index((-self.pools[i][ci].p, ci))
            if pos + 1 < len(order):
                nxt = order[pos + 1][1]
                self.push(ids[:i] + (nxt,) + ids[i + 1:])

    def insert_candidate(self, line: int, cand: Candidate) -> int:
        ci = len(self.pools[line])
        self.pools[line].append(cand)
        insort(self.order[line], (-cand.p, ci))
        return ci

    def program(self, ids: tuple[int, ...]) -> SourceProgram:
        return program_from_lines(
            [" ".join(self.pools[i][ci].texts) for i, ci in enumerate(ids)])


def _matches_gold(program: SourceProgram, gold: SourceProgram) -> bool:
    return [[t.text for t in line] for line in program.lines] == \
        [[t.text for t in line] for line in gold.lines]


def best_first_search(pools: CandidatePool, spec: EvaluatorSpec, budget: int,
                      gold: SourceProgram | None = None) -> SynthOutcome:
    """Enumerate programs in non-increasing score order; success when one
    compiles (and matches `gold` line-for-line when given)."""
    lattice = _Lattice(pools)
    iterations = 0
    scores: list[float] = []
    while iterations < budget:
        item = lattice.pop()
        if item is None:
            break
        score, ids = item
        scores.append(score)
        iterations += 1
        program = lattice.program(ids)
        verdict = evaluate(program, spec)
        if verdict.compiles and (gold is None or _matches_gold(program, gold)):
            return SynthOutcome(True, program, iterations, 0, scores)
        lattice.expand(ids)
    return SynthOutcome(False, None, iterations, 0, scores)


def repair_augmented_search(pools: CandidatePool, spec: EvaluatorSpec,
                            policy: RepairPolicy, budget: int,
                            gold: SourceProgram | None = None,
                            boost: float = 1.0) -> SynthOutcome:
    """Best-first search that, on each compile failure, asks the repair
    policy for a fixed line and adds it to that line's pool with the
    replaced candidate's score times `boost` (repairs cost no budget)."""
    lattice = _Lattice(pools)
    iterations = 0
    repairs_added = 0
    scores: list[float] = []
    while iterations < budget:
        item = lattice.pop()
        if item is None:
            break
        score, ids = item
        scores.append(score)
        iterations += 1
        program = lattice.program(ids)
        verdict = evaluate(program, spec)
        if verdict.compiles and (gold is None or _matches_gold(program, gold)):
            return SynthOutcome(True, program, iterations, repairs_added, scores)
        lattice.expand(ids)
        if not verdict.compiles:
            k, texts = policy.propose(program, verdict.feedback)
            k = min(max(k, 1), len(lattice.pools))
            proposed = tuple(texts)
            replaced = lattice.pools[k - 1][ids[k - 1]]
            existing = next((ci for ci, c in enumerate(lattice.pools[k - 1])
                             if c.texts == proposed), None)
            if existing is None:
                new_p = min(max(replaced.p * boost, 1e-300), 1.0)
                ci = lattice.insert_candidate(k - 1, Candidate(proposed, new_p))
                repairs_added += 1
                lattice.push(ids[:k - 1] + (ci,) + ids[k:])
            elif lattice.pools[k - 1][existing].p <= replaced.p:
                # The repaired piece is already pooled: jump straight to the
                # repaired program (score cannot exceed the current pop).
                lattice.push(ids[:k - 1] + (existing,) + ids[k:])
    return SynthOutcome(False, None, iterations, repairs_added, scores)


def make_synthetic_pools(gold: SourceProgram, pool_size: int,
                         rng: np.random.Generator, demote_prob: float = 0.5,
                         drop_gold: bool = False,
                         spec: EvaluatorSpec | None = None
                         ) -> tuple[CandidatePool, list[int]]:
    """Per line: the gold piece plus perturbed variants with a decreasing
    score sequence. With probability `demote_prob` per line, the gold piece
    is demoted below a variant that breaks compilation in context (so the
    first pop fails); with `drop_gold`, one sampled line loses its gold
    piece entirely (only repair insertion can then reach the gold program)."""
    if pool_size < 1:
        raise ValueError("pool_size must be >= 1")
    if spec is None:
        spec = EvaluatorSpec(kind="minicheck")
    pools: CandidatePool = []
    gold_ids: list[int] = []
    modules = list(PerturbModule)
    weights = [m.weight for m in modules]
    drop_line = int(rng.integers(gold.line_count)) if drop_gold else -1
    for li in range(gold.line_count):
        gold_texts = tuple(t.text for t in gold.lines[li])
        single = program_from_lines([" ".join(gold_texts)])
        variants: list[tuple[str, ...]] = []
        breaking: list[int] = []
        tries = 0
        while len(variants) < pool_size - 1 and tries < 40 * pool_size:
            tries += 1
            module = modules[int(rng.choice(len(modules), p=weights))]
            try:
                edited, _ = apply_module(single, module, rng)
            except NoEligibleSite:
                continue
            texts = tuple(t.text for t in edited.lines[0])
            if texts == gold_texts or texts in variants:
                continue
            in_context = gold.with_line(li + 1, list(texts))
            if not evaluate(in_context, spec).compiles:
                breaking.append(len(variants))
            variants.append(texts)
        lines = [gold_texts] + variants
        order = list(range(len(lines)))
        gold_pos = 0
        demoted = bool(breaking) and rng.random() < demote_prob
        if demoted:
            # swap the gold piece just below an in-context-failing variant
            swap_to = 1 + breaking[int(rng.integers(len(breaking)))]
            order[0], order[swap_to] = order[swap_to], order[0]
            if swap_to != 1:
                order[1], order[swap_to] = order[swap_to], order[1]
            gold_pos = 1
        # peaked, decreasing score sequence; a demoted line keeps the gold
        # piece close behind the top (the model was "almost right" there)
        ratio = float(rng.uniform(0.15, 0.3))
        raw = ratio ** np.arange(len(lines))
        if demoted:
            raw[1] = raw[0] * float(rng.uniform(0.6, 0.85))
        probs = raw / raw.sum()
        pool = [Candidate(lines[order[j]], float(probs[j]))
                for j in range(len(lines))]
        if li == drop_line and len(pool) > 1:
            if breaking:
                # keep only in-context-failing variants so the missing gold
                # piece always surfaces as a compile error
                keep = [lines[1 + bi] for bi in breaking]
                pool = [c for j, c in enumerate(pool)
                        if j != gold_pos and lines[order[j]] in keep][:pool_size - 1]
            else:
                pool = [c for j, c in enumerate(pool) if j != gold_pos]
            gold_pos = -1
        pools.append(pool)
        gold_ids.append(gold_pos)
    return pools, gold_ids
