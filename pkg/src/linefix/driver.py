"""Iterative full-repair loop and evaluation metrics.

A repair policy maps (program, feedback) to a proposed (line, new line
tokens). The driver evaluates, applies one line edit per attempt, and
stops on success, on a no-op proposal, or at the attempt limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .datagen import RepairExample
from .diagnostics import ErrorCategory, Feedback, categorize
from .evaluator import EvaluatorSpec, evaluate
from .lang import SourceProgram


class RepairPolicy(Protocol):
    def propose(self, program: SourceProgram,
                feedback: Feedback) -> tuple[int, list[str]]:
        """Return (1-based line index, replacement token texts)."""
        ...


class OracleGoldPolicy:
    """Looks up the original program; proposes the differing line closest
    to the reported line (ties to the smaller index), restored verbatim."""

    def __init__(self, original: SourceProgram):
        self.original = original

    def propose(self, program, feedback):
        differing = [
            i + 1 for i in range(min(program.line_count, self.original.line_count))
            if [t.text for t in program.lines[i]]
            != [t.text for t in self.original.lines[i]]]
        if not differing:
            k = min(max(feedback.i_err, 1), program.line_count)
            return k, [t.text for t in program.lines[k - 1]]
        k = min(differing, key=lambda ln: (abs(ln - feedback.i_err), ln))
        return k, [t.text for t in self.original.lines[k - 1]]


class IdentityPolicy:
    """No-op baseline: proposes the reported line unchanged."""

    def propose(self, program, feedback):
        k = min(max(feedback.i_err, 1), program.line_count)
        return k, [t.text for t in program.lines[k - 1]]


class ModelPolicy:
    """Learned policy backed by a trained network checkpoint."""

    def __init__(self, network, beam: int = 1):
        self.network = network
        self.beam = beam

    def propose(self, program, feedback):
        pred = self.network.predict(program, feedback, beam=self.beam)
        return pred.k_hat, list(pred.repaired_tokens)


@dataclass
class TraceStep:
    feedback_line: int
    feedback_message: str
    k_hat: int
    old_line: str
    new_line: str

    def to_record(self) -> dict:
        return {"feedback_line": self.feedback_line,
                "feedback_message": self.feedback_message,
                "k_hat": self.k_hat, "old_line": self.old_line,
                "new_line": self.new_line}


@dataclass
class RepairOutcome:
    success: bool
    final_program: SourceProgram
    attempts_used: int
    trace: list[TraceStep] = field(default_factory=list)


def iterative_repair(program: SourceProgram, spec: EvaluatorSpec,
                     policy: RepairPolicy, max_attempts: int = 5) -> RepairOutcome:
    current = program
    trace: list[TraceStep] = []
    attempts = 0
    while True:
        verdict = evaluate(current, spec)
        if verdict.compiles:
            return RepairOutcome(True, current, attempts, trace)
        if attempts >= max_attempts:
            return RepairOutcome(False, current, attempts, trace)
        fb = verdict.feedback
        k, new_texts = policy.propose(current, fb)
        k = min(max(k, 1), current.line_count)
        old_texts = [t.text for t in current.lines[k - 1]]
        if new_texts == old_texts:
            return RepairOutcome(False, current, attempts, trace)
        trace.append(TraceStep(fb.i_err, fb.raw_message, k,
                               " ".join(old_texts), " ".join(new_texts)))
        current = current.with_line(k, new_texts)
        attempts += 1


def eval_single(dataset: Sequence[RepairExample],
                policy: RepairPolicy) -> dict[str, float]:
    """Localization and exact-match repair accuracy at the predicted line."""
    loc_hits = repair_hits = 0
    for ex in dataset:
        k, texts = policy.propose(ex.broken, ex.feedback)
        if k == ex.error_line:
            loc_hits += 1
            if texts == [t.text for t in ex.repaired_line]:
                repair_hits += 1
    n = max(len(dataset), 1)
    return {"localize_acc": loc_hits / n, "repair_acc": repair_hits / n}


def eval_full(broken_programs: Sequence[SourceProgram], spec: EvaluatorSpec,
              policies: RepairPolicy | Sequence[RepairPolicy],
              max_attempts: int = 5) -> dict:
    """Fraction of programs repaired within the attempt limit.

    `policies` is either one shared policy or one per program (the oracle
    policy is bound to each program's original)."""
    outcomes = []
    for i, program in enumerate(broken_programs):
        policy = policies[i] if isinstance(policies, (list, tuple)) else policies
        outcomes.append(iterative_repair(program, spec, policy, max_attempts))
    n = max(len(outcomes), 1)
    return {
        "full_repair_rate": sum(o.success for o in outcomes) / n,
        "mean_attempts": sum(o.attempts_used for o in outcomes) / n,
        "outcomes": outcomes,
    }


def eval_by_category(dataset: Sequence[RepairExample],
                     policy: RepairPolicy) -> dict[ErrorCategory, dict]:
    """eval_single restricted to each error category; empty buckets absent."""
    buckets: dict[ErrorCategory, list[RepairExample]] = {}
    for ex in dataset:
        buckets.setdefault(categorize(ex.feedback), []).append(ex)
    report = {}
    for category, examples in sorted(buckets.items(), key=lambda kv: kv[0].value):
        metrics = eval_single(examples, policy)
        metrics["count"] = len(examples)
        report[category] = metrics
    return report
