"""Self-supervised dataset pipeline.

Corrupts compiling programs, keeps the versions that fail to compile,
derives the gold (error line, repaired line) pair, and persists datasets
as line-delimited JSON with a version header.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .diagnostics import Feedback, make_feedback
from .evaluator import EvaluatorSpec, evaluate
from .lang import SourceProgram, Token, program_from_lines
from .perturb import EditRecord, PerturbModule, corrupt, rng_from

log = logging.getLogger(__name__)

DATASET_FORMAT_VERSION = 1
RETRY_FACTOR = 10


class DatasetFormatError(ValueError):
    pass


@dataclass(frozen=True)
class RepairExample:
    broken: SourceProgram
    feedback: Feedback
    error_line: int                    # gold k, 1-based
    repaired_line: tuple[Token, ...]   # gold content of line k
    fixed: SourceProgram               # broken with line k repaired
    provenance: tuple[EditRecord, ...]
    example_id: str
    source_id: str

    def to_record(self) -> dict:
        return {
            "id": self.example_id,
            "source_id": self.source_id,
            "broken": self.broken.line_texts(),
            "fixed": self.fixed.line_texts(),
            "error_line": self.error_line,
            "feedback": {"line": self.feedback.i_err,
                         "message": self.feedback.raw_message},
            "edits": [{"module": e.module.value, "action": e.action,
                       "line": e.line, "token_index": e.token_index,
                       "before": e.before, "after": e.after}
                      for e in self.provenance],
        }

    @staticmethod
    def from_record(rec: dict) -> "RepairExample":
        broken = program_from_lines(rec["broken"])
        fixed = program_from_lines(rec["fixed"])
        k = int(rec["error_line"])
        fb = make_feedback(int(rec["feedback"]["line"]),
                           rec["feedback"]["message"]).clamped(broken.line_count)
        edits = tuple(
            EditRecord(PerturbModule(e["module"]), e["action"], e["line"],
                       e["token_index"], e["before"], e["after"])
            for e in rec["edits"])
        return RepairExample(broken, fb, k, fixed.lines[k - 1], fixed, edits,
                             rec["id"], rec["source_id"])


@dataclass
class DatasetManifest:
    source_corpus_id: str
    evaluator_kind: str
    seed: int
    per_program_target: int
    counts: dict[str, int] = field(default_factory=dict)
    format_version: int = DATASET_FORMAT_VERSION
    config: dict = field(default_factory=dict)

    def write(self, path: str | Path):
        Path(path).write_text(json.dumps(self.__dict__, sort_keys=True, indent=1))

    @staticmethod
    def read(path: str | Path) -> "DatasetManifest":
        data = json.loads(Path(path).read_text())
        if data.get("format_version") != DATASET_FORMAT_VERSION:
            raise DatasetFormatError(
                f"unsupported manifest format_version {data.get('format_version')!r}")
        return DatasetManifest(**data)


def filter_corpus(programs: Iterable[SourceProgram],
                  spec: EvaluatorSpec) -> Iterator[SourceProgram]:
    """Drop over-long programs and ones that already fail to compile."""
    for program in programs:
        if program.line_count > 100:
            continue
        if evaluate(program, spec).compiles:
            yield program


def derive_gold(original: SourceProgram, broken: SourceProgram,
                feedback: Feedback) -> int:
    """Gold line: corrupted line nearest the reported line, ties downward."""
    differing = [i + 1 for i in range(original.line_count)
                 if [t.text for t in original.lines[i]]
                 != [t.text for t in broken.lines[i]]]
    if not differing:
        raise ValueError("broken program does not differ from the original")
    return min(differing, key=lambda ln: (abs(ln - feedback.i_err), ln))


def generate_for_program(original: SourceProgram, spec: EvaluatorSpec,
                         per_program_target: int, seed: int, program_index: int,
                         source_id: str) -> list[RepairExample]:
    examples: list[RepairExample] = []
    attempts = 0
    max_attempts = RETRY_FACTOR * per_program_target
    while len(examples) < per_program_target and attempts < max_attempts:
        rng = rng_from(seed, program_index, attempts)
        attempts += 1
        broken, edits = corrupt(original, rng)
        if not edits:
            continue
        verdict = evaluate(broken, spec)
        if verdict.compiles:
            continue
        fb = verdict.feedback
        k = derive_gold(original, broken, fb)
        gold_line = tuple(Token(t.text, t.kind, k, j)
                          for j, t in enumerate(original.lines[k - 1]))
        fixed = broken.with_line(k, list(gold_line))
        examples.append(RepairExample(
            broken, fb, k, gold_line, fixed, tuple(edits),
            example_id=f"{source_id}-x{len(examples):04d}", source_id=source_id))
    if len(examples) < per_program_target:
        log.info("program %s: only %d/%d failing corruptions within retry cap",
                 source_id, len(examples), per_program_target)
    return examples


def generate_examples(corpus: list[SourceProgram], spec: EvaluatorSpec,
                      per_program_target: int, seed: int) -> list[RepairExample]:
    examples: list[RepairExample] = []
    for p_idx, program in enumerate(corpus):
        examples.extend(generate_for_program(
            program, spec, per_program_target, seed, p_idx,
            source_id=f"src{p_idx:05d}"))
    return examples


def write_dataset(examples: Iterable[RepairExample], path: str | Path) -> int:
    count = 0
    with open(path, "w") as fh:
        fh.write(json.dumps({"format_version": DATASET_FORMAT_VERSION,
                             "kind": "repair-dataset"}) + "\n")
        for ex in examples:
            fh.write(json.dumps(ex.to_record(), sort_keys=True) + "\n")
            count += 1
    return count


def read_dataset(path: str | Path) -> list[RepairExample]:
    examples: list[RepairExample] = []
    with open(path) as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(f"line 1: not a dataset header: {exc.msg}") from exc
        if not isinstance(header, dict) or header.get("kind") != "repair-dataset":
            raise DatasetFormatError("line 1: not a repair dataset")
        if header.get("format_version") != DATASET_FORMAT_VERSION:
            raise DatasetFormatError(
                f"line 1: unsupported format_version {header.get('format_version')!r}")
        for lineno, raw in enumerate(fh, start=2):
            if not raw.strip():
                continue
            try:
                examples.append(RepairExample.from_record(json.loads(raw)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise DatasetFormatError(f"line {lineno}: malformed record: {exc}") from exc
    return examples


def split_dataset(examples: list[RepairExample], fractions: tuple[float, float],
                  seed: int) -> tuple[list[RepairExample], list[RepairExample]]:
    """Split keeping all examples of one source program in the same side."""
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got {fractions}")
    by_source: dict[str, list[RepairExample]] = {}
    for ex in examples:
        by_source.setdefault(ex.source_id, []).append(ex)
    source_ids = sorted(by_source)
    order = rng_from(seed, 1).permutation(len(source_ids))
    n_train_sources = round(fractions[0] * len(source_ids))
    train: list[RepairExample] = []
    dev: list[RepairExample] = []
    for rank, idx in enumerate(order):
        bucket = train if rank < n_train_sources else dev
        bucket.extend(by_source[source_ids[idx]])
    return train, dev
