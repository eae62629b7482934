"""Randomized single-token corruption of working programs.

Four perturbation modules (operator/punctuation, declared-type, identifier,
keyword) each delete, insert, or replace exactly one token. A corruption
run samples 1..5 module applications with module weights
(0.3, 0.5, 0.15, 0.05) and applies them sequentially.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .lang import (KEYWORDS, OPERATORS, TYPE_NAMES, SourceProgram, Token,
                   TokenKind, classify, render_line, tokenize_line)

MODULE_WEIGHTS = {
    "syntax": 0.3,
    "id_type": 0.5,
    "id_typo": 0.15,
    "keyword": 0.05,
}


class PerturbModule(Enum):
    SYNTAX = "syntax"
    ID_TYPE = "id_type"
    ID_TYPO = "id_typo"
    KEYWORD = "keyword"

    @property
    def weight(self) -> float:
        return MODULE_WEIGHTS[self.value]


_MODULE_KIND = {
    PerturbModule.SYNTAX: TokenKind.OPERATOR,
    PerturbModule.ID_TYPE: TokenKind.TYPENAME,
    PerturbModule.ID_TYPO: TokenKind.IDENTIFIER,
    PerturbModule.KEYWORD: TokenKind.KEYWORD,
}

_FIXED_POOLS = {
    PerturbModule.SYNTAX: tuple(sorted(OPERATORS)),
    PerturbModule.ID_TYPE: tuple(sorted(TYPE_NAMES)),
    PerturbModule.KEYWORD: tuple(sorted(KEYWORDS)),
}

ACTIONS = ("delete", "insert", "replace")


class NoEligibleSite(Exception):
    """The module has no applicable token/position in this program."""


@dataclass(frozen=True)
class EditRecord:
    module: PerturbModule
    action: str
    line: int          # 1-based
    token_index: int   # 0-based position within the line
    before: str | None
    after: str | None

    def __post_init__(self):
        if self.action == "delete" and not (self.before and self.after is None):
            raise ValueError("delete records carry only `before`")
        if self.action == "insert" and not (self.after and self.before is None):
            raise ValueError("insert records carry only `after`")
        if self.action == "replace" and not (self.before and self.after):
            raise ValueError("replace records carry `before` and `after`")


def rng_from(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for (seed, path); the documented split function."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed,) + path)))


def _token_sites(program: SourceProgram, kind: TokenKind) -> list[tuple[int, int]]:
    return [(li + 1, tok.col)
            for li, line in enumerate(program.lines)
            for tok in line if tok.kind == kind]


def _insert_sites(program: SourceProgram, module: PerturbModule) -> list[tuple[int, int]]:
    if module in (PerturbModule.ID_TYPE, PerturbModule.KEYWORD):
        # Declaration/statement head only.
        return [(li + 1, 0) for li in range(program.line_count)]
    return [(li + 1, j)
            for li, line in enumerate(program.lines)
            for j in range(len(line) + 1)]


def _pool(program: SourceProgram, module: PerturbModule) -> tuple[str, ...]:
    if module is PerturbModule.ID_TYPO:
        return tuple(sorted({tok.text for line in program.lines for tok in line
                             if tok.kind == TokenKind.IDENTIFIER}))
    return _FIXED_POOLS[module]


def _edit_line(line: tuple[Token, ...], line_no: int, action: str,
               index: int, new_text: str | None) -> tuple[Token, ...]:
    texts = [t.text for t in line]
    if action == "delete":
        del texts[index]
    elif action == "insert":
        texts.insert(index, new_text)
    else:
        texts[index] = new_text
    return tuple(Token(t, classify(t), line_no, j) for j, t in enumerate(texts))


def _renderable(line: tuple[Token, ...]) -> bool:
    """Token content must survive the render/tokenize round-trip, since
    datasets persist rendered lines. A bare quote inserted ahead of a string
    literal, for example, would re-pair with the literal's opening quote.
    Only quote characters can make spaced tokens merge, so quote-free lines
    skip the check."""
    if not any('"' in t.text or "'" in t.text for t in line):
        return True
    again = tokenize_line(render_line(list(line)))
    return [t.text for t in again] == [t.text for t in line]


def apply_module(program: SourceProgram, module: PerturbModule,
                 rng: np.random.Generator) -> tuple[SourceProgram, EditRecord]:
    """One single-token edit; raises NoEligibleSite when nothing applies."""
    kind_sites = _token_sites(program, _MODULE_KIND[module])
    pool = _pool(program, module)

    feasible: list[str] = []
    if kind_sites:
        feasible.append("delete")
    if pool and _insert_sites(program, module):
        feasible.append("insert")
    if kind_sites and any(
            pool_text != program.lines[li - 1][j].text
            for li, j in kind_sites for pool_text in pool):
        feasible.append("replace")
    if not feasible:
        raise NoEligibleSite(f"{module.value}: no eligible site")

    for _ in range(32):
        action = feasible[rng.integers(len(feasible))]
        if action == "delete":
            line_no, j = kind_sites[rng.integers(len(kind_sites))]
            before, after = program.lines[line_no - 1][j].text, None
            new_text = None
        elif action == "insert":
            sites = _insert_sites(program, module)
            line_no, j = sites[rng.integers(len(sites))]
            before, after = None, pool[rng.integers(len(pool))]
            new_text = after
        else:
            sites = [(li, j) for li, j in kind_sites
                     if any(p != program.lines[li - 1][j].text for p in pool)]
            line_no, j = sites[rng.integers(len(sites))]
            before = program.lines[line_no - 1][j].text
            options = [p for p in pool if p != before]
            after = options[rng.integers(len(options))]
            new_text = after

        new_line = _edit_line(program.lines[line_no - 1], line_no, action, j,
                              new_text)
        if not _renderable(new_line):
            continue  # resample: the edit is not representable as a line
        lines = list(program.lines)
        lines[line_no - 1] = new_line
        record = EditRecord(module, action, line_no, j, before, after)
        return SourceProgram(tuple(lines)), record
    raise NoEligibleSite(f"{module.value}: no renderable edit found")


def corrupt(program: SourceProgram,
            rng: np.random.Generator) -> tuple[SourceProgram, list[EditRecord]]:
    """Sample 1..5 weighted module applications; skips rounds with no site."""
    modules = list(PerturbModule)
    weights = np.array([m.weight for m in modules])
    n_rounds = int(rng.integers(1, 6))
    edits: list[EditRecord] = []
    current = program
    for _ in range(n_rounds):
        remaining = list(modules)
        probs = weights.copy()
        while remaining:
            probs = probs / probs.sum()
            pick = int(rng.choice(len(remaining), p=probs))
            module = remaining[pick]
            try:
                current, record = apply_module(current, module, rng)
                edits.append(record)
                break
            except NoEligibleSite:
                del remaining[pick]
                probs = np.delete(probs, pick)
        # all modules ineligible: the round is skipped
    return current, edits


def invert_edits(program: SourceProgram, edits: list[EditRecord]) -> SourceProgram:
    """Undo edits in reverse application order (provenance check helper)."""
    current = program
    for record in reversed(edits):
        line = current.lines[record.line - 1]
        if record.action == "delete":
            restored = _edit_line(line, record.line, "insert",
                                  record.token_index, record.before)
        elif record.action == "insert":
            restored = _edit_line(line, record.line, "delete",
                                  record.token_index, None)
        else:
            restored = _edit_line(line, record.line, "replace",
                                  record.token_index, record.before)
        lines = list(current.lines)
        lines[record.line - 1] = restored
        current = SourceProgram(tuple(lines))
    return current
