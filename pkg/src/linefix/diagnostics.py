"""Compiler diagnostic parsing and error categorization.

Understands the GCC-style line format ``FILE:LINE:COL: error: MESSAGE``,
pulls out the symbols quoted in a message (both ASCII ``'...'`` and
typographic quote pairs), and buckets messages into four coarse error
categories.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .lang import Token, TokenKind, tokenize_line

_ERROR_LINE_RE = re.compile(r"^(.+?):(\d+):(?:(\d+):)?\s*(?:fatal )?error:\s*(.*)$")

_QUOTE_PAIRS = {"'": "'", "‘": "’"}


class ErrorCategory(Enum):
    EXPECTED = "expected"
    TYPE_DECL_CONFLICT = "type_decl_conflict"
    IDENTIFIER_UNDECLARED = "identifier_undeclared"
    OTHERS = "others"


@dataclass(frozen=True)
class Feedback:
    i_err: int                      # 1-based reported line
    raw_message: str
    m_err: tuple[Token, ...] = field(repr=False)
    arguments: tuple[str, ...] = ()

    def clamped(self, line_count: int) -> "Feedback":
        line = min(max(self.i_err, 1), max(line_count, 1))
        if line == self.i_err:
            return self
        return Feedback(line, self.raw_message, self.m_err, self.arguments)


def _quoted_spans(message: str) -> list[tuple[int, int, str]]:
    """(start, end, inner) for each matched quote pair, left to right."""
    spans = []
    pos = 0
    while pos < len(message):
        ch = message[pos]
        closer = _QUOTE_PAIRS.get(ch)
        if closer is None:
            pos += 1
            continue
        end = message.find(closer, pos + 1)
        if end < 0:
            break  # unmatched quote: ignore the remainder
        spans.append((pos, end, message[pos + 1:end]))
        pos = end + 1
    return spans


def extract_arguments(message: str) -> list[str]:
    """Token texts of every quoted substring, in order, duplicates kept."""
    args: list[str] = []
    for _, _, inner in _quoted_spans(message):
        args.extend(t.text for t in tokenize_line(inner))
    return args


def tokenize_message(message: str) -> list[Token]:
    """Tokenize a diagnostic message, keeping quoted arguments as standalone
    tokens (quote characters become their own tokens)."""
    parts: list[tuple[str, TokenKind]] = []
    pos = 0
    for start, end, inner in _quoted_spans(message):
        parts.extend((t.text, t.kind) for t in tokenize_line(message[pos:start]))
        parts.append((message[start], TokenKind.OTHER))
        parts.extend((t.text, t.kind) for t in tokenize_line(inner))
        parts.append((message[end], TokenKind.OTHER))
        pos = end + 1
    parts.extend((t.text, t.kind) for t in tokenize_line(message[pos:]))
    return [Token(text, kind, 1, j) for j, (text, kind) in enumerate(parts)]


def make_feedback(line: int, message: str) -> Feedback:
    return Feedback(line, message, tuple(tokenize_message(message)),
                    tuple(extract_arguments(message)))


def parse_first_error(raw: str) -> Feedback | None:
    """First ``error:`` diagnostic in a compiler run's output, or None."""
    for line in raw.splitlines():
        m = _ERROR_LINE_RE.match(line)
        if m:
            return make_feedback(int(m.group(2)), m.group(4))
    return None


def categorize(fb: Feedback) -> ErrorCategory:
    msg = fb.raw_message
    if "expected" in msg:
        return ErrorCategory.EXPECTED
    if "conflicting" in msg or "redeclar" in msg or "request for member" in msg:
        return ErrorCategory.TYPE_DECL_CONFLICT
    if "not declared" in msg or "undeclared" in msg:
        return ErrorCategory.IDENTIFIER_UNDECLARED
    return ErrorCategory.OTHERS


@dataclass
class CategoryStats:
    counts: dict[ErrorCategory, int]
    fractions: dict[ErrorCategory, float]
    total: int


def category_stats(feedbacks: Iterable[Feedback]) -> CategoryStats:
    counts = Counter(categorize(fb) for fb in feedbacks)
    total = sum(counts.values())
    full = {cat: counts.get(cat, 0) for cat in ErrorCategory}
    fractions = {cat: (c / total if total else 0.0) for cat, c in full.items()}
    return CategoryStats(full, fractions, total)
