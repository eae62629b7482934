"""Line-structured tokenizer for C-like source.

Tokenizes text into (text, kind, line, col) tokens using fixed keyword /
type / operator tables and maximal munch. Broken programs must still
tokenize, so there is no grammar here: any byte sequence yields tokens,
unknown single characters become ``Other``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class TokenKind(Enum):
    IDENTIFIER = "identifier"
    TYPENAME = "typename"
    KEYWORD = "keyword"
    OPERATOR = "operator"
    LITERAL = "literal"
    OTHER = "other"


TYPE_NAMES = frozenset(
    ["int", "long", "float", "double", "char", "string", "bool", "void",
     "unsigned", "short"])

# Language keywords plus the common library-call names the corpus uses.
KEYWORDS = frozenset(
    ["if", "else", "for", "while", "do", "return", "break", "continue",
     "switch", "case", "struct", "const",
     "size", "push_back", "printf", "scanf", "cin", "cout", "main"])

MULTI_CHAR_OPERATORS = ("++", "--", "<<", ">>", "==", "!=", "<=", ">=", "&&", "||")
SINGLE_CHAR_OPERATORS = (",", ".", ";", "(", ")", "{", "}", "[", "]", '"',
                         "=", "+", "-", "*", "/", "%", "<", ">", "!", "&")
OPERATORS = MULTI_CHAR_OPERATORS + SINGLE_CHAR_OPERATORS

_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"\d+(\.\d+)?")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class Token:
    text: str
    kind: TokenKind
    line: int  # 1-based
    col: int   # 0-based token index within the line

    def __repr__(self):  # compact, used in test failure output
        return f"{self.text}:{self.kind.value}"


def classify(text: str) -> TokenKind:
    """Token kind as a pure function of the surface form."""
    if text in TYPE_NAMES:
        return TokenKind.TYPENAME
    if text in KEYWORDS:
        return TokenKind.KEYWORD
    if text in OPERATORS:
        return TokenKind.OPERATOR
    if _NUMBER_RE.fullmatch(text):
        return TokenKind.LITERAL
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return TokenKind.LITERAL
    if _WORD_RE.fullmatch(text):
        return TokenKind.IDENTIFIER
    return TokenKind.OTHER


def _quoted_literal(text: str, pos: int) -> str | None:
    """Quoted span starting at pos, or None if the quote never closes."""
    quote = text[pos]
    end = text.find(quote, pos + 1)
    if end < 0:
        return None
    body = text[pos:end + 1]
    # Tokens may not contain whitespace; collapse runs inside literals.
    return _WS_RE.sub("_", body)


def tokenize_line(text: str, line_no: int = 1) -> list[Token]:
    """Maximal-munch tokenization of a single line (no newlines)."""
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in "'\"":
            lit = _quoted_literal(text, pos)
            if lit is not None:
                tokens.append(Token(lit, TokenKind.LITERAL, line_no, len(tokens)))
                pos = text.find(ch, pos + 1) + 1
                continue
            # Unterminated quote: emit the quote character alone and move on.
            kind = TokenKind.OPERATOR if ch == '"' else TokenKind.OTHER
            tokens.append(Token(ch, kind, line_no, len(tokens)))
            pos += 1
            continue
        if ch.isdigit():
            m = _NUMBER_RE.match(text, pos)
            tokens.append(Token(m.group(), TokenKind.LITERAL, line_no, len(tokens)))
            pos = m.end()
            continue
        m = _WORD_RE.match(text, pos)
        if m:
            word = m.group()
            tokens.append(Token(word, classify(word), line_no, len(tokens)))
            pos = m.end()
            continue
        for op in MULTI_CHAR_OPERATORS:
            if text.startswith(op, pos):
                tokens.append(Token(op, TokenKind.OPERATOR, line_no, len(tokens)))
                pos += len(op)
                break
        else:
            kind = TokenKind.OPERATOR if ch in SINGLE_CHAR_OPERATORS else TokenKind.OTHER
            tokens.append(Token(ch, kind, line_no, len(tokens)))
            pos += 1
    return tokens


def render_line(tokens: list[Token]) -> str:
    """Canonical single-space rendering; inverse of tokenize_line on content."""
    return " ".join(t.text for t in tokens)


@dataclass(frozen=True)
class SourceProgram:
    lines: tuple[tuple[Token, ...], ...]

    @property
    def line_count(self) -> int:
        return len(self.lines)

    def line_texts(self) -> list[str]:
        return [render_line(list(line)) for line in self.lines]

    def to_text(self) -> str:
        return "\n".join(self.line_texts())

    def token_count(self) -> int:
        return sum(len(line) for line in self.lines)

    def with_line(self, line_no: int, tokens: list[Token] | list[str]) -> "SourceProgram":
        """New program with 1-based line `line_no` replaced; positions renumbered."""
        if not 1 <= line_no <= self.line_count:
            raise IndexError(f"line {line_no} out of range 1..{self.line_count}")
        if tokens and isinstance(tokens[0], str):
            new_line = tuple(
                Token(t, classify(t), line_no, j) for j, t in enumerate(tokens))
        else:
            new_line = tuple(
                Token(t.text, t.kind, line_no, j) for j, t in enumerate(tokens))
        lines = list(self.lines)
        lines[line_no - 1] = new_line
        return SourceProgram(tuple(lines))

    def content(self) -> tuple[tuple[tuple[str, TokenKind], ...], ...]:
        """(text, kind) grid, for content equality irrespective of positions."""
        return tuple(tuple((t.text, t.kind) for t in line) for line in self.lines)


def tokenize_program(source: str) -> SourceProgram:
    """Split on newlines and tokenize each line; empty lines are kept."""
    lines = source.split("\n")
    return SourceProgram(tuple(
        tuple(tokenize_line(text, i + 1)) for i, text in enumerate(lines)))


def program_from_lines(line_texts: list[str]) -> SourceProgram:
    return tokenize_program("\n".join(line_texts))
