"""Compile oracles: an external-compiler adapter and the built-in MiniCheck.

MiniCheck is a deterministic stand-in compiler over a C-like statement
language. It reports the first violation it finds, formatted exactly like
a GCC diagnostic line, so downstream parsing and categorization behave
identically for both evaluator kinds.

Checks run line by line, in this order, stopping at the first violation:

  S1  bare quote tokens ("missing terminating ..."), brace underflow, and
      unclosed braces at end of input
  S2  statement form (declarations, assignments/expression statements,
      control statements, io statements), with "expected ... before ..."
      messages; a token expected at end of line is reported at the first
      token of the next non-empty line, GCC-style
  S3  identifier used before a declaring line
  S4  redeclaration of an already-declared identifier
  S5  member access on a non-string variable, and unknown members

Declarations live in a single flat scope; braces only balance, they do
not open scopes.
"""

from __future__ import annotations

import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .diagnostics import Feedback, make_feedback, parse_first_error
from .lang import SourceProgram, Token, TokenKind


class EvaluatorUnavailable(Exception):
    """External evaluator missing, not executable, or timed out."""


@dataclass(frozen=True)
class Verdict:
    compiles: bool
    feedback: Feedback | None = None

    def __post_init__(self):
        if self.compiles == (self.feedback is not None):
            raise ValueError("feedback must be present iff compiles is false")


@dataclass(frozen=True)
class EvaluatorSpec:
    kind: str = "minicheck"              # "minicheck" | "external"
    command_template: str = ""           # external only; must contain one {path}
    timeout_ms: int = 10_000

    def __post_init__(self):
        if self.kind not in ("minicheck", "external"):
            raise ValueError(f"unknown evaluator kind {self.kind!r}")
        if self.kind == "external" and self.command_template.count("{path}") != 1:
            raise ValueError("external evaluator needs exactly one {path} placeholder")


# ---------------------------------------------------------------------------
# MiniCheck

_BINOPS = {"+", "-", "*", "/", "%", "<", ">", "<=", ">=", "==", "!=",
           "&&", "||", "<<", ">>", "&"}
_UNARY = {"!", "-", "&"}
_MEMBERS = {"size", "push_back"}
_PAREN_KEYWORDS = {"if", "while", "switch"}
_CALL_KEYWORDS = {"printf", "scanf"}


class _Violation(Exception):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(message)
        self.line = line
        self.col = col
        self.message = message


class _EolExpect(Exception):
    """A specific token was expected but the line ended."""

    def __init__(self, expected: str):
        super().__init__(expected)
        self.expected = expected  # "';'", "')'", "primary-expression", ...


def _quote(text: str) -> str:
    return f"'{text}'"


class _LineParser:
    """Statement-form parser for one line; collects uses/decls/members."""

    def __init__(self, tokens: tuple[Token, ...], line_no: int):
        self.toks = tokens
        self.line = line_no
        self.pos = 0
        self.events: list[tuple] = []  # ("use"|"decl"|"member", ...) in token order

    def peek(self) -> Token | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def advance(self) -> Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def fail_before(self, expected: str, tok: Token | None):
        if tok is None:
            raise _EolExpect(expected)
        raise _Violation(self.line, tok.col,
                         f"expected {expected} before {_quote(tok.text)}")

    def expect(self, text: str):
        tok = self.peek()
        if tok is None or tok.text != text:
            self.fail_before(_quote(text), tok)
        return self.advance()

    def use(self, tok: Token):
        self.events.append(("use", tok.text, tok.col))

    # --- expressions -----------------------------------------------------

    def parse_expr(self):
        self.parse_unary()
        while (tok := self.peek()) is not None and tok.text in _BINOPS:
            self.advance()
            self.parse_unary()

    def parse_unary(self):
        while (tok := self.peek()) is not None and tok.text in _UNARY:
            self.advance()
        self.parse_primary()

    def parse_primary(self):
        tok = self.peek()
        if tok is None:
            raise _EolExpect("primary-expression")
        if tok.kind == TokenKind.LITERAL:
            self.advance()
            return
        if tok.text == "(":
            self.advance()
            self.parse_expr()
            self.expect(")")
            return
        if tok.kind == TokenKind.IDENTIFIER:
            self.advance()
            self.use(tok)
            self.parse_postfix(tok)
            return
        self.fail_before("primary-expression", tok)

    def parse_postfix(self, id_tok: Token):
        tok = self.peek()
        if tok is not None and tok.text == ".":
            self.advance()
            member = self.peek()
            if member is None or member.text in _BINOPS or member.kind == TokenKind.OPERATOR:
                self.fail_before("unqualified-id", member)
            self.advance()
            self.events.append(("member", id_tok.text, member.text,
                                id_tok.col, member.col))
            self.expect("(")
            nxt = self.peek()
            if nxt is not None and nxt.text != ")":
                self.parse_expr()
            self.expect(")")
        elif tok is not None and tok.text in ("++", "--"):
            self.advance()

    # --- statements ------------------------------------------------------

    def finish_statement(self):
        """Consume the terminating ';' plus any trailing empty statements."""
        self.expect(";")
        while (tok := self.peek()) is not None and tok.text == ";":
            self.advance()
        if (tok := self.peek()) is not None:
            self.fail_before("unqualified-id", tok)

    def opt_open_brace(self):
        tok = self.peek()
        if tok is not None and tok.text == "{":
            self.advance()
        if (tok := self.peek()) is not None:
            self.fail_before("unqualified-id", tok)

    def parse_declaration(self):
        type_tok = self.advance()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != TokenKind.IDENTIFIER:
                self.fail_before("unqualified-id", tok)
            self.advance()
            self.events.append(("decl", tok.text, type_tok.text, tok.col))
            nxt = self.peek()
            if nxt is not None and nxt.text == "=":
                self.advance()
                self.parse_expr()
                nxt = self.peek()
            if nxt is not None and nxt.text == ",":
                self.advance()
                continue
            self.finish_statement()
            return

    def parse_assignment_or_expr(self):
        first = self.toks[0]
        if len(self.toks) >= 2 and self.toks[1].text == "=":
            self.use(first)
            self.pos = 2
            self.parse_expr()
        else:
            self.parse_expr()
        self.finish_statement()

    def parse_simple_assignment(self):
        """``id = expr`` inside a for-header; empty is allowed by callers."""
        tok = self.peek()
        if tok is None or tok.kind != TokenKind.IDENTIFIER:
            self.fail_before("unqualified-id", tok)
        self.advance()
        self.use(tok)
        self.expect("=")
        self.parse_expr()

    def parse_keyword_statement(self):
        kw = self.advance()
        name = kw.text
        if name in _PAREN_KEYWORDS:
            self.expect("(")
            self.parse_expr()
            self.expect(")")
            self.opt_open_brace()
        elif name == "for":
            self.expect("(")
            if (tok := self.peek()) is not None and tok.text != ";":
                self.parse_simple_assignment()
            self.expect(";")
            if (tok := self.peek()) is not None and tok.text != ";":
                self.parse_expr()
            self.expect(";")
            if (tok := self.peek()) is not None and tok.text != ")":
                self.parse_simple_assignment()
            self.expect(")")
            self.opt_open_brace()
        elif name == "else":
            nxt = self.peek()
            if nxt is not None and nxt.text == "if":
                self.advance()
                self.expect("(")
                self.parse_expr()
                self.expect(")")
            self.opt_open_brace()
        elif name == "do":
            self.opt_open_brace()
        elif name == "return":
            if (tok := self.peek()) is not None and tok.text != ";":
                self.parse_expr()
            self.finish_statement()
        elif name in ("break", "continue"):
            self.finish_statement()
        elif name == "cout":
            self.expect("<<")
            self.parse_expr()
            self.finish_statement()
        elif name == "cin":
            self.expect(">>")
            while True:
                tok = self.peek()
                if tok is None or tok.kind != TokenKind.IDENTIFIER:
                    self.fail_before("unqualified-id", tok)
                self.advance()
                self.use(tok)
                nxt = self.peek()
                if nxt is not None and nxt.text == ">>":
                    self.advance()
                    continue
                break
            self.finish_statement()
        elif name in _CALL_KEYWORDS:
            self.expect("(")
            if (tok := self.peek()) is not None and tok.text != ")":
                self.parse_expr()
                while (tok := self.peek()) is not None and tok.text == ",":
                    self.advance()
                    self.parse_expr()
            self.expect(")")
            self.finish_statement()
        else:
            raise _Violation(self.line, kw.col,
                             f"expected unqualified-id before {_quote(name)}")

    def parse_close_brace_line(self):
        self.advance()  # "}" already verified by caller
        tok = self.peek()
        if tok is None:
            return
        if tok.text == "else":
            self.parse_keyword_statement()
            return
        self.fail_before("unqualified-id", tok)

    def parse_statement(self):
        first = self.toks[0]
        if first.kind == TokenKind.TYPENAME:
            self.parse_declaration()
        elif first.kind == TokenKind.IDENTIFIER:
            self.parse_assignment_or_expr()
        elif first.kind == TokenKind.KEYWORD:
            self.parse_keyword_statement()
        elif first.text == "{" and len(self.toks) == 1:
            self.advance()
        elif first.text == "}":
            self.parse_close_brace_line()
        else:
            raise _Violation(self.line, first.col,
                             f"expected unqualified-id before {_quote(first.text)}")


def _scan_line_s1(tokens: tuple[Token, ...], line_no: int, brace_depth: int) -> int:
    """Quote and brace-underflow scan; returns the updated brace depth."""
    for tok in tokens:
        if tok.text in ('"', "'"):
            raise _Violation(line_no, tok.col,
                             f"missing terminating {tok.text} character")
        if tok.text == "{":
            brace_depth += 1
        elif tok.text == "}":
            if brace_depth == 0:
                raise _Violation(line_no, tok.col, "expected declaration before '}'")
            brace_depth -= 1
    return brace_depth


def _next_token_after(program: SourceProgram, line_no: int) -> Token | None:
    for i in range(line_no, program.line_count):
        if program.lines[i]:
            return program.lines[i][0]
    return None


def mini_check(program: SourceProgram) -> Verdict:
    declared: dict[str, str] = {}
    brace_depth = 0
    last_line_with_tokens = 0
    try:
        for idx, tokens in enumerate(program.lines):
            line_no = idx + 1
            if not tokens:
                continue
            last_line_with_tokens = line_no
            brace_depth = _scan_line_s1(tokens, line_no, brace_depth)

            parser = _LineParser(tokens, line_no)
            try:
                parser.parse_statement()
            except _EolExpect as eol:
                nxt = _next_token_after(program, line_no)
                if nxt is None:
                    raise _Violation(line_no, len(tokens),
                                     f"expected {eol.expected} at end of input")
                raise _Violation(nxt.line, nxt.col,
                                 f"expected {eol.expected} before {_quote(nxt.text)}")

            line_decls: dict[str, str] = {}
            for ev in parser.events:          # S3: undeclared uses, token order
                if ev[0] == "decl":
                    line_decls[ev[1]] = ev[2]
                elif ev[0] in ("use", "member"):
                    name, col = ev[1], ev[-1] if ev[0] == "use" else ev[3]
                    if name not in declared and name not in line_decls:
                        raise _Violation(line_no, col,
                                         f"'{name}' was not declared in this scope")
            seen: dict[str, str] = {}
            for ev in parser.events:          # S4: redeclarations
                if ev[0] != "decl":
                    continue
                _, name, type_name, col = ev
                if name in declared or name in seen:
                    raise _Violation(line_no, col,
                                     f"conflicting declaration '{type_name} {name}'")
                seen[name] = type_name
            for ev in parser.events:          # S5: members on non-string
                if ev[0] != "member":
                    continue
                _, name, member, id_col, member_col = ev
                type_name = line_decls.get(name, declared.get(name))
                if type_name != "string":
                    raise _Violation(
                        line_no, id_col,
                        f"request for member '{member}' in '{name}', "
                        f"which is of non-class type '{type_name}'")
                if member not in _MEMBERS:
                    raise _Violation(line_no, member_col,
                                     f"'string' has no member named '{member}'")
            declared.update(line_decls)

        if brace_depth > 0:
            line = last_line_with_tokens or program.line_count
            raise _Violation(line, len(program.lines[line - 1]),
                             "expected '}' at end of input")
    except _Violation as v:
        fb = make_feedback(v.line, v.message).clamped(program.line_count)
        return Verdict(False, fb)
    return Verdict(True, None)


# ---------------------------------------------------------------------------
# External adapter

def _run_external(program: SourceProgram, spec: EvaluatorSpec) -> Verdict:
    with tempfile.TemporaryDirectory(prefix="linefix-eval-") as tmp:
        path = Path(tmp) / "prog.c"
        path.write_text(program.to_text() + "\n")
        cmd = spec.command_template.format(path=str(path))
        try:
            proc = subprocess.run(
                cmd, shell=True, capture_output=True, text=True,
                timeout=spec.timeout_ms / 1000.0)
        except subprocess.TimeoutExpired as exc:
            raise EvaluatorUnavailable(f"evaluator timed out: {cmd}") from exc
        except OSError as exc:
            raise EvaluatorUnavailable(f"cannot run evaluator: {cmd}") from exc
    if proc.returncode == 0:
        return Verdict(True, None)
    if proc.returncode == 127:
        raise EvaluatorUnavailable(f"evaluator command not found: {cmd}")
    fb = parse_first_error(proc.stderr)
    if fb is None:
        fb = make_feedback(1, "unparsed compiler output")
    return Verdict(False, fb.clamped(program.line_count))


def evaluate(program: SourceProgram, spec: EvaluatorSpec) -> Verdict:
    """Compile verdict; only the first reported error is kept."""
    if spec.kind == "minicheck":
        return mini_check(program)
    return _run_external(program, spec)
