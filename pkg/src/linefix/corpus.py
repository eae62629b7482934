"""Random generator of small programs that pass the built-in checker.

Used to build hermetic mini-corpora for data generation, training runs,
and search tasks. Programs are straight-line statement sequences with
optional if/while blocks, all identifiers declared before use.
"""

from __future__ import annotations

import numpy as np

from .evaluator import mini_check
from .lang import SourceProgram, program_from_lines
from .perturb import rng_from

_NAMES = list("abcdijkmnpqrstuvxyz")
_INT_OPS = ["+", "-", "*"]
_CMP_OPS = ["<", ">", "<=", ">=", "==", "!="]
_STR_LITS = ['"ab"', '"%d"', '"x"']
_CHR_LITS = ["'x'", "'c'", "'0'"]


def _pick(rng: np.random.Generator, items):
    return items[int(rng.integers(len(items)))]


def _int_expr(rng, int_vars: list[str], depth: int = 0) -> list[str]:
    roll = rng.random()
    if roll < 0.35 or not int_vars:
        return [str(int(rng.integers(0, 10)))]
    if roll < 0.65:
        return [_pick(rng, int_vars)]
    left = [_pick(rng, int_vars)]
    right = _int_expr(rng, int_vars, depth + 1) if depth == 0 else [str(int(rng.integers(0, 10)))]
    return left + [_pick(rng, _INT_OPS)] + right


def _cond(rng, int_vars: list[str]) -> list[str]:
    lhs = _pick(rng, int_vars)
    rhs = str(int(rng.integers(0, 10))) if rng.random() < 0.7 else _pick(rng, int_vars)
    return [lhs, _pick(rng, _CMP_OPS), rhs]


def _statement(rng, int_vars: list[str], str_vars: list[str]) -> list[str]:
    choices = ["assign", "assign", "cout"]
    if str_vars:
        choices += ["size", "push_back", "str_assign"]
    if int_vars:
        choices += ["cin", "printf", "incr"]
    kind = _pick(rng, choices)
    if kind == "assign":
        return [_pick(rng, int_vars), "="] + _int_expr(rng, int_vars) + [";"]
    if kind == "size":
        return [_pick(rng, int_vars), "=", _pick(rng, str_vars), ".", "size",
                "(", ")", ";"]
    if kind == "push_back":
        return [_pick(rng, str_vars), ".", "push_back", "(",
                _pick(rng, _CHR_LITS), ")", ";"]
    if kind == "str_assign":
        return [_pick(rng, str_vars), "=", _pick(rng, _STR_LITS), ";"]
    if kind == "cout":
        out = ["cout", "<<", _pick(rng, int_vars)]
        if rng.random() < 0.4:
            out += ["<<", _pick(rng, int_vars)]
        return out + [";"]
    if kind == "cin":
        return ["cin", ">>", _pick(rng, int_vars), ";"]
    if kind == "printf":
        return ["printf", "(", '"%d"', ",", _pick(rng, int_vars), ")", ";"]
    return [_pick(rng, int_vars), "++", ";"]


def make_program(rng: np.random.Generator) -> SourceProgram:
    """One random compiling program (5..~14 lines)."""
    names = list(rng.permutation(_NAMES))
    int_vars: list[str] = []
    str_vars: list[str] = []
    lines: list[list[str]] = []

    n_int_decls = int(rng.integers(1, 3))
    for _ in range(n_int_decls):
        group = [names.pop() for _ in range(int(rng.integers(1, 3)))]
        decl: list[str] = ["int"]
        for gi, name in enumerate(group):
            if gi:
                decl.append(",")
            decl.append(name)
            if rng.random() < 0.3:
                decl += ["=", str(int(rng.integers(0, 10)))]
        decl.append(";")
        int_vars += group
        lines.append(decl)
    if rng.random() < 0.55:
        s = names.pop()
        str_vars.append(s)
        lines.append(["string", s, ";"])

    n_stmts = int(rng.integers(2, 6))
    for _ in range(n_stmts):
        if rng.random() < 0.22:
            head = "if" if rng.random() < 0.5 else "while"
            lines.append([head, "("] + _cond(rng, int_vars) + [")", "{"])
            for _ in range(int(rng.integers(1, 3))):
                lines.append([_pick(rng, int_vars), "="]
                             + _int_expr(rng, int_vars) + [";"])
            lines.append(["}"])
        else:
            lines.append(_statement(rng, int_vars, str_vars))
    if rng.random() < 0.5:
        lines.append(["return", "0", ";"])

    program = program_from_lines([" ".join(line) for line in lines])
    verdict = mini_check(program)
    if not verdict.compiles:
        raise AssertionError(
            f"generator drift: {verdict.feedback.raw_message} in\n{program.to_text()}")
    return program


def make_corpus(n: int, seed: int) -> list[SourceProgram]:
    """n distinct compiling programs, deterministic in the seed."""
    programs: list[SourceProgram] = []
    seen: set[str] = set()
    attempt = 0
    while len(programs) < n:
        rng = rng_from(seed, 900, attempt)
        attempt += 1
        program = make_program(rng)
        text = program.to_text()
        if text in seen:
            continue
        seen.add(text)
        programs.append(program)
    return programs


def declaration_analog_example() -> tuple[SourceProgram, SourceProgram, int]:
    """(broken, fixed, gold line): a char declaration whose variable is later
    used with .size(), so the reported line is far from the repair line."""
    lines = [
        "int i , j ;",
        "int n ;",
        "i = 0 ;",
        "j = i + 1 ;",
        "char tmp , a , b ;",
        "tmp = a ;",
        "b = tmp ;",
        "j = j + 1 ;",
        "n = a . size ( ) ;",
    ]
    broken = program_from_lines(lines)
    fixed = broken.with_line(5, ["string", "tmp", ",", "a", ",", "b", ";"])
    return broken, fixed, 5
