import shutil

import pytest

from linefix.diagnostics import ErrorCategory, categorize
from linefix.evaluator import (EvaluatorSpec, EvaluatorUnavailable, Verdict,
                               evaluate, mini_check)
from linefix.lang import program_from_lines, tokenize_program

MINI = EvaluatorSpec(kind="minicheck")


def check(*lines):
    return mini_check(program_from_lines(list(lines)))


def test_well_formed_program_compiles():
    assert check("int a ;", "a = 1 ;").compiles


def test_undeclared_identifier():
    v = check("a = 1 ;")
    assert not v.compiles
    assert v.feedback.i_err == 1
    assert v.feedback.raw_message == "'a' was not declared in this scope"


def test_conflicting_declaration():
    v = check("int a ;", "int a ;")
    assert v.feedback.i_err == 2
    assert v.feedback.raw_message == "conflicting declaration 'int a'"


def test_conflicting_declaration_within_line():
    v = check("int a , a ;")
    assert v.feedback.raw_message == "conflicting declaration 'int a'"


def test_member_on_scalar():
    v = check("char a ;", "int n = a . size ( ) ;")
    assert v.feedback.i_err == 2
    assert "request for member 'size'" in v.feedback.raw_message
    assert "'char'" in v.feedback.raw_message


def test_member_on_string_ok():
    assert check("string s ;", "int n ;", "n = s . size ( ) ;").compiles


def test_unknown_member_on_string():
    v = check("string s ;", "s . printf ( ) ;")
    assert "no member named 'printf'" in v.feedback.raw_message
    assert categorize(v.feedback) == ErrorCategory.OTHERS


def test_ten_line_program_compiles():
    assert check(
        "int a , b ;",
        "int c = 2 ;",
        "string s ;",
        "s = \"ab\" ;",
        "a = 1 ;",
        "b = a + c ;",
        "if ( a < b ) {",
        "a = a + 1 ;",
        "}",
        "cout << a << b ;",
    ).compiles


def test_missing_semicolon_reported_on_next_line():
    v = check("int a ;", "a = 1", "a = 2 ;")
    assert v.feedback.i_err == 3
    assert v.feedback.raw_message == "expected ';' before 'a'"


def test_missing_semicolon_at_end_of_input():
    v = check("int a ;", "a = 1")
    assert v.feedback.i_err == 2
    assert v.feedback.raw_message == "expected ';' at end of input"


def test_missing_close_paren():
    v = check("int a ;", "if ( a < 1 {", "a = 2 ;", "}")
    assert v.feedback.i_err == 2
    assert v.feedback.raw_message == "expected ')' before '{'"


def test_unbalanced_brace_at_eof():
    v = check("int a ;", "if ( a < 1 ) {", "a = 2 ;")
    assert v.feedback.raw_message == "expected '}' at end of input"
    assert v.feedback.i_err == 3


def test_stray_close_brace():
    v = check("int a ;", "}")
    assert v.feedback.raw_message == "expected declaration before '}'"


def test_bare_quote_is_others_category():
    v = check('int a ;', 'a = " 1 ;')
    assert v.feedback.raw_message == 'missing terminating " character'
    assert categorize(v.feedback) == ErrorCategory.OTHERS


def test_use_before_declaring_line():
    v = check("a = 1 ;", "int a ;")
    assert v.feedback.i_err == 1
    assert "was not declared" in v.feedback.raw_message


def test_first_error_is_earliest_line():
    # Both line 2 and line 4 are broken; the verdict must report line 2.
    v = check("int a ;", "b = 1 ;", "a = ;", "c = 3 ;")
    assert v.feedback.i_err == 2


def test_determinism():
    prog = program_from_lines(["int a ;", "a = ) ;"])
    first = mini_check(prog)
    second = mini_check(prog)
    assert first == second
    assert not first.compiles


def test_control_statements():
    assert check("int i ;", "for ( i = 0 ; i < 3 ; i = i + 1 ) {",
                 "cout << i ;", "}").compiles
    assert check("int i = 1 ;", "while ( i > 0 ) {", "i = i - 1 ;", "}").compiles
    assert check("int i = 1 ;", "if ( i == 1 ) {", "i = 2 ;", "} else {",
                 "i = 3 ;", "}").compiles
    assert check("int i ;", "cin >> i ;", "printf ( \"%d\" , i ) ;",
                 "return 0 ;").compiles


def test_push_back_statement():
    assert check("string s ;", "s . push_back ( 'x' ) ;").compiles


def test_break_outside_anything_still_forms():
    assert check("int i ;", "while ( i < 2 ) {", "break ;", "}").compiles


def test_verdict_invariant():
    with pytest.raises(ValueError):
        Verdict(True, mini_check(program_from_lines(["a = 1 ;"])).feedback)
    with pytest.raises(ValueError):
        Verdict(False, None)


def test_evaluator_spec_validation():
    with pytest.raises(ValueError):
        EvaluatorSpec(kind="external", command_template="gcc -c prog.c")
    with pytest.raises(ValueError):
        EvaluatorSpec(kind="nonsense")


def test_external_unavailable():
    spec = EvaluatorSpec(kind="external",
                         command_template="definitely-not-a-compiler-xyz {path}")
    prog = program_from_lines(["int a ;"])
    with pytest.raises(EvaluatorUnavailable):
        evaluate(prog, spec)


@pytest.mark.skipif(shutil.which("gcc") is None, reason="no C compiler")
def test_external_real_compiler():
    spec = EvaluatorSpec(kind="external",
                         command_template="gcc -fsyntax-only {path}")
    good = tokenize_program("int main(void) { return 0; }")
    assert evaluate(good, spec).compiles
    bad = tokenize_program("int main(void) { int x\nreturn 0; }")
    v = evaluate(bad, spec)
    assert not v.compiles
    assert v.feedback.i_err in (1, 2)


@pytest.mark.skipif(shutil.which("g++") is None, reason="no C++ compiler")
def test_external_member_error_mentions_type():
    source = "\n".join([
        "int main() {",
        "char a;",
        "int n;",
        "n = a.size();",
        "return 0;",
        "}",
    ])
    spec = EvaluatorSpec(kind="external",
                         command_template="g++ -fsyntax-only -x c++ {path}")
    v = evaluate(tokenize_program(source), spec)
    assert not v.compiles
    assert "request for" in v.feedback.raw_message
    assert "char" in v.feedback.arguments
