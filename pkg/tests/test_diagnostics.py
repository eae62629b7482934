from linefix.diagnostics import (CategoryStats, ErrorCategory, category_stats,
                                 categorize, extract_arguments, make_feedback,
                                 parse_first_error)


def test_parse_first_error_takes_first():
    raw = ("p.c:9:5: error: request for member 'size' in 'a', "
           "which is of non-class type 'char'\n"
           "p.c:12:1: error: expected ';'")
    fb = parse_first_error(raw)
    assert fb.i_err == 9
    assert list(fb.arguments) == ["size", "a", "char"]
    assert fb.raw_message.startswith("request for member")


def test_parse_empty_output():
    assert parse_first_error("") is None


def test_parse_ignores_warnings():
    raw = "p.c:3:1: warning: unused variable 'x'\np.c:4:1: note: declared here"
    assert parse_first_error(raw) is None


def test_parse_without_column():
    fb = parse_first_error("prog.c:7: error: expected ';' before '}'")
    assert fb.i_err == 7


def test_extract_arguments_order_and_duplicates():
    msg = "request for member 'size' in 'a', which is of non-class type 'char'"
    assert extract_arguments(msg) == ["size", "a", "char"]
    assert extract_arguments("no quotes here") == []
    assert extract_arguments("'x' and 'x' again") == ["x", "x"]


def test_extract_arguments_multi_token():
    assert extract_arguments("conflicting declaration 'int a'") == ["int", "a"]


def test_extract_arguments_typographic_quotes():
    msg = "request for member ‘size’ in ‘a’, type ‘char’"
    assert extract_arguments(msg) == ["size", "a", "char"]


def test_extract_arguments_unmatched_quote_ignored():
    assert extract_arguments("expected ';' before 'x") == [";"]


def test_arguments_appear_in_message():
    msg = "conflicting declaration 'int a'"
    fb = make_feedback(3, msg)
    for arg in fb.arguments:
        assert arg in msg


def test_message_tokens_contain_arguments_standalone():
    fb = make_feedback(9, "request for member 'size' in 'a', type 'char'")
    texts = [t.text for t in fb.m_err]
    for arg in ("size", "a", "char"):
        assert arg in texts


def test_clamped():
    fb = make_feedback(40, "expected ';' before '}'")
    assert fb.clamped(10).i_err == 10
    assert make_feedback(0, "m").clamped(10).i_err == 1
    assert fb.clamped(100).i_err == 40


def test_categorize_rules():
    cases = [
        ("expected ';' before '}'", ErrorCategory.EXPECTED),
        ("'a' was not declared in this scope", ErrorCategory.IDENTIFIER_UNDECLARED),
        ("ambiguous overload", ErrorCategory.OTHERS),
        ("conflicting declaration 'int a'", ErrorCategory.TYPE_DECL_CONFLICT),
        ("redeclaration of 'x'", ErrorCategory.TYPE_DECL_CONFLICT),
        ("request for member 'size' in 'a', which is of non-class type 'char'",
         ErrorCategory.TYPE_DECL_CONFLICT),
        ('missing terminating " character', ErrorCategory.OTHERS),
    ]
    for msg, expected in cases:
        assert categorize(make_feedback(1, msg)) == expected


def test_category_stats_single():
    stats = category_stats([make_feedback(1, "expected ';' before '}'")])
    assert stats.fractions[ErrorCategory.EXPECTED] == 1.0
    assert stats.total == 1


def test_category_stats_empty():
    stats = category_stats([])
    assert stats.total == 0
    assert all(v == 0.0 for v in stats.fractions.values())


def test_category_stats_fractions_sum_to_one():
    msgs = ["expected ';' before '}'", "'a' was not declared in this scope",
            "conflicting declaration 'int a'", "something else entirely",
            "expected ')' before ';'"]
    stats = category_stats([make_feedback(1, m) for m in msgs])
    assert abs(sum(stats.fractions.values()) - 1.0) < 1e-9
    assert isinstance(stats, CategoryStats)
