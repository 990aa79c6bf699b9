from shipgame.syntax import tokenize


def kinds(tokens):
    return [t.kind for t in tokens]


def test_smallest_statement():
    tokens, diagnostics = tokenize("x = 1;")
    assert not diagnostics
    assert [(t.kind, t.text) for t in tokens[:-1]] == [
        ("IDENT", "x"), ("PUNCT", "="), ("INT", "1"), ("PUNCT", ";"),
    ]
    assert tokens[-1].kind == "EOF"


def test_unterminated_string_is_a_diagnostic():
    tokens, diagnostics = tokenize('"abc')
    assert len(diagnostics) == 1
    assert diagnostics[0].message == "unterminated string"
    assert diagnostics[0].span.line == 1


def test_illegal_character():
    _tokens, diagnostics = tokenize("int x = 1 @ 2;")
    assert any("illegal character" in d.message for d in diagnostics)


def test_comments_and_whitespace_discarded():
    tokens, diagnostics = tokenize("int x = 1; // trailing words\n// whole line\nx = 2;")
    assert not diagnostics
    assert all(t.kind in ("IDENT", "KEYWORD", "INT", "PUNCT", "EOF") for t in tokens)
    texts = [t.text for t in tokens if t.kind != "EOF"]
    assert "trailing" not in texts and "whole" not in texts


def test_tokens_carry_spans():
    tokens, _ = tokenize("int x = 1;\nx = 22;")
    x_assign = [t for t in tokens if t.text == "22"][0]
    assert (x_assign.span.line, x_assign.span.column, x_assign.span.length) == (2, 5, 2)


def test_string_escapes():
    tokens, diagnostics = tokenize(r'"a\nb\t\"q\\"')
    assert not diagnostics
    assert tokens[0].value == 'a\nb\t"q\\'


def test_float_and_int_literals():
    tokens, _ = tokenize("1.5 2 0.25")
    assert [(t.kind, t.value) for t in tokens[:-1]] == [
        ("FLOAT", 1.5), ("INT", 2), ("FLOAT", 0.25),
    ]


def test_level_source_lexes_clean(cryo):
    # the shipped level-1 component must tokenize with no diagnostics
    tokens, diagnostics = tokenize(cryo.cut_source)
    assert diagnostics == []
    assert len(tokens) > 1
