import re

from shipgame.syntax import executable_lines

from helpers import parse_cut, parse_test


def test_single_statement_function():
    program = parse_test("fn test_a() {\n    print(1);\n}")
    assert executable_lines(program) == (2,)


def test_empty_class_body():
    program = parse_cut("class A {\n    A() {\n    }\n}")
    assert executable_lines(program) == ()


def test_declaration_without_initializer_excluded():
    src = "fn test_a() {\n    int x;\n    x = 1;\n    int y = 2;\n}"
    program = parse_test(src)
    assert executable_lines(program) == (3, 4)


def test_field_declarations():
    src = (
        "class A {\n"
        "    int bare;\n"          # line 2: no initializer, excluded
        "    int seeded = 5;\n"    # line 3: initializer runs at construction
        "\n"
        "    A() {\n"
        "        bare = 1;\n"      # line 6
        "    }\n"
        "}"
    )
    program = parse_cut(src)
    assert executable_lines(program) == (3, 6)


def test_control_headers_count_once_per_line():
    src = (
        "fn test_a() {\n"
        "    int total = 0;\n"            # 2
        "    for (int i = 0; i < 3; i = i + 1) {\n"  # 3
        "        total = total + i;\n"    # 4
        "    }\n"
        "    while (total > 100) {\n"     # 6
        "        total = 0;\n"            # 7
        "    }\n"
        "}"
    )
    program = parse_test(src)
    assert executable_lines(program) == (2, 3, 4, 6, 7)


# --- independent textual oracle over the authored level-1 source -----------

_DECL_ONLY = re.compile(
    r"^\s*(int|float|bool|string|array<.*>|list<.*>|map<.*>)\s+\w+;\s*$"
)
_CONTROL = re.compile(r"^\s*(\}\s*)?(if|while|for|switch)\s*\(")
_SIGNATURE = re.compile(r"^\s*(class\s|\w[\w<>, ]*\s+\w+\s*\(|\w+\s*\([^;]*\)\s*\{)")


def textual_executable_lines(source: str) -> tuple[int, ...]:
    """Grep-style statement-line finder, independent of the parser: a line is
    executable if it ends a simple statement (';') and is not a bare
    declaration, or opens a control construct."""
    lines = []
    for i, line in enumerate(source.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("//"):
            continue
        if _CONTROL.match(line):
            lines.append(i)
            continue
        if stripped.endswith(";"):
            if _DECL_ONLY.match(line):
                continue
            if _SIGNATURE.match(line):
                continue
            lines.append(i)
    return tuple(lines)


def test_cryosleep_matches_textual_oracle(cryo, cryo_program):
    # derived: the parser's line table equals an independent text scan
    assert executable_lines(cryo_program) == textual_executable_lines(cryo.cut_source)


def test_executable_lines_subset_of_source_lines(pack):
    for spec in pack.levels:
        program = parse_cut(spec.cut_source)
        total = len(spec.cut_source.splitlines())
        for line in executable_lines(program):
            assert 1 <= line <= total
