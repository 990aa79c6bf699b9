"""Hand-written lexer for ShipLang source text.

Comments (// to end of line) and whitespace are discarded; every token
carries a span. Lexical errors are reported as diagnostics, not exceptions,
so a broken buffer still produces a "compile error" game outcome.
"""

from __future__ import annotations

from .spans import Diagnostic, SourceSpan
from .tokens import EOF, FLOAT, IDENT, INT, KEYWORD, KEYWORDS, PUNCT, PUNCTUATION, STRING, Token

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


def tokenize(source: str, file_id: str = "source.ship") -> tuple[list[Token], list[Diagnostic]]:
    """Scan ``source`` into tokens. Returns (tokens, diagnostics).

    The token list always ends with an EOF token; on error the diagnostics
    list is non-empty and the tokens produced so far are still returned.
    """
    tokens: list[Token] = []
    diagnostics: list[Diagnostic] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def span(length: int, at_line: int | None = None, at_col: int | None = None) -> SourceSpan:
        return SourceSpan(file_id, at_line if at_line else line, at_col if at_col else col, length)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                i += 1
                col += 1
            continue
        if ch.isalpha() or ch == "_":
            start = i
            start_col = col
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
                col += 1
            text = source[start:i]
            kind = KEYWORD if text in KEYWORDS else IDENT
            tokens.append(Token(kind, text, span(len(text), line, start_col)))
            continue
        if ch.isdigit():
            start = i
            start_col = col
            while i < n and source[i].isdigit():
                i += 1
                col += 1
            is_float = False
            if i < n and source[i] == "." and i + 1 < n and source[i + 1].isdigit():
                is_float = True
                i += 1
                col += 1
                while i < n and source[i].isdigit():
                    i += 1
                    col += 1
            text = source[start:i]
            if is_float:
                tokens.append(Token(FLOAT, text, span(len(text), line, start_col), float(text)))
            else:
                tokens.append(Token(INT, text, span(len(text), line, start_col), int(text)))
            continue
        if ch == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            parts: list[str] = []
            closed = False
            while i < n:
                c = source[i]
                if c == '"':
                    i += 1
                    col += 1
                    closed = True
                    break
                if c == "\n":
                    break
                if c == "\\":
                    if i + 1 < n and source[i + 1] in _ESCAPES:
                        parts.append(_ESCAPES[source[i + 1]])
                        i += 2
                        col += 2
                        continue
                    diagnostics.append(
                        Diagnostic("error", f"unknown escape sequence \\{source[i + 1] if i + 1 < n else ''}",
                                   span(2, line, col))
                    )
                    i += 2
                    col += 2
                    continue
                parts.append(c)
                i += 1
                col += 1
            if not closed:
                diagnostics.append(
                    Diagnostic("error", "unterminated string", SourceSpan(file_id, start_line, start_col, col - start_col))
                )
            else:
                text = "".join(parts)
                tokens.append(
                    Token(STRING, text, SourceSpan(file_id, start_line, start_col, col - start_col), text)
                )
            continue
        for punct in PUNCTUATION:
            if source.startswith(punct, i):
                tokens.append(Token(PUNCT, punct, span(len(punct))))
                i += len(punct)
                col += len(punct)
                break
        else:
            diagnostics.append(Diagnostic("error", f"illegal character {ch!r}", span(1)))
            i += 1
            col += 1

    tokens.append(Token(EOF, "", SourceSpan(file_id, line, max(col, 1), 0)))
    return tokens, diagnostics
