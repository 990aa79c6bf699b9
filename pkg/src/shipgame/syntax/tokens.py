"""Token kinds for the ShipLang lexer."""

from __future__ import annotations

from dataclasses import dataclass

from .spans import SourceSpan

# Single-kind-per-lexeme keeps the parser's lookahead trivial.
IDENT = "IDENT"
INT = "INT"
FLOAT = "FLOAT"
STRING = "STRING"
KEYWORD = "KEYWORD"
PUNCT = "PUNCT"
EOF = "EOF"

KEYWORDS = frozenset(
    {
        "class", "fn", "new", "if", "else", "while", "for", "switch", "case",
        "default", "break", "return", "throw", "try", "catch", "true", "false",
        "int", "float", "bool", "string", "void", "array", "list", "map",
    }
)

# Longest-first so the lexer can match greedily.
PUNCTUATION = (
    "<=", ">=", "==", "!=", "&&", "||",
    "{", "}", "(", ")", "[", "]", "<", ">", ";", ":", ",", ".",
    "=", "+", "-", "*", "/", "%", "!",
)

TYPE_KEYWORDS = frozenset({"int", "float", "bool", "string", "void", "array", "list", "map"})


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan
    value: object = None  # parsed literal payload for INT/FLOAT/STRING

    def is_punct(self, text: str) -> bool:
        return self.kind == PUNCT and self.text == text

    def is_keyword(self, text: str) -> bool:
        return self.kind == KEYWORD and self.text == text
