"""Source locations and diagnostics shared by the lexer, parser and resolver."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """Position of a construct in a source file (1-based line and column)."""

    file_id: str
    line: int
    column: int
    length: int = 0

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1 or self.length < 0:
            raise ValueError(f"invalid span {self.line}:{self.column}+{self.length}")

    def describe(self) -> str:
        return f"{self.file_id}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    """A compile-time problem. Errors prevent execution; warnings do not."""

    severity: str  # "error" | "warning"
    message: str
    span: SourceSpan

    def __post_init__(self) -> None:
        if self.severity not in ("error", "warning"):
            raise ValueError(f"bad severity {self.severity!r}")
        if not self.message:
            raise ValueError("diagnostic message must not be empty")

    def describe(self) -> str:
        return f"{self.span.describe()}: {self.severity}: {self.message}"


class CompileFailure(Exception):
    """Raised internally when lexing/parsing/resolution cannot continue."""

    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(d.describe() for d in diagnostics))
        self.diagnostics = diagnostics
