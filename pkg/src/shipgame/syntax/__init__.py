"""ShipLang front end: lexer, parser, resolver and canonical printer."""

from __future__ import annotations

from .builtins import ASSERTION_BUILTINS, BUILTIN_ARITY
from .lexer import tokenize
from .nodes import (
    Assign, Binary, Block, BoolLit, Break, Call, CaseArm, ClassDecl, CtorDecl,
    Expr, ExprStmt, FieldAccess, FieldDecl, FloatLit, For, ForEach, FuncDecl,
    Ident, If, Index, IntLit, ListLit, MethodCall, MethodDecl, New, Param,
    Program, Return, Stmt, StringLit, Switch, Throw, Try, TypeRef, Unary,
    VarDecl, While, executable_lines, function_bodies, iter_children, walk,
)
from .parser import parse_source
from .printer import pretty_print, render_expr
from .resolver import resolve_program
from .spans import CompileFailure, Diagnostic, SourceSpan

__all__ = [
    "ASSERTION_BUILTINS", "BUILTIN_ARITY", "CompileFailure", "Diagnostic",
    "Program", "SourceSpan", "executable_lines", "function_bodies",
    "iter_children", "parse_program", "parse_source", "pretty_print",
    "render_expr", "resolve_program", "tokenize", "try_parse_program", "walk",
    # node types
    "Assign", "Binary", "Block", "BoolLit", "Break", "Call", "CaseArm",
    "ClassDecl", "CtorDecl", "Expr", "ExprStmt", "FieldAccess", "FieldDecl",
    "FloatLit", "For", "ForEach", "FuncDecl", "Ident", "If", "Index", "IntLit",
    "ListLit", "MethodCall", "MethodDecl", "New", "Param", "Return", "Stmt",
    "StringLit", "Switch", "Throw", "Try", "TypeRef", "Unary", "VarDecl", "While",
]


def parse_program(
    source: str,
    kind: str,
    file_id: str | None = None,
    externals: dict[str, ClassDecl] | None = None,
) -> Program:
    """Parse and resolve a compilation unit.

    ``kind`` is "cut" for component code (classes only, no assertions) or
    "test" (free functions; ``test_*`` functions must take no parameters).
    Raises :class:`CompileFailure` with all collected diagnostics on error.
    """
    program = parse_source(source, kind, file_id)
    diagnostics = resolve_program(program, externals)
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        raise CompileFailure(errors)
    return program


def try_parse_program(
    source: str,
    kind: str,
    file_id: str | None = None,
    externals: dict[str, ClassDecl] | None = None,
) -> tuple[Program | None, list[Diagnostic]]:
    """Like :func:`parse_program` but returns diagnostics instead of raising."""
    try:
        return parse_program(source, kind, file_id, externals), []
    except CompileFailure as failure:
        return None, failure.diagnostics
