"""AST node types and the resolved Program container.

Node equality is structural: spans and resolver annotations are excluded
from comparison so that a parse -> pretty-print -> parse round trip yields
an equal tree.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .spans import SourceSpan

_SPAN = dict(compare=False, repr=False)


@dataclass(frozen=True)
class TypeRef:
    """A syntactic type: builtin name, container with element types, or class name."""

    name: str
    args: tuple["TypeRef", ...] = ()

    def render(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}<{', '.join(a.render() for a in self.args)}>"


# --- expressions -----------------------------------------------------------


@dataclass
class Expr:
    pass


@dataclass
class IntLit(Expr):
    value: int
    span: SourceSpan = field(**_SPAN)


@dataclass
class FloatLit(Expr):
    value: float
    span: SourceSpan = field(**_SPAN)


@dataclass
class BoolLit(Expr):
    value: bool
    span: SourceSpan = field(**_SPAN)


@dataclass
class StringLit(Expr):
    value: str
    span: SourceSpan = field(**_SPAN)


@dataclass
class ListLit(Expr):
    items: list[Expr]
    span: SourceSpan = field(**_SPAN)


@dataclass
class Ident(Expr):
    name: str
    span: SourceSpan = field(**_SPAN)
    # set by the resolver: "local" | "field"
    binding: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class Unary(Expr):
    op: str  # "-" | "!"
    operand: Expr
    span: SourceSpan = field(**_SPAN)


@dataclass
class Binary(Expr):
    op: str  # arithmetic, comparison, logic
    left: Expr
    right: Expr
    span: SourceSpan = field(**_SPAN)


@dataclass
class Index(Expr):
    obj: Expr
    index: Expr
    span: SourceSpan = field(**_SPAN)


@dataclass
class FieldAccess(Expr):
    obj: Expr
    name: str
    span: SourceSpan = field(**_SPAN)


@dataclass
class MethodCall(Expr):
    obj: Expr
    name: str
    args: list[Expr]
    span: SourceSpan = field(**_SPAN)


@dataclass
class Call(Expr):
    """Bare call: builtin, free function, or implicit method on the enclosing class."""

    name: str
    args: list[Expr]
    span: SourceSpan = field(**_SPAN)
    # set by the resolver: "builtin" | "function" | "self-method"
    target: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class New(Expr):
    type: TypeRef
    args: list[Expr]
    span: SourceSpan = field(**_SPAN)


# --- statements ------------------------------------------------------------


@dataclass
class Stmt:
    pass


@dataclass
class Block:
    stmts: list[Stmt]
    span: SourceSpan = field(**_SPAN)


@dataclass
class VarDecl(Stmt):
    type: TypeRef
    name: str
    init: Optional[Expr]
    span: SourceSpan = field(**_SPAN)


@dataclass
class Assign(Stmt):
    target: Expr  # Ident | FieldAccess | Index
    value: Expr
    span: SourceSpan = field(**_SPAN)


@dataclass
class ExprStmt(Stmt):
    expr: Expr
    span: SourceSpan = field(**_SPAN)


@dataclass
class If(Stmt):
    cond: Expr
    then: Block
    orelse: Union[Block, "If", None]
    span: SourceSpan = field(**_SPAN)


@dataclass
class While(Stmt):
    cond: Expr
    body: Block
    span: SourceSpan = field(**_SPAN)


@dataclass
class For(Stmt):
    init: Optional[Stmt]  # VarDecl or Assign
    cond: Optional[Expr]
    step: Optional[Stmt]  # Assign or ExprStmt
    body: Block
    span: SourceSpan = field(**_SPAN)


@dataclass
class ForEach(Stmt):
    var_type: TypeRef
    var_name: str
    iterable: Expr
    body: Block
    span: SourceSpan = field(**_SPAN)


@dataclass
class CaseArm:
    value: Expr  # literal (possibly negated int)
    body: Block
    span: SourceSpan = field(**_SPAN)


@dataclass
class Switch(Stmt):
    subject: Expr
    cases: list[CaseArm]
    default: Optional[Block]
    span: SourceSpan = field(**_SPAN)


@dataclass
class Return(Stmt):
    value: Optional[Expr]
    span: SourceSpan = field(**_SPAN)


@dataclass
class Throw(Stmt):
    value: Expr
    span: SourceSpan = field(**_SPAN)


@dataclass
class Try(Stmt):
    body: Block
    catch_name: str
    catch_body: Block
    span: SourceSpan = field(**_SPAN)


@dataclass
class Break(Stmt):
    span: SourceSpan = field(**_SPAN)


# --- declarations ----------------------------------------------------------


@dataclass
class Param:
    type: TypeRef
    name: str
    span: SourceSpan = field(**_SPAN)


@dataclass
class FieldDecl:
    type: TypeRef
    name: str
    init: Optional[Expr]
    span: SourceSpan = field(**_SPAN)


@dataclass
class CtorDecl:
    name: str
    params: list[Param]
    body: Block
    span: SourceSpan = field(**_SPAN)


@dataclass
class MethodDecl:
    return_type: TypeRef
    name: str
    params: list[Param]
    body: Block
    span: SourceSpan = field(**_SPAN)


@dataclass
class ClassDecl:
    name: str
    fields: list[FieldDecl]
    ctors: list[CtorDecl]
    methods: list[MethodDecl]
    span: SourceSpan = field(**_SPAN)

    @property
    def ctor(self) -> CtorDecl:
        return self.ctors[0]

    def method(self, name: str) -> Optional[MethodDecl]:
        for m in self.methods:
            if m.name == name:
                return m
        return None


@dataclass
class FuncDecl:
    name: str
    params: list[Param]
    body: Block
    span: SourceSpan = field(**_SPAN)


@dataclass
class Program:
    """A resolved compilation unit plus its source text and line table."""

    file_id: str
    kind: str  # "cut" | "test"
    source: str
    classes: list[ClassDecl]
    functions: list[FuncDecl]

    def class_named(self, name: str) -> Optional[ClassDecl]:
        for c in self.classes:
            if c.name == name:
                return c
        return None

    def function_named(self, name: str) -> Optional[FuncDecl]:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def test_functions(self) -> list[FuncDecl]:
        return [f for f in self.functions if f.name.startswith("test_")]


# --- generic tree walking ---------------------------------------------------

_NODE_TYPES = (
    Expr, Stmt, Block, CaseArm, Param, FieldDecl, CtorDecl, MethodDecl, ClassDecl, FuncDecl,
)


def iter_children(node: object) -> Iterator[object]:
    """Yield direct child AST nodes of ``node`` in source order."""
    for f in dataclasses.fields(node):  # type: ignore[arg-type]
        value = getattr(node, f.name)
        if isinstance(value, _NODE_TYPES):
            yield value
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, _NODE_TYPES):
                    yield item


def walk(node: object) -> Iterator[object]:
    """Yield ``node`` and all descendants, depth first, in source order."""
    yield node
    for child in iter_children(node):
        yield from walk(child)


def function_bodies(program: Program) -> list[tuple[Optional[str], str, Block]]:
    """All executable bodies as (class name or None, function name, body)."""
    out: list[tuple[Optional[str], str, Block]] = []
    for cls in program.classes:
        for ctor in cls.ctors:
            out.append((cls.name, ctor.name, ctor.body))
        for method in cls.methods:
            out.append((cls.name, method.name, method.body))
    for fn in program.functions:
        out.append((None, fn.name, fn.body))
    return out


def executable_lines(program: Program) -> tuple[int, ...]:
    """Ordered line numbers that contain at least one executable statement.

    Field declarations count only when they have an initializer (the
    initializer runs at construction); likewise local declarations without
    an initializer are skipped.
    """
    lines: set[int] = set()

    def add_stmt(stmt: Stmt) -> None:
        if isinstance(stmt, VarDecl) and stmt.init is None:
            pass
        else:
            lines.add(stmt.span.line)
        for child in iter_children(stmt):
            if isinstance(child, Stmt):
                add_stmt(child)
            elif isinstance(child, (Block, CaseArm)):
                add_block(child)

    def add_block(block) -> None:
        inner = block.stmts if isinstance(block, Block) else block.body.stmts
        for stmt in inner:
            add_stmt(stmt)

    for cls in program.classes:
        for fdecl in cls.fields:
            if fdecl.init is not None:
                lines.add(fdecl.span.line)
        for ctor in cls.ctors:
            add_block(ctor.body)
        for method in cls.methods:
            add_block(method.body)
    for fn in program.functions:
        add_block(fn.body)
    return tuple(sorted(lines))
