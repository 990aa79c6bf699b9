"""Canonical source renderer for ShipLang trees.

Printing a parsed program and re-parsing it yields a structurally identical
tree; level sources are authored in exactly this style so a mutated program
renders with a minimal textual diff against the reference code.
"""

from __future__ import annotations

from .nodes import (
    Assign, Binary, Block, BoolLit, Break, Call, ClassDecl, Expr, ExprStmt,
    FieldAccess, FloatLit, For, ForEach, FuncDecl, Ident, If, Index, IntLit,
    ListLit, MethodCall, New, Program, Return, Stmt, StringLit, Switch, Throw,
    Try, TypeRef, Unary, VarDecl, While,
)

_PRECEDENCE = {
    "||": 1, "&&": 2, "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5, "*": 6, "/": 6, "%": 6,
}
_UNARY_PREC = 7
_POSTFIX_PREC = 8

_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}


def _escape(text: str) -> str:
    return "".join(_STRING_ESCAPES.get(ch, ch) for ch in text)


def _float_text(value: float) -> str:
    text = repr(value)
    if "e" in text or "E" in text or "inf" in text or "nan" in text:
        text = format(value, ".17f")
    if "." not in text:
        text += ".0"
    return text


def _prec(expr: Expr) -> int:
    if isinstance(expr, Binary):
        return _PRECEDENCE[expr.op]
    if isinstance(expr, Unary):
        return _UNARY_PREC
    return _POSTFIX_PREC


def render_expr(expr: Expr) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, FloatLit):
        return _float_text(expr.value)
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, StringLit):
        return f'"{_escape(expr.value)}"'
    if isinstance(expr, Ident):
        return expr.name
    if isinstance(expr, ListLit):
        return "[" + ", ".join(render_expr(e) for e in expr.items) + "]"
    if isinstance(expr, Unary):
        operand = render_expr(expr.operand)
        if _prec(expr.operand) < _UNARY_PREC:
            operand = f"({operand})"
        return f"{expr.op}{operand}"
    if isinstance(expr, Binary):
        prec = _PRECEDENCE[expr.op]
        left = render_expr(expr.left)
        if _prec(expr.left) < prec:
            left = f"({left})"
        right = render_expr(expr.right)
        if _prec(expr.right) <= prec:
            right = f"({right})"
        return f"{left} {expr.op} {right}"
    if isinstance(expr, Index):
        obj = render_expr(expr.obj)
        if _prec(expr.obj) < _POSTFIX_PREC:
            obj = f"({obj})"
        return f"{obj}[{render_expr(expr.index)}]"
    if isinstance(expr, FieldAccess):
        obj = render_expr(expr.obj)
        if _prec(expr.obj) < _POSTFIX_PREC:
            obj = f"({obj})"
        return f"{obj}.{expr.name}"
    if isinstance(expr, MethodCall):
        obj = render_expr(expr.obj)
        if _prec(expr.obj) < _POSTFIX_PREC:
            obj = f"({obj})"
        return f"{obj}.{expr.name}({', '.join(render_expr(a) for a in expr.args)})"
    if isinstance(expr, Call):
        return f"{expr.name}({', '.join(render_expr(a) for a in expr.args)})"
    if isinstance(expr, New):
        return f"new {expr.type.render()}({', '.join(render_expr(a) for a in expr.args)})"
    raise AssertionError(f"unhandled expression {type(expr).__name__}")


class _Printer:
    def __init__(self) -> None:
        self.lines: list[str] = []
        self.indent = 0

    def emit(self, text: str) -> None:
        self.lines.append("    " * self.indent + text if text else "")

    def stmt(self, node: Stmt) -> None:
        if isinstance(node, VarDecl):
            if node.init is None:
                self.emit(f"{node.type.render()} {node.name};")
            else:
                self.emit(f"{node.type.render()} {node.name} = {render_expr(node.init)};")
        elif isinstance(node, Assign):
            self.emit(f"{render_expr(node.target)} = {render_expr(node.value)};")
        elif isinstance(node, ExprStmt):
            self.emit(f"{render_expr(node.expr)};")
        elif isinstance(node, If):
            self._if_chain(node)
        elif isinstance(node, While):
            self.emit(f"while ({render_expr(node.cond)}) {{")
            self.body(node.body)
            self.emit("}")
        elif isinstance(node, For):
            init = self._header_stmt(node.init)
            cond = render_expr(node.cond) if node.cond is not None else ""
            step = self._header_stmt(node.step)
            self.emit(f"for ({init}; {cond}; {step}) {{")
            self.body(node.body)
            self.emit("}")
        elif isinstance(node, ForEach):
            prefix = "" if node.var_type == TypeRef("var") else f"{node.var_type.render()} "
            self.emit(f"for ({prefix}{node.var_name} : {render_expr(node.iterable)}) {{")
            self.body(node.body)
            self.emit("}")
        elif isinstance(node, Switch):
            self.emit(f"switch ({render_expr(node.subject)}) {{")
            self.indent += 1
            for arm in node.cases:
                self.emit(f"case {render_expr(arm.value)}:")
                self.body(arm.body)
            if node.default is not None:
                self.emit("default:")
                self.body(node.default)
            self.indent -= 1
            self.emit("}")
        elif isinstance(node, Return):
            if node.value is None:
                self.emit("return;")
            else:
                self.emit(f"return {render_expr(node.value)};")
        elif isinstance(node, Throw):
            self.emit(f"throw {render_expr(node.value)};")
        elif isinstance(node, Try):
            self.emit("try {")
            self.body(node.body)
            self.emit(f"}} catch ({node.catch_name}) {{")
            self.body(node.catch_body)
            self.emit("}")
        elif isinstance(node, Break):
            self.emit("break;")
        else:  # pragma: no cover
            raise AssertionError(f"unhandled statement {type(node).__name__}")

    def _header_stmt(self, node: Stmt | None) -> str:
        if node is None:
            return ""
        if isinstance(node, VarDecl):
            if node.init is None:
                return f"{node.type.render()} {node.name}"
            return f"{node.type.render()} {node.name} = {render_expr(node.init)}"
        if isinstance(node, Assign):
            return f"{render_expr(node.target)} = {render_expr(node.value)}"
        if isinstance(node, ExprStmt):
            return render_expr(node.expr)
        raise AssertionError(f"unhandled loop header {type(node).__name__}")

    def _if_chain(self, node: If) -> None:
        self.emit(f"if ({render_expr(node.cond)}) {{")
        self.body(node.then)
        current = node.orelse
        while isinstance(current, If):
            self.emit(f"}} else if ({render_expr(current.cond)}) {{")
            self.body(current.then)
            current = current.orelse
        if isinstance(current, Block):
            self.emit("} else {")
            self.body(current)
        self.emit("}")

    def body(self, block: Block) -> None:
        self.indent += 1
        for stmt in block.stmts:
            self.stmt(stmt)
        self.indent -= 1

    def params(self, params) -> str:
        return ", ".join(f"{p.type.render()} {p.name}" for p in params)

    def class_decl(self, cls: ClassDecl) -> None:
        self.emit(f"class {cls.name} {{")
        self.indent += 1
        printed_any = False
        for fdecl in cls.fields:
            if fdecl.init is None:
                self.emit(f"{fdecl.type.render()} {fdecl.name};")
            else:
                self.emit(f"{fdecl.type.render()} {fdecl.name} = {render_expr(fdecl.init)};")
            printed_any = True
        for ctor in cls.ctors:
            if printed_any:
                self.emit("")
            self.emit(f"{ctor.name}({self.params(ctor.params)}) {{")
            self.body(ctor.body)
            self.emit("}")
            printed_any = True
        for method in cls.methods:
            if printed_any:
                self.emit("")
            self.emit(f"{method.return_type.render()} {method.name}({self.params(method.params)}) {{")
            self.body(method.body)
            self.emit("}")
            printed_any = True
        self.indent -= 1
        self.emit("}")

    def fn_decl(self, fn: FuncDecl) -> None:
        self.emit(f"fn {fn.name}({self.params(fn.params)}) {{")
        self.body(fn.body)
        self.emit("}")


def pretty_print(program: Program) -> str:
    printer = _Printer()
    first = True
    for cls in program.classes:
        if not first:
            printer.emit("")
        printer.class_decl(cls)
        first = False
    for fn in program.functions:
        if not first:
            printer.emit("")
        printer.fn_decl(fn)
        first = False
    return "\n".join(printer.lines) + ("\n" if printer.lines else "")
