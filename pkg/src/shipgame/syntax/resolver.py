"""Static name resolution for ShipLang.

ShipLang is dynamically typed; this pass only guarantees that every name
means something: identifiers bind to locals or fields, bare calls bind to
builtins, free functions or methods of the enclosing class, and `new` names
a known class. Method calls and field accesses through object expressions
are dynamic and deliberately unchecked.

Test programs may reference classes of the component under test; those are
passed in as ``externals``.
"""

from __future__ import annotations

from .builtins import ASSERTION_BUILTINS, BUILTIN_ARITY
from .nodes import (
    Assign, Binary, Block, Break, Call, ClassDecl, Expr, ExprStmt, FieldAccess,
    For, ForEach, FuncDecl, Ident, If, Index, IntLit, ListLit, MethodCall, New,
    Program, Return, Stmt, Switch, Throw, Try, TypeRef, Unary, VarDecl, While,
)
from .spans import Diagnostic, SourceSpan

_BUILTIN_TYPE_NAMES = frozenset({"int", "float", "bool", "string", "void", "array", "list", "map", "var"})


class _Scope:
    def __init__(self, parent: "_Scope | None" = None):
        self.parent = parent
        self.names: set[str] = set()

    def declare(self, name: str) -> bool:
        if self.lookup(name):
            return False
        self.names.add(name)
        return True

    def lookup(self, name: str) -> bool:
        scope: _Scope | None = self
        while scope is not None:
            if name in scope.names:
                return True
            scope = scope.parent
        return False


class Resolver:
    def __init__(self, program: Program, externals: dict[str, ClassDecl] | None = None):
        self.program = program
        self.externals = externals or {}
        self.diagnostics: list[Diagnostic] = []
        self.classes: dict[str, ClassDecl] = {}
        self.functions: dict[str, FuncDecl] = {}
        # per-body context
        self.current_class: ClassDecl | None = None
        self.fields_in_scope: set[str] = set()
        self.breakable_depth = 0
        self.in_void_body = False

    def fail(self, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(Diagnostic("error", message, span))

    # -- entry ---------------------------------------------------------

    def resolve(self) -> list[Diagnostic]:
        program = self.program
        if program.kind == "cut" and program.functions:
            self.fail("component code must contain only class declarations", program.functions[0].span)
        for cls in program.classes:
            if cls.name in _BUILTIN_TYPE_NAMES:
                self.fail(f"'{cls.name}' is a reserved type name", cls.span)
            elif cls.name in self.classes or cls.name in self.externals:
                self.fail(f"duplicate class '{cls.name}'", cls.span)
            else:
                self.classes[cls.name] = cls
        for fn in program.functions:
            if fn.name in BUILTIN_ARITY:
                self.fail(f"'{fn.name}' is a builtin and cannot be redefined", fn.span)
            elif fn.name in self.functions:
                self.fail(f"duplicate function '{fn.name}'", fn.span)
            else:
                self.functions[fn.name] = fn
        for cls in program.classes:
            self.resolve_class(cls)
        for fn in program.functions:
            if program.kind == "test" and fn.name.startswith("test_") and fn.params:
                self.fail("test function must take zero parameters", fn.span)
            self.resolve_callable(fn.params, fn.body, enclosing=None, is_void=False)
        return self.diagnostics

    # -- declarations ----------------------------------------------------

    def resolve_class(self, cls: ClassDecl) -> None:
        if len(cls.ctors) != 1:
            self.fail(f"class '{cls.name}' must declare exactly one constructor", cls.span)
        member_names: set[str] = set()
        for fdecl in cls.fields:
            if fdecl.name in member_names:
                self.fail(f"duplicate member '{fdecl.name}'", fdecl.span)
            member_names.add(fdecl.name)
            self.check_type(fdecl.type, fdecl.span)
            if fdecl.init is None and self.is_class_type(fdecl.type):
                self.fail(
                    f"field '{fdecl.name}' has a class type and needs an explicit initializer",
                    fdecl.span,
                )
        for method in cls.methods:
            if method.name in member_names:
                self.fail(f"duplicate member '{method.name}'", method.span)
            member_names.add(method.name)
            if method.name in BUILTIN_ARITY:
                self.fail(f"'{method.name}' is a builtin and cannot be redefined", method.span)
        self.current_class = cls
        self.fields_in_scope = {f.name for f in cls.fields}
        for fdecl in cls.fields:
            if fdecl.init is not None:
                self.resolve_expr(fdecl.init, _Scope())
        for ctor in cls.ctors:
            self.resolve_callable(ctor.params, ctor.body, enclosing=cls, is_void=True)
        for method in cls.methods:
            self.check_type(method.return_type, method.span)
            is_void = method.return_type == TypeRef("void")
            self.resolve_callable(method.params, method.body, enclosing=cls, is_void=is_void)
        self.current_class = None
        self.fields_in_scope = set()

    def resolve_callable(self, params, body: Block, enclosing: ClassDecl | None, is_void: bool) -> None:
        self.current_class = enclosing
        self.fields_in_scope = {f.name for f in enclosing.fields} if enclosing else set()
        self.in_void_body = is_void
        scope = _Scope()
        for param in params:
            self.check_type(param.type, param.span)
            if not scope.declare(param.name):
                self.fail(f"duplicate parameter '{param.name}'", param.span)
        self.resolve_block(body, _Scope(scope))
        self.current_class = None
        self.fields_in_scope = set()

    # -- types -----------------------------------------------------------

    def is_class_type(self, t: TypeRef) -> bool:
        return t.name not in _BUILTIN_TYPE_NAMES

    def check_type(self, t: TypeRef, span: SourceSpan) -> None:
        if self.is_class_type(t) and t.name not in self.classes and t.name not in self.externals:
            self.fail(f"unknown type '{t.name}'", span)
        for arg in t.args:
            self.check_type(arg, span)

    # -- statements --------------------------------------------------------

    def resolve_block(self, block: Block, scope: _Scope) -> None:
        for stmt in block.stmts:
            self.resolve_stmt(stmt, scope)

    def resolve_stmt(self, stmt: Stmt, scope: _Scope) -> None:
        if isinstance(stmt, VarDecl):
            self.check_type(stmt.type, stmt.span)
            if stmt.init is not None:
                self.resolve_expr(stmt.init, scope)
            if not scope.declare(stmt.name):
                self.fail(f"'{stmt.name}' is already declared", stmt.span)
        elif isinstance(stmt, Assign):
            self.resolve_expr(stmt.target, scope)
            self.resolve_expr(stmt.value, scope)
        elif isinstance(stmt, ExprStmt):
            self.resolve_expr(stmt.expr, scope)
        elif isinstance(stmt, If):
            self.resolve_expr(stmt.cond, scope)
            self.resolve_block(stmt.then, _Scope(scope))
            if isinstance(stmt.orelse, Block):
                self.resolve_block(stmt.orelse, _Scope(scope))
            elif isinstance(stmt.orelse, If):
                self.resolve_stmt(stmt.orelse, scope)
        elif isinstance(stmt, While):
            self.resolve_expr(stmt.cond, scope)
            self.breakable_depth += 1
            self.resolve_block(stmt.body, _Scope(scope))
            self.breakable_depth -= 1
        elif isinstance(stmt, For):
            header = _Scope(scope)
            if stmt.init is not None:
                self.resolve_stmt(stmt.init, header)
            if stmt.cond is not None:
                self.resolve_expr(stmt.cond, header)
            if stmt.step is not None:
                self.resolve_stmt(stmt.step, header)
            self.breakable_depth += 1
            self.resolve_block(stmt.body, _Scope(header))
            self.breakable_depth -= 1
        elif isinstance(stmt, ForEach):
            if stmt.var_type != TypeRef("var"):
                self.check_type(stmt.var_type, stmt.span)
            self.resolve_expr(stmt.iterable, scope)
            body_scope = _Scope(scope)
            if not body_scope.declare(stmt.var_name):
                self.fail(f"'{stmt.var_name}' is already declared", stmt.span)
            self.breakable_depth += 1
            self.resolve_block(stmt.body, body_scope)
            self.breakable_depth -= 1
        elif isinstance(stmt, Switch):
            self.resolve_expr(stmt.subject, scope)
            self.breakable_depth += 1
            seen_labels: list[object] = []
            for arm in stmt.cases:
                label = self.literal_value(arm.value)
                if any(type(label) is type(x) and label == x for x in seen_labels):
                    self.fail("duplicate case label", arm.span)
                seen_labels.append(label)
                self.resolve_block(arm.body, _Scope(scope))
            if stmt.default is not None:
                self.resolve_block(stmt.default, _Scope(scope))
            self.breakable_depth -= 1
        elif isinstance(stmt, Return):
            if stmt.value is not None:
                if self.in_void_body:
                    self.fail("cannot return a value here", stmt.span)
                self.resolve_expr(stmt.value, scope)
        elif isinstance(stmt, Throw):
            self.resolve_expr(stmt.value, scope)
        elif isinstance(stmt, Try):
            self.resolve_block(stmt.body, _Scope(scope))
            catch_scope = _Scope(scope)
            if not catch_scope.declare(stmt.catch_name):
                self.fail(f"'{stmt.catch_name}' is already declared", stmt.span)
            self.resolve_block(stmt.catch_body, catch_scope)
        elif isinstance(stmt, Break):
            if self.breakable_depth == 0:
                self.fail("'break' outside a loop or switch", stmt.span)
        else:  # pragma: no cover - parser produces no other statements
            raise AssertionError(f"unhandled statement {type(stmt).__name__}")

    @staticmethod
    def literal_value(expr: Expr) -> object:
        if isinstance(expr, Unary) and isinstance(expr.operand, IntLit):
            return -expr.operand.value
        return getattr(expr, "value", None)

    # -- expressions ---------------------------------------------------------

    def resolve_expr(self, expr: Expr, scope: _Scope) -> None:
        if isinstance(expr, Ident):
            if scope.lookup(expr.name):
                expr.binding = "local"
            elif expr.name in self.fields_in_scope:
                expr.binding = "field"
            elif expr.name in self.functions or expr.name in BUILTIN_ARITY:
                self.fail(f"'{expr.name}' is a function, not a value", expr.span)
            elif expr.name in self.classes or expr.name in self.externals:
                self.fail(f"'{expr.name}' is a class, not a value", expr.span)
            else:
                self.fail(f"unknown name '{expr.name}'", expr.span)
        elif isinstance(expr, Call):
            for arg in expr.args:
                self.resolve_expr(arg, scope)
            self.resolve_call(expr)
        elif isinstance(expr, MethodCall):
            self.resolve_expr(expr.obj, scope)
            for arg in expr.args:
                self.resolve_expr(arg, scope)
        elif isinstance(expr, FieldAccess):
            self.resolve_expr(expr.obj, scope)
        elif isinstance(expr, Index):
            self.resolve_expr(expr.obj, scope)
            self.resolve_expr(expr.index, scope)
        elif isinstance(expr, Binary):
            self.resolve_expr(expr.left, scope)
            self.resolve_expr(expr.right, scope)
        elif isinstance(expr, Unary):
            self.resolve_expr(expr.operand, scope)
        elif isinstance(expr, ListLit):
            for item in expr.items:
                self.resolve_expr(item, scope)
        elif isinstance(expr, New):
            self.resolve_new(expr, scope)

    def resolve_call(self, call: Call) -> None:
        name = call.name
        if name in BUILTIN_ARITY:
            if self.program.kind == "cut" and name in ASSERTION_BUILTINS:
                self.fail(f"assertion '{name}' is not allowed in component code", call.span)
            if len(call.args) != BUILTIN_ARITY[name]:
                self.fail(
                    f"'{name}' takes {BUILTIN_ARITY[name]} argument(s), got {len(call.args)}",
                    call.span,
                )
            call.target = "builtin"
            return
        if name in self.functions:
            expected = len(self.functions[name].params)
            if len(call.args) != expected:
                self.fail(f"'{name}' takes {expected} argument(s), got {len(call.args)}", call.span)
            call.target = "function"
            return
        if self.current_class is not None:
            method = self.current_class.method(name)
            if method is not None:
                if len(call.args) != len(method.params):
                    self.fail(
                        f"'{name}' takes {len(method.params)} argument(s), got {len(call.args)}",
                        call.span,
                    )
                call.target = "self-method"
                return
        self.fail(f"unknown function '{name}'", call.span)

    def resolve_new(self, expr: New, scope: _Scope) -> None:
        for arg in expr.args:
            self.resolve_expr(arg, scope)
        t = expr.type
        if t.name == "array":
            if len(expr.args) != 1:
                self.fail("new array<T>(length) takes exactly one argument", expr.span)
            if self.is_class_type(t.args[0]):
                self.fail("array elements must have a zero value; class types do not", expr.span)
            return
        if t.name in ("list", "map"):
            if expr.args:
                self.fail(f"new {t.name}<...>() takes no arguments", expr.span)
            return
        cls = self.classes.get(t.name) or self.externals.get(t.name)
        if cls is None:
            self.fail(f"unknown class '{t.name}'", expr.span)
            return
        expected = len(cls.ctor.params) if cls.ctors else 0
        if len(expr.args) != expected:
            self.fail(
                f"constructor of '{t.name}' takes {expected} argument(s), got {len(expr.args)}",
                expr.span,
            )


def resolve_program(program: Program, externals: dict[str, ClassDecl] | None = None) -> list[Diagnostic]:
    """Resolve names in ``program``, annotating the tree. Returns diagnostics."""
    return Resolver(program, externals).resolve()
