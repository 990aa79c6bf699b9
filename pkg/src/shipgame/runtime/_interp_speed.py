"""Tree-walking ShipLang interpreter with step budget, wall clock and coverage.

This module is the hot kernel: `setup.py build_ext --inplace` compiles a copy
of it (shipgame.runtime._interp_speed) with Cython, and shipgame.runtime
picks whichever is available at import. Keep it free of features Cython's
pure-Python mode cannot compile.

Semantics notes:
- a "step" is one statement evaluation; loop headers count once per
  iteration, so `while (true) { }` exhausts the budget;
- coverage hits are recorded only for lines of the component file;
- runtime faults (division by zero, bad index, missing key, type misuse,
  call-depth overflow) are the built-in exception and can be caught by
  try/catch; assertion failures and budget exhaustion cannot.
"""

from __future__ import annotations

import math
import sys
import time

from ..syntax.nodes import (
    Assign, Binary, Block, BoolLit, Break, Call, ClassDecl, Expr, ExprStmt,
    FieldAccess, FloatLit, For, ForEach, Ident, If, Index, IntLit, ListLit,
    MethodCall, New, Program, Return, StringLit, Switch, Throw, Try, TypeRef,
    Unary, VarDecl, While,
)
from .values import (
    ASSERTION_FAILURE, BUDGET_EXHAUSTED, COMPLETED, RUNTIME_ERROR, VOID, Budget,
    ExecutionResult, ShipArray, ShipList, ShipMap, ShipObject, StackFrame,
    is_number, render, ship_equals, type_name, wrap_int,
)

MAX_CALL_DEPTH = 100
_TIME_CHECK_INTERVAL = 64

# Deep ShipLang recursion rides on host recursion; leave generous headroom.
if sys.getrecursionlimit() < 6000:
    sys.setrecursionlimit(6000)


class ShipFault(Exception):
    """The built-in ShipLang exception (thrown values and runtime faults)."""

    def __init__(self, message: str, stack: tuple = ()):
        super().__init__(message)
        self.message = message
        self.stack = stack


class AssertFail(Exception):
    def __init__(self, message: str, stack: tuple = ()):
        super().__init__(message)
        self.message = message
        self.stack = stack


class BudgetExceeded(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class _BreakSignal(Exception):
    pass


class _ReturnSignal(Exception):
    def __init__(self, value):
        self.value = value


_UNSET = object()


class _Ctx:
    __slots__ = (
        "classes", "functions", "cover_file", "max_steps", "steps", "deadline",
        "cancel", "output", "hits", "stack", "depth", "tick",
    )

    def __init__(self, classes, functions, cover_file, budget: Budget, cancel):
        self.classes = classes
        self.functions = functions
        self.cover_file = cover_file
        self.max_steps = budget.max_steps
        self.steps = 0
        self.deadline = time.monotonic() + budget.max_wall_ms / 1000.0
        self.cancel = cancel
        self.output = []
        self.hits = {}
        self.stack = []  # list of [function name, current line]
        self.depth = 0
        self.tick = 0

    def snapshot_stack(self) -> tuple:
        return tuple(StackFrame(name, line) for name, line in reversed(self.stack))

    def fault(self, message: str) -> ShipFault:
        return ShipFault(message, self.snapshot_stack())


def _charge(ctx: _Ctx, span) -> None:
    """Account one statement step and record a coverage hit."""
    if ctx.steps >= ctx.max_steps:
        raise BudgetExceeded("step")
    ctx.steps += 1
    ctx.tick += 1
    if ctx.tick >= _TIME_CHECK_INTERVAL:
        ctx.tick = 0
        if time.monotonic() > ctx.deadline:
            raise BudgetExceeded("time")
        if ctx.cancel is not None and ctx.cancel.is_set():
            raise BudgetExceeded("cancel")
    if ctx.stack:
        ctx.stack[-1][1] = span.line
    if span.file_id == ctx.cover_file:
        line = span.line
        hits = ctx.hits
        hits[line] = hits.get(line, 0) + 1


# --- values ------------------------------------------------------------


def _zero_value(t: TypeRef, ctx: _Ctx):
    name = t.name
    if name == "int":
        return 0
    if name == "float":
        return 0.0
    if name == "bool":
        return False
    if name == "string":
        return ""
    if name == "list":
        return ShipList([])
    if name == "map":
        return ShipMap({})
    if name == "array":
        return ShipArray([])
    raise ctx.fault(f"type '{name}' has no default value")


def _as_bool(value, ctx: _Ctx, what: str):
    if value is True or value is False:
        return value
    raise ctx.fault(f"{what} must be a bool, got {type_name(value)}")


def _trunc_div(a: int, b: int) -> int:
    q = a // b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q += 1
    return q


# --- expression evaluation ----------------------------------------------


def _eval_value(expr: Expr, env: dict, self_obj, ctx: _Ctx):
    value = _eval(expr, env, ctx, self_obj)
    if value is VOID:
        raise ctx.fault("cannot use the result of a void call as a value")
    return value


def _eval(expr: Expr, env: dict, ctx: _Ctx, self_obj):
    kind = type(expr)
    if kind is IntLit or kind is FloatLit or kind is StringLit:
        return expr.value
    if kind is BoolLit:
        return expr.value
    if kind is Ident:
        if expr.binding == "field":
            value = self_obj.fields[expr.name]
            if value is _UNSET:
                raise ctx.fault(f"field '{expr.name}' read before initialization")
            return value
        value = env[expr.name]
        if value is _UNSET:
            raise ctx.fault(f"variable '{expr.name}' used before assignment")
        return value
    if kind is Binary:
        return _eval_binary(expr, env, ctx, self_obj)
    if kind is Unary:
        operand = _eval_value(expr.operand, env, self_obj, ctx)
        if expr.op == "-":
            if isinstance(operand, bool) or not is_number(operand):
                raise ctx.fault(f"unary '-' needs a number, got {type_name(operand)}")
            return wrap_int(-operand) if isinstance(operand, int) else -operand
        return not _as_bool(operand, ctx, "operand of '!'")
    if kind is Call:
        return _eval_call(expr, env, ctx, self_obj)
    if kind is MethodCall:
        return _eval_method_call(expr, env, ctx, self_obj)
    if kind is FieldAccess:
        obj = _eval_value(expr.obj, env, self_obj, ctx)
        if isinstance(obj, ShipObject):
            if expr.name in obj.fields:
                value = obj.fields[expr.name]
                if value is _UNSET:
                    raise ctx.fault(f"field '{expr.name}' read before initialization")
                return value
            raise ctx.fault(f"no field '{expr.name}' on {obj.cls.name}")
        raise ctx.fault(f"{type_name(obj)} has no fields")
    if kind is Index:
        return _eval_index(expr, env, ctx, self_obj)
    if kind is New:
        return _eval_new(expr, env, ctx, self_obj)
    if kind is ListLit:
        return ShipList([_eval_value(item, env, self_obj, ctx) for item in expr.items])
    raise AssertionError(f"unhandled expression {kind.__name__}")  # pragma: no cover


def _eval_binary(expr: Binary, env: dict, ctx: _Ctx, self_obj):
    op = expr.op
    if op == "&&":
        left = _as_bool(_eval_value(expr.left, env, self_obj, ctx), ctx, "operand of '&&'")
        if not left:
            return False
        return _as_bool(_eval_value(expr.right, env, self_obj, ctx), ctx, "operand of '&&'")
    if op == "||":
        left = _as_bool(_eval_value(expr.left, env, self_obj, ctx), ctx, "operand of '||'")
        if left:
            return True
        return _as_bool(_eval_value(expr.right, env, self_obj, ctx), ctx, "operand of '||'")
    left = _eval_value(expr.left, env, self_obj, ctx)
    right = _eval_value(expr.right, env, self_obj, ctx)
    if op == "==":
        return ship_equals(left, right)
    if op == "!=":
        return not ship_equals(left, right)
    if op == "+":
        if isinstance(left, str) or isinstance(right, str):
            return render(left) + render(right)
        return _arith(op, left, right, ctx)
    if op in ("-", "*", "/", "%"):
        return _arith(op, left, right, ctx)
    # relational
    if is_number(left) and is_number(right):
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        return left >= right
    if isinstance(left, str) and isinstance(right, str):
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        return left >= right
    raise ctx.fault(f"cannot compare {type_name(left)} with {type_name(right)}")


def _arith(op: str, left, right, ctx: _Ctx):
    if not (is_number(left) and is_number(right)):
        raise ctx.fault(f"'{op}' needs numbers, got {type_name(left)} and {type_name(right)}")
    both_int = isinstance(left, int) and isinstance(right, int)
    if op == "+":
        result = left + right
        return wrap_int(result) if both_int else result
    if op == "-":
        result = left - right
        return wrap_int(result) if both_int else result
    if op == "*":
        result = left * right
        return wrap_int(result) if both_int else result
    if op == "/":
        if right == 0:
            raise ctx.fault("division by zero")
        if both_int:
            return wrap_int(_trunc_div(left, right))
        return left / right
    # '%'
    if right == 0:
        raise ctx.fault("division by zero")
    if both_int:
        return wrap_int(left - _trunc_div(left, right) * right)
    return math.fmod(left, right)


def _eval_index(expr: Index, env: dict, ctx: _Ctx, self_obj):
    obj = _eval_value(expr.obj, env, self_obj, ctx)
    key = _eval_value(expr.index, env, self_obj, ctx)
    if isinstance(obj, (ShipList, ShipArray)):
        if not isinstance(key, int) or isinstance(key, bool):
            raise ctx.fault(f"index must be an int, got {type_name(key)}")
        items = obj.items
        if key < 0 or key >= len(items):
            raise ctx.fault(f"index {key} out of bounds for length {len(items)}")
        return items[key]
    if isinstance(obj, ShipMap):
        entries = obj.entries
        found = entries.get(key, _UNSET)
        if found is _UNSET:
            raise ctx.fault(f"missing map key {render(key)}")
        return found
    if isinstance(obj, str):
        if not isinstance(key, int) or isinstance(key, bool):
            raise ctx.fault(f"index must be an int, got {type_name(key)}")
        if key < 0 or key >= len(obj):
            raise ctx.fault(f"index {key} out of bounds for length {len(obj)}")
        return obj[key]
    raise ctx.fault(f"{type_name(obj)} cannot be indexed")


def _eval_new(expr: New, env: dict, ctx: _Ctx, self_obj):
    t = expr.type
    if t.name == "list":
        return ShipList([])
    if t.name == "map":
        return ShipMap({})
    if t.name == "array":
        length = _eval_value(expr.args[0], env, self_obj, ctx)
        if not isinstance(length, int) or isinstance(length, bool):
            raise ctx.fault(f"array length must be an int, got {type_name(length)}")
        if length < 0:
            raise ctx.fault(f"array length must not be negative, got {length}")
        return ShipArray([_zero_value(t.args[0], ctx) for _ in range(length)])
    cls = ctx.classes.get(t.name)
    if cls is None:
        raise ctx.fault(f"unknown class '{t.name}'")
    args = [_eval_value(a, env, self_obj, ctx) for a in expr.args]
    return _instantiate(cls, args, ctx)


def _instantiate(cls: ClassDecl, args: list, ctx: _Ctx):
    obj = ShipObject(cls, {})
    for fdecl in cls.fields:
        obj.fields[fdecl.name] = _zero_value(fdecl.type, ctx) if fdecl.init is None else _UNSET
    # field initializers run before the constructor body, in declaration order
    for fdecl in cls.fields:
        if fdecl.init is not None:
            _charge(ctx, fdecl.span)
            obj.fields[fdecl.name] = _eval_value(fdecl.init, {}, obj, ctx)
    ctor = cls.ctor
    _invoke(ctor.name, ctor.params, ctor.body, args, obj, ctx)
    return obj


def _invoke(name: str, params, body: Block, args: list, self_obj, ctx: _Ctx):
    if len(args) != len(params):
        raise ctx.fault(f"'{name}' takes {len(params)} argument(s), got {len(args)}")
    if ctx.depth >= MAX_CALL_DEPTH:
        raise ctx.fault(f"maximum call depth ({MAX_CALL_DEPTH}) exceeded")
    env = {}
    for param, arg in zip(params, args):
        env[param.name] = arg
    ctx.depth += 1
    ctx.stack.append([name, body.span.line])
    try:
        _exec_block(body, env, ctx, self_obj)
    except _ReturnSignal as ret:
        return ret.value
    finally:
        ctx.stack.pop()
        ctx.depth -= 1
    return VOID


def _eval_call(expr: Call, env: dict, ctx: _Ctx, self_obj):
    target = expr.target
    if target == "builtin":
        return _eval_builtin(expr, env, ctx, self_obj)
    if target == "function":
        fn = ctx.functions[expr.name]
        args = [_eval_value(a, env, self_obj, ctx) for a in expr.args]
        return _invoke(fn.name, fn.params, fn.body, args, None, ctx)
    # self-method
    method = self_obj.cls.method(expr.name)
    args = [_eval_value(a, env, self_obj, ctx) for a in expr.args]
    return _invoke(method.name, method.params, method.body, args, self_obj, ctx)


def _eval_method_call(expr: MethodCall, env: dict, ctx: _Ctx, self_obj):
    obj = _eval_value(expr.obj, env, self_obj, ctx)
    name = expr.name
    if isinstance(obj, ShipObject):
        method = obj.cls.method(name)
        if method is None:
            raise ctx.fault(f"no method '{name}' on {obj.cls.name}")
        args = [_eval_value(a, env, self_obj, ctx) for a in expr.args]
        return _invoke(method.name, method.params, method.body, args, obj, ctx)
    if isinstance(obj, ShipList):
        if name == "add":
            args = [_eval_value(a, env, self_obj, ctx) for a in expr.args]
            if len(args) != 1:
                raise ctx.fault("list.add takes 1 argument")
            obj.items.append(args[0])
            return VOID
        raise ctx.fault(f"list has no method '{name}'")
    if isinstance(obj, ShipMap):
        args = [_eval_value(a, env, self_obj, ctx) for a in expr.args]
        if name == "put":
            if len(args) != 2:
                raise ctx.fault("map.put takes 2 arguments")
            obj.entries[_map_key(args[0], ctx)] = args[1]
            return VOID
        if name == "get":
            if len(args) != 1:
                raise ctx.fault("map.get takes 1 argument")
            key = _map_key(args[0], ctx)
            found = obj.entries.get(key, _UNSET)
            if found is _UNSET:
                raise ctx.fault(f"missing map key {render(key)}")
            return found
        if name == "has":
            if len(args) != 1:
                raise ctx.fault("map.has takes 1 argument")
            return _map_key(args[0], ctx) in obj.entries
        if name == "remove":
            if len(args) != 1:
                raise ctx.fault("map.remove takes 1 argument")
            obj.entries.pop(_map_key(args[0], ctx), None)
            return VOID
        if name == "keys":
            if args:
                raise ctx.fault("map.keys takes no arguments")
            return ShipList(list(obj.entries.keys()))
        raise ctx.fault(f"map has no method '{name}'")
    raise ctx.fault(f"{type_name(obj)} has no method '{name}'")


def _map_key(value, ctx: _Ctx):
    if isinstance(value, (ShipList, ShipArray, ShipMap, ShipObject)) or value is VOID:
        raise ctx.fault(f"map keys must be int, float, bool or string, got {type_name(value)}")
    return value


def _eval_builtin(expr: Call, env: dict, ctx: _Ctx, self_obj):
    name = expr.name
    args = [_eval(a, env, ctx, self_obj) for a in expr.args]
    if name == "print":
        value = args[0]
        if value is VOID:
            raise ctx.fault("cannot print a void value")
        ctx.output.append(render(value))
        return VOID
    for value in args:
        if value is VOID:
            raise ctx.fault(f"cannot pass a void value to '{name}'")
    if name == "len":
        value = args[0]
        if isinstance(value, (ShipList, ShipArray)):
            return len(value.items)
        if isinstance(value, ShipMap):
            return len(value.entries)
        if isinstance(value, str):
            return len(value)
        raise ctx.fault(f"len expects a string or container, got {type_name(value)}")
    if name == "floor":
        value = args[0]
        if not is_number(value) or isinstance(value, bool):
            raise ctx.fault(f"floor expects a number, got {type_name(value)}")
        return wrap_int(math.floor(value))
    if name == "abs":
        value = args[0]
        if not is_number(value) or isinstance(value, bool):
            raise ctx.fault(f"abs expects a number, got {type_name(value)}")
        return wrap_int(abs(value)) if isinstance(value, int) else abs(value)
    if name in ("min", "max"):
        a, b = args
        if not (is_number(a) and is_number(b)) or isinstance(a, bool) or isinstance(b, bool):
            raise ctx.fault(f"{name} expects numbers, got {type_name(a)} and {type_name(b)}")
        return (min if name == "min" else max)(a, b)
    if name == "assertTrue":
        value = _as_bool(args[0], ctx, "argument of assertTrue")
        if not value:
            raise AssertFail("assertTrue failed: expected true, but was false", ctx.snapshot_stack())
        return VOID
    if name == "assertFalse":
        value = _as_bool(args[0], ctx, "argument of assertFalse")
        if value:
            raise AssertFail("assertFalse failed: expected false, but was true", ctx.snapshot_stack())
        return VOID
    if name == "assertEquals":
        expected, actual = args
        if not ship_equals(expected, actual):
            raise AssertFail(
                f"assertEquals failed: expected {render(expected)}, but was {render(actual)}",
                ctx.snapshot_stack(),
            )
        return VOID
    if name == "assertEqualsDelta":
        expected, actual, delta = args
        if not (is_number(expected) and is_number(actual) and is_number(delta)):
            raise ctx.fault("assertEqualsDelta expects numbers")
        if abs(expected - actual) > delta:
            raise AssertFail(
                f"assertEqualsDelta failed: expected {render(expected)} (+/- {render(delta)}), but was {render(actual)}",
                ctx.snapshot_stack(),
            )
        return VOID
    if name == "fail":
        message = args[0]
        if not isinstance(message, str):
            raise ctx.fault(f"fail expects a string message, got {type_name(message)}")
        raise AssertFail(message, ctx.snapshot_stack())
    raise AssertionError(f"unhandled builtin {name}")  # pragma: no cover


# --- statement execution -------------------------------------------------


def _exec_block(block: Block, env: dict, ctx: _Ctx, self_obj) -> None:
    for stmt in block.stmts:
        _exec_stmt(stmt, env, ctx, self_obj)


def _exec_stmt(stmt, env: dict, ctx: _Ctx, self_obj) -> None:
    kind = type(stmt)
    if kind is VarDecl:
        if stmt.init is None:
            env[stmt.name] = _UNSET
            return
        _charge(ctx, stmt.span)
        env[stmt.name] = _eval_value(stmt.init, env, self_obj, ctx)
        return
    if kind is Assign:
        _charge(ctx, stmt.span)
        value = _eval_value(stmt.value, env, self_obj, ctx)
        _assign(stmt.target, value, env, ctx, self_obj)
        return
    if kind is ExprStmt:
        _charge(ctx, stmt.span)
        _eval(stmt.expr, env, ctx, self_obj)
        return
    if kind is If:
        _charge(ctx, stmt.span)
        if _as_bool(_eval_value(stmt.cond, env, self_obj, ctx), ctx, "if condition"):
            _exec_block(stmt.then, env, ctx, self_obj)
        elif isinstance(stmt.orelse, Block):
            _exec_block(stmt.orelse, env, ctx, self_obj)
        elif stmt.orelse is not None:
            _exec_stmt(stmt.orelse, env, ctx, self_obj)
        return
    if kind is While:
        try:
            while True:
                _charge(ctx, stmt.span)
                if not _as_bool(_eval_value(stmt.cond, env, self_obj, ctx), ctx, "while condition"):
                    return
                _exec_block(stmt.body, env, ctx, self_obj)
        except _BreakSignal:
            return
    if kind is For:
        if stmt.init is not None:
            _exec_stmt(stmt.init, env, ctx, self_obj)
        try:
            while True:
                _charge(ctx, stmt.span)
                if stmt.cond is not None:
                    if not _as_bool(_eval_value(stmt.cond, env, self_obj, ctx), ctx, "for condition"):
                        return
                _exec_block(stmt.body, env, ctx, self_obj)
                if stmt.step is not None:
                    _exec_stmt(stmt.step, env, ctx, self_obj)
        except _BreakSignal:
            return
    if kind is ForEach:
        _charge(ctx, stmt.span)
        iterable = _eval_value(stmt.iterable, env, self_obj, ctx)
        if isinstance(iterable, (ShipList, ShipArray)):
            elements = list(iterable.items)
        elif isinstance(iterable, ShipMap):
            elements = list(iterable.entries.keys())
        elif isinstance(iterable, str):
            elements = list(iterable)
        else:
            raise ctx.fault(f"cannot iterate over {type_name(iterable)}")
        try:
            for element in elements:
                _charge(ctx, stmt.span)
                env[stmt.var_name] = element
                _exec_block(stmt.body, env, ctx, self_obj)
        except _BreakSignal:
            return
        return
    if kind is Switch:
        _exec_switch(stmt, env, ctx, self_obj)
        return
    if kind is Return:
        _charge(ctx, stmt.span)
        if stmt.value is None:
            raise _ReturnSignal(VOID)
        raise _ReturnSignal(_eval_value(stmt.value, env, self_obj, ctx))
    if kind is Throw:
        _charge(ctx, stmt.span)
        value = _eval_value(stmt.value, env, self_obj, ctx)
        if not isinstance(value, str):
            raise ctx.fault(f"throw expects a string message, got {type_name(value)}")
        raise ctx.fault(value)
    if kind is Try:
        _charge(ctx, stmt.span)
        try:
            _exec_block(stmt.body, env, ctx, self_obj)
        except ShipFault as fault:
            env[stmt.catch_name] = fault.message
            _exec_block(stmt.catch_body, env, ctx, self_obj)
        return
    if kind is Break:
        _charge(ctx, stmt.span)
        raise _BreakSignal()
    raise AssertionError(f"unhandled statement {kind.__name__}")  # pragma: no cover


def _case_value(expr):
    if isinstance(expr, Unary):
        return -expr.operand.value
    return expr.value


def _exec_switch(stmt: Switch, env: dict, ctx: _Ctx, self_obj) -> None:
    _charge(ctx, stmt.span)
    subject = _eval_value(stmt.subject, env, self_obj, ctx)
    match_index = -1
    for i, arm in enumerate(stmt.cases):
        if ship_equals(subject, _case_value(arm.value)):
            match_index = i
            break
    try:
        if match_index >= 0:
            for arm in stmt.cases[match_index:]:
                _exec_block(arm.body, env, ctx, self_obj)
            if stmt.default is not None:
                _exec_block(stmt.default, env, ctx, self_obj)
        elif stmt.default is not None:
            _exec_block(stmt.default, env, ctx, self_obj)
    except _BreakSignal:
        return


def _assign(target, value, env: dict, ctx: _Ctx, self_obj) -> None:
    kind = type(target)
    if kind is Ident:
        if target.binding == "field":
            self_obj.fields[target.name] = value
        else:
            env[target.name] = value
        return
    if kind is FieldAccess:
        obj = _eval_value(target.obj, env, self_obj, ctx)
        if not isinstance(obj, ShipObject):
            raise ctx.fault(f"{type_name(obj)} has no fields")
        if target.name not in obj.fields:
            raise ctx.fault(f"no field '{target.name}' on {obj.cls.name}")
        obj.fields[target.name] = value
        return
    # Index
    obj = _eval_value(target.obj, env, self_obj, ctx)
    key = _eval_value(target.index, env, self_obj, ctx)
    if isinstance(obj, (ShipList, ShipArray)):
        if not isinstance(key, int) or isinstance(key, bool):
            raise ctx.fault(f"index must be an int, got {type_name(key)}")
        items = obj.items
        if key < 0 or key >= len(items):
            raise ctx.fault(f"index {key} out of bounds for length {len(items)}")
        items[key] = value
        return
    if isinstance(obj, ShipMap):
        obj.entries[_map_key(key, ctx)] = value
        return
    raise ctx.fault(f"cannot assign into {type_name(obj)}")


# --- entry point -----------------------------------------------------------


def execute(
    cut: Program,
    test: Program | None,
    entry: str,
    budget: Budget,
    cancel=None,
) -> ExecutionResult:
    """Run ``entry`` (a zero-parameter function of ``test``, or of ``cut`` if
    no test program is given) against the component. Deterministic for
    identical inputs; the only observable effects are in the result."""
    classes = {}
    for program in (cut, test):
        if program is not None:
            for cls in program.classes:
                classes[cls.name] = cls
    functions = {}
    owner = test if test is not None else cut
    for fn in owner.functions:
        functions[fn.name] = fn
    entry_fn = functions.get(entry)
    if entry_fn is None:
        raise ValueError(f"entry function '{entry}' not found")
    if entry_fn.params:
        raise ValueError(f"entry function '{entry}' must take zero parameters")

    ctx = _Ctx(classes, functions, cut.file_id, budget, cancel)
    verdict = COMPLETED
    return_value = None
    message = ""
    stack: tuple = ()
    try:
        result = _invoke(entry_fn.name, entry_fn.params, entry_fn.body, [], None, ctx)
        return_value = None if result is VOID else result
    except ShipFault as fault:
        verdict = RUNTIME_ERROR
        message = fault.message
        stack = fault.stack
    except AssertFail as failure:
        verdict = ASSERTION_FAILURE
        message = failure.message
        stack = failure.stack
    except BudgetExceeded as limit:
        verdict = BUDGET_EXHAUSTED
        reasons = {
            "step": f"step budget exhausted ({budget.max_steps} steps)",
            "time": f"time budget exhausted ({budget.max_wall_ms} ms)",
            "cancel": "execution canceled",
        }
        message = reasons[limit.reason]
        stack = ctx.snapshot_stack()
    except RecursionError:
        verdict = RUNTIME_ERROR
        message = "expression nesting exceeded interpreter limits"
        stack = ctx.snapshot_stack()
    return ExecutionResult(
        verdict=verdict,
        return_value=return_value,
        error_message=message,
        error_stack=stack,
        output=tuple(ctx.output),
        coverage_hits=dict(ctx.hits),
        steps_used=ctx.steps,
    )
