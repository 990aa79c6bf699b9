"""Recursive-descent parser for ShipLang.

Grammar summary lives in docs/grammar.md. The parser stops at the first
syntax error; name errors are collected later by the resolver. Nesting depth
is capped so hostile player input cannot exhaust the host stack.
"""

from __future__ import annotations

from .lexer import tokenize
from .nodes import (
    Assign, Binary, Block, BoolLit, Break, Call, CaseArm, ClassDecl, CtorDecl, Expr,
    ExprStmt, FieldAccess, FieldDecl, FloatLit, For, ForEach, FuncDecl, Ident, If,
    Index, IntLit, ListLit, MethodCall, MethodDecl, New, Param, Program, Return,
    Stmt, StringLit, Switch, Throw, Try, TypeRef, Unary, VarDecl, While,
)
from .spans import CompileFailure, Diagnostic
from .tokens import EOF, FLOAT, IDENT, INT, KEYWORD, PUNCT, STRING, TYPE_KEYWORDS, Token

MAX_NESTING = 200

_SCALAR_TYPES = ("int", "float", "bool", "string")


class _ParseAbort(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


class _Parser:
    def __init__(self, tokens: list[Token], file_id: str):
        self.tokens = tokens
        self.pos = 0
        self.file_id = file_id
        self.depth = 0

    # -- token plumbing ------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def error(self, message: str, tok: Token | None = None) -> _ParseAbort:
        tok = tok or self.peek()
        return _ParseAbort(Diagnostic("error", message, tok.span))

    def expect_punct(self, text: str) -> Token:
        tok = self.peek()
        if not tok.is_punct(text):
            raise self.error(f"expected '{text}'" + (f" but found '{tok.text}'" if tok.text else " but reached end of file"))
        return self.advance()

    def expect_keyword(self, text: str) -> Token:
        tok = self.peek()
        if not tok.is_keyword(text):
            raise self.error(f"expected '{text}'")
        return self.advance()

    def expect_ident(self, what: str = "name") -> Token:
        tok = self.peek()
        if tok.kind != IDENT:
            raise self.error(f"expected {what}")
        return self.advance()

    def _enter(self) -> None:
        self.depth += 1
        if self.depth > MAX_NESTING:
            raise self.error("code is nested too deeply")

    def _leave(self) -> None:
        self.depth -= 1

    # -- declarations ----------------------------------------------------

    def parse_program(self, kind: str, source: str) -> Program:
        classes: list[ClassDecl] = []
        functions: list[FuncDecl] = []
        while self.peek().kind != EOF:
            tok = self.peek()
            if tok.is_keyword("class"):
                classes.append(self.class_decl())
            elif tok.is_keyword("fn"):
                functions.append(self.fn_decl())
            else:
                raise self.error("expected 'class' or 'fn' declaration")
        return Program(self.file_id, kind, source, classes, functions)

    def class_decl(self) -> ClassDecl:
        start = self.expect_keyword("class")
        name = self.expect_ident("class name")
        self.expect_punct("{")
        fields: list[FieldDecl] = []
        ctors: list[CtorDecl] = []
        methods: list[MethodDecl] = []
        while not self.peek().is_punct("}"):
            if self.peek().kind == EOF:
                raise self.error("unterminated class body")
            if self.peek().kind == IDENT and self.peek(1).is_punct("("):
                ctor_name = self.advance()
                if ctor_name.text != name.text:
                    raise self.error("constructor must be named after its class", ctor_name)
                params = self.param_list()
                body = self.block()
                ctors.append(CtorDecl(ctor_name.text, params, body, ctor_name.span))
                continue
            decl_type = self.type_ref()
            member_name = self.expect_ident("member name")
            if self.peek().is_punct("("):
                params = self.param_list()
                body = self.block()
                methods.append(MethodDecl(decl_type, member_name.text, params, body, member_name.span))
            else:
                init = None
                if self.peek().is_punct("="):
                    self.advance()
                    init = self.expression()
                self.expect_punct(";")
                if decl_type.name == "void":
                    raise self.error("fields cannot have type void", member_name)
                fields.append(FieldDecl(decl_type, member_name.text, init, member_name.span))
        self.expect_punct("}")
        return ClassDecl(name.text, fields, ctors, methods, start.span)

    def fn_decl(self) -> FuncDecl:
        self.expect_keyword("fn")
        name = self.expect_ident("function name")
        params = self.param_list()
        body = self.block()
        return FuncDecl(name.text, params, body, name.span)

    def param_list(self) -> list[Param]:
        self.expect_punct("(")
        params: list[Param] = []
        if not self.peek().is_punct(")"):
            while True:
                ptype = self.type_ref()
                if ptype.name == "void":
                    raise self.error("parameters cannot have type void")
                pname = self.expect_ident("parameter name")
                params.append(Param(ptype, pname.text, pname.span))
                if self.peek().is_punct(","):
                    self.advance()
                    continue
                break
        self.expect_punct(")")
        return params

    def type_ref(self) -> TypeRef:
        tok = self.peek()
        if tok.kind == KEYWORD and tok.text in TYPE_KEYWORDS:
            self.advance()
            if tok.text in ("array", "list"):
                self.expect_punct("<")
                elem = self.type_ref()
                self.expect_punct(">")
                return TypeRef(tok.text, (elem,))
            if tok.text == "map":
                self.expect_punct("<")
                key = self.type_ref()
                self.expect_punct(",")
                value = self.type_ref()
                self.expect_punct(">")
                return TypeRef("map", (key, value))
            return TypeRef(tok.text)
        if tok.kind == IDENT:
            self.advance()
            return TypeRef(tok.text)
        raise self.error("expected a type")

    # -- statements ------------------------------------------------------

    def block(self) -> Block:
        start = self.expect_punct("{")
        stmts: list[Stmt] = []
        while not self.peek().is_punct("}"):
            if self.peek().kind == EOF:
                raise self.error("unterminated block")
            stmts.append(self.statement())
        self.expect_punct("}")
        return Block(stmts, start.span)

    def statement(self) -> Stmt:
        self._enter()
        try:
            tok = self.peek()
            if tok.kind == KEYWORD:
                text = tok.text
                if text in TYPE_KEYWORDS:
                    return self.var_decl()
                if text == "if":
                    return self.if_stmt()
                if text == "while":
                    return self.while_stmt()
                if text == "for":
                    return self.for_stmt()
                if text == "switch":
                    return self.switch_stmt()
                if text == "return":
                    self.advance()
                    value = None
                    if not self.peek().is_punct(";"):
                        value = self.expression()
                    self.expect_punct(";")
                    return Return(value, tok.span)
                if text == "throw":
                    self.advance()
                    value = self.expression()
                    self.expect_punct(";")
                    return Throw(value, tok.span)
                if text == "try":
                    self.advance()
                    body = self.block()
                    self.expect_keyword("catch")
                    self.expect_punct("(")
                    catch_name = self.expect_ident("exception name")
                    self.expect_punct(")")
                    catch_body = self.block()
                    return Try(body, catch_name.text, catch_body, tok.span)
                if text == "break":
                    self.advance()
                    self.expect_punct(";")
                    return Break(tok.span)
                if text in ("new", "true", "false"):
                    return self.expr_or_assign_stmt()
                raise self.error(f"unexpected '{text}' here")
            if tok.kind == IDENT and self.peek(1).kind == IDENT:
                return self.var_decl()
            return self.expr_or_assign_stmt()
        finally:
            self._leave()

    def var_decl(self) -> VarDecl:
        start = self.peek()
        decl_type = self.type_ref()
        if decl_type.name == "void":
            raise self.error("cannot declare a void variable", start)
        name = self.expect_ident("variable name")
        init = None
        if self.peek().is_punct("="):
            self.advance()
            init = self.expression()
        self.expect_punct(";")
        return VarDecl(decl_type, name.text, init, start.span)

    def expr_or_assign_stmt(self) -> Stmt:
        start = self.peek()
        expr = self.expression()
        if self.peek().is_punct("="):
            eq = self.advance()
            if not isinstance(expr, (Ident, FieldAccess, Index)):
                raise self.error("cannot assign to this expression", eq)
            value = self.expression()
            self.expect_punct(";")
            return Assign(expr, value, start.span)
        self.expect_punct(";")
        return ExprStmt(expr, start.span)

    def if_stmt(self) -> If:
        start = self.expect_keyword("if")
        self.expect_punct("(")
        cond = self.expression()
        self.expect_punct(")")
        then = self.block()
        orelse = None
        if self.peek().is_keyword("else"):
            self.advance()
            if self.peek().is_keyword("if"):
                orelse = self.if_stmt()
            else:
                orelse = self.block()
        return If(cond, then, orelse, start.span)

    def while_stmt(self) -> While:
        start = self.expect_keyword("while")
        self.expect_punct("(")
        cond = self.expression()
        self.expect_punct(")")
        body = self.block()
        return While(cond, body, start.span)

    def for_stmt(self) -> Stmt:
        start = self.expect_keyword("for")
        self.expect_punct("(")
        # Disambiguate for-each from the C-style header.
        tok = self.peek()
        looks_typed = (tok.kind == KEYWORD and tok.text in TYPE_KEYWORDS) or (
            tok.kind == IDENT and self.peek(1).kind == IDENT
        )
        if looks_typed or (tok.kind == IDENT and self.peek(1).is_punct(":")):
            if tok.kind == IDENT and self.peek(1).is_punct(":"):
                # untyped loop variable: `for (x : xs)`
                var_name = self.advance()
                self.advance()  # ':'
                iterable = self.expression()
                self.expect_punct(")")
                body = self.block()
                return ForEach(TypeRef("var"), var_name.text, iterable, body, start.span)
            decl_type = self.type_ref()
            name = self.expect_ident("variable name")
            if self.peek().is_punct(":"):
                self.advance()
                iterable = self.expression()
                self.expect_punct(")")
                body = self.block()
                return ForEach(decl_type, name.text, iterable, body, start.span)
            init_value = None
            if self.peek().is_punct("="):
                self.advance()
                init_value = self.expression()
            init: Stmt | None = VarDecl(decl_type, name.text, init_value, start.span)
            self.expect_punct(";")
        elif tok.is_punct(";"):
            init = None
            self.advance()
        else:
            target = self.expression()
            self.expect_punct("=")
            if not isinstance(target, (Ident, FieldAccess, Index)):
                raise self.error("cannot assign to this expression", tok)
            init = Assign(target, self.expression(), start.span)
            self.expect_punct(";")
        cond = None
        if not self.peek().is_punct(";"):
            cond = self.expression()
        self.expect_punct(";")
        step: Stmt | None = None
        if not self.peek().is_punct(")"):
            step_start = self.peek()
            step_expr = self.expression()
            if self.peek().is_punct("="):
                self.advance()
                if not isinstance(step_expr, (Ident, FieldAccess, Index)):
                    raise self.error("cannot assign to this expression", step_start)
                step = Assign(step_expr, self.expression(), step_start.span)
            else:
                step = ExprStmt(step_expr, step_start.span)
        self.expect_punct(")")
        body = self.block()
        return For(init, cond, step, body, start.span)

    def switch_stmt(self) -> Switch:
        start = self.expect_keyword("switch")
        self.expect_punct("(")
        subject = self.expression()
        self.expect_punct(")")
        self.expect_punct("{")
        cases: list[CaseArm] = []
        default: Block | None = None
        while not self.peek().is_punct("}"):
            tok = self.peek()
            if tok.is_keyword("case"):
                if default is not None:
                    raise self.error("'case' cannot follow 'default'", tok)
                self.advance()
                label = self.case_label()
                self.expect_punct(":")
                cases.append(CaseArm(label, Block(self.arm_stmts(), tok.span), tok.span))
            elif tok.is_keyword("default"):
                if default is not None:
                    raise self.error("duplicate 'default' arm", tok)
                self.advance()
                self.expect_punct(":")
                default = Block(self.arm_stmts(), tok.span)
            else:
                raise self.error("expected 'case', 'default' or '}'")
        self.expect_punct("}")
        return Switch(subject, cases, default, start.span)

    def case_label(self) -> Expr:
        tok = self.peek()
        if tok.kind == INT:
            self.advance()
            return IntLit(tok.value, tok.span)
        if tok.is_punct("-") and self.peek(1).kind == INT:
            self.advance()
            num = self.advance()
            return Unary("-", IntLit(num.value, num.span), tok.span)
        if tok.kind == STRING:
            self.advance()
            return StringLit(tok.value, tok.span)
        if tok.is_keyword("true") or tok.is_keyword("false"):
            self.advance()
            return BoolLit(tok.text == "true", tok.span)
        raise self.error("case label must be an int, string or bool literal")

    def arm_stmts(self) -> list[Stmt]:
        stmts: list[Stmt] = []
        while True:
            tok = self.peek()
            if tok.is_punct("}") or tok.is_keyword("case") or tok.is_keyword("default"):
                return stmts
            if tok.kind == EOF:
                raise self.error("unterminated switch")
            stmts.append(self.statement())

    # -- expressions -------------------------------------------------------

    def expression(self) -> Expr:
        self._enter()
        try:
            return self.or_expr()
        finally:
            self._leave()

    def _binary_chain(self, sub, ops: tuple[str, ...]) -> Expr:
        left = sub()
        while self.peek().kind == PUNCT and self.peek().text in ops:
            op = self.advance()
            right = sub()
            left = Binary(op.text, left, right, op.span)
        return left

    def or_expr(self) -> Expr:
        return self._binary_chain(self.and_expr, ("||",))

    def and_expr(self) -> Expr:
        return self._binary_chain(self.equality_expr, ("&&",))

    def equality_expr(self) -> Expr:
        return self._binary_chain(self.relational_expr, ("==", "!="))

    def relational_expr(self) -> Expr:
        return self._binary_chain(self.additive_expr, ("<", "<=", ">", ">="))

    def additive_expr(self) -> Expr:
        return self._binary_chain(self.multiplicative_expr, ("+", "-"))

    def multiplicative_expr(self) -> Expr:
        return self._binary_chain(self.unary_expr, ("*", "/", "%"))

    def unary_expr(self) -> Expr:
        tok = self.peek()
        if tok.is_punct("-") or tok.is_punct("!"):
            self._enter()
            try:
                self.advance()
                return Unary(tok.text, self.unary_expr(), tok.span)
            finally:
                self._leave()
        return self.postfix_expr()

    def postfix_expr(self) -> Expr:
        expr = self.primary_expr()
        while True:
            tok = self.peek()
            if tok.is_punct("."):
                self.advance()
                name = self.expect_ident("member name")
                if self.peek().is_punct("("):
                    args = self.call_args()
                    expr = MethodCall(expr, name.text, args, name.span)
                else:
                    expr = FieldAccess(expr, name.text, name.span)
            elif tok.is_punct("["):
                self.advance()
                index = self.expression()
                self.expect_punct("]")
                expr = Index(expr, index, tok.span)
            else:
                return expr

    def call_args(self) -> list[Expr]:
        self.expect_punct("(")
        args: list[Expr] = []
        if not self.peek().is_punct(")"):
            while True:
                args.append(self.expression())
                if self.peek().is_punct(","):
                    self.advance()
                    continue
                break
        self.expect_punct(")")
        return args

    def primary_expr(self) -> Expr:
        tok = self.peek()
        if tok.kind == INT:
            self.advance()
            return IntLit(tok.value, tok.span)
        if tok.kind == FLOAT:
            self.advance()
            return FloatLit(tok.value, tok.span)
        if tok.kind == STRING:
            self.advance()
            return StringLit(tok.value, tok.span)
        if tok.is_keyword("true") or tok.is_keyword("false"):
            self.advance()
            return BoolLit(tok.text == "true", tok.span)
        if tok.kind == IDENT:
            self.advance()
            if self.peek().is_punct("("):
                return Call(tok.text, self.call_args(), tok.span)
            return Ident(tok.text, tok.span)
        if tok.is_keyword("new"):
            self.advance()
            new_type = self.type_ref()
            if new_type.name in _SCALAR_TYPES or new_type.name == "void":
                raise self.error(f"cannot instantiate builtin type '{new_type.name}'", tok)
            args = self.call_args()
            return New(new_type, args, tok.span)
        if tok.is_punct("("):
            self.advance()
            expr = self.expression()
            self.expect_punct(")")
            return expr
        if tok.is_punct("["):
            self.advance()
            items: list[Expr] = []
            if not self.peek().is_punct("]"):
                while True:
                    items.append(self.expression())
                    if self.peek().is_punct(","):
                        self.advance()
                        continue
                    break
            self.expect_punct("]")
            return ListLit(items, tok.span)
        if tok.kind == EOF:
            raise self.error("unexpected end of file")
        raise self.error(f"unexpected '{tok.text}'")


def parse_source(source: str, kind: str, file_id: str | None = None) -> Program:
    """Parse (but do not resolve) a compilation unit. Raises CompileFailure."""
    if kind not in ("cut", "test"):
        raise ValueError(f"bad program kind {kind!r}")
    fid = file_id or ("component.ship" if kind == "cut" else "tests.ship")
    tokens, diagnostics = tokenize(source, fid)
    if diagnostics:
        raise CompileFailure(diagnostics)
    parser = _Parser(tokens, fid)
    try:
        return parser.parse_program(kind, source)
    except _ParseAbort as abort:
        raise CompileFailure([abort.diagnostic]) from None
