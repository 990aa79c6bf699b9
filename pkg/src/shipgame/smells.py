"""Static test-smell detection: Lazy Test, Eager Test, Magic Number Test.

Rules (thresholds configurable per deployment):
- lazy: a component method (constructors excluded) invoked by at least two
  distinct test functions;
- eager: a single test function invoking at least three distinct
  non-constructor component methods;
- magic number: a numeric literal used directly as an assertion argument
  (a leading minus still counts as direct); the delta argument of
  assertEqualsDelta is exempt, 0 and 1 are not.

Detection is purely syntactic so the editor can show smells live without
executing anything. Helper (non test_*) functions are not attributed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    ASSERTION_BUILTINS, Call, FloatLit, IntLit, MethodCall, Program, SourceSpan,
    Unary, walk,
)

LAZY_TEST = "lazy-test"
EAGER_TEST = "eager-test"
MAGIC_NUMBER = "magic-number"


@dataclass(frozen=True)
class SmellThresholds:
    lazy_min_tests: int = 2
    eager_min_methods: int = 3


@dataclass(frozen=True)
class SmellFinding:
    smell: str
    subject: str  # component method (lazy) or test function name (eager, magic)
    span: SourceSpan


@dataclass(frozen=True)
class SmellReport:
    lazy: int
    eager: int
    magic_number: int
    findings: tuple[SmellFinding, ...]

    def counts(self) -> dict[str, int]:
        return {"lazy": self.lazy, "eager": self.eager, "magic_number": self.magic_number}


def _is_direct_number(expr) -> bool:
    if isinstance(expr, (IntLit, FloatLit)):
        return True
    return isinstance(expr, Unary) and expr.op == "-" and isinstance(expr.operand, (IntLit, FloatLit))


def detect_smells(
    test: Program,
    cut: Program,
    thresholds: SmellThresholds | None = None,
) -> SmellReport:
    thresholds = thresholds or SmellThresholds()
    cut_methods: list[str] = []
    for cls in cut.classes:
        for method in cls.methods:
            if method.name not in cut_methods:
                cut_methods.append(method.name)
    method_set = set(cut_methods)

    # per test function: distinct component methods called, with first call site
    calls_by_test: list[tuple[str, dict[str, SourceSpan]]] = []
    for fn in test.test_functions():
        seen: dict[str, SourceSpan] = {}
        for node in walk(fn.body):
            if isinstance(node, MethodCall) and node.name in method_set and node.name not in seen:
                seen[node.name] = node.span
        calls_by_test.append((fn.name, seen))

    findings: list[SmellFinding] = []

    lazy = 0
    for method in cut_methods:
        users = [(name, seen[method]) for name, seen in calls_by_test if method in seen]
        if len(users) >= thresholds.lazy_min_tests:
            lazy += 1
            findings.append(SmellFinding(LAZY_TEST, method, users[0][1]))

    eager = 0
    for fn in test.test_functions():
        seen = dict(next(s for n, s in calls_by_test if n == fn.name))
        if len(seen) >= thresholds.eager_min_methods:
            eager += 1
            findings.append(SmellFinding(EAGER_TEST, fn.name, fn.span))

    magic = 0
    for fn in test.test_functions():
        for node in walk(fn.body):
            if isinstance(node, Call) and node.name in ASSERTION_BUILTINS:
                for i, arg in enumerate(node.args):
                    if node.name == "assertEqualsDelta" and i == 2:
                        continue
                    if _is_direct_number(arg):
                        magic += 1
                        findings.append(SmellFinding(MAGIC_NUMBER, fn.name, node.span))

    return SmellReport(lazy=lazy, eager=eager, magic_number=magic, findings=tuple(findings))
