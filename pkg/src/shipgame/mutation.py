"""Single-location program mutation: authored sabotage and mutation analytics.

A MutationSpec pins one edit: an operator, a locator (class, function,
ordinal occurrence of the operator's target kind inside that function, in
source order) and an operator-specific payload. Applying a spec deep-copies
the program, edits exactly one location, re-resolves, and re-renders the
source text.

The analytics operator set mirrors a standard mutation tool's headline
operators; two extra operators (wrap_in_floor, swap_adjacent_statements)
exist for authored sabotage only and are not enumerated by default.
Field initializers are not mutation targets; locators address function
bodies only.
"""

from __future__ import annotations

import copy
import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .runtime import Budget
from .syntax import (
    Assign, Binary, Block, BoolLit, Break, Call, CaseArm, ClassDecl, CtorDecl,
    Expr, FieldDecl, FuncDecl, Ident, If, IntLit, MethodCall, MethodDecl, New,
    Param, Program, Stmt, Unary, While, function_bodies, pretty_print,
    resolve_program,
)
from .testkit import ATTEMPT_PASSED, SuiteResult, run_suite

DEFECT_CLASSES = ("missing", "spurious", "misplaced", "malformed")

COMPARISON_OPS = ("<", "<=", ">", ">=", "==", "!=")
ARITHMETIC_OPS = ("+", "-", "*", "/", "%")

# Operators available for analytics enumeration (mutation scores).
DEFAULT_OPERATORS = (
    "arithmetic_swap",
    "delete_break",
    "flip_boolean",
    "negate_condition",
    "perturb_constant",
    "relational_swap",
    "swap_call_arguments",
)

# Additional operators usable by authored sabotage specs.
SABOTAGE_ONLY_OPERATORS = ("wrap_in_floor", "swap_adjacent_statements")

ALL_OPERATORS = tuple(sorted(DEFAULT_OPERATORS + SABOTAGE_ONLY_OPERATORS))

OPERATOR_DEFECT_CLASS = {
    "relational_swap": "malformed",
    "arithmetic_swap": "malformed",
    "negate_condition": "malformed",
    "perturb_constant": "malformed",
    "flip_boolean": "malformed",
    "delete_break": "missing",
    "swap_call_arguments": "misplaced",
    "wrap_in_floor": "spurious",
    "swap_adjacent_statements": "misplaced",
}


class MutationError(Exception):
    pass


class LocatorNotFound(MutationError):
    pass


class MutantDoesNotCompile(MutationError):
    pass


class SuiteNotGreen(MutationError):
    pass


@dataclass(frozen=True)
class Locator:
    class_name: Optional[str]
    function: str
    ordinal: int

    def to_dict(self) -> dict:
        return {"class": self.class_name, "function": self.function, "ordinal": self.ordinal}

    @staticmethod
    def from_dict(data: dict) -> "Locator":
        return Locator(data.get("class"), data["function"], int(data["ordinal"]))


@dataclass(frozen=True)
class MutationSpec:
    operator: str
    locator: Locator
    payload: dict = dataclasses.field(default_factory=dict)
    defect_class: str = "malformed"

    def __post_init__(self) -> None:
        if self.operator not in ALL_OPERATORS:
            raise ValueError(f"unknown mutation operator '{self.operator}'")
        if self.defect_class not in DEFECT_CLASSES:
            raise ValueError(f"unknown defect class '{self.defect_class}'")

    def to_dict(self) -> dict:
        return {
            "operator": self.operator,
            "locator": self.locator.to_dict(),
            "payload": dict(self.payload),
            "defect_class": self.defect_class,
        }

    @staticmethod
    def from_dict(data: dict) -> "MutationSpec":
        return MutationSpec(
            operator=data["operator"],
            locator=Locator.from_dict(data["locator"]),
            payload=dict(data.get("payload", {})),
            defect_class=data.get("defect_class", "malformed"),
        )


@dataclass(frozen=True)
class MutationReport:
    generated: int
    killed: int
    survived: int
    per_mutant: tuple[tuple[MutationSpec, Optional[str]], ...]

    @property
    def score(self) -> Fraction:
        if self.generated == 0:
            return Fraction(0)
        return Fraction(self.killed, self.generated)


# --- site discovery -----------------------------------------------------

_NODE_TYPES = (Expr, Stmt, Block, CaseArm, Param, FieldDecl, CtorDecl, MethodDecl, ClassDecl, FuncDecl)


def _iter_slots(node) -> Iterator[tuple[object, object, str, Optional[int]]]:
    for f in dataclasses.fields(node):
        value = getattr(node, f.name)
        if isinstance(value, _NODE_TYPES):
            yield value, node, f.name, None
        elif isinstance(value, list):
            for i, item in enumerate(value):
                if isinstance(item, _NODE_TYPES):
                    yield item, node, f.name, i


def _preorder(body: Block) -> Iterator[tuple[object, object, str, Optional[int]]]:
    stack = [(body, None, "", None)]
    while stack:
        entry = stack.pop()
        yield entry
        node = entry[0]
        stack.extend(reversed(list(_iter_slots(node))))


def _replace(parent, slot: str, index: Optional[int], new_node) -> None:
    if index is None:
        setattr(parent, slot, new_node)
    else:
        getattr(parent, slot)[index] = new_node


@dataclass
class _Site:
    """One applicable (operator, node) target with its edit variants."""

    operator: str
    node: object
    parent: object
    slot: str
    index: Optional[int]

    def payload_variants(self) -> list[dict]:
        op = self.operator
        node = self.node
        if op == "relational_swap" or op == "arithmetic_swap":
            pool = COMPARISON_OPS if op == "relational_swap" else ARITHMETIC_OPS
            return [{"replacement": alt} for alt in pool if alt != node.op]
        if op == "perturb_constant":
            variants = [{"variant": "plus-one"}]
            if node.value != 0:
                variants.append({"variant": "zero"})
            return variants
        return [{}]

    def apply(self, payload: dict) -> None:
        op = self.operator
        node = self.node
        if op in ("relational_swap", "arithmetic_swap"):
            node.op = payload["replacement"]
        elif op == "negate_condition":
            setattr(self.parent, self.slot, Unary("!", node, node.span))
        elif op == "perturb_constant":
            node.value = node.value + 1 if payload.get("variant") != "zero" else 0
        elif op == "flip_boolean":
            node.value = not node.value
        elif op == "delete_break":
            del getattr(self.parent, self.slot)[self.index]
        elif op == "swap_call_arguments":
            node.args[0], node.args[1] = node.args[1], node.args[0]
        elif op == "wrap_in_floor":
            wrapped = Call("floor", [node], node.span)
            _replace(self.parent, self.slot, self.index, wrapped)
        elif op == "swap_adjacent_statements":
            i = self.index
            stmts = node.stmts
            stmts[i], stmts[i + 1] = stmts[i + 1], stmts[i]
        else:  # pragma: no cover
            raise AssertionError(op)


def _sites_at_node(op: str, node, parent, slot: str, index: Optional[int]) -> list[_Site]:
    if op == "relational_swap":
        if isinstance(node, Binary) and node.op in COMPARISON_OPS:
            return [_Site(op, node, parent, slot, index)]
    elif op == "arithmetic_swap":
        if isinstance(node, Binary) and node.op in ARITHMETIC_OPS:
            return [_Site(op, node, parent, slot, index)]
    elif op == "negate_condition":
        if isinstance(node, (If, While)):
            return [_Site(op, node.cond, node, "cond", None)]
    elif op == "perturb_constant":
        if isinstance(node, IntLit):
            return [_Site(op, node, parent, slot, index)]
    elif op == "flip_boolean":
        if isinstance(node, BoolLit):
            return [_Site(op, node, parent, slot, index)]
    elif op == "delete_break":
        if isinstance(node, Break):
            return [_Site(op, node, parent, slot, index)]
    elif op == "swap_call_arguments":
        if isinstance(node, (Call, MethodCall, New)) and len(node.args) == 2:
            return [_Site(op, node, parent, slot, index)]
    elif op == "wrap_in_floor":
        # reads only: wrapping an assignment target would not parse back
        if isinstance(node, Ident) and not (isinstance(parent, Assign) and slot == "target"):
            return [_Site(op, node, parent, slot, index)]
    elif op == "swap_adjacent_statements":
        if isinstance(node, Block):
            return [_Site(op, node, parent, slot, i) for i in range(len(node.stmts) - 1)]
    return []


def _collect_sites(body: Block, operators: Sequence[str]) -> list[tuple[str, int, _Site]]:
    """All (operator, ordinal, site) targets in one body: source order of the
    target node first, operator id second. Ordinals count every target of an
    operator within the body, so they are stable across operator subsets."""
    wanted = tuple(sorted(set(operators)))
    counters = {op: 0 for op in wanted}
    collected: list[tuple[str, int, _Site]] = []
    for node, parent, slot, index in _preorder(body):
        for op in wanted:
            for site in _sites_at_node(op, node, parent, slot, index):
                collected.append((op, counters[op], site))
                counters[op] += 1
    return collected


def _bodies(program: Program) -> list[tuple[Optional[str], str, Block]]:
    return function_bodies(program)


# --- public operations -------------------------------------------------------


def apply_mutation(program: Program, spec: MutationSpec) -> Program:
    """Return a new Program differing from ``program`` at exactly the spec's
    location. The result is re-resolved and its ``source`` re-rendered; node
    spans still describe the original layout (re-parse ``source`` for fresh
    spans)."""
    mutant = copy.deepcopy(program)
    target_body: Optional[Block] = None
    for class_name, fn_name, body in _bodies(mutant):
        if class_name == spec.locator.class_name and fn_name == spec.locator.function:
            target_body = body
            break
    if target_body is None:
        raise LocatorNotFound(
            f"no function '{spec.locator.function}' in class '{spec.locator.class_name}'"
        )
    sites = [site for _op, _ordinal, site in _collect_sites(target_body, [spec.operator])]
    if spec.locator.ordinal < 0 or spec.locator.ordinal >= len(sites):
        raise LocatorNotFound(
            f"operator '{spec.operator}' has {len(sites)} target(s) in "
            f"'{spec.locator.function}', ordinal {spec.locator.ordinal} does not resolve"
        )
    sites[spec.locator.ordinal].apply(dict(spec.payload))
    diagnostics = resolve_program(mutant)
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        raise MutantDoesNotCompile("; ".join(d.describe() for d in errors))
    mutant.source = pretty_print(mutant)
    return mutant


def enumerate_mutants(program: Program, operators: Sequence[str] = DEFAULT_OPERATORS) -> list[MutationSpec]:
    """All single edits the given operators can make, in deterministic order:
    functions in source order, target nodes in source order, operators sorted
    by id at the same node, then payload variants. Candidates whose mutant
    would not re-resolve (e.g. a constant perturbation colliding with another
    case label) are dropped, so every returned spec is applicable."""
    operators = tuple(sorted(operators))
    for op in operators:
        if op not in ALL_OPERATORS:
            raise ValueError(f"unknown mutation operator '{op}'")
    specs: list[MutationSpec] = []
    for class_name, fn_name, body in _bodies(program):
        for op, ordinal, site in _collect_sites(body, operators):
            locator = Locator(class_name, fn_name, ordinal)
            for payload in site.payload_variants():
                specs.append(MutationSpec(op, locator, payload, OPERATOR_DEFECT_CLASS[op]))
    return [spec for spec in specs if _compiles(program, spec)]


def _compiles(program: Program, spec: MutationSpec) -> bool:
    try:
        apply_mutation(program, spec)
        return True
    except MutationError:
        return False


def mutation_score(
    cut_source: str,
    test_source: str,
    operators: Sequence[str] = DEFAULT_OPERATORS,
    budget: Budget | None = None,
) -> MutationReport:
    """Generate mutants of the component and count how many the suite kills
    (suite no longer green). The suite must be green on the original."""
    from .syntax import parse_program

    budget = budget or Budget()
    base = run_suite(cut_source, test_source, budget)
    if base.outcome_class != ATTEMPT_PASSED:
        raise SuiteNotGreen(f"suite is {base.outcome_class} on the original component")
    cut = parse_program(cut_source, "cut", file_id="component.ship")
    per_mutant: list[tuple[MutationSpec, Optional[str]]] = []
    killed = 0
    for spec in enumerate_mutants(cut, operators):
        mutant = apply_mutation(cut, spec)
        result = run_suite(mutant.source, test_source, budget)
        killer = _first_killer(result)
        if result.outcome_class != ATTEMPT_PASSED:
            killed += 1
            per_mutant.append((spec, killer if killer else "<compile>"))
        else:
            per_mutant.append((spec, None))
    generated = len(per_mutant)
    return MutationReport(
        generated=generated,
        killed=killed,
        survived=generated - killed,
        per_mutant=tuple(per_mutant),
    )


def _first_killer(result: SuiteResult) -> Optional[str]:
    for outcome in result.tests:
        if not outcome.passed:
            return outcome.name
    return None
