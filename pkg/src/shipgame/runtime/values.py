"""Runtime values, budgets and execution results for the ShipLang interpreter.

These types are shared by the pure-Python and the compiled interpreter
backends, so result objects compare equal regardless of which backend
produced them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Verdicts of a single execution.
COMPLETED = "completed"
RUNTIME_ERROR = "runtime-error"
ASSERTION_FAILURE = "assertion-failure"
BUDGET_EXHAUSTED = "budget-exhausted"

VERDICTS = (COMPLETED, RUNTIME_ERROR, ASSERTION_FAILURE, BUDGET_EXHAUSTED)

_INT_MIN = -(2**63)
_INT_MASK = 2**64


def wrap_int(value: int) -> int:
    """Wrap to 64-bit two's complement, matching the declared int semantics."""
    return (value - _INT_MIN) % _INT_MASK + _INT_MIN


class ShipList:
    """Growable list value."""

    __slots__ = ("items",)

    def __init__(self, items: list | None = None):
        self.items = items if items is not None else []


class ShipArray:
    """Fixed-length array value."""

    __slots__ = ("items",)

    def __init__(self, items: list):
        self.items = items


class ShipMap:
    """Insertion-ordered map value."""

    __slots__ = ("entries",)

    def __init__(self, entries: dict | None = None):
        self.entries = entries if entries is not None else {}


class ShipObject:
    """Instance of a user class; compared by identity."""

    __slots__ = ("cls", "fields")

    def __init__(self, cls, fields: dict):
        self.cls = cls
        self.fields = fields


class Void:
    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover
        return "<void>"


VOID = Void()

_RENDER_DEPTH = 8


def render(value, depth: int = 0) -> str:
    """Canonical rendering used by print, string concatenation and assertion
    messages. Floats use the shortest round-trip decimal form."""
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return value
    if depth >= _RENDER_DEPTH:
        return "..."
    if isinstance(value, (ShipList, ShipArray)):
        return "[" + ", ".join(render(v, depth + 1) for v in value.items) + "]"
    if isinstance(value, ShipMap):
        return "{" + ", ".join(f"{render(k, depth + 1)}: {render(v, depth + 1)}" for k, v in value.entries.items()) + "}"
    if isinstance(value, ShipObject):
        inner = ", ".join(f"{name}={render(v, depth + 1)}" for name, v in value.fields.items())
        return f"{value.cls.name}({inner})"
    if value is VOID:
        return "void"
    raise AssertionError(f"unrenderable value {value!r}")  # pragma: no cover


def type_name(value) -> str:
    if value is True or value is False:
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "float"
    if isinstance(value, str):
        return "string"
    if isinstance(value, ShipList):
        return "list"
    if isinstance(value, ShipArray):
        return "array"
    if isinstance(value, ShipMap):
        return "map"
    if isinstance(value, ShipObject):
        return value.cls.name
    if value is VOID:
        return "void"
    return type(value).__name__  # pragma: no cover


def is_number(value) -> bool:
    return (isinstance(value, int) or isinstance(value, float)) and not isinstance(value, bool)


def ship_equals(a, b, depth: int = 0) -> bool:
    """Total equality: numbers compare numerically, containers structurally,
    objects by identity, values of different kinds are unequal."""
    if depth > 64:
        return a is b
    a_bool = isinstance(a, bool)
    b_bool = isinstance(b, bool)
    if a_bool or b_bool:
        return a_bool and b_bool and a == b
    if is_number(a) and is_number(b):
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    if isinstance(a, ShipList) and isinstance(b, ShipList):
        return len(a.items) == len(b.items) and all(
            ship_equals(x, y, depth + 1) for x, y in zip(a.items, b.items)
        )
    if isinstance(a, ShipArray) and isinstance(b, ShipArray):
        return len(a.items) == len(b.items) and all(
            ship_equals(x, y, depth + 1) for x, y in zip(a.items, b.items)
        )
    if isinstance(a, ShipMap) and isinstance(b, ShipMap):
        if len(a.entries) != len(b.entries):
            return False
        for key, value in a.entries.items():
            if key not in b.entries or not ship_equals(value, b.entries[key], depth + 1):
                return False
        return True
    if isinstance(a, ShipObject) and isinstance(b, ShipObject):
        return a is b
    return False


@dataclass(frozen=True)
class Budget:
    """Hard execution limits: statement steps and wall-clock milliseconds."""

    max_steps: int = 100_000
    max_wall_ms: int = 2_000

    def __post_init__(self) -> None:
        if self.max_steps <= 0 or self.max_wall_ms <= 0:
            raise ValueError("budget limits must be strictly positive")


@dataclass(frozen=True)
class StackFrame:
    function: str
    line: int


@dataclass
class ExecutionResult:
    """Outcome of running one entry function in the sandbox."""

    verdict: str
    return_value: object = None
    error_message: str = ""
    error_stack: tuple[StackFrame, ...] = ()
    output: tuple[str, ...] = ()
    coverage_hits: dict[int, int] = field(default_factory=dict)
    steps_used: int = 0

    @property
    def hit_lines(self) -> tuple[int, ...]:
        return tuple(sorted(self.coverage_hits))

    def describe_error(self) -> str:
        if not self.error_message:
            return ""
        lines = [self.error_message]
        for frame in self.error_stack:
            lines.append(f"  at {frame.function} (line {frame.line})")
        return "\n".join(lines)
