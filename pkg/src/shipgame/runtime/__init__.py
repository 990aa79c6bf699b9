"""Sandboxed ShipLang execution.

The interpreter kernel has two interchangeable backends: the pure-Python
module (`interp`) and, when built via `setup.py build_ext --inplace`, a
Cython-compiled copy of the same source (`_interp_speed`). The compiled one
is preferred; set SHIPGAME_PURE_INTERP=1 to force the pure backend.
"""

from __future__ import annotations

import os

from .coverage import CoverageReport, merge_coverage
from .values import (
    ASSERTION_FAILURE, BUDGET_EXHAUSTED, COMPLETED, RUNTIME_ERROR, VERDICTS,
    Budget, ExecutionResult, ShipArray, ShipList, ShipMap, ShipObject,
    StackFrame, render, ship_equals,
)

if os.environ.get("SHIPGAME_PURE_INTERP"):
    from . import interp as _impl
else:
    try:
        from . import _interp_speed as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import interp as _impl

execute = _impl.execute
MAX_CALL_DEPTH = _impl.MAX_CALL_DEPTH

INTERP_BACKEND = "compiled" if str(getattr(_impl, "__file__", "")).endswith((".so", ".pyd")) else "pure"

__all__ = [
    "ASSERTION_FAILURE", "BUDGET_EXHAUSTED", "COMPLETED", "RUNTIME_ERROR",
    "VERDICTS", "Budget", "CoverageReport", "ExecutionResult", "INTERP_BACKEND",
    "MAX_CALL_DEPTH", "ShipArray", "ShipList", "ShipMap", "ShipObject",
    "StackFrame", "execute", "merge_coverage", "render", "ship_equals",
]
