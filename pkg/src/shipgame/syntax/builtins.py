"""Builtin function surface of ShipLang.

The assertion builtins are only legal in test code; component code using
them is a compile error.
"""

BUILTIN_ARITY = {
    "print": 1,
    "len": 1,
    "floor": 1,
    "abs": 1,
    "min": 2,
    "max": 2,
    "assertTrue": 1,
    "assertFalse": 1,
    "assertEquals": 2,
    "assertEqualsDelta": 3,
    "fail": 1,
}

TEST_ONLY_BUILTINS = frozenset({"assertTrue", "assertFalse", "assertEquals", "assertEqualsDelta", "fail"})

ASSERTION_BUILTINS = TEST_ONLY_BUILTINS
