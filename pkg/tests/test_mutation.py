"""Sabotage engine tests.

The 20-line fixture's mutant count is checked against an independent
AST-walk oracle written here (it never calls the engine's site collector),
and the engine's mutation score is checked against a brute-force rerun of
the suite over every mutant.
"""

import dataclasses
from fractions import Fraction

import pytest

from shipgame import syntax as S
from shipgame.mutation import (
    DEFAULT_OPERATORS, Locator, LocatorNotFound, MutantDoesNotCompile,
    MutationSpec, SuiteNotGreen, apply_mutation, enumerate_mutants,
    mutation_score,
)
from shipgame.syntax import parse_program, pretty_print
from shipgame.testkit import run_suite

from helpers import parse_cut

# exactly 20 lines, intentionally touching every default operator's targets
FIXTURE_CUT = """class Meter {
    int reading;
    bool armed;
    Meter(int start) {
        reading = start;
        armed = true;
    }

    int charge(int amount, int bonus) {
        if (amount < 0) {
            return 0;
        }
        while (reading > 100) {
            reading = reading - 10;
            break;
        }
        reading = reading + min(amount, bonus) * 2;
        return reading;
    }
}
"""

FIXTURE_SUITE = """fn test_charge_adds_twice_the_smaller_amount() {
    Meter meter = new Meter(1);
    assertEquals(7, meter.charge(3, 5));
}

fn test_negative_amounts_are_ignored() {
    Meter meter = new Meter(1);
    assertEquals(0, meter.charge(-2, 1));
}

fn test_overflow_drains_once() {
    Meter meter = new Meter(150);
    assertEquals(146, meter.charge(3, 9));
}
"""


def test_ror_sabotage_matches_level1(cryo, cryo_program):
    # the level-1 sabotage turns <= into <, so a one-day pod never wakes
    mutant = apply_mutation(cryo_program, cryo.sabotage)
    assert "remaining < 0" in mutant.source
    assert "remaining <= 0" not in mutant.source
    reference_run = run_suite(cryo.cut_source, cryo.hidden_tests)
    mutant_run = run_suite(mutant.source, cryo.hidden_tests)
    assert reference_run.passed and not mutant_run.passed


def test_applying_then_reverting_is_identity(cryo_program):
    swap = MutationSpec(
        "relational_swap", Locator("CryoSleep", "dayPassed", 0), {"replacement": "<"}
    )
    swap_back = MutationSpec(
        "relational_swap", Locator("CryoSleep", "dayPassed", 0), {"replacement": "<="}
    )
    mutant = apply_mutation(cryo_program, swap)
    restored = apply_mutation(parse_program(mutant.source, "cut"), swap_back)
    assert restored.source == pretty_print(cryo_program)


def test_break_deletion_causes_fall_through(pack):
    level3 = pack.level(3)
    program = parse_cut(level3.cut_source)
    mutant = apply_mutation(program, level3.sabotage)
    probe = (
        "fn test_dead_plant() {\n"
        "    GreenHouse house = new GreenHouse(1);\n"
        "    house.setPlot(0, 3);\n"
        "    house.tend(0);\n"
        "    assertEquals(1, house.replantedCount());\n"
        "}\n"
    )
    # the replant arm runs for a dead plant only on the mutant
    assert not run_suite(level3.cut_source, probe).passed
    assert run_suite(mutant.source, probe).passed


def test_relational_node_yields_five_specs():
    program = parse_cut("class A {\n    A() {\n        print(1 < 2);\n    }\n}\n")
    specs = enumerate_mutants(program, ["relational_swap"])
    assert len(specs) == 5
    assert {s.payload["replacement"] for s in specs} == {"<=", ">", ">=", "==", "!="}


def test_program_with_no_targets():
    program = parse_cut('class A {\n    A() {\n        print("hi");\n    }\n}\n')
    specs = enumerate_mutants(program, ["relational_swap", "arithmetic_swap", "delete_break"])
    assert specs == []


# --- independent AST-walk oracle -------------------------------------------


def _oracle_count(program) -> int:
    """Count (operator, node, variant) candidates by walking the tree with
    the public node API only; mirrors the documented operator table."""
    count = 0
    for cls in program.classes:
        bodies = [c.body for c in cls.ctors] + [m.body for m in cls.methods]
        for body in bodies:
            count += _oracle_body(body)
    for fn in program.functions:
        count += _oracle_body(fn.body)
    return count


def _oracle_body(body) -> int:
    count = 0
    for node in S.walk(body):
        if isinstance(node, S.Binary):
            if node.op in ("<", "<=", ">", ">=", "==", "!="):
                count += 5
            elif node.op in ("+", "-", "*", "/", "%"):
                count += 4
        if isinstance(node, (S.If, S.While)):
            count += 1  # negate the condition
        if isinstance(node, S.IntLit):
            count += 1 if node.value == 0 else 2
        if isinstance(node, S.BoolLit):
            count += 1
        if isinstance(node, S.Break):
            count += 1
        if isinstance(node, (S.Call, S.MethodCall, S.New)) and len(node.args) == 2:
            count += 1
    # perturbing a case label into another label of the same switch would not
    # re-resolve (duplicate labels); those candidates never materialize
    for node in S.walk(body):
        if isinstance(node, S.Switch):
            count -= _colliding_label_variants(node)
    return count


def _colliding_label_variants(switch) -> int:
    def effective(label):
        if isinstance(label, S.Unary):
            return -label.operand.value
        return label.value

    int_labels = [effective(arm.value) for arm in switch.cases
                  if isinstance(arm.value, (S.IntLit, S.Unary))]
    dropped = 0
    for arm in switch.cases:
        label = arm.value
        if isinstance(label, S.IntLit):
            candidates = [label.value + 1] + ([0] if label.value != 0 else [])
        elif isinstance(label, S.Unary):
            inner = label.operand.value
            candidates = [-(inner + 1)] + ([0] if inner != 0 else [])
        else:
            continue
        others = list(int_labels)
        others.remove(effective(label))
        dropped += sum(1 for candidate in candidates if candidate in others)
    return dropped


def test_fixture_is_twenty_lines():
    assert len(FIXTURE_CUT.strip().splitlines()) == 20


def test_enumerate_count_matches_ast_walk_oracle():
    program = parse_cut(FIXTURE_CUT)
    specs = enumerate_mutants(program, DEFAULT_OPERATORS)
    assert len(specs) == _oracle_count(program)


def test_enumerate_matches_oracle_on_shipped_levels(pack):
    # the shipped components have no label collisions, so the raw count holds
    for spec in pack.levels:
        program = parse_cut(spec.cut_source)
        assert len(enumerate_mutants(program)) == _oracle_count(program)


def test_every_mutant_compiles(pack):
    sources = [FIXTURE_CUT] + [spec.cut_source for spec in pack.levels]
    for source in sources:
        program = parse_cut(source)
        for spec in enumerate_mutants(program):
            mutant = apply_mutation(program, spec)
            reparsed, diags = S.try_parse_program(mutant.source, "cut")
            assert reparsed is not None, (spec, diags)


def test_enumeration_is_deterministic():
    program = parse_cut(FIXTURE_CUT)
    assert enumerate_mutants(program) == enumerate_mutants(program)


def test_mutation_score_matches_brute_force():
    report = mutation_score(FIXTURE_CUT, FIXTURE_SUITE)
    # brute force: apply every spec and rerun the suite from scratch
    program = parse_cut(FIXTURE_CUT)
    specs = enumerate_mutants(program)
    killed = 0
    for spec in specs:
        mutant = apply_mutation(program, spec)
        if not run_suite(mutant.source, FIXTURE_SUITE).passed:
            killed += 1
    assert report.generated == len(specs)
    assert report.killed == killed
    assert report.survived == report.generated - killed
    assert report.score == Fraction(killed, len(specs))


def test_vacuous_suite_scores_zero():
    report = mutation_score(FIXTURE_CUT, "")
    assert report.killed == 0
    assert report.score == 0
    assert report.generated > 0


def test_exhaustive_suite_kills_all_arithmetic_mutants():
    cut = (
        "class Adder {\n"
        "    Adder() {\n"
        "    }\n"
        "\n"
        "    int add(int a, int b) {\n"
        "        return a + b;\n"
        "    }\n"
        "}\n"
    )
    # 7 and 2 distinguish + from -, *, / and % simultaneously
    suite = (
        "fn test_pins_addition() {\n"
        "    Adder adder = new Adder();\n"
        "    assertEquals(9, adder.add(7, 2));\n"
        "}\n"
    )
    report = mutation_score(cut, suite, operators=["arithmetic_swap"])
    assert report.generated == 4
    assert report.killed == 4


def test_killing_monotonicity():
    weak = "fn test_weak() {\n    Meter meter = new Meter(1);\n    meter.charge(3, 5);\n}\n"
    strong = weak + "\n" + FIXTURE_SUITE
    weak_report = mutation_score(FIXTURE_CUT, weak)
    strong_report = mutation_score(FIXTURE_CUT, strong)
    assert strong_report.killed >= weak_report.killed
    weak_killed = {(s.operator, s.locator, tuple(sorted(s.payload.items())))
                   for s, killer in weak_report.per_mutant if killer}
    strong_killed = {(s.operator, s.locator, tuple(sorted(s.payload.items())))
                     for s, killer in strong_report.per_mutant if killer}
    assert weak_killed <= strong_killed


def test_score_requires_green_baseline():
    with pytest.raises(SuiteNotGreen):
        mutation_score(FIXTURE_CUT, "fn test_no() { assertTrue(false); }")


def test_locator_errors():
    program = parse_cut(FIXTURE_CUT)
    with pytest.raises(LocatorNotFound):
        apply_mutation(program, MutationSpec(
            "relational_swap", Locator("Meter", "missing", 0), {"replacement": "<"}
        ))
    with pytest.raises(LocatorNotFound):
        apply_mutation(program, MutationSpec(
            "relational_swap", Locator("Meter", "charge", 99), {"replacement": "<"}
        ))


def test_non_compiling_mutant_is_rejected_and_filtered():
    cut = (
        "class Pick {\n"
        "    int mode;\n"
        "\n"
        "    Pick(int m) {\n"
        "        mode = m;\n"
        "    }\n"
        "\n"
        "    int label() {\n"
        "        switch (mode) {\n"
        "            case 1:\n"
        "                return 10;\n"
        "            case 2:\n"
        "                return 20;\n"
        "        }\n"
        "        return 0;\n"
        "    }\n"
        "}\n"
    )
    program = parse_cut(cut)
    # perturbing `case 1` to `case 2` collides with the existing label
    collide = MutationSpec("perturb_constant", Locator("Pick", "label", 0),
                           {"variant": "plus-one"})
    with pytest.raises(MutantDoesNotCompile):
        apply_mutation(program, collide)
    specs = enumerate_mutants(program, ["perturb_constant"])
    assert all(
        not (s.locator == collide.locator and s.payload == collide.payload)
        for s in specs
    )


def test_single_node_diff_property(pack):
    # structural diff of original vs mutant trees has exactly one differing
    # position; child order and arity belong to the parent node
    for spec in pack.levels:
        program = parse_cut(spec.cut_source)
        for mspec in enumerate_mutants(program)[::3] + [spec.sabotage]:
            mutant = apply_mutation(program, mspec)
            diffs = _tree_diff(program.classes, mutant.classes, "classes")
            assert len(diffs) == 1, (mspec, diffs)


def _is_node(value) -> bool:
    return dataclasses.is_dataclass(value) and not isinstance(value, type)


def _local_signature(node):
    """Node-local identity: type plus scalar fields (spans ignored)."""
    sig = [type(node).__name__]
    for field in dataclasses.fields(node):
        if not field.compare:
            continue
        value = getattr(node, field.name)
        if _is_node(value):
            sig.append((field.name, type(value).__name__))
        elif isinstance(value, list):
            sig.append((field.name, tuple(type(v).__name__ for v in value)))
        else:
            sig.append((field.name, repr(value)))
    return tuple(sig)


def _multiset_equal(a: list, b: list) -> bool:
    remaining = list(b)
    for item in a:
        for i, candidate in enumerate(remaining):
            if item == candidate:
                del remaining[i]
                break
        else:
            return False
    return not remaining


def _tree_diff(a, b, path):
    if isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            return [path]  # insertion/deletion is one position: the parent list
        if [type(x).__name__ for x in a] != [type(x).__name__ for x in b]:
            if _multiset_equal(a, b):
                return [path]  # pure reorder, owned by the parent
            return [path]
        out = []
        for i, (x, y) in enumerate(zip(a, b)):
            out.extend(_tree_diff(x, y, f"{path}[{i}]"))
        if len(out) > 1 and _multiset_equal(a, b):
            return [path]  # same children, different order
        return out
    if _is_node(a) and _is_node(b):
        if _local_signature(a) != _local_signature(b):
            return [path]
        out = []
        for field in dataclasses.fields(a):
            if not field.compare:
                continue
            va, vb = getattr(a, field.name), getattr(b, field.name)
            if _is_node(va) or isinstance(va, list):
                out.extend(_tree_diff(va, vb, f"{path}.{field.name}"))
        return out
    return [] if a == b else [path]
