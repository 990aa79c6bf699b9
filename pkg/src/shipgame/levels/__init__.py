"""Level packs: component sources, hidden oracle suites, sabotage specs.

A pack is a directory of level directories (level1, level2, ...), each with
cut.ship, hidden.ship and level.meta (JSON). Levels must be contiguous from
index 1. The validator enforces every game-critical invariant before a pack
is deployed:

  (a) compile           - component and hidden suite parse and resolve
  (b) hidden-green      - hidden suite passes on the reference component
  (c) mutant-compiles   - the sabotage applies and the mutant re-parses
  (d) hidden-kills      - >= 1 hidden test fails on the mutant, and the
                          failing set matches the meta killer_tests tags
                          (the robot reveals a tagged killer on destruction)
  (e) threshold         - hidden merged coverage >= the activation threshold
  (f) locator           - the sabotage locator resolves to exactly one node
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from ..mutation import LocatorNotFound, MutantDoesNotCompile, MutationSpec, apply_mutation
from ..runtime import Budget
from ..syntax import try_parse_program
from ..testkit import ATTEMPT_PASSED, run_suite

CHECK_IDS = ("compile", "hidden-green", "mutant-compiles", "hidden-kills", "threshold", "locator")


class LevelPackError(Exception):
    pass


@dataclass(frozen=True)
class LevelSpec:
    index: int
    name: str
    cut_source: str
    hidden_tests: str
    sabotage: MutationSpec
    killer_tests: tuple[str, ...]
    intro_dialog: str
    debug_hint: str
    coverage_threshold: Fraction
    puzzle_size: tuple[int, int]

    def __post_init__(self) -> None:
        if not 1 <= self.index:
            raise ValueError("level index must be >= 1")
        if not 0 < self.coverage_threshold <= 1:
            raise ValueError("coverage threshold must be in (0, 1]")


@dataclass(frozen=True)
class CheckResult:
    check: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    level: int
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            mark = "ok" if c.passed else "FAIL"
            out.append(f"level {self.level} {c.check:16s} {mark}  {c.detail}")
        return out


@dataclass(frozen=True)
class LevelPack:
    path: str
    levels: tuple[LevelSpec, ...]

    @property
    def size(self) -> int:
        return len(self.levels)

    def level(self, index: int) -> LevelSpec:
        if not 1 <= index <= len(self.levels):
            raise LevelPackError(f"no level {index} in this pack")
        return self.levels[index - 1]


def default_pack_path() -> Path:
    return Path(__file__).resolve().parent / "packs" / "default"


def load_level_pack(path: str | Path | None = None) -> LevelPack:
    """Load and index a pack directory; raises LevelPackError on schema
    violations, a missing level 1 or a gap in the sequence."""
    root = Path(path) if path is not None else default_pack_path()
    if not root.is_dir():
        raise LevelPackError(f"level pack directory not found: {root}")
    indexed: dict[int, LevelSpec] = {}
    for entry in sorted(root.iterdir()):
        if not entry.is_dir() or not entry.name.startswith("level"):
            continue
        try:
            index = int(entry.name.removeprefix("level"))
        except ValueError:
            raise LevelPackError(f"bad level directory name: {entry.name}") from None
        spec = _load_level_dir(entry, index)
        if index in indexed:
            raise LevelPackError(f"duplicate level index {index}")
        indexed[index] = spec
    if not indexed:
        raise LevelPackError(f"missing level 1 in {root}")
    count = len(indexed)
    missing = [i for i in range(1, count + 1) if i not in indexed]
    if missing:
        raise LevelPackError(
            f"non-contiguous levels: present {sorted(indexed)}, missing {missing}"
        )
    return LevelPack(str(root), tuple(indexed[i] for i in range(1, count + 1)))


def _load_level_dir(entry: Path, index: int) -> LevelSpec:
    cut_file = entry / "cut.ship"
    hidden_file = entry / "hidden.ship"
    meta_file = entry / "level.meta"
    for required in (cut_file, hidden_file, meta_file):
        if not required.is_file():
            raise LevelPackError(f"{entry.name}: missing {required.name}")
    try:
        meta = json.loads(meta_file.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise LevelPackError(f"{entry.name}: level.meta is not valid JSON: {err}") from None
    try:
        if int(meta["index"]) != index:
            raise LevelPackError(
                f"{entry.name}: meta index {meta['index']} does not match directory"
            )
        puzzle = meta.get("puzzle", {})
        return LevelSpec(
            index=index,
            name=str(meta["name"]),
            cut_source=cut_file.read_text(encoding="utf-8"),
            hidden_tests=hidden_file.read_text(encoding="utf-8"),
            sabotage=MutationSpec.from_dict(meta["sabotage"]),
            killer_tests=tuple(meta.get("killer_tests", [])),
            intro_dialog=str(meta.get("intro_dialog", "")),
            debug_hint=str(meta.get("debug_hint", "")),
            coverage_threshold=Fraction(str(meta.get("coverage_threshold", "1/2"))),
            puzzle_size=(int(puzzle.get("width", 3)), int(puzzle.get("height", 3))),
        )
    except (KeyError, TypeError, ValueError) as err:
        raise LevelPackError(f"{entry.name}: schema violation: {err}") from None


def validate_level(spec: LevelSpec, budget: Budget | None = None) -> ValidationReport:
    """Run the six deployment checks. Failures are report entries, never
    exceptions."""
    budget = budget or Budget()
    checks: list[CheckResult] = []

    cut, cut_diags = try_parse_program(spec.cut_source, "cut", file_id="component.ship")
    hidden = None
    if cut is not None:
        externals = {cls.name: cls for cls in cut.classes}
        hidden, hidden_diags = try_parse_program(
            spec.hidden_tests, "test", file_id="tests.ship", externals=externals
        )
    else:
        hidden_diags = []
    if cut is None:
        detail = "; ".join(d.describe() for d in cut_diags)
        checks.append(CheckResult("compile", False, f"component: {detail}"))
    elif hidden is None:
        detail = "; ".join(d.describe() for d in hidden_diags)
        checks.append(CheckResult("compile", False, f"hidden suite: {detail}"))
    else:
        n_tests = len(hidden.test_functions())
        checks.append(CheckResult("compile", True, f"{n_tests} hidden tests"))

    if cut is None or hidden is None:
        for check in CHECK_IDS[1:]:
            checks.append(CheckResult(check, False, "not run: compile failed"))
        return ValidationReport(spec.index, tuple(checks))

    reference_run = run_suite(spec.cut_source, spec.hidden_tests, budget)
    green = reference_run.outcome_class == ATTEMPT_PASSED
    checks.append(
        CheckResult(
            "hidden-green",
            green,
            f"outcome {reference_run.outcome_class}"
            + ("" if green else ": " + _failures(reference_run)),
        )
    )

    # locator resolution (f) feeds the mutant checks (c) and (d)
    mutant = None
    locator_detail = ""
    try:
        mutant = apply_mutation(cut, spec.sabotage)
        locator_ok = True
        locator_detail = (
            f"{spec.sabotage.operator} @ {spec.sabotage.locator.function}"
            f"#{spec.sabotage.locator.ordinal}"
        )
    except LocatorNotFound as err:
        locator_ok = False
        locator_detail = str(err)
    except MutantDoesNotCompile as err:
        locator_ok = True
        locator_detail = f"resolves, but mutant does not compile: {err}"

    if mutant is None:
        checks.append(CheckResult("mutant-compiles", False, locator_detail))
        checks.append(CheckResult("hidden-kills", False, "not run: no mutant"))
    else:
        reparsed, mutant_diags = try_parse_program(mutant.source, "cut")
        if reparsed is None:
            checks.append(
                CheckResult(
                    "mutant-compiles", False,
                    "; ".join(d.describe() for d in mutant_diags),
                )
            )
        else:
            checks.append(CheckResult("mutant-compiles", True, "sabotaged component compiles"))
        mutant_run = run_suite(mutant.source, spec.hidden_tests, budget)
        observed_killers = tuple(t.name for t in mutant_run.tests if not t.passed)
        kills = mutant_run.outcome_class != ATTEMPT_PASSED
        tags_match = set(observed_killers) == set(spec.killer_tests)
        detail = f"killers: {', '.join(observed_killers) if observed_killers else 'none'}"
        if not tags_match:
            detail += f"; meta tags {list(spec.killer_tests)} do not match"
        checks.append(CheckResult("hidden-kills", kills and tags_match, detail))

    if reference_run.coverage is None:
        checks.append(CheckResult("threshold", False, "component has no executable lines"))
    else:
        ratio = reference_run.coverage.ratio
        ok = ratio >= spec.coverage_threshold
        checks.append(
            CheckResult(
                "threshold", ok,
                f"hidden coverage {ratio} vs threshold {spec.coverage_threshold}",
            )
        )

    checks.append(CheckResult("locator", locator_ok, locator_detail))
    ordered = {c.check: c for c in checks}
    return ValidationReport(spec.index, tuple(ordered[c] for c in CHECK_IDS))


def validate_pack(pack: LevelPack, budget: Budget | None = None) -> list[ValidationReport]:
    return [validate_level(spec, budget) for spec in pack.levels]


def _failures(result) -> str:
    return "; ".join(f"{t.name}: {t.message.splitlines()[0] if t.message else t.verdict}"
                     for t in result.tests if not t.passed)
