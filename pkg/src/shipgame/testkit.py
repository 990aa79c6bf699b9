"""Run a ShipLang test program against a component and classify the attempt.

Every attempt lands in exactly one of three classes: passed, compile-error,
or failed. Runtime errors and budget exhaustion fold into "failed"; the
per-test verdict keeps the finer distinction for the UI and telemetry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .runtime import Budget, COMPLETED, CoverageReport, execute, merge_coverage
from .syntax import Diagnostic, Program, executable_lines, try_parse_program

ATTEMPT_PASSED = "passed"
ATTEMPT_COMPILE_ERROR = "compile-error"
ATTEMPT_FAILED = "failed"

ATTEMPT_CLASSES = (ATTEMPT_PASSED, ATTEMPT_COMPILE_ERROR, ATTEMPT_FAILED)


@dataclass(frozen=True)
class TestOutcome:
    name: str
    verdict: str
    message: str
    log: tuple[str, ...]
    covered_lines: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return self.verdict == COMPLETED


@dataclass
class SuiteResult:
    outcome_class: str
    tests: tuple[TestOutcome, ...] = ()
    diagnostics: tuple[Diagnostic, ...] = ()
    coverage: CoverageReport | None = None
    prints_executed: int = 0

    @property
    def passed(self) -> bool:
        return self.outcome_class == ATTEMPT_PASSED

    @property
    def coverage_ratio(self) -> Fraction:
        return self.coverage.ratio if self.coverage is not None else Fraction(0)

    @property
    def covered_lines(self) -> tuple[int, ...]:
        return self.coverage.covered if self.coverage is not None else ()

    def compile_error_text(self) -> str:
        return "\n".join(d.describe() for d in self.diagnostics)

    def test_named(self, name: str) -> TestOutcome | None:
        for t in self.tests:
            if t.name == name:
                return t
        return None


def run_suite(cut_source: str, test_source: str, budget: Budget | None = None) -> SuiteResult:
    """Parse both panes and execute every ``test_*`` function in source order,
    each in a fresh interpreter state. Parse or resolve failure of either
    pane is the compile-error outcome, not an exception."""
    budget = budget or Budget()
    cut, cut_diags = try_parse_program(cut_source, "cut", file_id="component.ship")
    if cut is None:
        return SuiteResult(ATTEMPT_COMPILE_ERROR, diagnostics=tuple(cut_diags))
    externals = {cls.name: cls for cls in cut.classes}
    test, test_diags = try_parse_program(test_source, "test", file_id="tests.ship", externals=externals)
    if test is None:
        return SuiteResult(ATTEMPT_COMPILE_ERROR, diagnostics=tuple(test_diags))
    return run_parsed_suite(cut, test, budget)


def run_parsed_suite(cut: Program, test: Program, budget: Budget | None = None) -> SuiteResult:
    budget = budget or Budget()
    denominator = executable_lines(cut)
    outcomes: list[TestOutcome] = []
    hit_maps = []
    prints = 0
    for fn in test.test_functions():
        result = execute(cut, test, fn.name, budget)
        hit_maps.append(result.coverage_hits)
        prints += len(result.output)
        covered = tuple(line for line in result.hit_lines if line in set(denominator))
        outcomes.append(
            TestOutcome(
                name=fn.name,
                verdict=result.verdict,
                message=result.describe_error(),
                log=result.output,
                covered_lines=covered,
            )
        )
    coverage = merge_coverage(hit_maps, denominator) if denominator else None
    all_passed = all(t.passed for t in outcomes)
    return SuiteResult(
        outcome_class=ATTEMPT_PASSED if all_passed else ATTEMPT_FAILED,
        tests=tuple(outcomes),
        coverage=coverage,
        prints_executed=prints,
    )


def classify_attempt(result: SuiteResult) -> str:
    """Three-way bucket of one test run."""
    return result.outcome_class
