"""Per-player game state machine.

Phase flow per level:

    locked -> testing -> activated -> (sabotaged-alarm | sabotaged-destroyed)
           -> debugging* -> repaired -> (minigame) -> next level unlocks

Operations validate first and then apply their effects exclusively through
events (`apply_event`), so a rejected operation leaves the state untouched
and replaying a player's event log through the same apply path reproduces
the final snapshot byte for byte.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .levels import LevelPack, LevelSpec
from .minigame import PuzzleGrid, generate, is_solved
from .mutation import apply_mutation
from .runtime import Budget
from .syntax import parse_program, pretty_print
from .telemetry import (
    ACTIVATION, ATTEMPT, BUFFER_SAVED, EDITOR_CLOSED, EDITOR_OPENED,
    FIX_SUBMITTED, HIDDEN_TEST_REVEALED, MINIGAME_SOLVED, MINIGAME_STARTED,
    PRINT_USED, SABOTAGE, UI_ACTIVITY, EventRecord,
)
from .testkit import SuiteResult, run_suite

# phases
LOCKED = "locked"
TESTING = "testing"
ACTIVATED = "activated"
SABOTAGED_ALARM = "sabotaged-alarm"
SABOTAGED_DESTROYED = "sabotaged-destroyed"
DEBUGGING = "debugging"
REPAIRED = "repaired"

PHASES = (LOCKED, TESTING, ACTIVATED, SABOTAGED_ALARM, SABOTAGED_DESTROYED, DEBUGGING, REPAIRED)

# the documented edge set (state machine property tests check against this)
PHASE_EDGES = frozenset(
    {
        (LOCKED, TESTING),
        (TESTING, ACTIVATED),
        (ACTIVATED, SABOTAGED_ALARM),
        (ACTIVATED, SABOTAGED_DESTROYED),
        (SABOTAGED_ALARM, DEBUGGING),
        (SABOTAGED_DESTROYED, DEBUGGING),
        (SABOTAGED_ALARM, REPAIRED),
        (SABOTAGED_DESTROYED, REPAIRED),
        (DEBUGGING, DEBUGGING),
        (DEBUGGING, REPAIRED),
    }
)

FIX_PLAYER_TESTS_FAILING = "player-tests-failing"
FIX_HIDDEN_TEST_REVEALED = "hidden-test-revealed"
FIX_REPAIRED = "repaired"


class GameError(Exception):
    """A rejected operation; the player state is guaranteed unchanged."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class LevelState:
    phase: str = LOCKED
    cut_buffer: str = ""
    test_buffer: str = ""
    activated_suite: Optional[str] = None
    revealed_hidden_tests: list[str] = field(default_factory=list)
    sabotage_due_at: Optional[int] = None
    last_run: Optional[dict] = None  # {"hash", "outcome", "ratio", "n_tests"}
    puzzle: Optional[dict] = None  # issued PuzzleGrid, serialized

    def to_dict(self) -> dict:
        return {
            "phase": self.phase,
            "cut_buffer": self.cut_buffer,
            "test_buffer": self.test_buffer,
            "activated_suite": self.activated_suite,
            "revealed_hidden_tests": list(self.revealed_hidden_tests),
            "sabotage_due_at": self.sabotage_due_at,
            "last_run": self.last_run,
            "puzzle": self.puzzle,
        }

    @staticmethod
    def from_dict(data: dict) -> "LevelState":
        return LevelState(
            phase=data["phase"],
            cut_buffer=data["cut_buffer"],
            test_buffer=data["test_buffer"],
            activated_suite=data.get("activated_suite"),
            revealed_hidden_tests=list(data.get("revealed_hidden_tests", [])),
            sabotage_due_at=data.get("sabotage_due_at"),
            last_run=data.get("last_run"),
            puzzle=data.get("puzzle"),
        )


@dataclass
class PlayerState:
    player_id: str
    current_level: int
    game_complete: bool
    levels: dict  # int -> LevelState

    def level(self, index: int) -> LevelState:
        return self.levels[index]

    def to_dict(self) -> dict:
        return {
            "player_id": self.player_id,
            "current_level": self.current_level,
            "game_complete": self.game_complete,
            "levels": {str(i): ls.to_dict() for i, ls in sorted(self.levels.items())},
        }

    @staticmethod
    def from_dict(data: dict) -> "PlayerState":
        return PlayerState(
            player_id=data["player_id"],
            current_level=int(data["current_level"]),
            game_complete=bool(data["game_complete"]),
            levels={int(i): LevelState.from_dict(ls) for i, ls in data["levels"].items()},
        )


def snapshot_bytes(state: PlayerState) -> bytes:
    """Canonical serialized form; replay equality is byte equality of this."""
    return json.dumps(state.to_dict(), sort_keys=True, separators=(",", ":")).encode("utf-8")


def new_player_state(player_id: str, pack: LevelPack) -> PlayerState:
    levels = {i: LevelState() for i in range(1, pack.size + 1)}
    levels[1] = LevelState(phase=TESTING, cut_buffer=pack.level(1).cut_source)
    return PlayerState(player_id=player_id, current_level=1, game_complete=False, levels=levels)


def _buffers_hash(cut: str, test: str) -> str:
    digest = hashlib.sha256()
    digest.update(cut.encode("utf-8"))
    digest.update(b"\x00")
    digest.update(test.encode("utf-8"))
    return digest.hexdigest()[:16]


def _append_test(buffer: str, source: str) -> str:
    if not buffer.strip():
        return source
    return buffer.rstrip("\n") + "\n\n" + source


def _test_source(spec: LevelSpec, test_name: str) -> str:
    cut = parse_program(spec.cut_source, "cut")
    hidden = parse_program(
        spec.hidden_tests, "test", externals={c.name: c for c in cut.classes}
    )
    fn = hidden.function_named(test_name)
    if fn is None:  # pragma: no cover - validator guarantees tagged killers exist
        raise GameError("wrong-phase", f"unknown hidden test {test_name}")
    hidden.functions = [fn]
    hidden.classes = []
    return pretty_print(hidden).rstrip("\n") + "\n"


# --- event application (shared by live operations and replay) ---------------


def apply_event(state: PlayerState, event: EventRecord, pack: LevelPack) -> None:
    kind = event.kind
    if kind in (EDITOR_OPENED, EDITOR_CLOSED, UI_ACTIVITY, PRINT_USED):
        return
    level = state.level(event.level)
    payload = event.payload
    if kind == BUFFER_SAVED:
        pane = payload["pane"]
        if pane == "cut":
            level.cut_buffer = payload["text"]
            if level.phase in (SABOTAGED_ALARM, SABOTAGED_DESTROYED):
                level.phase = DEBUGGING
        else:
            level.test_buffer = payload["text"]
    elif kind == ATTEMPT:
        level.last_run = {
            "hash": payload["hash"],
            "outcome": payload["class"],
            "ratio": payload["ratio"],
            "n_tests": payload["n_tests"],
        }
    elif kind == ACTIVATION:
        level.phase = ACTIVATED
        level.activated_suite = payload["suite"]
        level.sabotage_due_at = payload["due_at"]
    elif kind == SABOTAGE:
        level.cut_buffer = payload["mutant_source"]
        level.sabotage_due_at = None
        level.phase = (
            SABOTAGED_ALARM if payload["outcome"] == "alarm" else SABOTAGED_DESTROYED
        )
    elif kind == HIDDEN_TEST_REVEALED:
        name = payload["test"]
        if name not in level.revealed_hidden_tests:
            level.revealed_hidden_tests.append(name)
            level.test_buffer = _append_test(level.test_buffer, payload["source"])
    elif kind == FIX_SUBMITTED:
        outcome = payload["outcome"]
        if outcome == FIX_REPAIRED:
            level.phase = REPAIRED
        else:
            level.phase = DEBUGGING
    elif kind == MINIGAME_STARTED:
        level.puzzle = payload["grid"]
    elif kind == MINIGAME_SOLVED:
        level.puzzle = None
        if event.level == state.current_level:
            if state.current_level < pack.size:
                state.current_level += 1
                nxt = state.level(state.current_level)
                nxt.phase = TESTING
                nxt.cut_buffer = pack.level(state.current_level).cut_source
            else:
                state.game_complete = True
    else:  # pragma: no cover
        raise AssertionError(f"unhandled event {kind}")


def replay(player_id: str, events, pack: LevelPack) -> PlayerState:
    """Rebuild a player's state by applying their event log in order."""
    state = new_player_state(player_id, pack)
    for event in events:
        if event.player_id == player_id:
            apply_event(state, event, pack)
    return state


# --- operations -------------------------------------------------------------


def _require_unlocked(state: PlayerState, level: int, pack: LevelPack) -> LevelState:
    if not 1 <= level <= pack.size:
        raise GameError("level-locked", f"there is no level {level}")
    ls = state.level(level)
    if ls.phase == LOCKED:
        raise GameError("level-locked", f"level {level} is still locked")
    return ls


def _editor_context(phase: str) -> str:
    return "debugging" if phase in (SABOTAGED_ALARM, SABOTAGED_DESTROYED, DEBUGGING) else "testing"


def open_editor(state: PlayerState, level: int, now: int, pack: LevelPack) -> list[EventRecord]:
    ls = _require_unlocked(state, level, pack)
    event = EventRecord(now, state.player_id, level, EDITOR_OPENED,
                        {"context": _editor_context(ls.phase)})
    apply_event(state, event, pack)
    return [event]


def close_editor(state: PlayerState, level: int, now: int, pack: LevelPack) -> list[EventRecord]:
    _require_unlocked(state, level, pack)
    event = EventRecord(now, state.player_id, level, EDITOR_CLOSED, {})
    apply_event(state, event, pack)
    return [event]


def record_ui_activity(state: PlayerState, category: str, now: int, pack: LevelPack) -> list[EventRecord]:
    if category not in ("movement", "dialog", "interaction"):
        raise GameError("validation", f"unknown ui activity category {category!r}")
    event = EventRecord(now, state.player_id, None, UI_ACTIVITY, {"category": category})
    apply_event(state, event, pack)
    return [event]


def save_buffer(
    state: PlayerState, level: int, pane: str, text: str, now: int, pack: LevelPack
) -> list[EventRecord]:
    ls = _require_unlocked(state, level, pack)
    if pane not in ("cut", "test"):
        raise GameError("pane-not-editable", f"unknown pane {pane!r}")
    if pane == "cut" and ls.phase not in (SABOTAGED_ALARM, SABOTAGED_DESTROYED, DEBUGGING):
        raise GameError(
            "pane-not-editable",
            "the component code is read-only until it has been sabotaged",
        )
    event = EventRecord(now, state.player_id, level, BUFFER_SAVED, {"pane": pane, "text": text})
    apply_event(state, event, pack)
    return [event]


def run_tests(
    state: PlayerState, level: int, budget: Budget, now: int, pack: LevelPack
) -> tuple[SuiteResult, list[EventRecord]]:
    """Run the player's suite against the phase-appropriate component (the
    cut buffer, which equals the reference before sabotage)."""
    ls = _require_unlocked(state, level, pack)
    result = run_suite(ls.cut_buffer, ls.test_buffer, budget)
    events = [
        EventRecord(
            now, state.player_id, level, ATTEMPT,
            {
                "class": result.outcome_class,
                "ratio": str(result.coverage_ratio),
                "n_tests": len(result.tests),
                "hash": _buffers_hash(ls.cut_buffer, ls.test_buffer),
            },
        )
    ]
    if result.prints_executed > 0:
        events.append(
            EventRecord(now, state.player_id, level, PRINT_USED,
                        {"count": result.prints_executed})
        )
    for event in events:
        apply_event(state, event, pack)
    return result, events


def activate(
    state: PlayerState, level: int, now: int, pack: LevelPack, sabotage_delay_ms: int = 0
) -> list[EventRecord]:
    ls = _require_unlocked(state, level, pack)
    if ls.phase != TESTING:
        raise GameError("wrong-phase", f"cannot activate while {ls.phase}")
    spec = pack.level(level)
    run = ls.last_run
    if run is None or run["hash"] != _buffers_hash(ls.cut_buffer, ls.test_buffer):
        raise GameError("suite-not-green", "run the tests on the current code first")
    if run["outcome"] != "passed":
        raise GameError("suite-not-green", f"the last run was {run['outcome']}")
    if Fraction(run["ratio"]) < spec.coverage_threshold:
        raise GameError(
            "insufficient-coverage",
            f"coverage {run['ratio']} is below the required {spec.coverage_threshold}",
        )
    event = EventRecord(
        now, state.player_id, level, ACTIVATION,
        {"suite": ls.test_buffer, "due_at": now + int(sabotage_delay_ms)},
    )
    apply_event(state, event, pack)
    return [event]


def trigger_sabotage(
    state: PlayerState, level: int, budget: Budget, now: int, pack: LevelPack
) -> tuple[str, list[EventRecord]]:
    """Inject the level's sabotage and judge it with the activated suite."""
    ls = _require_unlocked(state, level, pack)
    if ls.phase != ACTIVATED:
        raise GameError("wrong-phase", f"cannot sabotage while {ls.phase}")
    if ls.sabotage_due_at is None or now < ls.sabotage_due_at:
        raise GameError("not-due", "the sabotage is not due yet")
    spec = pack.level(level)
    reference = parse_program(spec.cut_source, "cut", file_id="component.ship")
    mutant = apply_mutation(reference, spec.sabotage)
    judged = run_suite(mutant.source, ls.activated_suite or "", budget)
    outcome = "alarm" if not judged.passed else "destroyed"
    events = [
        EventRecord(now, state.player_id, level, SABOTAGE,
                    {"outcome": outcome, "mutant_source": mutant.source}),
    ]
    if outcome == "destroyed":
        revealed = next(
            (name for name in spec.killer_tests if name not in ls.revealed_hidden_tests),
            spec.killer_tests[0] if spec.killer_tests else None,
        )
        if revealed is not None:
            events.append(
                EventRecord(
                    now, state.player_id, level, HIDDEN_TEST_REVEALED,
                    {"test": revealed, "source": _test_source(spec, revealed)},
                )
            )
    for event in events:
        apply_event(state, event, pack)
    return outcome, events


@dataclass(frozen=True)
class FixOutcome:
    outcome: str  # player-tests-failing | hidden-test-revealed | repaired
    player_result: SuiteResult
    revealed_test: Optional[str] = None


def submit_fix(
    state: PlayerState, level: int, budget: Budget, now: int, pack: LevelPack
) -> tuple[FixOutcome, list[EventRecord]]:
    ls = _require_unlocked(state, level, pack)
    if ls.phase not in (SABOTAGED_ALARM, SABOTAGED_DESTROYED, DEBUGGING):
        raise GameError("wrong-phase", f"cannot submit a fix while {ls.phase}")
    spec = pack.level(level)
    player_run = run_suite(ls.cut_buffer, ls.test_buffer, budget)
    events: list[EventRecord] = []
    if not player_run.passed:
        fix = FixOutcome(FIX_PLAYER_TESTS_FAILING, player_run)
        events.append(
            EventRecord(now, state.player_id, level, FIX_SUBMITTED,
                        {"outcome": FIX_PLAYER_TESTS_FAILING})
        )
    else:
        hidden_run = run_suite(ls.cut_buffer, spec.hidden_tests, budget)
        if hidden_run.passed:
            fix = FixOutcome(FIX_REPAIRED, player_run)
            events.append(
                EventRecord(now, state.player_id, level, FIX_SUBMITTED,
                            {"outcome": FIX_REPAIRED})
            )
        else:
            failing = [t.name for t in hidden_run.tests if not t.passed]
            new_reveal = next(
                (name for name in failing if name not in ls.revealed_hidden_tests), None
            )
            fix = FixOutcome(FIX_HIDDEN_TEST_REVEALED, player_run, failing[0])
            events.append(
                EventRecord(now, state.player_id, level, FIX_SUBMITTED,
                            {"outcome": FIX_HIDDEN_TEST_REVEALED, "test": failing[0]})
            )
            if new_reveal is not None:
                events.append(
                    EventRecord(
                        now, state.player_id, level, HIDDEN_TEST_REVEALED,
                        {"test": new_reveal, "source": _test_source(spec, new_reveal)},
                    )
                )
    for event in events:
        apply_event(state, event, pack)
    return fix, events


def issue_puzzle(
    state: PlayerState, level: int, now: int, pack: LevelPack, seed: int
) -> tuple[PuzzleGrid, list[EventRecord]]:
    """Hand out (or re-show) the door puzzle for a repaired level."""
    ls = _require_unlocked(state, level, pack)
    if ls.phase != REPAIRED:
        raise GameError("wrong-phase", "repair the component before opening the door panel")
    if ls.puzzle is not None:
        return PuzzleGrid.from_dict(ls.puzzle), []
    width, height = pack.level(level).puzzle_size
    grid = generate(width, height, seed)
    event = EventRecord(now, state.player_id, level, MINIGAME_STARTED, {"grid": grid.to_dict()})
    apply_event(state, event, pack)
    return grid, [event]


def unlock_next(
    state: PlayerState, level: int, solved_grid: PuzzleGrid, now: int, pack: LevelPack
) -> list[EventRecord]:
    """Advance to the next room once the issued puzzle instance is solved."""
    ls = _require_unlocked(state, level, pack)
    if ls.phase != REPAIRED:
        raise GameError("wrong-phase", "repair the component before unlocking the door")
    if state.game_complete and level == pack.size:
        raise GameError("already-at-last-level", "the ship is already secure")
    if ls.puzzle is None:
        raise GameError("puzzle-not-solved", "no puzzle has been issued for this door")
    issued = PuzzleGrid.from_dict(ls.puzzle)
    if not issued.same_layout(solved_grid):
        raise GameError("puzzle-not-solved", "that grid is not the issued puzzle")
    if not is_solved(solved_grid):
        raise GameError("puzzle-not-solved", "the circuit is not connected yet")
    event = EventRecord(now, state.player_id, level, MINIGAME_SOLVED,
                        {"grid": solved_grid.to_dict()})
    apply_event(state, event, pack)
    return [event]
