import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shipgame import game
from shipgame.game import (
    ACTIVATED, DEBUGGING, GameError, LOCKED, PHASE_EDGES, REPAIRED,
    SABOTAGED_ALARM, SABOTAGED_DESTROYED, TESTING, PlayerState,
    new_player_state, replay, snapshot_bytes,
)
from shipgame.levels import LevelPack, LevelSpec
from shipgame.minigame import solve
from shipgame.mutation import Locator, MutationSpec
from shipgame.runtime import Budget
from shipgame.telemetry import EventLog

LAMP_CUT = """class Lamp {
    int glow;

    Lamp() {
        glow = 1;
    }

    int base() {
        return glow;
    }

    int shine(int extra) {
        return glow + extra;
    }
}
"""

LAMP_HIDDEN = """fn test_shine() {
    Lamp lamp = new Lamp();
    assertEquals(3, lamp.shine(2));
}

fn test_base() {
    Lamp lamp = new Lamp();
    assertEquals(1, lamp.base());
}
"""

GREEN_SUITE = LAMP_HIDDEN  # full coverage, asserts everything
VACUOUS_SUITE = """fn test_touch() {
    Lamp lamp = new Lamp();
    lamp.base();
    lamp.shine(2);
}
"""
RED_SUITE = "fn test_red() {\n    assertTrue(false);\n}\n"
BROKEN_SUITE = "fn test_broken( {"
LOW_COVERAGE_SUITE = """fn test_little() {
    Lamp lamp = new Lamp();
}
"""

# a fix that keeps shine() right but breaks base(): passes a shine-only
# player suite, trips the hidden suite
SNEAKY_FIX = LAMP_CUT.replace("return glow;", "return glow - 1;")

SHINE_ONLY_SUITE = """fn test_shine() {
    Lamp lamp = new Lamp();
    assertEquals(3, lamp.shine(2));
}

fn test_touch() {
    Lamp lamp = new Lamp();
    lamp.base();
}
"""


def lamp_spec(index: int) -> LevelSpec:
    return LevelSpec(
        index=index,
        name=f"Lamp Room {index}",
        cut_source=LAMP_CUT,
        hidden_tests=LAMP_HIDDEN,
        sabotage=MutationSpec(
            "arithmetic_swap", Locator("Lamp", "shine", 0), {"replacement": "-"}
        ),
        killer_tests=("test_shine",),
        intro_dialog="",
        debug_hint="",
        coverage_threshold=Fraction(1, 2),
        puzzle_size=(3, 3),
    )


@pytest.fixture()
def lamp_pack() -> LevelPack:
    return LevelPack("memory", (lamp_spec(1), lamp_spec(2)))


BUDGET = Budget(max_steps=50_000, max_wall_ms=5_000)


def drive_to_activated(state, pack, log=None, suite=GREEN_SUITE):
    events = []
    events += game.save_buffer(state, 1, "test", suite, 10, pack)
    _result, evs = game.run_tests(state, 1, BUDGET, 20, pack)
    events += evs
    events += game.activate(state, 1, 30, pack, sabotage_delay_ms=0)
    if log is not None:
        for event in events:
            log.record(event)
    return events


def test_new_player_starts_at_level_one(lamp_pack):
    state = new_player_state("p", lamp_pack)
    assert state.current_level == 1
    assert state.level(1).phase == TESTING
    assert state.level(1).cut_buffer == LAMP_CUT
    assert state.level(2).phase == LOCKED


def test_cut_pane_read_only_before_sabotage(lamp_pack):
    state = new_player_state("p", lamp_pack)
    with pytest.raises(GameError) as err:
        game.save_buffer(state, 1, "cut", "class X { X() { } }", 5, lamp_pack)
    assert err.value.code == "pane-not-editable"
    game.save_buffer(state, 1, "test", GREEN_SUITE, 5, lamp_pack)  # test pane is fine


def test_locked_level_rejects_everything(lamp_pack):
    state = new_player_state("p", lamp_pack)
    for op in (
        lambda: game.save_buffer(state, 2, "test", "", 5, lamp_pack),
        lambda: game.run_tests(state, 2, BUDGET, 5, lamp_pack),
        lambda: game.activate(state, 2, 5, lamp_pack),
        lambda: game.open_editor(state, 2, 5, lamp_pack),
    ):
        with pytest.raises(GameError) as err:
            op()
        assert err.value.code == "level-locked"


def test_activation_requires_green_and_coverage(lamp_pack):
    state = new_player_state("p", lamp_pack)
    # no run yet
    with pytest.raises(GameError) as err:
        game.activate(state, 1, 5, lamp_pack)
    assert err.value.code == "suite-not-green"
    # red suite, plenty of coverage
    game.save_buffer(state, 1, "test", RED_SUITE + VACUOUS_SUITE, 6, lamp_pack)
    game.run_tests(state, 1, BUDGET, 7, lamp_pack)
    with pytest.raises(GameError) as err:
        game.activate(state, 1, 8, lamp_pack)
    assert err.value.code == "suite-not-green"
    # green but under the threshold
    game.save_buffer(state, 1, "test", LOW_COVERAGE_SUITE, 9, lamp_pack)
    result, _ = game.run_tests(state, 1, BUDGET, 10, lamp_pack)
    assert result.passed and result.coverage_ratio < Fraction(1, 2)
    with pytest.raises(GameError) as err:
        game.activate(state, 1, 11, lamp_pack)
    assert err.value.code == "insufficient-coverage"
    # stale run: buffers changed after the green run
    game.save_buffer(state, 1, "test", GREEN_SUITE, 12, lamp_pack)
    game.run_tests(state, 1, BUDGET, 13, lamp_pack)
    game.save_buffer(state, 1, "test", GREEN_SUITE + "\n", 14, lamp_pack)
    with pytest.raises(GameError) as err:
        game.activate(state, 1, 15, lamp_pack)
    assert err.value.code == "suite-not-green"


def test_sabotage_not_due(lamp_pack):
    state = new_player_state("p", lamp_pack)
    game.save_buffer(state, 1, "test", GREEN_SUITE, 10, lamp_pack)
    game.run_tests(state, 1, BUDGET, 20, lamp_pack)
    game.activate(state, 1, 30, lamp_pack, sabotage_delay_ms=1000)
    with pytest.raises(GameError) as err:
        game.trigger_sabotage(state, 1, BUDGET, 500, lamp_pack)
    assert err.value.code == "not-due"
    outcome, _ = game.trigger_sabotage(state, 1, BUDGET, 1030, lamp_pack)
    assert outcome == "alarm"


def test_alarm_path(lamp_pack):
    state = new_player_state("p", lamp_pack)
    drive_to_activated(state, lamp_pack)
    outcome, _ = game.trigger_sabotage(state, 1, BUDGET, 40, lamp_pack)
    assert outcome == "alarm"
    assert state.level(1).phase == SABOTAGED_ALARM
    assert "glow - extra" in state.level(1).cut_buffer
    # the activated suite is the judge even if the buffer changed afterwards
    assert state.level(1).activated_suite == GREEN_SUITE


def test_destroyed_path_reveals_a_killer(lamp_pack):
    state = new_player_state("p", lamp_pack)
    drive_to_activated(state, lamp_pack, suite=VACUOUS_SUITE)
    outcome, _ = game.trigger_sabotage(state, 1, BUDGET, 40, lamp_pack)
    assert outcome == "destroyed"
    level = state.level(1)
    assert level.phase == SABOTAGED_DESTROYED
    assert level.revealed_hidden_tests == ["test_shine"]
    assert "test_shine" in level.test_buffer
    # the revealed test fails on the mutant buffer and passes on the reference
    from shipgame.testkit import run_suite

    assert not run_suite(level.cut_buffer, level.test_buffer, BUDGET).passed
    assert run_suite(LAMP_CUT, level.test_buffer, BUDGET).passed


def test_fix_outcomes(lamp_pack):
    state = new_player_state("p", lamp_pack)
    drive_to_activated(state, lamp_pack, suite=SHINE_ONLY_SUITE)
    game.trigger_sabotage(state, 1, BUDGET, 40, lamp_pack)
    # 1) still the mutant: the player's own killing test fails
    fix, _ = game.submit_fix(state, 1, BUDGET, 50, lamp_pack)
    assert fix.outcome == "player-tests-failing"
    assert state.level(1).phase == DEBUGGING
    # 2) sneaky fix: player suite green, hidden base() test trips
    game.save_buffer(state, 1, "cut", SNEAKY_FIX, 60, lamp_pack)
    fix, _ = game.submit_fix(state, 1, BUDGET, 70, lamp_pack)
    assert fix.outcome == "hidden-test-revealed"
    assert fix.revealed_test == "test_base"
    assert "test_base" in state.level(1).test_buffer
    assert state.level(1).revealed_hidden_tests == ["test_base"]
    # 3) restore the reference: repaired
    game.save_buffer(state, 1, "cut", LAMP_CUT, 80, lamp_pack)
    fix, _ = game.submit_fix(state, 1, BUDGET, 90, lamp_pack)
    assert fix.outcome == "repaired"
    assert state.level(1).phase == REPAIRED


def full_level_playthrough(state, level, pack, log=None, t0=0):
    events = []
    events += game.save_buffer(state, level, "test", GREEN_SUITE, t0 + 1, pack)
    _r, evs = game.run_tests(state, level, BUDGET, t0 + 2, pack)
    events += evs
    events += game.activate(state, level, t0 + 3, pack, sabotage_delay_ms=0)
    _o, evs = game.trigger_sabotage(state, level, BUDGET, t0 + 4, pack)
    events += evs
    events += game.save_buffer(state, level, "cut", pack.level(level).cut_source, t0 + 5, pack)
    _f, evs = game.submit_fix(state, level, BUDGET, t0 + 6, pack)
    events += evs
    grid, evs = game.issue_puzzle(state, level, t0 + 7, pack, seed=level * 11)
    events += evs
    events += game.unlock_next(state, level, solve(grid), t0 + 8, pack)
    if log is not None:
        for event in events:
            log.record(event)
    return events


def test_unlock_advances_and_completes(lamp_pack):
    state = new_player_state("p", lamp_pack)
    full_level_playthrough(state, 1, lamp_pack)
    assert state.current_level == 2
    assert state.level(2).phase == TESTING
    assert state.level(1).phase == REPAIRED
    full_level_playthrough(state, 2, lamp_pack, t0=100)
    assert state.game_complete
    assert state.current_level == 2
    # no level 3, and solving again is rejected
    with pytest.raises(GameError) as err:
        game.unlock_next(state, 2, solve(game.issue_puzzle(state, 2, 300, lamp_pack, 5)[0]),
                         310, lamp_pack)
    assert err.value.code == "already-at-last-level"


def test_unsolved_grid_rejected(lamp_pack):
    state = new_player_state("p", lamp_pack)
    drive_to_activated(state, lamp_pack)
    game.trigger_sabotage(state, 1, BUDGET, 40, lamp_pack)
    game.save_buffer(state, 1, "cut", LAMP_CUT, 50, lamp_pack)
    game.submit_fix(state, 1, BUDGET, 60, lamp_pack)
    grid, _ = game.issue_puzzle(state, 1, 70, lamp_pack, seed=3)
    with pytest.raises(GameError) as err:
        game.unlock_next(state, 1, grid, 80, lamp_pack)  # issued grids are unsolved
    assert err.value.code == "puzzle-not-solved"
    # a grid from some other puzzle is rejected even if solved
    from shipgame.minigame import generate

    foreign = solve(generate(3, 3, 999))
    with pytest.raises(GameError) as err:
        game.unlock_next(state, 1, foreign, 90, lamp_pack)
    assert err.value.code == "puzzle-not-solved"


def test_serialization_round_trip(lamp_pack):
    state = new_player_state("p", lamp_pack)
    drive_to_activated(state, lamp_pack, suite=VACUOUS_SUITE)
    game.trigger_sabotage(state, 1, BUDGET, 40, lamp_pack)
    restored = PlayerState.from_dict(state.to_dict())
    assert snapshot_bytes(restored) == snapshot_bytes(state)
    # the restored state behaves identically
    fix_a, _ = game.submit_fix(state, 1, BUDGET, 50, lamp_pack)
    fix_b, _ = game.submit_fix(restored, 1, BUDGET, 50, lamp_pack)
    assert fix_a.outcome == fix_b.outcome
    assert snapshot_bytes(restored) == snapshot_bytes(state)


def test_replay_reproduces_snapshots(lamp_pack):
    state = new_player_state("p", lamp_pack)
    log = EventLog()
    full_level_playthrough(state, 1, lamp_pack, log=log)
    rebuilt = replay("p", log.events(), lamp_pack)
    assert snapshot_bytes(rebuilt) == snapshot_bytes(state)


# --- state machine property --------------------------------------------------

SUITES = [GREEN_SUITE, VACUOUS_SUITE, RED_SUITE, BROKEN_SUITE, LOW_COVERAGE_SUITE]
CUTS = [LAMP_CUT, SNEAKY_FIX, "class Broken {"]


def random_op(rng: random.Random, state, pack, clock: int):
    level = rng.choice([1, 2])
    roll = rng.randrange(10)
    if roll == 0:
        return game.save_buffer(state, level, "test", rng.choice(SUITES), clock, pack)
    if roll == 1:
        return game.save_buffer(state, level, "cut", rng.choice(CUTS), clock, pack)
    if roll == 2:
        return game.run_tests(state, level, BUDGET, clock, pack)[1]
    if roll == 3:
        return game.activate(state, level, clock, pack,
                             sabotage_delay_ms=rng.choice([0, 5]))
    if roll == 4:
        return game.trigger_sabotage(state, level, BUDGET, clock, pack)[1]
    if roll == 5:
        return game.submit_fix(state, level, BUDGET, clock, pack)[1]
    if roll == 6:
        return game.issue_puzzle(state, level, clock, pack, seed=rng.randrange(100))[1]
    if roll == 7:
        ls = state.level(level)
        if ls.puzzle is None:
            return game.issue_puzzle(state, level, clock, pack, seed=1)[1]
        from shipgame.minigame import PuzzleGrid

        issued = PuzzleGrid.from_dict(ls.puzzle)
        grid = solve(issued) if rng.random() < 0.7 else issued
        return game.unlock_next(state, level, grid, clock, pack)
    if roll == 8:
        return game.open_editor(state, level, clock, pack)
    return game.close_editor(state, level, clock, pack)


def guided_op(rng: random.Random, state, pack, clock: int):
    """A productive step for the current level, so long walks actually reach
    the deep phases instead of bouncing off preconditions."""
    level = state.current_level
    ls = state.level(level)
    if ls.phase == TESTING:
        run = ls.last_run
        if run and run["outcome"] == "passed" and Fraction(run["ratio"]) >= Fraction(1, 2):
            try:
                return game.activate(state, level, clock, pack, sabotage_delay_ms=0)
            except GameError:
                pass
        if ls.test_buffer == GREEN_SUITE or ls.test_buffer == VACUOUS_SUITE:
            return game.run_tests(state, level, BUDGET, clock, pack)[1]
        suite = GREEN_SUITE if rng.random() < 0.7 else VACUOUS_SUITE
        return game.save_buffer(state, level, "test", suite, clock, pack)
    if ls.phase == ACTIVATED:
        return game.trigger_sabotage(state, level, BUDGET, clock, pack)[1]
    if ls.phase in (SABOTAGED_ALARM, SABOTAGED_DESTROYED, DEBUGGING):
        if ls.cut_buffer != LAMP_CUT:
            return game.save_buffer(state, level, "cut", LAMP_CUT, clock, pack)
        return game.submit_fix(state, level, BUDGET, clock, pack)[1]
    # repaired: open the door
    if ls.puzzle is None:
        return game.issue_puzzle(state, level, clock, pack, seed=rng.randrange(100))[1]
    from shipgame.minigame import PuzzleGrid

    solved = solve(PuzzleGrid.from_dict(ls.puzzle))
    return game.unlock_next(state, level, solved, clock, pack)


def mixed_walk_op(rng: random.Random, state, pack, clock: int):
    if rng.random() < 0.45:
        return guided_op(rng, state, pack, clock)
    return random_op(rng, state, pack, clock)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_state_machine_edges_and_rejection_atomicity(seed):
    pack = LevelPack("memory", (lamp_spec(1), lamp_spec(2)))
    rng = random.Random(seed)
    state = new_player_state("walker", pack)
    clock = 0
    for _step in range(30):
        clock += 1
        before_phases = {i: state.level(i).phase for i in (1, 2)}
        before_snapshot = snapshot_bytes(state)
        try:
            random_op(rng, state, pack, clock)
        except GameError:
            assert snapshot_bytes(state) == before_snapshot
            continue
        for i in (1, 2):
            before, after = before_phases[i], state.level(i).phase
            if before != after:
                assert (before, after) in PHASE_EDGES, (before, after)
        # phase-bound invariants
        for i in (1, 2):
            level = state.level(i)
            if level.phase in (TESTING, ACTIVATED):
                assert level.cut_buffer == LAMP_CUT
            if level.phase == ACTIVATED:
                assert level.activated_suite is not None
