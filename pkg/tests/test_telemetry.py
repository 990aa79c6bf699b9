import pytest

from shipgame.telemetry import EventLog, EventRecord, aggregate

from test_game import (  # reuse the in-memory two-level fixture and driver
    BUDGET, GREEN_SUITE, SNEAKY_FIX, SHINE_ONLY_SUITE, full_level_playthrough,
    lamp_spec,
)
from shipgame import game
from shipgame.game import new_player_state, replay, snapshot_bytes
from shipgame.levels import LevelPack


def ev(ts, kind, level=None, player="p", **payload):
    return EventRecord(ts, player, level, kind, payload)


def test_first_event_appends():
    log = EventLog()
    log.record(ev(0, "ui-activity", category="movement"))
    assert len(log) == 1


def test_out_of_order_timestamp_rejected():
    log = EventLog()
    log.record(ev(100, "ui-activity", category="movement"))
    with pytest.raises(ValueError, match="out-of-order"):
        log.record(ev(99, "ui-activity", category="movement"))


def test_equal_timestamps_allowed():
    log = EventLog()
    log.record(ev(100, "ui-activity", category="movement"))
    log.record(ev(100, "ui-activity", category="dialog"))
    assert len(log) == 2


def test_ndjson_round_trip():
    log = EventLog()
    log.record(ev(0, "editor-opened", level=1, context="testing"))
    log.record(ev(5, "buffer-saved", level=1, pane="test", text="fn test_a() { }"))
    restored = EventLog.from_ndjson(log.to_ndjson())
    assert restored.events() == log.events()


def test_level_scoped_kinds_need_a_level():
    with pytest.raises(ValueError, match="needs a level"):
        EventRecord(0, "p", None, "attempt", {})


def test_time_partition_example():
    # one ten-minute testing interval inside a one-hour session
    log = EventLog()
    log.record(ev(0, "ui-activity", category="movement"))
    log.record(ev(600_000, "editor-opened", level=1, context="testing"))
    log.record(ev(1_200_000, "editor-closed", level=1))
    log.record(ev(3_600_000, "ui-activity", category="movement"))
    report = aggregate(log, pack=None, compute_quality=False)
    player = report.players["p"]
    assert player.session_ms == 3_600_000
    assert player.testing_ms == 600_000
    assert player.debugging_ms == 0
    assert player.outside_ms == 3_000_000
    assert player.testing_ms + player.debugging_ms + player.outside_ms == player.session_ms


def test_unclosed_interval_ends_at_last_event():
    log = EventLog()
    log.record(ev(0, "editor-opened", level=1, context="debugging"))
    log.record(ev(120_000, "ui-activity", category="dialog"))
    report = aggregate(log, compute_quality=False)
    player = report.players["p"]
    assert player.debugging_ms == 120_000
    assert player.outside_ms == 0


def test_empty_log_aggregates_to_zero():
    report = aggregate(EventLog(), compute_quality=False)
    assert report.players == {}
    assert report.totals["session_ms"] == 0
    assert report.totals["players"] == 0


def test_attempt_histogram_stops_at_activation():
    pack = LevelPack("memory", (lamp_spec(1), lamp_spec(2)))
    state = new_player_state("p", pack)
    log = EventLog()

    def rec(events):
        for event in events:
            log.record(event)

    # failed, compile-error, passed, then activation; a later attempt is
    # outside the histogram
    rec(game.save_buffer(state, 1, "test", "fn test_red() {\n    assertTrue(false);\n}\n", 10, pack))
    rec(game.run_tests(state, 1, BUDGET, 20, pack)[1])
    rec(game.save_buffer(state, 1, "test", "fn test_broken( {", 30, pack))
    rec(game.run_tests(state, 1, BUDGET, 40, pack)[1])
    rec(game.save_buffer(state, 1, "test", GREEN_SUITE, 50, pack))
    rec(game.run_tests(state, 1, BUDGET, 60, pack)[1])
    rec(game.activate(state, 1, 70, pack, sabotage_delay_ms=0))
    rec(game.trigger_sabotage(state, 1, BUDGET, 80, pack)[1])
    rec(game.run_tests(state, 1, BUDGET, 90, pack)[1])  # post-activation attempt

    report = aggregate(log, pack, compute_quality=False)
    level_metrics = report.players["p"].levels[1]
    assert level_metrics.attempts_until_activation == {
        "failed": 1, "compile-error": 1, "passed": 1,
    }
    assert level_metrics.tests_written == 2  # the green suite has two tests
    assert level_metrics.coverage == "1"
    assert level_metrics.target_detected is True


def test_introduced_bugs_and_print_usage():
    pack = LevelPack("memory", (lamp_spec(1), lamp_spec(2)))
    state = new_player_state("p", pack)
    log = EventLog()

    def rec(events):
        for event in events:
            log.record(event)

    rec(game.save_buffer(state, 1, "test", SHINE_ONLY_SUITE, 10, pack))
    rec(game.run_tests(state, 1, BUDGET, 20, pack)[1])
    rec(game.activate(state, 1, 30, pack, sabotage_delay_ms=0))
    rec(game.trigger_sabotage(state, 1, BUDGET, 40, pack)[1])
    rec(game.save_buffer(state, 1, "cut", SNEAKY_FIX, 50, pack))
    rec(game.submit_fix(state, 1, BUDGET, 60, pack)[1])  # hidden test revealed
    # a print-heavy debugging run
    probe = SHINE_ONLY_SUITE + "\nfn test_peek() {\n    print(1);\n    print(2);\n}\n"
    rec(game.save_buffer(state, 1, "test", probe, 70, pack))
    rec(game.run_tests(state, 1, BUDGET, 80, pack)[1])

    report = aggregate(log, pack, compute_quality=False)
    player = report.players["p"]
    assert player.introduced_bugs == 1
    assert player.print_statements == 2


def test_quality_metrics_on_activated_suite():
    pack = LevelPack("memory", (lamp_spec(1), lamp_spec(2)))
    state = new_player_state("p", pack)
    log = EventLog()
    full_level_playthrough(state, 1, pack, log=log)
    report = aggregate(log, pack, compute_quality=True, budget=BUDGET)
    level_metrics = report.players["p"].levels[1]
    assert level_metrics.smells is not None
    assert level_metrics.mutants_generated > 0
    assert level_metrics.mutation_score is not None


def test_replay_matches_final_snapshot_from_log():
    pack = LevelPack("memory", (lamp_spec(1), lamp_spec(2)))
    state = new_player_state("p", pack)
    log = EventLog()
    full_level_playthrough(state, 1, pack, log=log)
    full_level_playthrough(state, 2, pack, log=log, t0=100)
    rebuilt = replay("p", log.events(), pack)
    assert snapshot_bytes(rebuilt) == snapshot_bytes(state)


def test_aggregate_is_pure():
    pack = LevelPack("memory", (lamp_spec(1), lamp_spec(2)))
    state = new_player_state("p", pack)
    log = EventLog()
    full_level_playthrough(state, 1, pack, log=log)
    first = aggregate(log, pack, compute_quality=False)
    second = aggregate(log, pack, compute_quality=False)
    assert first.to_dict() == second.to_dict()
