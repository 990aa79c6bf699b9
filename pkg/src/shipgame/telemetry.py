"""Append-only gameplay event log and the metric aggregations built on it.

Events are the unit of all analytics and the source of truth for replay:
every state-changing game operation emits events whose payloads carry the
full effect (mutated source, revealed test, activation deadline, ...), so a
log replays to a byte-identical player snapshot without re-running player
code.

Time attribution: editor-opened/editor-closed intervals accrue to their
pane context (testing or debugging); everything else is outside-editor.
The three buckets partition the session duration exactly; the session ends
at the player's last event.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

# event kinds
EDITOR_OPENED = "editor-opened"
EDITOR_CLOSED = "editor-closed"
BUFFER_SAVED = "buffer-saved"
ATTEMPT = "attempt"
ACTIVATION = "activation"
SABOTAGE = "sabotage"
FIX_SUBMITTED = "fix-submitted"
HIDDEN_TEST_REVEALED = "hidden-test-revealed"
MINIGAME_STARTED = "minigame-started"
MINIGAME_SOLVED = "minigame-solved"
UI_ACTIVITY = "ui-activity"
PRINT_USED = "print-used"

EVENT_KINDS = (
    EDITOR_OPENED, EDITOR_CLOSED, BUFFER_SAVED, ATTEMPT, ACTIVATION, SABOTAGE,
    FIX_SUBMITTED, HIDDEN_TEST_REVEALED, MINIGAME_STARTED, MINIGAME_SOLVED,
    UI_ACTIVITY, PRINT_USED,
)

_LEVEL_SCOPED = frozenset(EVENT_KINDS) - {UI_ACTIVITY}


@dataclass(frozen=True)
class EventRecord:
    """One timestamped gameplay event; ts is milliseconds since the
    player's session started."""

    ts: int
    player_id: str
    level: Optional[int]
    kind: str
    payload: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.ts < 0:
            raise ValueError("timestamp must be >= 0")
        if self.kind in _LEVEL_SCOPED and self.level is None:
            raise ValueError(f"event {self.kind} needs a level")

    def to_json_line(self) -> str:
        return json.dumps(
            {"ts": self.ts, "player": self.player_id, "level": self.level,
             "kind": self.kind, "payload": self.payload},
            sort_keys=True, separators=(",", ":"),
        )

    @staticmethod
    def from_json_line(line: str) -> "EventRecord":
        data = json.loads(line)
        return EventRecord(
            ts=int(data["ts"]),
            player_id=str(data["player"]),
            level=data.get("level"),
            kind=str(data["kind"]),
            payload=dict(data.get("payload", {})),
        )


class EventLog:
    """In-memory append-only log with per-player timestamp monotonicity."""

    def __init__(self, events: Iterable[EventRecord] = ()):  # replays validate too
        self._events: list[EventRecord] = []
        self._last_ts: dict[str, int] = {}
        for event in events:
            self.record(event)

    def record(self, event: EventRecord) -> EventRecord:
        last = self._last_ts.get(event.player_id)
        if last is not None and event.ts < last:
            raise ValueError(
                f"out-of-order timestamp for {event.player_id}: {event.ts} after {last}"
            )
        self._events.append(event)
        self._last_ts[event.player_id] = event.ts
        return event

    def events(self, player_id: str | None = None) -> list[EventRecord]:
        if player_id is None:
            return list(self._events)
        return [e for e in self._events if e.player_id == player_id]

    def __len__(self) -> int:
        return len(self._events)

    def to_ndjson(self) -> str:
        return "".join(e.to_json_line() + "\n" for e in self._events)

    @staticmethod
    def from_ndjson(text: str) -> "EventLog":
        return EventLog(
            EventRecord.from_json_line(line) for line in text.splitlines() if line.strip()
        )


# --- metrics ---------------------------------------------------------------


@dataclass
class LevelMetrics:
    testing_ms: int = 0
    debugging_ms: int = 0
    attempts_until_activation: dict = field(default_factory=dict)  # class -> count
    tests_written: int = 0
    coverage: Optional[str] = None  # exact fraction as text
    mutation_score: Optional[str] = None
    mutants_killed: Optional[int] = None
    mutants_generated: Optional[int] = None
    smells: Optional[dict] = None
    target_detected: Optional[bool] = None  # sabotage raised the alarm


@dataclass
class PlayerMetrics:
    player_id: str
    session_ms: int = 0
    testing_ms: int = 0
    debugging_ms: int = 0
    outside_ms: int = 0
    introduced_bugs: int = 0
    print_statements: int = 0
    levels: dict = field(default_factory=dict)  # level -> LevelMetrics


@dataclass
class MetricsReport:
    players: dict  # player_id -> PlayerMetrics
    totals: dict  # aggregate numbers

    def to_dict(self) -> dict:
        def level_dict(m: LevelMetrics) -> dict:
            return {
                "testing_ms": m.testing_ms,
                "debugging_ms": m.debugging_ms,
                "attempts_until_activation": dict(m.attempts_until_activation),
                "tests_written": m.tests_written,
                "coverage": m.coverage,
                "mutation_score": m.mutation_score,
                "mutants_killed": m.mutants_killed,
                "mutants_generated": m.mutants_generated,
                "smells": m.smells,
                "target_detected": m.target_detected,
            }

        return {
            "players": {
                pid: {
                    "session_ms": p.session_ms,
                    "testing_ms": p.testing_ms,
                    "debugging_ms": p.debugging_ms,
                    "outside_ms": p.outside_ms,
                    "introduced_bugs": p.introduced_bugs,
                    "print_statements": p.print_statements,
                    "levels": {str(lv): level_dict(m) for lv, m in sorted(p.levels.items())},
                }
                for pid, p in sorted(self.players.items())
            },
            "totals": self.totals,
        }

    def table(self) -> str:
        lines = [
            f"{'player':12s} {'session':>9s} {'testing':>9s} {'debug':>9s} "
            f"{'outside':>9s} {'newbugs':>7s} {'prints':>6s}"
        ]
        for pid, p in sorted(self.players.items()):
            lines.append(
                f"{pid:12s} {p.session_ms:>9d} {p.testing_ms:>9d} {p.debugging_ms:>9d} "
                f"{p.outside_ms:>9d} {p.introduced_bugs:>7d} {p.print_statements:>6d}"
            )
        totals = self.totals
        lines.append(
            f"{'TOTAL':12s} {totals['session_ms']:>9d} {totals['testing_ms']:>9d} "
            f"{totals['debugging_ms']:>9d} {totals['outside_ms']:>9d} "
            f"{totals['introduced_bugs']:>7d} {totals['print_statements']:>6d}"
        )
        return "\n".join(lines)


def aggregate(log: EventLog, pack=None, compute_quality: bool = True, budget=None) -> MetricsReport:
    """Pure function of (log, pack). When ``compute_quality`` is set and a
    level pack is given, mutation scores and smell counts are computed on
    each level's activated suite."""
    players: dict[str, PlayerMetrics] = {}
    for player_id in sorted({e.player_id for e in log.events()}):
        players[player_id] = _aggregate_player(log.events(player_id), player_id, pack,
                                               compute_quality, budget)
    totals = {
        "session_ms": sum(p.session_ms for p in players.values()),
        "testing_ms": sum(p.testing_ms for p in players.values()),
        "debugging_ms": sum(p.debugging_ms for p in players.values()),
        "outside_ms": sum(p.outside_ms for p in players.values()),
        "introduced_bugs": sum(p.introduced_bugs for p in players.values()),
        "print_statements": sum(p.print_statements for p in players.values()),
        "attempts_until_activation": _sum_histograms(
            m.attempts_until_activation for p in players.values() for m in p.levels.values()
        ),
        "players": len(players),
    }
    return MetricsReport(players=players, totals=totals)


def _sum_histograms(histograms) -> dict:
    out: dict[str, int] = {}
    for histogram in histograms:
        for key, count in histogram.items():
            out[key] = out.get(key, 0) + count
    return out


def _aggregate_player(events: list[EventRecord], player_id: str, pack,
                      compute_quality: bool, budget) -> PlayerMetrics:
    metrics = PlayerMetrics(player_id=player_id)
    if not events:
        return metrics
    session_end = events[-1].ts
    metrics.session_ms = session_end

    open_editor: Optional[tuple[int, str, int]] = None  # (level, context, start ts)
    activated: dict[int, bool] = {}
    activated_suites: dict[int, str] = {}
    last_attempt: dict[int, EventRecord] = {}

    def level_metrics(level: int) -> LevelMetrics:
        return metrics.levels.setdefault(level, LevelMetrics())

    def close_interval(end_ts: int) -> None:
        nonlocal open_editor
        if open_editor is None:
            return
        level, context, start = open_editor
        duration = max(end_ts - start, 0)
        lm = level_metrics(level)
        if context == "debugging":
            metrics.debugging_ms += duration
            lm.debugging_ms += duration
        else:
            metrics.testing_ms += duration
            lm.testing_ms += duration
        open_editor = None

    for event in events:
        kind = event.kind
        if kind == EDITOR_OPENED:
            close_interval(event.ts)
            open_editor = (event.level, event.payload.get("context", "testing"), event.ts)
        elif kind == EDITOR_CLOSED:
            close_interval(event.ts)
        elif kind == ATTEMPT:
            lm = level_metrics(event.level)
            if not activated.get(event.level):
                cls = event.payload.get("class", "failed")
                lm.attempts_until_activation[cls] = lm.attempts_until_activation.get(cls, 0) + 1
                last_attempt[event.level] = event
        elif kind == ACTIVATION:
            activated[event.level] = True
            activated_suites[event.level] = event.payload.get("suite", "")
            lm = level_metrics(event.level)
            attempt = last_attempt.get(event.level)
            if attempt is not None:
                lm.tests_written = int(attempt.payload.get("n_tests", 0))
                lm.coverage = attempt.payload.get("ratio")
        elif kind == SABOTAGE:
            level_metrics(event.level).target_detected = event.payload.get("outcome") == "alarm"
        elif kind == FIX_SUBMITTED:
            if event.payload.get("outcome") == "hidden-test-revealed":
                metrics.introduced_bugs += 1
        elif kind == PRINT_USED:
            metrics.print_statements += int(event.payload.get("count", 0))
    close_interval(session_end)
    metrics.outside_ms = metrics.session_ms - metrics.testing_ms - metrics.debugging_ms

    if compute_quality and pack is not None:
        from .mutation import SuiteNotGreen, mutation_score
        from .smells import detect_smells
        from .syntax import try_parse_program

        for level, suite in sorted(activated_suites.items()):
            lm = level_metrics(level)
            spec = pack.level(level)
            cut, _ = try_parse_program(spec.cut_source, "cut")
            if cut is None:
                continue
            test, _ = try_parse_program(
                suite, "test", externals={c.name: c for c in cut.classes}
            )
            if test is not None:
                report = detect_smells(test, cut)
                lm.smells = report.counts()
            try:
                mreport = mutation_score(spec.cut_source, suite, budget=budget)
                lm.mutation_score = str(mreport.score)
                lm.mutants_killed = mreport.killed
                lm.mutants_generated = mreport.generated
            except SuiteNotGreen:
                pass
    return metrics
