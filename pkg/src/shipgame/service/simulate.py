"""Headless scripted playthroughs.

A script is JSON: {"player": id, "seed": int, "budget": {...}?, "actions":
[...]}. Actions carry an `at` timestamp (ms since session start) and an
`op`; sabotage delay is zero and is triggered explicitly by the script, so
runs are fully deterministic. Test/code text comes inline ("text") or from
a file next to the script ("text_file").

Ops: ui, open_editor, close_editor, save, run, activate, sabotage, fix,
minigame (auto-solves the issued puzzle with the solver).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .. import game
from ..levels import LevelPack
from ..minigame import solve
from ..runtime import Budget
from ..telemetry import EventLog
from .persistence import PlayerStore


class ScriptError(Exception):
    pass


@dataclass
class SimulationResult:
    state: game.PlayerState
    log: EventLog
    summary: dict


def run_script(script: dict, pack: LevelPack, script_dir: Path | None = None) -> SimulationResult:
    player_id = script.get("player", "sim")
    seed = int(script.get("seed", 0))
    budget_data = script.get("budget", {})
    budget = Budget(
        max_steps=int(budget_data.get("max_steps", 100_000)),
        max_wall_ms=int(budget_data.get("max_wall_ms", 2_000)),
    )
    state = game.new_player_state(player_id, pack)
    log = EventLog()
    summary = {"attempts": {}, "fix_outcomes": [], "sabotage_outcomes": []}

    def text_of(action: dict) -> str:
        if "text" in action:
            return action["text"]
        if "text_file" in action:
            base = script_dir or Path(".")
            return (base / action["text_file"]).read_text(encoding="utf-8")
        raise ScriptError(f"action at {action.get('at')} needs 'text' or 'text_file'")

    for i, action in enumerate(script.get("actions", [])):
        try:
            now = int(action["at"])
            op = action["op"]
        except (KeyError, TypeError, ValueError) as err:
            raise ScriptError(f"action {i}: missing/invalid 'at' or 'op': {err}") from None
        level = int(action.get("level", state.current_level))
        try:
            if op == "ui":
                events = game.record_ui_activity(state, action.get("category", "movement"), now, pack)
            elif op == "open_editor":
                events = game.open_editor(state, level, now, pack)
            elif op == "close_editor":
                events = game.close_editor(state, level, now, pack)
            elif op == "save":
                events = game.save_buffer(state, level, action.get("pane", "test"), text_of(action), now, pack)
            elif op == "run":
                result, events = game.run_tests(state, level, budget, now, pack)
                summary["attempts"].setdefault(str(level), []).append(result.outcome_class)
            elif op == "activate":
                events = game.activate(state, level, now, pack, sabotage_delay_ms=0)
            elif op == "sabotage":
                outcome, events = game.trigger_sabotage(state, level, budget, now, pack)
                summary["sabotage_outcomes"].append({"level": level, "outcome": outcome})
            elif op == "fix":
                fix, events = game.submit_fix(state, level, budget, now, pack)
                summary["fix_outcomes"].append({"level": level, "outcome": fix.outcome})
            elif op == "minigame":
                grid, events = game.issue_puzzle(state, level, now, pack, seed + level)
                solved = solve(grid)
                if solved is None:
                    raise ScriptError(f"action {i}: issued puzzle is unsolvable (level {level})")
                events = events + game.unlock_next(state, level, solved, now, pack)
            else:
                raise ScriptError(f"action {i}: unknown op {op!r}")
        except game.GameError as err:
            raise ScriptError(f"action {i} ({op}, level {level}): {err.code}: {err}") from None
        for event in events:
            log.record(event)
    summary["final_level"] = state.current_level
    summary["game_complete"] = state.game_complete
    return SimulationResult(state=state, log=log, summary=summary)


def run_script_file(path: str | Path, pack: LevelPack, out_dir: str | Path | None = None) -> SimulationResult:
    script_path = Path(path)
    script = json.loads(script_path.read_text(encoding="utf-8"))
    result = run_script(script, pack, script_dir=script_path.parent)
    if out_dir is not None:
        player_id = script.get("player", "sim")
        store = PlayerStore(out_dir)
        store.append_events(player_id, result.log.events())
        store.write_snapshot(player_id, result.state, 0, len(result.log))
    return result
