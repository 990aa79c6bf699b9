import json
import os
import subprocess
import sys
from pathlib import Path

from shipgame.service.cli import main

SRC = str(Path(__file__).resolve().parent.parent / "src")


def golden_script(pack) -> dict:
    """Full level-1 playthrough: one red attempt, one broken attempt, then a
    green suite, activation, sabotage, a clean fix and the door puzzle."""
    spec = pack.level(1)
    green = (
        "fn test_wakes_on_time() {\n"
        "    CryoSleep pod = new CryoSleep(1);\n"
        "    pod.dayPassed();\n"
        "    assertFalse(pod.isFrozen());\n"
        "}\n"
        "\n"
        "fn test_message_when_inactive() {\n"
        "    CryoSleep pod = new CryoSleep(0);\n"
        "    pod.dayPassed();\n"
        "    assertFalse(pod.isFrozen());\n"
        "}\n"
    )
    return {
        "player": "golden",
        "seed": 11,
        "actions": [
            {"at": 0, "op": "ui", "category": "movement"},
            {"at": 1_000, "op": "open_editor", "level": 1},
            {"at": 2_000, "op": "save", "level": 1, "pane": "test",
             "text": "fn test_red() {\n    assertTrue(false);\n}\n"},
            {"at": 3_000, "op": "run", "level": 1},
            {"at": 4_000, "op": "save", "level": 1, "pane": "test",
             "text": "fn test_broken( {"},
            {"at": 5_000, "op": "run", "level": 1},
            {"at": 6_000, "op": "save", "level": 1, "pane": "test", "text": green},
            {"at": 7_000, "op": "run", "level": 1},
            {"at": 8_000, "op": "activate", "level": 1},
            {"at": 9_000, "op": "close_editor", "level": 1},
            {"at": 10_000, "op": "sabotage", "level": 1},
            {"at": 11_000, "op": "open_editor", "level": 1},
            {"at": 12_000, "op": "save", "level": 1, "pane": "cut",
             "text": spec.cut_source},
            {"at": 13_000, "op": "fix", "level": 1},
            {"at": 14_000, "op": "close_editor", "level": 1},
            {"at": 15_000, "op": "minigame", "level": 1},
            {"at": 16_000, "op": "ui", "category": "dialog"},
        ],
    }


def test_validate_levels_exits_zero_on_shipped_pack(capsys):
    assert main(["validate-levels"]) == 0
    out = capsys.readouterr().out
    assert "42/42 checks passed across 7 levels" in out


def test_validate_levels_exits_nonzero_on_broken_pack(tmp_path, pack, capsys):
    import shutil

    shutil.copytree(f"{pack.path}/level1", tmp_path / "level1")
    meta_path = tmp_path / "level1" / "level.meta"
    meta = json.loads(meta_path.read_text())
    meta["sabotage"]["locator"]["ordinal"] = 99
    meta_path.write_text(json.dumps(meta))
    assert main(["validate-levels", str(tmp_path)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_simulate_golden_script(tmp_path, pack, capsys):
    script_path = tmp_path / "golden.json"
    script_path.write_text(json.dumps(golden_script(pack)))
    out_dir = tmp_path / "out"
    assert main(["simulate", str(script_path), "--out", str(out_dir)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["attempts"]["1"] == ["failed", "compile-error", "passed"]
    assert summary["fix_outcomes"] == [{"level": 1, "outcome": "repaired"}]
    assert summary["sabotage_outcomes"] == [{"level": 1, "outcome": "alarm"}]
    assert summary["final_level"] == 2
    assert (out_dir / "golden" / "events.ndjson").exists()
    assert (out_dir / "golden" / "snapshot.json").exists()


def test_report_on_simulated_log(tmp_path, pack, capsys):
    script_path = tmp_path / "golden.json"
    script_path.write_text(json.dumps(golden_script(pack)))
    out_dir = tmp_path / "out"
    main(["simulate", str(script_path), "--out", str(out_dir)])
    capsys.readouterr()
    json_out = tmp_path / "report.json"
    code = main(["report", str(out_dir / "golden" / "events.ndjson"),
                 "--json", str(json_out)])
    assert code == 0
    table = capsys.readouterr().out
    assert "golden" in table
    report = json.loads(json_out.read_text())
    player = report["players"]["golden"]
    assert player["introduced_bugs"] == 0
    assert player["session_ms"] == 16_000
    level1 = player["levels"]["1"]
    assert level1["attempts_until_activation"] == {
        "failed": 1, "compile-error": 1, "passed": 1,
    }
    assert level1["mutation_score"] is not None
    assert level1["smells"] is not None
    # exact time partition
    assert (player["testing_ms"] + player["debugging_ms"] + player["outside_ms"]
            == player["session_ms"])


def test_report_on_empty_log(tmp_path, capsys):
    empty = tmp_path / "events.ndjson"
    empty.write_text("")
    assert main(["report", str(empty), "--no-quality"]) == 0
    out = capsys.readouterr().out
    assert "TOTAL" in out
    assert " 0" in out


def test_console_entry_point_runs():
    env = dict(os.environ, PYTHONPATH=SRC)
    proc = subprocess.run(
        [sys.executable, "-m", "shipgame.service.cli", "validate-levels"],
        capture_output=True, text=True, env=env, timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    assert "42/42" in proc.stdout
