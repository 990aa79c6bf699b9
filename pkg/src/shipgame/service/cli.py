"""Operator command line: serve | validate-levels | simulate | report."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..levels import load_level_pack, validate_pack
from ..telemetry import EventLog, aggregate
from .config import ServerConfig
from .core import GameService
from .simulate import ScriptError, run_script_file


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="server config JSON file")
    parser.add_argument("--pack", help="level pack directory (default: shipped pack)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shipgame")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP API")
    _add_common(serve)
    serve.add_argument("--port", type=int, help="listen port (default from config)")
    serve.add_argument("--data-dir", help="player data directory")
    serve.add_argument("--host", default="127.0.0.1")

    validate = sub.add_parser("validate-levels", help="run every level check")
    validate.add_argument("pack", nargs="?", help="level pack directory")

    simulate = sub.add_parser("simulate", help="run a scripted playthrough headlessly")
    _add_common(simulate)
    simulate.add_argument("script", help="playthrough script (JSON)")
    simulate.add_argument("--out", help="write events.ndjson + snapshot.json under this directory")

    report = sub.add_parser("report", help="aggregate metrics from an event log")
    _add_common(report)
    report.add_argument("eventlog", help="newline-delimited event log file")
    report.add_argument("--json", dest="json_out", help="also write the report as JSON here")
    report.add_argument("--no-quality", action="store_true",
                        help="skip mutation-score and smell computation")
    return parser


def _config_from(args) -> ServerConfig:
    overrides = {}
    if getattr(args, "pack", None):
        overrides["pack"] = args.pack
    if getattr(args, "port", None):
        overrides["port"] = args.port
    if getattr(args, "data_dir", None):
        overrides["data_dir"] = args.data_dir
    return ServerConfig.load(getattr(args, "config", None), **overrides)


def cmd_serve(args) -> int:
    import uvicorn

    from .app import create_app

    config = _config_from(args)
    service = GameService(config)
    reports = validate_pack(service.pack)
    bad = [r for r in reports if not r.passed]
    if bad:
        for r in bad:
            for line in r.lines():
                print(line, file=sys.stderr)
        print("refusing to serve an invalid level pack", file=sys.stderr)
        return 1
    service.start_sabotage_timer()
    app = create_app(service)
    print(f"serving pack '{service.pack.path}' ({service.pack.size} levels) "
          f"on {args.host}:{config.port}, data in {config.data_dir}")
    try:
        uvicorn.run(app, host=args.host, port=config.port, log_level="warning")
    finally:
        service.stop()
    return 0


def cmd_validate(args) -> int:
    pack = load_level_pack(args.pack)
    reports = validate_pack(pack)
    failed = 0
    for report in reports:
        for line in report.lines():
            print(line)
        if not report.passed:
            failed += 1
    total = sum(len(r.checks) for r in reports)
    passed = sum(1 for r in reports for c in r.checks if c.passed)
    print(f"{passed}/{total} checks passed across {len(reports)} levels")
    return 0 if failed == 0 else 1


def cmd_simulate(args) -> int:
    config = _config_from(args)
    pack = load_level_pack(config.pack)
    try:
        result = run_script_file(args.script, pack, out_dir=args.out)
    except ScriptError as err:
        print(f"script error: {err}", file=sys.stderr)
        return 1
    print(json.dumps(result.summary, indent=2, sort_keys=True))
    if args.out:
        print(f"wrote {len(result.log)} events under {args.out}", file=sys.stderr)
    return 0


def cmd_report(args) -> int:
    config = _config_from(args)
    pack = load_level_pack(config.pack)
    path = Path(args.eventlog)
    text = path.read_text(encoding="utf-8") if path.exists() else ""
    log = EventLog.from_ndjson(text)
    report = aggregate(log, pack, compute_quality=not args.no_quality, budget=config.budget)
    print(report.table())
    if args.json_out:
        Path(args.json_out).write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        print(f"wrote {args.json_out}", file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    if args.command == "validate-levels":
        return cmd_validate(args)
    if args.command == "simulate":
        return cmd_simulate(args)
    if args.command == "report":
        return cmd_report(args)
    raise AssertionError(args.command)  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
