"""Durable per-player storage: an append-only event log plus a versioned,
checksummed snapshot.

Layout under the data directory:

    <data>/<player_id>/events.ndjson   - one serialized event per line
    <data>/<player_id>/snapshot.json   - latest state + metadata

The event log is the source of truth. A snapshot that lags the log (crash
between the event append and the snapshot write) is rebuilt by replay; a
snapshot that fails its checksum or carries an unknown future schema
version is refused with an explicit error.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

from ..game import PlayerState, replay, snapshot_bytes
from ..levels import LevelPack
from ..telemetry import EventRecord

SCHEMA_VERSION = 1


class CorruptSnapshot(Exception):
    pass


@dataclass
class LoadedPlayer:
    state: PlayerState
    session_start_ms: int  # epoch milliseconds of the session start
    event_count: int
    recovered_by_replay: bool = False


class PlayerStore:
    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        self.root.mkdir(parents=True, exist_ok=True)

    def _player_dir(self, player_id: str) -> Path:
        return self.root / player_id

    def _events_file(self, player_id: str) -> Path:
        return self._player_dir(player_id) / "events.ndjson"

    def _snapshot_file(self, player_id: str) -> Path:
        return self._player_dir(player_id) / "snapshot.json"

    def exists(self, player_id: str) -> bool:
        return self._events_file(player_id).exists() or self._snapshot_file(player_id).exists()

    def append_events(self, player_id: str, events: list[EventRecord]) -> None:
        if not events:
            return
        path = self._events_file(player_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "a", encoding="utf-8") as handle:
            for event in events:
                handle.write(event.to_json_line() + "\n")
            handle.flush()
            os.fsync(handle.fileno())

    def read_events(self, player_id: str) -> list[EventRecord]:
        path = self._events_file(player_id)
        if not path.exists():
            return []
        out = []
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    out.append(EventRecord.from_json_line(line))
        return out

    def write_snapshot(self, player_id: str, state: PlayerState,
                       session_start_ms: int, event_count: int) -> None:
        payload = snapshot_bytes(state)
        document = {
            "schema_version": SCHEMA_VERSION,
            "session_start_ms": session_start_ms,
            "event_count": event_count,
            "checksum": hashlib.sha256(payload).hexdigest(),
            "state": json.loads(payload),
        }
        path = self._snapshot_file(player_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".json.tmp")
        with open(tmp, "w", encoding="utf-8") as handle:
            json.dump(document, handle, sort_keys=True, separators=(",", ":"))
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, path)

    def load(self, player_id: str, pack: LevelPack) -> LoadedPlayer | None:
        """Load a player, preferring the snapshot and falling back to event
        replay when the snapshot lags the log. Corruption is an error, not a
        silent reset."""
        snapshot_path = self._snapshot_file(player_id)
        events = self.read_events(player_id)
        if snapshot_path.exists():
            try:
                document = json.loads(snapshot_path.read_text(encoding="utf-8"))
            except (json.JSONDecodeError, UnicodeDecodeError) as err:
                raise CorruptSnapshot(f"{player_id}: snapshot is not valid JSON: {err}") from None
            version = document.get("schema_version")
            if version != SCHEMA_VERSION:
                raise CorruptSnapshot(
                    f"{player_id}: snapshot schema version {version!r} is not supported "
                    f"(expected {SCHEMA_VERSION})"
                )
            state_data = document.get("state")
            checksum = document.get("checksum")
            if state_data is None or checksum is None:
                raise CorruptSnapshot(f"{player_id}: snapshot is missing fields")
            state = PlayerState.from_dict(state_data)
            if hashlib.sha256(snapshot_bytes(state)).hexdigest() != checksum:
                raise CorruptSnapshot(f"{player_id}: snapshot checksum mismatch")
            recorded = int(document.get("event_count", 0))
            session_start = int(document.get("session_start_ms", 0))
            if recorded == len(events):
                return LoadedPlayer(state, session_start, recorded)
            # crash between event append and snapshot write: rebuild from log
            state = replay(player_id, events, pack)
            return LoadedPlayer(state, session_start, len(events), recovered_by_replay=True)
        if events:
            state = replay(player_id, events, pack)
            return LoadedPlayer(state, 0, len(events), recovered_by_replay=True)
        return None
