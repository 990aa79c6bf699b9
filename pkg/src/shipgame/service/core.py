"""Session management and the per-player operation queue.

Each player has one lock: every state-changing request, the lazy sabotage
check and the background sabotage timer all serialize through it. Events
are appended and the snapshot rewritten before a response is returned.
"""

from __future__ import annotations

import random
import re
import secrets
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..game import (
    ACTIVATED, GameError, PlayerState, new_player_state, trigger_sabotage,
)
from ..levels import LevelPack, load_level_pack
from ..telemetry import EventLog, EventRecord, aggregate
from .config import ServerConfig
from .persistence import PlayerStore

_NAME_RE = re.compile(r"^[A-Za-z0-9_\-]{1,32}$")


class AuthError(Exception):
    pass


@dataclass
class _PlayerSlot:
    player_id: str
    state: PlayerState
    session_start_ms: int
    event_count: int
    lock: threading.RLock = field(default_factory=threading.RLock)
    request_cache: OrderedDict = field(default_factory=OrderedDict)  # request id -> response
    last_ts: int = 0


class GameService:
    """Owns the pack, the store and all live player slots."""

    REQUEST_CACHE_SIZE = 256

    def __init__(self, config: ServerConfig, pack: LevelPack | None = None):
        self.config = config
        self.pack = pack if pack is not None else load_level_pack(config.pack)
        if config.coverage_threshold is not None:
            self.pack = _override_thresholds(self.pack, config.coverage_threshold)
        self.store = PlayerStore(config.data_dir)
        self.rng = random.Random()
        self._slots: dict[str, _PlayerSlot] = {}
        self._slots_lock = threading.Lock()
        self._tokens: dict[str, tuple[str, float]] = {}  # token -> (player, expiry epoch s)
        self._tokens_lock = threading.Lock()
        self._timer: Optional[threading.Thread] = None
        self._stop = threading.Event()

    # -- sessions -------------------------------------------------------

    def create_session(self, name: str) -> tuple[str, str, bool]:
        """Returns (token, player_id, resumed)."""
        if not _NAME_RE.match(name or ""):
            raise GameError("validation", "player names are 1-32 characters of [A-Za-z0-9_-]")
        resumed = self.store.exists(name)
        slot = self._slot(name)
        token = secrets.token_hex(16)  # 128 bits
        with self._tokens_lock:
            self._tokens[token] = (name, time.time() + self.config.session_ttl_s)
        return token, slot.player_id, resumed

    def resolve_token(self, token: str) -> str:
        with self._tokens_lock:
            entry = self._tokens.get(token or "")
            if entry is None:
                raise AuthError("invalid session token")
            player_id, expiry = entry
            if time.time() > expiry:
                del self._tokens[token]
                raise AuthError("expired session token")
            return player_id

    # -- player slots ---------------------------------------------------------

    def _slot(self, player_id: str) -> _PlayerSlot:
        with self._slots_lock:
            slot = self._slots.get(player_id)
            if slot is not None:
                return slot
            loaded = self.store.load(player_id, self.pack)
            now_ms = int(time.time() * 1000)
            if loaded is None:
                state = new_player_state(player_id, self.pack)
                slot = _PlayerSlot(player_id, state, now_ms, 0)
                self.store.write_snapshot(player_id, state, now_ms, 0)
            else:
                events = self.store.read_events(player_id)
                last_ts = events[-1].ts if events else 0
                session_start = loaded.session_start_ms or (now_ms - last_ts - 1)
                slot = _PlayerSlot(player_id, loaded.state, session_start, loaded.event_count)
                slot.last_ts = last_ts
            self._slots[player_id] = slot
            return slot

    def now_ms(self, slot: _PlayerSlot) -> int:
        wall = int(time.time() * 1000) - slot.session_start_ms
        return max(wall, slot.last_ts)

    def _persist(self, slot: _PlayerSlot, events: list[EventRecord]) -> None:
        if events:
            self.store.append_events(slot.player_id, events)
            slot.event_count += len(events)
            slot.last_ts = max(slot.last_ts, max(e.ts for e in events))
        self.store.write_snapshot(
            slot.player_id, slot.state, slot.session_start_ms, slot.event_count
        )

    def with_player(self, player_id: str, request_id: Optional[str], op: Callable):
        """Serialize ``op`` on the player's queue. ``op`` receives
        (state, now_ms, pack) and returns (response, events). With a request
        id, a duplicate call replays the recorded first response."""
        slot = self._slot(player_id)
        with slot.lock:
            if request_id:
                cached = slot.request_cache.get(request_id)
                if cached is not None:
                    return cached
            self._check_due_sabotage(slot)
            now = self.now_ms(slot)
            response, events = op(slot.state, now, self.pack)
            self._persist(slot, events)
            if request_id:
                slot.request_cache[request_id] = response
                while len(slot.request_cache) > self.REQUEST_CACHE_SIZE:
                    slot.request_cache.popitem(last=False)
            return response

    def read_player(self, player_id: str, reader: Callable):
        slot = self._slot(player_id)
        with slot.lock:
            self._check_due_sabotage(slot)
            return reader(slot.state, self.pack)

    # -- sabotage scheduling ------------------------------------------------

    def pick_sabotage_delay(self) -> int:
        lo, hi = self.config.sabotage_delay_ms
        if hi <= lo:
            return lo
        return self.rng.randint(lo, hi)

    def _check_due_sabotage(self, slot: _PlayerSlot) -> None:
        """Fire any due sabotage before handling the request (must hold lock)."""
        now = self.now_ms(slot)
        for index in range(1, self.pack.size + 1):
            level = slot.state.level(index)
            if level.phase == ACTIVATED and level.sabotage_due_at is not None \
                    and now >= level.sabotage_due_at:
                try:
                    _outcome, events = trigger_sabotage(
                        slot.state, index, self.config.budget, now, self.pack
                    )
                except GameError:  # pragma: no cover - guarded by the phase check
                    continue
                self._persist(slot, events)

    def start_sabotage_timer(self, interval_s: float = 0.5) -> None:
        if self._timer is not None:
            return

        def run() -> None:
            while not self._stop.wait(interval_s):
                with self._slots_lock:
                    slots = list(self._slots.values())
                for slot in slots:
                    with slot.lock:
                        self._check_due_sabotage(slot)

        self._timer = threading.Thread(target=run, name="sabotage-timer", daemon=True)
        self._timer.start()

    def stop(self) -> None:
        self._stop.set()
        if self._timer is not None:
            self._timer.join(timeout=2)
            self._timer = None

    # -- analytics --------------------------------------------------------

    def metrics(self, compute_quality: bool = True):
        events: list[EventRecord] = []
        with self._slots_lock:
            player_ids = set(self._slots)
        for path in sorted(self.store.root.iterdir()) if self.store.root.exists() else []:
            if path.is_dir():
                player_ids.add(path.name)
        for player_id in sorted(player_ids):
            events.extend(self.store.read_events(player_id))
        log = EventLog()
        for event in sorted(events, key=lambda e: (e.player_id, e.ts)):
            log.record(event)
        return aggregate(log, self.pack, compute_quality=compute_quality,
                         budget=self.config.budget)


def _override_thresholds(pack: LevelPack, threshold) -> LevelPack:
    from dataclasses import replace

    return LevelPack(
        pack.path,
        tuple(replace(spec, coverage_threshold=threshold) for spec in pack.levels),
    )
