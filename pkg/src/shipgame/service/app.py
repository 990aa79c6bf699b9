"""HTTP facade over the game engine. All state changes delegate to the game
module through the per-player queue; responses always carry the
authoritative phase so the client never infers state."""

from __future__ import annotations

from typing import Optional

from fastapi import Depends, FastAPI, Header, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .. import game
from ..game import GameError
from ..minigame import PuzzleError, PuzzleGrid, apply_rotations, is_solved
from ..testkit import SuiteResult
from .core import AuthError, GameService

_ERROR_STATUS = {"validation": 422}
_DEFAULT_ERROR_STATUS = 409


class SessionBody(BaseModel):
    name: str


class BufferBody(BaseModel):
    pane: str
    text: str


class MinigameBody(BaseModel):
    rotations: Optional[list[tuple[int, int]]] = None
    grid: Optional[dict] = None


class UiEvent(BaseModel):
    category: str


class EventsBody(BaseModel):
    events: list[UiEvent] = Field(default_factory=list)


def _suite_payload(result: SuiteResult, eligible: bool) -> dict:
    return {
        "attempt_class": result.outcome_class,
        "tests": [
            {
                "name": t.name,
                "verdict": t.verdict,
                "passed": t.passed,
                "message": t.message,
                "log": list(t.log),
                "covered_lines": list(t.covered_lines),
            }
            for t in result.tests
        ],
        "diagnostics": [d.describe() for d in result.diagnostics],
        "covered_lines": list(result.covered_lines),
        "coverage_ratio": str(result.coverage_ratio),
        "coverage_percent": result.coverage.percent if result.coverage else 0.0,
        "activation_eligible": eligible,
    }


def create_app(service: GameService) -> FastAPI:
    app = FastAPI(title="shipgame", docs_url=None, redoc_url=None)

    @app.exception_handler(GameError)
    async def game_error_handler(_request: Request, err: GameError):
        status = _ERROR_STATUS.get(err.code, _DEFAULT_ERROR_STATUS)
        return JSONResponse(
            status_code=status, content={"error": {"code": err.code, "message": str(err)}}
        )

    @app.exception_handler(AuthError)
    async def auth_error_handler(_request: Request, err: AuthError):
        return JSONResponse(status_code=401, content={"error": {"code": "unauthorized", "message": str(err)}})

    def player_of(authorization: str = Header(default="")) -> str:
        token = authorization.removeprefix("Bearer ").strip()
        return service.resolve_token(token)

    @app.post("/api/session")
    def create_session(body: SessionBody):
        token, player_id, resumed = service.create_session(body.name)
        return {"token": token, "player_id": player_id, "resumed": resumed}

    @app.get("/api/state")
    def get_state(player_id: str = Depends(player_of)):
        def read(state, pack):
            return {
                "player_id": state.player_id,
                "current_level": state.current_level,
                "game_complete": state.game_complete,
                "pack_size": pack.size,
                "levels": {
                    str(i): {"phase": state.level(i).phase, "name": pack.level(i).name}
                    for i in range(1, pack.size + 1)
                },
            }

        return service.read_player(player_id, read)

    @app.get("/api/levels/{level}")
    def get_level(level: int, player_id: str = Depends(player_of)):
        def read(state, pack):
            ls = state.level(level) if 1 <= level <= pack.size else None
            if ls is None or ls.phase == game.LOCKED:
                raise GameError("level-locked", f"level {level} is locked")
            spec = pack.level(level)
            return {
                "phase": ls.phase,
                "name": spec.name,
                "cut_source": ls.cut_buffer,
                "test_buffer": ls.test_buffer,
                "revealed_hidden_tests": list(ls.revealed_hidden_tests),
                "intro_dialog": spec.intro_dialog,
                "debug_hint": spec.debug_hint if ls.phase in
                    (game.SABOTAGED_ALARM, game.SABOTAGED_DESTROYED, game.DEBUGGING) else "",
                "coverage_threshold": str(spec.coverage_threshold),
                "can_edit_cut": ls.phase in
                    (game.SABOTAGED_ALARM, game.SABOTAGED_DESTROYED, game.DEBUGGING),
            }

        return service.read_player(player_id, read)

    @app.put("/api/levels/{level}/buffers")
    def put_buffer(
        level: int,
        body: BufferBody,
        player_id: str = Depends(player_of),
        x_request_id: Optional[str] = Header(default=None),
    ):
        def op(state, now, pack):
            events = game.save_buffer(state, level, body.pane, body.text, now, pack)
            return {"ok": True, "phase": state.level(level).phase}, events

        return service.with_player(player_id, x_request_id, op)

    @app.post("/api/levels/{level}/run")
    def run_level(
        level: int,
        player_id: str = Depends(player_of),
        x_request_id: Optional[str] = Header(default=None),
    ):
        def op(state, now, pack):
            result, events = game.run_tests(state, level, service.config.budget, now, pack)
            ls = state.level(level)
            spec = pack.level(level)
            eligible = (
                ls.phase == game.TESTING
                and result.passed
                and result.coverage_ratio >= spec.coverage_threshold
            )
            payload = _suite_payload(result, eligible)
            payload["phase"] = ls.phase
            return payload, events

        return service.with_player(player_id, x_request_id, op)

    @app.post("/api/levels/{level}/activate")
    def activate_level(
        level: int,
        player_id: str = Depends(player_of),
        x_request_id: Optional[str] = Header(default=None),
    ):
        def op(state, now, pack):
            delay = service.pick_sabotage_delay()
            events = game.activate(state, level, now, pack, sabotage_delay_ms=delay)
            return {"ok": True, "phase": state.level(level).phase,
                    "sabotage_due_in_ms": delay}, events

        return service.with_player(player_id, x_request_id, op)

    @app.post("/api/levels/{level}/fix")
    def fix_level(
        level: int,
        player_id: str = Depends(player_of),
        x_request_id: Optional[str] = Header(default=None),
    ):
        def op(state, now, pack):
            fix, events = game.submit_fix(state, level, service.config.budget, now, pack)
            ls = state.level(level)
            return {
                "outcome": fix.outcome,
                "revealed_test": fix.revealed_test,
                "player_result": _suite_payload(fix.player_result, False),
                "test_buffer": ls.test_buffer,
                "phase": ls.phase,
            }, events

        return service.with_player(player_id, x_request_id, op)

    @app.get("/api/levels/{level}/minigame")
    def get_minigame(
        level: int,
        player_id: str = Depends(player_of),
    ):
        def op(state, now, pack):
            seed = service.rng.getrandbits(32)
            grid, events = game.issue_puzzle(state, level, now, pack, seed)
            return {"grid": grid.to_dict(), "phase": state.level(level).phase}, events

        return service.with_player(player_id, None, op)

    @app.post("/api/levels/{level}/minigame")
    def post_minigame(
        level: int,
        body: MinigameBody,
        player_id: str = Depends(player_of),
        x_request_id: Optional[str] = Header(default=None),
    ):
        def op(state, now, pack):
            ls = state.level(level) if 1 <= level <= pack.size else None
            if ls is None or ls.puzzle is None:
                raise GameError("puzzle-not-solved", "no puzzle has been issued for this door")
            issued = PuzzleGrid.from_dict(ls.puzzle)
            if body.rotations is not None:
                try:
                    candidate = apply_rotations(issued, [tuple(r) for r in body.rotations])
                except PuzzleError as err:
                    raise GameError("validation", str(err)) from None
            elif body.grid is not None:
                try:
                    candidate = PuzzleGrid.from_dict(body.grid)
                except (KeyError, TypeError, ValueError) as err:
                    raise GameError("validation", f"malformed grid: {err}") from None
            else:
                raise GameError("validation", "provide rotations or a final grid")
            if not is_solved(candidate):
                return {"solved": False, "phase": ls.phase,
                        "current_level": state.current_level,
                        "game_complete": state.game_complete}, []
            events = game.unlock_next(state, level, candidate, now, pack)
            return {
                "solved": True,
                "phase": state.level(level).phase,
                "current_level": state.current_level,
                "game_complete": state.game_complete,
            }, events

        return service.with_player(player_id, x_request_id, op)

    @app.post("/api/events")
    def post_events(
        body: EventsBody,
        player_id: str = Depends(player_of),
        x_request_id: Optional[str] = Header(default=None),
    ):
        def op(state, now, pack):
            events = []
            for item in body.events:
                events.extend(game.record_ui_activity(state, item.category, now, pack))
            return {"ok": True, "recorded": len(events)}, events

        return service.with_player(player_id, x_request_id, op)

    @app.get("/api/admin/metrics")
    def admin_metrics(
        x_admin_token: str = Header(default=""),
        quality: bool = True,
    ):
        if not service.config.admin_token or x_admin_token != service.config.admin_token:
            raise AuthError("admin token required")
        report = service.metrics(compute_quality=quality)
        return report.to_dict()

    return app
