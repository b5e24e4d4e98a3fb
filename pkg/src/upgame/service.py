"""JSON service exposing the game engine to the browser frontend.

Games live in memory behind per-game locks and are persisted as
transcripts, so a restart replays (and re-verifies) every stored game.
The what-if endpoint is a pure query: it never mutates a game.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from .game import (
    GameConfig,
    GameState,
    Move,
    MoveKind,
    MoveRejectedError,
    TranscriptUnsoundError,
    apply_move,
    is_won,
    new_game,
    transcript_dumps,
    transcript_loads,
)
from .matrices import parse_elem_word, swap_word
from .patterns import (
    PatternError,
    UnsupportedConjugatorError,
    builtin_names,
    builtin_pattern,
    parse_pattern_ref,
    pattern_conjugate,
    pattern_contains,
)
from .rings import RingSpec

API_PREFIX = "/v1"


class CreateGameRequest(BaseModel):
    n: int = 3
    ring: str = "free:2"
    m_name: str = Field(default="M", alias="M")
    l_name: str = Field(default="L", alias="L")

    model_config = {"populate_by_name": True}


class MoveRequest(BaseModel):
    kind: str
    patterns: list[str] = []
    words: list[str] = []


class ConjugationRequest(BaseModel):
    n: int = 3
    ring: str = "free:2"
    conjugator: str  # "w", a pattern name, or an elementary-word literal
    pattern: str     # builtin name, "builtin:NAME@n", or a grid literal


class _GameEntry:
    def __init__(self, state: GameState):
        self.state = state
        self.lock = threading.Lock()


def _state_dto(game_id: str, state: GameState) -> dict:
    return {
        "id": game_id,
        "n": state.config.n,
        "ring": str(state.config.ring),
        "stage": state.stage,
        "won": is_won(state),
        "h1": {"name": state.label(1), "rows": state.h1.grid_rows()},
        "h2": {"name": state.label(2), "rows": state.h2.grid_rows()},
        "history": [
            {
                "stage": record.stage,
                "kind": record.move.kind.value,
                "payload": record.move.payload_text(),
                "certificate": record.certificate.digest,
                "claims": [
                    {"text": c.text, "ok": c.ok, "conjugated": c.conjugated_grid}
                    for c in record.certificate.claims
                ],
            }
            for record in state.history
        ],
    }


def _resolve_conjugator(text: str, n: int, ring: RingSpec):
    text = text.strip()
    if text == "w":
        return swap_word(n, ring)
    if text.startswith("pattern:"):
        return builtin_pattern(text[len("pattern:"):], n)
    if text.startswith("E("):
        return parse_elem_word(text, ring)
    return builtin_pattern(text, n)


def create_app(state_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="upgame service", version="1")
    games: dict[str, _GameEntry] = {}
    app.state.games = games
    directory = Path(state_dir) if state_dir else None

    if directory is not None:
        directory.mkdir(parents=True, exist_ok=True)
        for path in sorted(directory.glob("*.transcript")):
            state = transcript_loads(path.read_text())  # unsound files abort startup
            games[path.stem] = _GameEntry(state)

    def _persist(game_id: str, state: GameState):
        if directory is not None:
            (directory / f"{game_id}.transcript").write_text(transcript_dumps(state))

    def _entry(game_id: str) -> _GameEntry:
        entry = games.get(game_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown game {game_id}")
        return entry

    @app.post(f"{API_PREFIX}/games", status_code=201)
    def create_game(request: CreateGameRequest):
        try:
            config = GameConfig(request.n, RingSpec.parse(request.ring),
                                request.m_name, request.l_name)
            state = new_game(config)
        except (ValueError, PatternError) as exc:
            raise HTTPException(status_code=422, detail={"reason": str(exc)})
        game_id = uuid.uuid4().hex[:12]
        games[game_id] = _GameEntry(state)
        _persist(game_id, state)
        return _state_dto(game_id, state)

    @app.get(f"{API_PREFIX}/games/{{game_id}}")
    def get_game(game_id: str):
        return _state_dto(game_id, _entry(game_id).state)

    @app.post(f"{API_PREFIX}/games/{{game_id}}/moves")
    def post_move(game_id: str, request: MoveRequest):
        entry = _entry(game_id)
        if not entry.lock.acquire(blocking=False):
            raise HTTPException(status_code=409,
                                detail={"reason": "a conflicting mutation is in flight"})
        try:
            ring = entry.state.config.ring
            try:
                kind = MoveKind(request.kind)
                words = tuple(
                    swap_word(entry.state.config.n, ring) if w.strip() == "w"
                    else parse_elem_word(w, ring)
                    for w in request.words)
                move = Move(kind, tuple(request.patterns), words)
                entry.state = apply_move(entry.state, move)
            except (MoveRejectedError, UnsupportedConjugatorError, PatternError,
                    ValueError) as exc:
                raise HTTPException(status_code=422, detail={"reason": str(exc)})
            _persist(game_id, entry.state)
            return _state_dto(game_id, entry.state)
        finally:
            entry.lock.release()

    @app.get(f"{API_PREFIX}/games/{{game_id}}/transcript", response_class=PlainTextResponse)
    def get_transcript(game_id: str):
        return transcript_dumps(_entry(game_id).state)

    @app.post(f"{API_PREFIX}/verify/conjugation")
    def verify_conjugation(request: ConjugationRequest):
        try:
            ring = RingSpec.parse(request.ring)
            pattern = parse_pattern_ref(request.pattern, request.n)
            conjugator = _resolve_conjugator(request.conjugator, pattern.n, ring)
            conjugated = pattern_conjugate(pattern, conjugator)
        except (PatternError, UnsupportedConjugatorError, ValueError) as exc:
            raise HTTPException(status_code=422, detail={"reason": str(exc)})
        m = builtin_pattern("M", pattern.n)
        l = builtin_pattern("L", pattern.n)
        return {
            "conjugated": {"rows": conjugated.grid_rows()},
            "geq_m": pattern_contains(conjugated, m),
            "geq_l": pattern_contains(conjugated, l),
        }

    @app.get(f"{API_PREFIX}/builtins")
    def get_builtins(n: int = 3):
        try:
            patterns = [{"name": name, "rows": builtin_pattern(name, n).grid_rows()}
                        for name in builtin_names(n)]
            word = swap_word(n, RingSpec.parse("Z"))
        except (PatternError, ValueError) as exc:
            raise HTTPException(status_code=422, detail={"reason": str(exc)})
        return {
            "n": n,
            "patterns": patterns,
            "words": [{"name": "w", "literal": word.format()}],
        }

    return app
