"""HTTP play service.

A small FastAPI app exposing game sessions as JSON under ``/v1`` so a
browser UI or scripted client can play against the engine.  Bodies are
parsed and validated by hand; the error payload is always
``{"code", "message"}`` with codes UNKNOWN_SESSION, NOT_YOUR_TURN,
NOT_ENGINE_TURN, ILLEGAL_MOVE, UNSUPPORTED and BUSY.

Sessions live in memory.  Reads are lock-free snapshots; each session
serializes mutations through a non-blocking lock, so a second in-flight
mutation is rejected with BUSY rather than queued.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field, replace
from typing import Any

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .automaton import DEFAULT_MEMORY_BUDGET
from .certificate import read_certificate
from .games import (PASS, BenStrategy, EnginePolicy, GameState,
                    IllegalMoveError, Move, NoSafeMoveError, Player, ann_move,
                    apply_move, erase_reduce, legal_moves, make_ben_strategy,
                    new_game)
from .modes import Mode
from .provision import (build_policy, policy_from_certificate,
                        supported_for_engine_ann)
from .words import PeriodRange, ends_with_two_minus_power, square_suffix_periods

MAX_LOOKAHEAD = 8


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"code": code, "message": message})


@dataclass
class _Session:
    id: str
    state: GameState
    human: Player
    policy: EnginePolicy | None
    ben: BenStrategy | None
    lookahead: int
    created: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def engine(self) -> Player:
        return self.human.other


def _view(sess: _Session) -> dict[str, Any]:
    st = sess.state
    last = st.history[-1].erased if st.history else ()
    return {
        "id": sess.id,
        "mode": st.mode.value,
        "k": st.k,
        "word": [int(b) for b in st.word],
        "turn": st.turn.value,
        "terminal": st.terminal,
        "lastErased": [[int(b) for b in seg] for seg in last],
        "plyCount": st.ply,
    }


def _move_json(move: Move) -> dict[str, Any]:
    return {"pass": True} if move is PASS else {"letter": int(move)}


def _parse_move(body: Any) -> Move:
    """Accept {"letter": n} or {"pass": true}; anything else is illegal."""
    if not isinstance(body, dict):
        raise IllegalMoveError('body must be {"letter": n} or {"pass": true}')
    if body.get("pass") is True:
        if "letter" in body:
            raise IllegalMoveError("a move is a letter or a pass, not both")
        return PASS
    letter = body.get("letter")
    if isinstance(letter, bool) or not isinstance(letter, int):
        raise IllegalMoveError('body must be {"letter": n} or {"pass": true}')
    return letter


def _hint_entries(st: GameState, policy: EnginePolicy | None) -> list[dict[str, Any]]:
    """Evaluate every legal move for the side to move, best first.

    Safe moves come ranked exactly as the engine would rank them for
    Ann: by descending certificate weight, ties to the smaller letter.
    Moves completing a square, leaving a near-square threat or dropping
    the weight to zero sort after them.
    """
    entries = []
    for i, move in enumerate(legal_moves(st)):
        if move is PASS:
            u, erased, completes = st.word, [], False
        else:
            grown = st.word + bytes([move])
            if st.mode is Mode.ERASE:
                u, cut = erase_reduce(grown)
                erased, completes = cut, False
            else:
                u, erased = grown, []
                completes = bool(square_suffix_periods(
                    grown, PeriodRange.unbounded(st.mode.pmin)))
        threat = not completes and ends_with_two_minus_power(
            u, PeriodRange.unbounded(2), unbounded=True)
        weight = None
        if policy is not None and not completes:
            weight = policy.weight(u)
        wasted = st.mode is Mode.ERASE and move is not PASS and len(u) <= len(st.word)
        safe = not completes and not threat and not wasted and \
            (weight is None or weight > 0)
        entries.append({
            "move": _move_json(move),
            "weight": weight,
            "completesSquare": completes,
            "leavesThreat": bool(threat),
            "erased": [[int(b) for b in seg] for seg in erased],
            "safe": safe,
            "_rank": (0 if safe else 1, -(weight or 0), i),
        })
    entries.sort(key=lambda e: e.pop("_rank"))
    return entries


class _Service:
    """Shared state behind the route handlers."""

    def __init__(self, cert_paths: list[str] | None,
                 memory_budget: int | None) -> None:
        self.memory_budget = memory_budget
        self.sessions: dict[str, _Session] = {}
        self.sessions_lock = threading.Lock()
        self.policies: dict[tuple[Mode, int], EnginePolicy] = {}
        self.policies_lock = threading.Lock()
        for path in cert_paths or []:
            cert = read_certificate(path)
            policy = policy_from_certificate(cert, cert.mode, memory_budget)
            self.policies[(cert.mode.certificate_mode, cert.k)] = policy

    def cached_policy(self, mode: Mode, k: int) -> EnginePolicy | None:
        """Already-solved policy for (mode, k), if any; never builds."""
        with self.policies_lock:
            cached = self.policies.get((mode.certificate_mode, k))
        if cached is None:
            return None
        if cached.mode is mode:
            return cached
        return EnginePolicy(lam=cached.lam, coeffs=cached.coeffs, mode=mode)

    def policy_for(self, mode: Mode, k: int) -> EnginePolicy | None:
        """Playing policy for (mode, k), solving and caching on first use."""
        cached = self.cached_policy(mode, k)
        if cached is not None:
            return cached
        if not supported_for_engine_ann(mode, k):
            return None
        built = build_policy(mode, k, self.memory_budget)
        with self.policies_lock:
            self.policies.setdefault((mode.certificate_mode, k), built)
        return built

    def get(self, sid: str) -> _Session | None:
        with self.sessions_lock:
            return self.sessions.get(sid)


def create_app(cert_paths: list[str] | None = None,
               memory_budget: int | None = DEFAULT_MEMORY_BUDGET) -> FastAPI:
    app = FastAPI(title="thuegames play service", version="1.0")
    # the browser client is typically served from another local port
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    svc = _Service(cert_paths, memory_budget)
    app.state.service = svc

    @app.post("/v1/games", status_code=201)
    async def create_game(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "UNSUPPORTED", "request body must be JSON")
        if not isinstance(body, dict):
            return _error(400, "UNSUPPORTED", "request body must be an object")
        try:
            mode = Mode.from_name(str(body.get("mode", "")))
        except ValueError as exc:
            return _error(400, "UNSUPPORTED", str(exc))
        k = body.get("k")
        if isinstance(k, bool) or not isinstance(k, int) or not 2 <= k <= 16:
            return _error(400, "UNSUPPORTED", "k must be an integer in 2..16")
        role_name = str(body.get("humanRole", "BEN")).upper()
        if role_name not in ("ANN", "BEN"):
            return _error(400, "UNSUPPORTED", "humanRole must be ANN or BEN")
        human = Player[role_name]
        options = body.get("options") or {}
        if not isinstance(options, dict):
            return _error(400, "UNSUPPORTED", "options must be an object")
        length_target = options.get("lengthTarget", 64)
        if isinstance(length_target, bool) or not isinstance(length_target, int) \
                or length_target < 1:
            return _error(400, "UNSUPPORTED", "lengthTarget must be a positive integer")
        lookahead = options.get("lookahead", 4)
        if isinstance(lookahead, bool) or not isinstance(lookahead, int) \
                or not 0 <= lookahead <= MAX_LOOKAHEAD:
            return _error(400, "UNSUPPORTED",
                          f"lookahead must be in 0..{MAX_LOOKAHEAD}")
        seed = options.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int):
            return _error(400, "UNSUPPORTED", "seed must be an integer")
        ben_name = options.get("benStrategy", "random")

        policy = None
        ben = None
        if human is Player.BEN or ben_name == "weightmin":
            policy = svc.policy_for(mode, k)
            if policy is None:
                return _error(400, "UNSUPPORTED",
                              f"no playing certificate for {mode.value} over "
                              f"{k} letters (unsupported k)")
        if human is Player.ANN:
            try:
                ben = make_ben_strategy(str(ben_name), mode, k, policy, seed)
            except ValueError as exc:
                return _error(400, "UNSUPPORTED", str(exc))

        sess = _Session(id=uuid.uuid4().hex, state=new_game(mode, k, length_target),
                        human=human, policy=policy, ben=ben, lookahead=lookahead)
        with svc.sessions_lock:
            svc.sessions[sess.id] = sess
        return _view(sess)

    @app.get("/v1/games/{sid}")
    def get_game(sid: str):
        sess = svc.get(sid)
        if sess is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {sid}")
        return _view(sess)

    @app.post("/v1/games/{sid}/move")
    async def submit_move(sid: str, request: Request):
        sess = svc.get(sid)
        if sess is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {sid}")
        try:
            body = await request.json()
        except Exception:
            return _error(422, "ILLEGAL_MOVE", "request body must be JSON")
        if not sess.lock.acquire(blocking=False):
            return _error(409, "BUSY", "another mutation is in flight")
        try:
            if sess.state.terminal:
                return _error(422, "ILLEGAL_MOVE",
                              f"the game is over ({sess.state.terminal})")
            if sess.state.turn is not sess.human:
                return _error(409, "NOT_YOUR_TURN",
                              "waiting for the engine to move")
            try:
                move = _parse_move(body)
                if move is not PASS and not 0 <= move < sess.state.k:
                    raise IllegalMoveError(
                        f"letter {move} out of alphabet 0..{sess.state.k - 1}")
                sess.state = apply_move(sess.state, move)
            except IllegalMoveError as exc:
                return _error(422, "ILLEGAL_MOVE", str(exc))
            return _view(sess)
        finally:
            sess.lock.release()

    @app.post("/v1/games/{sid}/engine-move")
    def engine_move(sid: str):
        sess = svc.get(sid)
        if sess is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {sid}")
        if not sess.lock.acquire(blocking=False):
            return _error(409, "BUSY", "another mutation is in flight")
        try:
            if sess.state.terminal:
                return _error(422, "ILLEGAL_MOVE",
                              f"the game is over ({sess.state.terminal})")
            if sess.state.turn is not sess.engine:
                return _error(409, "NOT_ENGINE_TURN", "it is the human's turn")
            if sess.engine is Player.ANN:
                try:
                    move: Move = ann_move(sess.state, sess.policy, sess.lookahead)
                except NoSafeMoveError as exc:
                    # Diagnostic terminal: the certificate ran out of safe
                    # letters, which verified parameters should rule out.
                    sess.state = replace(sess.state, terminal="ENGINE_RESIGNED")
                    view = _view(sess)
                    view["resignReason"] = str(exc)
                    return {"move": None, "state": view}
            else:
                move = sess.ben(sess.state.word)
            sess.state = apply_move(sess.state, move)
            return {"move": _move_json(move), "state": _view(sess)}
        finally:
            sess.lock.release()

    @app.get("/v1/games/{sid}/hint")
    def hint(sid: str):
        sess = svc.get(sid)
        if sess is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {sid}")
        st = sess.state
        policy = sess.policy or svc.cached_policy(st.mode, st.k)
        return {"turn": st.turn.value,
                "moves": _hint_entries(st, policy)}

    @app.delete("/v1/games/{sid}", status_code=204)
    def delete_game(sid: str):
        with svc.sessions_lock:
            sess = svc.sessions.pop(sid, None)
        if sess is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {sid}")
        return Response(status_code=204)

    return app
