"""HTTP play service: human-vs-bot sessions over a small JSON API.

Endpoints:
  POST /api/sessions                create a session (theta, role, bot, seed)
  GET  /api/sessions/{id}           session summary incl. round history
  POST /api/sessions/{id}/rounds    submit the human move, resolve one round
  POST /api/sessions/{id}/whatif    exact odds for a candidate strategy
  GET  /api/theta-sweep             averaged winning odds across theta
  GET  /api/equilibrium             equilibrium for one theta

Sessions are deterministic: a session is fully reproducible from its seed
plus the sequence of human moves.  Errors use {"code", "message", "field"?}.
"""

from __future__ import annotations

import itertools
import json
import math
import secrets
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .bots import PRESETS, Bot, UnknownPresetError
from .core import GameConfig
from .game import DRAW, Move, RoundRecord, RuleError, make_rng, play_round
from .strategies import (
    AliceStrategy,
    BobStrategy,
    StrategyError,
    alice_win_prob,
    bob_win_prob,
    find_equilibrium,
    outcome_table,
)

ROLES = ("Alice", "Bob")


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, fieldname: Optional[str] = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.fieldname = fieldname

    def body(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.fieldname is not None:
            out["field"] = self.fieldname
        return out


class CreateSessionRequest(BaseModel):
    theta: float
    human_role: str = "Alice"
    bot: str = "nash"
    seed: Optional[int] = None
    coins_per_player: int = Field(default=1, ge=1)


class RoundRequest(BaseModel):
    coins: int
    guess: int


class WhatIfRequest(BaseModel):
    mix: list[float]
    guess: Optional[int] = None          # human plays Alice
    guesses: Optional[list[int]] = None  # human plays Bob


@dataclass
class Session:
    id: str
    config: GameConfig
    human_role: str
    bot: Bot
    seed: int
    rng: np.random.Generator
    rounds: list[RoundRecord] = field(default_factory=list)
    score: dict = field(default_factory=lambda: {"human": 0, "bot": 0, "draw": 0})
    #: Pre-drawn bot-Alice move (coins, guess) when the human plays Bob: the
    #: bot guesses first and its guess is public before the human moves.
    pending: Optional[tuple[int, int]] = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def draw_pending(self) -> None:
        coins = self.bot.sample_coins(self.rng)
        self.pending = (coins, self.bot.guess_as_alice(coins))

    def summary(self) -> dict:
        out = {
            "id": self.id,
            "theta": self.config.theta,
            "players": self.config.players,
            "coins_per_player": self.config.coins_per_player,
            "total_coins": self.config.total_coins,
            "human_role": self.human_role,
            "bot": self.bot.preset,
            "seed": str(self.seed),
            "rounds_played": len(self.rounds),
            "score": dict(self.score),
            "history": [self._round_dict(r) for r in self.rounds],
        }
        if self.human_role == "Bob":
            out["alice_guess"] = self.pending[1]
        return out

    def _round_dict(self, record: RoundRecord) -> dict:
        d = record.to_json_dict()
        if record.winner == DRAW:
            d["winner_side"] = "draw"
        else:
            human_id = 0 if self.human_role == "Alice" else 1
            d["winner_side"] = "human" if record.winner == human_id else "bot"
        return d

    def play(self, coins: int, guess: int) -> RoundRecord:
        if self.human_role == "Alice":
            human = Move(player=0, coins=coins, guess=guess)
            bot_coins = self.bot.sample_coins(self.rng)
            bot_guess = self.bot.guess_as_bob(bot_coins, guess)
            moves = (human, Move(player=1, coins=bot_coins, guess=bot_guess))
        else:
            bot_coins, bot_guess = self.pending
            if guess == bot_guess:
                raise RuleError(
                    f"guess {guess} repeats Alice's announced guess"
                )
            moves = (
                Move(player=0, coins=bot_coins, guess=bot_guess),
                Move(player=1, coins=coins, guess=guess),
            )
        record = play_round(self.config, moves, self.seed, rng=self.rng)
        self.rounds.append(record)
        self.score[self._round_dict(record)["winner_side"]] += 1
        if self.human_role == "Bob":
            self.draw_pending()
        return record


def create_session(
    theta: float,
    human_role: str = "Alice",
    bot_preset: str = "nash",
    seed: Optional[int] = None,
    coins_per_player: int = 1,
) -> Session:
    if human_role not in ROLES:
        raise ApiError(422, "invalid-parameter",
                       f"human_role must be one of {ROLES}", "human_role")
    config = GameConfig(players=2, coins_per_player=coins_per_player, theta=theta)
    bot_role = "Bob" if human_role == "Alice" else "Alice"
    bot = Bot(preset=bot_preset, role=bot_role, config=config)
    if seed is None:
        seed = secrets.randbits(64)
    session = Session(
        id=uuid.uuid4().hex,
        config=config,
        human_role=human_role,
        bot=bot,
        seed=int(seed),
        rng=make_rng(int(seed)),
    )
    if human_role == "Bob":
        session.draw_pending()
    return session


def whatif(session: Session, req: WhatIfRequest) -> dict:
    """Exact win/lose/draw odds for a candidate human strategy against the
    session's bot, holding the bot to its preset behavior."""
    theta = session.config.theta
    m = session.config.coins_per_player
    if session.human_role == "Alice":
        if req.guess is None:
            raise ApiError(422, "invalid-parameter",
                           "an Alice what-if needs a guess", "guess")
        alice = AliceStrategy(mix=tuple(req.mix), guess=int(req.guess))
        bob = session.bot.bob_strategy(alice.guess)
        p_win = alice_win_prob(theta, alice, bob, m)
        p_lose = bob_win_prob(theta, alice, bob, m)
    else:
        if req.guesses is None:
            raise ApiError(422, "invalid-parameter",
                           "a Bob what-if needs a guess map", "guesses")
        bob = BobStrategy(mix=tuple(req.mix), guesses=tuple(int(g) for g in req.guesses))
        bob.validate(session.config)
        p_win, p_lose = _bob_whatif(session, bob)
    return {
        "p_win": p_win,
        "p_lose": p_lose,
        "p_draw": 1.0 - p_win - p_lose,
    }


def _bob_whatif(session: Session, bob: BobStrategy) -> tuple[float, float]:
    """Bob-side odds against the bot Alice.  The random-rational preset
    guesses per coin count, so average over its coin mix; when the candidate
    map collides with the revealed guess the candidate falls back to the
    smallest legal total, matching what a rule-abiding client must do."""
    config = session.config
    m = config.coins_per_player
    p = outcome_table(config.theta, m)
    bot = session.bot
    alice_mix = np.asarray(bot.mix())
    p_win = 0.0
    p_lose = 0.0
    for a, wa in enumerate(alice_mix):
        if wa <= 0.0:
            continue
        g_a = bot.guess_as_alice(a)
        for b, wb in enumerate(bob.mix):
            if wb <= 0.0:
                continue
            n = bob.guesses[b]
            if n == g_a:
                n = min(k for k in range(config.total_coins + 1) if k != g_a)
            p_win += wa * wb * p[a, b, n]
            p_lose += wa * wb * p[a, b, g_a]
    return float(p_win), float(p_lose)


def theta_sweep(points: int = 34, m: int = 1) -> list[dict]:
    """Averaged per-player odds over an inclusive [0, 2*pi] theta grid."""
    if points < 2:
        raise ApiError(422, "invalid-parameter", "points must be >= 2", "points")
    out = []
    for theta in np.linspace(0.0, 2.0 * math.pi, points):
        p = outcome_table(float(theta), m)
        out.append({
            "theta": float(theta),
            # p_alice[a][n]: odds the total is n when Alice plays a coins
            # and the opponent mixes uniformly.
            "p_alice": p.mean(axis=1).tolist(),
        })
    return out


def create_app(
    cors: bool = False,
    log_dir: Optional[str] = None,
) -> FastAPI:
    """Build the FastAPI app.  ``log_dir`` enables JSON-lines round logs,
    one file per session."""
    app = FastAPI(title="deformed-morra", docs_url=None, redoc_url=None)
    sessions: dict[str, Session] = {}
    app.state.sessions = sessions
    log_path = Path(log_dir) if log_dir else None

    if cors:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(RuleError)
    async def _rule_error(request: Request, exc: RuleError):
        return JSONResponse(
            status_code=422,
            content={"code": "rule-violation", "message": str(exc)},
        )

    @app.exception_handler(StrategyError)
    async def _strategy_error(request: Request, exc: StrategyError):
        return JSONResponse(
            status_code=422,
            content={"code": "invalid-strategy", "message": str(exc)},
        )

    def _get(session_id: str) -> Session:
        try:
            return sessions[session_id]
        except KeyError:
            raise ApiError(404, "not-found", f"no session {session_id!r}")

    @app.post("/api/sessions", status_code=201)
    def post_session(req: CreateSessionRequest):
        try:
            session = create_session(
                theta=req.theta,
                human_role=req.human_role,
                bot_preset=req.bot,
                seed=req.seed,
                coins_per_player=req.coins_per_player,
            )
        except UnknownPresetError as exc:
            raise ApiError(422, "invalid-parameter", str(exc), "bot")
        except ValueError as exc:
            raise ApiError(422, "invalid-parameter", str(exc))
        sessions[session.id] = session
        return session.summary()

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return _get(session_id).summary()

    @app.post("/api/sessions/{session_id}/rounds")
    def post_round(session_id: str, req: RoundRequest):
        session = _get(session_id)
        with session.lock:
            record = session.play(req.coins, req.guess)
            if log_path is not None:
                log_path.mkdir(parents=True, exist_ok=True)
                with open(log_path / f"{session.id}.jsonl", "a") as fh:
                    fh.write(record.to_json() + "\n")
            return {
                "round": session._round_dict(record),
                "score": dict(session.score),
                "rounds_played": len(session.rounds),
                **(
                    {"alice_guess": session.pending[1]}
                    if session.human_role == "Bob"
                    else {}
                ),
            }

    @app.post("/api/sessions/{session_id}/whatif")
    def post_whatif(session_id: str, req: WhatIfRequest):
        return whatif(_get(session_id), req)

    @app.get("/api/theta-sweep")
    def get_theta_sweep(points: int = 34):
        return theta_sweep(points)

    @app.get("/api/equilibrium")
    def get_equilibrium(theta: float, grid_step: float = 0.01):
        try:
            result = find_equilibrium(theta, grid_step)
        except ValueError as exc:
            raise ApiError(422, "invalid-parameter", str(exc), "grid_step")
        return result.to_json_dict()

    return app
