"""Game states, move application and playing strategies.

Ann and Ben alternately append letters to a shared word, Ann first.
What ends the game depends on the mode (see :class:`thuegames.modes.Mode`):
a square in range hands the win to Ben in the nonrepetitive and hard
games, while the erase game instead deletes the second half of the
shortest-period square just created and lets Ann win by reaching a
target length.  Ben may pass in the hard game but may never repeat the
letter just played there.

Ann's engine move picks, among letters whose resulting word stays
square free, avoids every near-square suffix and keeps positive
certificate weight, the one of maximum weight that also survives a
bounded alternating lookahead.  Ben strategies are word-level callables
so the same objects drive live play, the growth oracle and the service.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace
from enum import Enum
from random import Random
from typing import Callable, Optional

import numpy as np

from .automaton import LambdaSet, state_of
from .modes import Mode
from .words import (
    PeriodRange,
    ends_with_two_minus_power,
    square_suffix_periods,
)

# A move is a letter, or None for the hard game's pass.
Move = Optional[int]
PASS: Move = None


class Player(Enum):
    ANN = "ANN"
    BEN = "BEN"

    @property
    def other(self) -> "Player":
        return Player.BEN if self is Player.ANN else Player.ANN


class IllegalMoveError(ValueError):
    pass


class NoSafeMoveError(RuntimeError):
    """Ann's engine found no letter passing its safety conditions."""


@dataclass(frozen=True)
class PlyRecord:
    ply: int
    mover: Player
    move: Move
    erased: tuple[bytes, ...]
    word: bytes                  # position after the move resolved


@dataclass(frozen=True)
class GameState:
    mode: Mode
    k: int
    word: bytes = b""
    turn: Player = Player.ANN
    ply: int = 0
    history: tuple[PlyRecord, ...] = field(default=())
    terminal: str | None = None          # None | BEN_WON | LENGTH_TARGET_REACHED
    length_target: int = 64


def new_game(mode: Mode, k: int, length_target: int = 64) -> GameState:
    if not 2 <= k <= 16:
        raise ValueError(f"alphabet size must be in 2..16, got {k}")
    return GameState(mode=mode, k=k, length_target=length_target)


def legal_moves(s: GameState) -> list[Move]:
    if s.terminal:
        return []
    return word_legal_moves(s.word, s.mode, s.k, s.turn)


def word_legal_moves(w: bytes, mode: Mode, k: int, turn: Player) -> list[Move]:
    """Move list for whoever holds the turn at word ``w``."""
    moves: list[Move] = list(range(k))
    if mode is Mode.HARD and turn is Player.BEN:
        if w:
            moves = [a for a in moves if a != w[-1]]
        moves.append(PASS)
    return moves


def erase_reduce(w: bytes) -> tuple[bytes, list[bytes]]:
    """Erase-game resolution: strip suffix squares until none remains.

    While some square ends at the final position, the second half of the
    shortest-period one is removed.  Each pass shortens the word, so the
    loop always terminates; in legal play (every proper prefix square
    free) a single pass suffices because the remainder is a prefix of
    the pre-move word.
    """
    erased: list[bytes] = []
    while True:
        periods = square_suffix_periods(w, PeriodRange.unbounded(1))
        if not periods:
            return w, erased
        q = periods[0]
        erased.append(w[len(w) - q:])
        w = w[: len(w) - q]


def apply_move(s: GameState, move: Move) -> GameState:
    """Validate, append (or pass), resolve erasures and settle terminals."""
    if s.terminal:
        raise IllegalMoveError("the game is over")
    if move not in word_legal_moves(s.word, s.mode, s.k, s.turn):
        raise IllegalMoveError(
            f"move {move!r} is not legal for {s.turn.value} at this position")

    erased: tuple[bytes, ...] = ()
    terminal: str | None = None
    if move is PASS:
        word = s.word
    else:
        grown = s.word + bytes([move])
        if s.mode is Mode.ERASE:
            word, cut = erase_reduce(grown)
            erased = tuple(cut)
            if len(word) >= s.length_target:
                terminal = "LENGTH_TARGET_REACHED"
        else:
            word = grown
            if square_suffix_periods(grown, PeriodRange.unbounded(s.mode.pmin)):
                terminal = "BEN_WON"

    rec = PlyRecord(ply=s.ply + 1, mover=s.turn, move=move, erased=erased, word=word)
    return replace(s, word=word, turn=s.turn.other, ply=s.ply + 1,
                   history=s.history + (rec,), terminal=terminal)


# --- Ann's engine -----------------------------------------------------------


@dataclass
class EnginePolicy:
    """Certificate-backed evaluation: automaton plus integer weights."""

    lam: LambdaSet
    coeffs: np.ndarray
    mode: Mode                   # game mode this policy plays

    def weight(self, w: bytes) -> int:
        return int(self.coeffs[state_of(self.lam, w, check=False)])


def _resolve(w: bytes, mode: Mode) -> bytes:
    if mode is Mode.ERASE:
        return erase_reduce(w)[0]
    return w


def _ann_safe(u: bytes, policy: EnginePolicy, mode: Mode) -> bool:
    """Post-move conditions for Ann: square free, no near-square, weight > 0.

    ``u`` is the resolved word after her move.  Near-squares are checked
    for every geometrically possible period, not only the tracked range,
    so Ben never has an immediate square anywhere.
    """
    if mode is not Mode.ERASE and square_suffix_periods(u, PeriodRange.unbounded(mode.pmin)):
        return False
    if ends_with_two_minus_power(u, PeriodRange.unbounded(2), unbounded=True):
        return False
    return policy.weight(u) > 0


def ann_move(s: GameState, policy: EnginePolicy, lookahead: int = 4) -> int:
    """Best safe letter for Ann, or raise :class:`NoSafeMoveError`.

    Candidates are ranked by certificate weight (ties to the smaller
    letter) and the first one surviving ``lookahead`` further plies of
    adversarial search is played.  In the erase game only cleanly
    extending moves are considered; a move whose own letter erases
    would waste the turn.
    """
    if s.turn is not Player.ANN or s.terminal:
        raise IllegalMoveError("it is not Ann's turn")
    mode, k = s.mode, s.k
    cands: list[tuple[int, int, bytes]] = []
    for a in range(k):
        grown = s.word + bytes([a])
        u = _resolve(grown, mode)
        if mode is Mode.ERASE and len(u) <= len(s.word):
            continue
        if not _ann_safe(u, policy, mode):
            continue
        cands.append((policy.weight(u), a, u))
    cands.sort(key=lambda t: (-t[0], t[1]))
    memo: dict[tuple[bytes, int, bool], bool] = {}
    for _, a, u in cands:
        if _survives_ben(u, lookahead, policy, mode, k, memo):
            return a
    raise NoSafeMoveError(
        f"no safe letter at ply {s.ply} (word length {len(s.word)})")


def _survives_ben(u: bytes, plies: int, policy: EnginePolicy, mode: Mode,
                  k: int, memo: dict) -> bool:
    """Ann survives every Ben reply for the given number of plies."""
    if plies <= 0:
        return True
    key = (u, plies, True)
    if key in memo:
        return memo[key]
    ok = True
    for b in word_legal_moves(u, mode, k, Player.BEN):
        v = u if b is PASS else u + bytes([b])
        if mode is not Mode.ERASE and b is not PASS and \
                square_suffix_periods(v, PeriodRange.unbounded(mode.pmin)):
            ok = False
            break
        v = _resolve(v, mode)
        if not _ann_has_reply(v, plies - 1, policy, mode, k, memo):
            ok = False
            break
    memo[key] = ok
    return ok


def _ann_has_reply(v: bytes, plies: int, policy: EnginePolicy, mode: Mode,
                   k: int, memo: dict) -> bool:
    if plies <= 0:
        return True
    key = (v, plies, False)
    if key in memo:
        return memo[key]
    ok = False
    for a in range(k):
        u = _resolve(v + bytes([a]), mode)
        if mode is Mode.ERASE and len(u) <= len(v):
            continue
        if _ann_safe(u, policy, mode) and _survives_ben(u, plies - 1, policy, mode, k, memo):
            ok = True
            break
    memo[key] = ok
    return ok


# --- Ben strategies ---------------------------------------------------------

# A Ben strategy maps the current word to his move; it must return a
# member of word_legal_moves(word, mode, k, BEN).
BenStrategy = Callable[[bytes], Move]


@dataclass
class RandomBen:
    """Uniform choice among legal moves, derandomized per position.

    The choice depends only on (seed, word), so replays and the growth
    oracle see a fixed map from positions to moves.
    """

    mode: Mode
    k: int
    seed: int = 0

    def __call__(self, w: bytes) -> Move:
        moves = word_legal_moves(w, self.mode, self.k, Player.BEN)
        rng = Random(zlib.crc32(bytes([self.k]) + w) ^ (self.seed * 0x9E3779B1))
        return moves[rng.randrange(len(moves))]


@dataclass
class WeightMinBen:
    """Greedy spoiler: drive the certificate weight as low as possible.

    An immediately winning square outranks everything; otherwise the
    move minimizing the weight of the resolved word is played, ties to
    the smaller letter with pass last.
    """

    policy: EnginePolicy
    mode: Mode
    k: int

    def __call__(self, w: bytes) -> Move:
        best: tuple[int, int] | None = None
        best_move: Move = None
        for i, b in enumerate(word_legal_moves(w, self.mode, self.k, Player.BEN)):
            v = w if b is PASS else w + bytes([b])
            if self.mode is not Mode.ERASE and b is not PASS and \
                    square_suffix_periods(v, PeriodRange.unbounded(self.mode.pmin)):
                return b
            v = _resolve(v, self.mode)
            score = (self.policy.weight(v), i)
            if best is None or score < best:
                best = score
                best_move = b
        return best_move


class Script3Ben:
    """Fixed confinement script for Ben in the three-letter erase game.

    Punish any pending period-2 or period-3 near-square by completing
    it (the erasure throws Ann's progress away), steer the opening
    towards the absorbing 4-letter position with all three letters, and
    otherwise cancel: repeating the last letter erases itself, giving
    the move back to Ann with nothing gained.
    """

    def __call__(self, w: bytes) -> Move:
        n = len(w)
        if n >= 3 and w[-1] == w[-3]:
            return w[-2]
        if n >= 5 and w[-2] == w[-5] and w[-1] == w[-4]:
            return w[-3]
        if n == 0:
            return 0
        if n == 1:
            return 0 if w[0] != 0 else 1
        if n == 3 and len(set(w)) == 3:
            return w[0]
        return w[-1]


@dataclass
class TableBen:
    """Play from an explicit position table, e.g. a forced-win witness."""

    table: dict[bytes, Move]
    fallback: BenStrategy | None = None

    def __call__(self, w: bytes) -> Move:
        if w in self.table:
            return self.table[w]
        if self.fallback is not None:
            return self.fallback(w)
        raise KeyError(f"no scripted move for position of length {len(w)}")


def make_ben_strategy(name: str, mode: Mode, k: int,
                      policy: EnginePolicy | None = None,
                      seed: int = 0) -> BenStrategy:
    """Factory used by the CLI and the service: random | weightmin | script3."""
    if name == "random":
        return RandomBen(mode, k, seed)
    if name == "weightmin":
        if policy is None:
            raise ValueError("weightmin needs a certificate-backed policy")
        return WeightMinBen(policy, mode, k)
    if name == "script3":
        if mode is not Mode.ERASE or k != 3:
            raise ValueError("script3 only plays the three-letter erase game")
        return Script3Ben()
    raise ValueError(f"unknown Ben strategy {name!r}")
