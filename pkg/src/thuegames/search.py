"""Depth-bounded forced-win search for Ben.

Answers whether Ben can force a square (any period >= the mode's floor)
within a given number of plies from the empty word, Ann moving first.
Plain AND/OR search over exact word contents with two monotone memo
tables: a position known winnable within r plies is winnable within any
r' >= r, and one known safe for r plies is safe for any r' <= r.
Iterative deepening on top recovers the minimal winning depth and the
memo tables carry over between depths.

Ordering matters more than cleverness here: Ben first tries letters
that complete a square, then letters leaving a near-square threat;
Ann first tries replies that leave no threat at all.
"""

from __future__ import annotations

from dataclasses import dataclass

from .games import PASS, Move, Player, word_legal_moves
from .modes import Mode
from .words import PeriodRange, ends_with_two_minus_power, square_suffix_periods


class SearchBudgetError(RuntimeError):
    """Node budget exhausted before the search settled the question."""


@dataclass
class ForcedWinResult:
    outcome: str                          # "BEN_WINS" | "NOT_WITHIN_DEPTH"
    depth: int | None                     # minimal winning ply count
    strategy: dict[bytes, Move] | None    # Ben's move per reachable position
    nodes: int


def solve_forced_win(mode: Mode, k: int, max_plies: int,
                     node_budget: int = 20_000_000) -> ForcedWinResult:
    """Search the game tree of ``mode`` over ``k`` letters from scratch."""
    if mode is Mode.ERASE:
        raise ValueError("squares never end the erase game; nothing to force")
    search = _Search(mode, k, node_budget)
    for depth in range(1, max_plies + 1):
        if search.ben_wins(b"", Player.ANN, depth):
            strategy = search.extract_strategy(depth)
            return ForcedWinResult("BEN_WINS", depth, strategy, search.nodes)
    return ForcedWinResult("NOT_WITHIN_DEPTH", None, None, search.nodes)


class _Search:
    def __init__(self, mode: Mode, k: int, node_budget: int):
        self.mode = mode
        self.k = k
        self.rng = PeriodRange.unbounded(mode.pmin)
        self.node_budget = node_budget
        self.nodes = 0
        self.win_within: dict[tuple[bytes, Player], int] = {}
        self.safe_for: dict[tuple[bytes, Player], int] = {}

    def _loses(self, w: bytes) -> bool:
        return bool(square_suffix_periods(w, self.rng))

    def _ben_moves(self, w: bytes) -> list[Move]:
        moves = word_legal_moves(w, self.mode, self.k, Player.BEN)
        # Square completions first, then threat-preserving letters.
        def rank(m: Move) -> int:
            if m is PASS:
                return 2
            v = w + bytes([m])
            if self._loses(v):
                return 0
            return 1 if ends_with_two_minus_power(v, self.rng, unbounded=True) else 2
        return sorted(moves, key=rank)

    def _ann_moves(self, w: bytes) -> list[int]:
        def rank(a: int) -> int:
            v = w + bytes([a])
            if self._loses(v):
                return 2
            return 1 if ends_with_two_minus_power(v, self.rng, unbounded=True) else 0
        return sorted(range(self.k), key=rank)

    def ben_wins(self, w: bytes, turn: Player, r: int) -> bool:
        if r <= 0:
            return False
        key = (w, turn)
        known_win = self.win_within.get(key)
        if known_win is not None and known_win <= r:
            return True
        known_safe = self.safe_for.get(key)
        if known_safe is not None and known_safe >= r:
            return False
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise SearchBudgetError(
                f"exceeded {self.node_budget} nodes at depth budget {r}")
        if turn is Player.BEN:
            result = False
            for m in self._ben_moves(w):
                v = w if m is PASS else w + bytes([m])
                if m is not PASS and self._loses(v):
                    result = True
                    break
                if self.ben_wins(v, Player.ANN, r - 1):
                    result = True
                    break
        else:
            result = True
            for a in self._ann_moves(w):
                v = w + bytes([a])
                if self._loses(v):
                    continue        # losing replies don't save Ann
                if not self.ben_wins(v, Player.BEN, r - 1):
                    result = False
                    break
        if result:
            if known_win is None or r < known_win:
                self.win_within[key] = r
        else:
            if known_safe is None or r > known_safe:
                self.safe_for[key] = r
        return result

    def extract_strategy(self, depth: int) -> dict[bytes, Move]:
        """Walk the witness tree, recording Ben's winning move per position."""
        table: dict[bytes, Move] = {}

        def walk(w: bytes, turn: Player, r: int) -> None:
            if turn is Player.BEN:
                for m in self._ben_moves(w):
                    v = w if m is PASS else w + bytes([m])
                    if m is not PASS and self._loses(v):
                        table[w] = m
                        return
                    if self.ben_wins(v, Player.ANN, r - 1):
                        table[w] = m
                        walk(v, Player.ANN, r - 1)
                        return
                raise AssertionError("witness walk lost a winning line")
            for a in range(self.k):
                v = w + bytes([a])
                if self._loses(v):
                    continue
                walk(v, Player.BEN, r - 1)

        walk(b"", Player.ANN, depth)
        return table
