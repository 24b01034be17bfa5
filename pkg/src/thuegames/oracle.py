"""Round-by-round enumeration of Ann's playable words against a fixed Ben.

Fix a Ben strategy phi and enumerate, for each round n, the set S_n of
words that can stand after Ann's n-th move when every word she leaves
is square free in game scope, never ends in a near-square and keeps
positive certificate weight.  The certificate machinery predicts that
the weighted size of S_n grows by at least the certified factor beta
every round; this oracle measures the actual sets so a certificate
claim can be confronted with ground truth on small rounds.

Weighted sizes are integers and the growth ratios exact rationals.  The
base round always weighs k times the single-letter state's coefficient;
the report carries that value separately so either indexing convention
(counting the empty word as round zero or starting at round one) can be
read off directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .games import BenStrategy, EnginePolicy, PASS, Player, word_legal_moves
from .modes import Mode
from .words import PeriodRange, ends_with_two_minus_power, square_suffix_periods


class OracleBudgetError(RuntimeError):
    pass


@dataclass
class RoundStats:
    n: int
    size: int          # |S_n|
    weight: int        # sum of certificate weights over S_n


@dataclass
class GrowthReport:
    mode: Mode
    k: int
    base_weight: int                   # k * weight of the single-letter state
    rounds: list[RoundStats]
    ratios: list[Fraction]             # weight ratios between adjacent rounds

    def min_ratio(self) -> Fraction | None:
        return min(self.ratios) if self.ratios else None


def weighted_growth_oracle(mode: Mode, k: int, policy: EnginePolicy,
                           phi: BenStrategy, n_max: int,
                           set_budget: int = 2_000_000) -> GrowthReport:
    """Enumerate S_1..S_n_max against ``phi`` and report exact growth."""
    if mode is Mode.ERASE:
        raise ValueError("the growth argument runs in the square-ending games")
    scope = PeriodRange.unbounded(mode.pmin)

    def ann_ok(u: bytes) -> bool:
        if square_suffix_periods(u, scope):
            return False
        if ends_with_two_minus_power(u, scope, unbounded=True):
            return False
        return policy.weight(u) > 0

    frontier: set[bytes] = set()
    for a in range(k):
        u = bytes([a])
        if ann_ok(u):
            frontier.add(u)

    rounds: list[RoundStats] = []
    ratios: list[Fraction] = []
    base_weight = k * policy.weight(bytes([0]))
    prev_weight: int | None = None
    n = 1
    while True:
        weight = sum(policy.weight(u) for u in frontier)
        rounds.append(RoundStats(n=n, size=len(frontier), weight=weight))
        if prev_weight is not None and prev_weight > 0:
            ratios.append(Fraction(weight, prev_weight))
        prev_weight = weight
        if n == n_max:
            break
        nxt: set[bytes] = set()
        for v in sorted(frontier):
            b = phi(v)
            if b not in word_legal_moves(v, mode, k, Player.BEN):
                raise ValueError(f"Ben strategy returned illegal move {b!r}")
            w1 = v if b is PASS else v + bytes([b])
            if square_suffix_periods(w1, scope):
                raise AssertionError(
                    "Ben completed a square against a near-square-free word")
            for a in range(k):
                u = w1 + bytes([a])
                if ann_ok(u):
                    nxt.add(u)
            if len(nxt) > set_budget:
                raise OracleBudgetError(
                    f"round {n + 1} exceeds the {set_budget}-word budget")
        frontier = nxt
        n += 1
    return GrowthReport(mode=mode, k=k, base_weight=base_weight,
                        rounds=rounds, ratios=ratios)
