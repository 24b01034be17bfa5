"""Square-free letter games: automata, weight certificates and engines."""

from .automaton import (DEAD, LambdaSet, build_lambda, out_profile, state_of,
                        step)
from .certificate import (Certificate, beta_interval, check_beta, decode,
                          encode, make_certificate, parse_rational,
                          read_certificate, verify_certificate,
                          write_certificate)
from .games import (GameState, EnginePolicy, Move, PASS, Player, ann_move,
                    apply_move, erase_reduce, legal_moves, new_game)
from .modes import Mode
from .oracle import weighted_growth_oracle
from .search import ForcedWinResult, solve_forced_win
from .solver import SolverConfig, SolveResult, growth_alpha, min_step, solve, sum_step
from .words import (PeriodRange, ends_with_two_minus_power, format_word,
                    is_square_free, minimal_squares, normalize, parse_word,
                    square_suffix_periods)

__version__ = "0.1.0"

__all__ = [
    "Certificate", "DEAD", "EnginePolicy", "ForcedWinResult", "GameState",
    "LambdaSet", "Mode", "Move", "PASS", "PeriodRange", "Player",
    "SolveResult", "SolverConfig", "ann_move", "apply_move", "beta_interval",
    "build_lambda", "check_beta", "decode", "encode", "ends_with_two_minus_power",
    "erase_reduce", "format_word", "growth_alpha", "is_square_free",
    "legal_moves", "make_certificate", "min_step", "minimal_squares",
    "new_game", "normalize", "out_profile", "parse_rational", "parse_word",
    "read_certificate", "solve", "solve_forced_win", "square_suffix_periods",
    "state_of", "step", "sum_step", "verify_certificate", "weighted_growth_oracle",
    "write_certificate",
]
