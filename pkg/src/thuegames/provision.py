"""Default engine parameters and certificate provisioning.

Maps a (game mode, alphabet size) pair to the period window its playing
certificate is solved over, building and caching on first use.  Modes
and sizes absent from the table have no positive weight vector (Ben
forces a win there) or are too large for interactive startup; engines
asked to play Ann for those refuse at session creation.
"""

from __future__ import annotations

from .automaton import build_lambda, DEFAULT_MEMORY_BUDGET
from .certificate import Certificate, read_certificate, verify_certificate
from .games import EnginePolicy
from .modes import Mode
from .solver import SolverConfig, solve
from .words import PeriodRange

# (certificate mode, k) -> pmax for the default playing certificate.
DEFAULT_PMAX: dict[tuple[Mode, int], int] = {
    (Mode.HARD, 5): 8,
    (Mode.HARD, 6): 8,
    (Mode.HARD, 7): 4,
    (Mode.HARD, 8): 4,
    (Mode.NONREPETITIVE, 4): 9,
    (Mode.NONREPETITIVE, 5): 7,
    (Mode.NONREPETITIVE, 6): 7,
}


def supported_for_engine_ann(mode: Mode, k: int) -> bool:
    return (mode.certificate_mode, k) in DEFAULT_PMAX


def build_policy(mode: Mode, k: int,
                 memory_budget: int | None = DEFAULT_MEMORY_BUDGET,
                 cfg: SolverConfig = SolverConfig()) -> EnginePolicy:
    """Solve the default certificate for (mode, k) and wrap it for play."""
    cmode = mode.certificate_mode
    try:
        pmax = DEFAULT_PMAX[(cmode, k)]
    except KeyError:
        raise ValueError(
            f"no default certificate for {mode.value} over {k} letters; "
            "supply one explicitly") from None
    lam = build_lambda(k, PeriodRange(cmode.pmin, pmax), memory_budget)
    result = solve(lam, cmode, cfg)
    return EnginePolicy(lam=lam, coeffs=result.coeffs, mode=mode)


def policy_from_certificate(cert: Certificate, mode: Mode,
                            memory_budget: int | None = DEFAULT_MEMORY_BUDGET,
                            verify: bool = True) -> EnginePolicy:
    """Wrap a stored certificate for play, verifying it first by default."""
    lam = build_lambda(cert.k, cert.rng, memory_budget)
    if verify:
        report = verify_certificate(cert, lam)
        if not report.passed:
            raise ValueError("certificate failed verification: "
                             + "; ".join(report.failures()))
    return EnginePolicy(lam=lam, coeffs=cert.coefficients, mode=mode)


def policy_from_file(path: str, mode: Mode,
                     memory_budget: int | None = DEFAULT_MEMORY_BUDGET) -> EnginePolicy:
    return policy_from_certificate(read_certificate(path), mode, memory_budget)
