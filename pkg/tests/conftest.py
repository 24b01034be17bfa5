"""Shared fixtures: the expensive automata and certificates build once."""

import pytest

from thuegames import (Mode, PeriodRange, build_lambda, make_certificate,
                       solve)


@pytest.fixture(scope="session")
def lam7():
    """19-state automaton for 7 letters, periods 1..4."""
    return build_lambda(7, PeriodRange(1, 4))


@pytest.fixture(scope="session")
def lam4s():
    """17-state automaton for 4 letters, periods 2..3."""
    return build_lambda(4, PeriodRange(2, 3))


@pytest.fixture(scope="session")
def lam6():
    """Playing-grade automaton for the six-letter hard game."""
    return build_lambda(6, PeriodRange(1, 8))


@pytest.fixture(scope="session")
def solved6(lam6):
    return solve(lam6, Mode.HARD)


@pytest.fixture(scope="session")
def cert6(lam6, solved6):
    return make_certificate(lam6, Mode.HARD, solved6)
