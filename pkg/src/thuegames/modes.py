"""Game modes shared by the solver, the certificate layer and the engines."""

from __future__ import annotations

from enum import Enum


class Mode(Enum):
    """The three letter games.

    NONREPETITIVE: Ben wins when a square of period >= 2 appears; doubled
    letters are legal and harmless.  ERASE: squares never end the game;
    instead the second half of any square created is erased and Ann tries
    to reach a target length.  HARD: Ben may pass and may not repeat the
    letter just played, and any square, doubled letters included, wins
    for him.
    """

    NONREPETITIVE = "nonrep"
    ERASE = "erase"
    HARD = "hard"

    @property
    def pmin(self) -> int:
        """Smallest square period that matters in this mode."""
        return 2 if self is Mode.NONREPETITIVE else 1

    @property
    def certificate_mode(self) -> "Mode":
        """Mode whose weight certificate guides play; erase reuses hard."""
        return Mode.HARD if self is Mode.ERASE else self

    @classmethod
    def from_name(cls, name: str) -> "Mode":
        for m in cls:
            if m.value == name:
                return m
        raise ValueError(f"unknown mode {name!r}; expected one of "
                         f"{', '.join(m.value for m in cls)}")
