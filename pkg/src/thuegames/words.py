"""Word primitives over small integer alphabets.

A word is a ``bytes`` object whose entries are letters ``0..k-1`` with
``k <= 16``; the empty word is ``b""``.  Storing letters in ``bytes``
keeps words hashable, cheap to slice and directly usable as dict keys,
which the automaton and the game searches rely on heavily.

A square is a factor of the form ``uu`` with period ``|u|``.  Most
operations take a :class:`PeriodRange` restricting which periods count:
the nonrepetitive game only forbids periods >= 2 (doubled letters are
harmless there), the hard and erase games track every period.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

MAX_ALPHABET = 16

# Large sentinel for "no period cap"; scans clamp to len(w) anyway.
_NO_CAP = 1 << 30

_DIGITS = "0123456789abcdef"


@dataclass(frozen=True)
class PeriodRange:
    """Inclusive range [pmin, pmax] of square periods being tracked."""

    pmin: int
    pmax: int

    def __post_init__(self) -> None:
        if self.pmin < 1:
            raise ValueError(f"pmin must be >= 1, got {self.pmin}")
        if self.pmax < self.pmin:
            raise ValueError(f"pmax must be >= pmin, got {self.pmax} < {self.pmin}")

    @classmethod
    def unbounded(cls, pmin: int) -> "PeriodRange":
        """Range with no upper cap; useful for whole-game legality checks."""
        return cls(pmin, _NO_CAP)

    @property
    def bounded(self) -> bool:
        return self.pmax < _NO_CAP


def parse_word(text: str) -> bytes:
    """Parse a word from hex-digit letters, e.g. ``"0102"`` -> four letters.

    >>> list(parse_word("0102"))
    [0, 1, 0, 2]
    """
    if text == "-":
        return b""
    out = bytearray()
    for ch in text:
        try:
            out.append(_DIGITS.index(ch.lower()))
        except ValueError:
            raise ValueError(f"invalid letter {ch!r} in word {text!r}") from None
    return bytes(out)


def format_word(w: bytes) -> str:
    """Inverse of :func:`parse_word`; the empty word prints as ``"-"``."""
    if not w:
        return "-"
    return "".join(_DIGITS[b] for b in w)


def check_word(w: bytes, k: int) -> None:
    """Raise if some letter of ``w`` is outside ``0..k-1``."""
    if w and max(w) >= k:
        raise ValueError(f"letter {max(w)} out of range for alphabet of size {k}")


def normalize(w: bytes) -> bytes:
    """Relabel letters in order of first occurrence: 0, then 1, and so on.

    The result is the lexicographically least word obtainable from ``w``
    by permuting letters; two words have the same normal form exactly
    when one is a letter-permutation of the other.

    >>> format_word(normalize(parse_word("21210")))
    '01012'
    """
    table = bytearray(256)
    seen = bytearray(256)
    nxt = 0
    out = bytearray(len(w))
    for i, b in enumerate(w):
        if not seen[b]:
            seen[b] = 1
            table[b] = nxt
            nxt += 1
        out[i] = table[b]
    return bytes(out)


def last_letter(w: bytes) -> int | None:
    """Final letter of ``w``, or None for the empty word."""
    return w[-1] if w else None


def square_suffix_periods(w: bytes, r: PeriodRange) -> list[int]:
    """Periods q in range such that ``w`` ends with a square of period q.

    Only periods up to ``len(w) // 2`` can occur; the scan is ascending,
    so the first entry is the shortest period.
    """
    n = len(w)
    top = min(r.pmax, n // 2)
    out = []
    for q in range(r.pmin, top + 1):
        if w[n - 2 * q : n - q] == w[n - q :]:
            out.append(q)
    return out


def is_square_free(w: bytes, r: PeriodRange) -> bool:
    """True when no factor of ``w`` is a square with period in range."""
    n = len(w)
    for end in range(2 * r.pmin, n + 1):
        top = min(r.pmax, end // 2)
        for q in range(r.pmin, top + 1):
            if w[end - 2 * q : end - q] == w[end - q : end]:
                return False
    return True


def ends_with_two_minus_power(w: bytes, r: PeriodRange, unbounded: bool = False) -> bool:
    """True when some suffix s of ``w`` with |s| >= 3 extends to a square.

    Concretely: there is a letter a and a period q in range with ``s + a``
    a square of period q.  Such suffixes are one letter short of a square,
    so a position ending in one hands the opponent an immediate square.
    |s| = 2q - 1 >= 3 forces q >= 2 regardless of ``r.pmin``.  With
    ``unbounded`` the period cap is the largest geometrically possible
    instead of ``r.pmax``.
    """
    n = len(w)
    cap = (n + 1) // 2 if unbounded else min(r.pmax, (n + 1) // 2)
    for q in range(max(r.pmin, 2), cap + 1):
        # Suffix of length 2q-1; all but the final letter of the square
        # is already present, i.e. the last q-1 letters repeat the q-1
        # letters one period earlier.
        if w[n - 2 * q + 1 : n - q] == w[n - q + 1 :]:
            return True
    return False


def completing_letter(w: bytes, q: int) -> int:
    """Letter that closes the period-q square begun by the tail of ``w``.

    Only meaningful when the period-q condition of
    :func:`ends_with_two_minus_power` holds for q; the closing letter is
    the one q positions from the end.
    """
    return w[len(w) - q]


def _has_square_ending_in(w: bytes, r: PeriodRange, first_end: int) -> bool:
    """Square-in-range test restricted to factors ending at >= first_end."""
    n = len(w)
    for end in range(max(first_end, 2 * r.pmin), n + 1):
        top = min(r.pmax, end // 2)
        for q in range(r.pmin, top + 1):
            if w[end - 2 * q : end - q] == w[end - q : end]:
                return True
    return False


def iter_minimal_squares(k: int, r: PeriodRange) -> Iterator[bytes]:
    """Yield normalized minimal squares over ``k`` letters, shortest first.

    A minimal square is a square ``uu`` with period in range none of whose
    proper factors is a square with period in range.  Any proper factor
    misses the first or the last letter, so minimality reduces to both
    length-(2q-1) windows of ``uu`` being square-free in range.

    The roots u are enumerated by depth-first search over normalized
    words (next letter at most one past the letters used so far), pruning
    any prefix that already ends with a square in range.
    """
    if not 2 <= k <= MAX_ALPHABET:
        raise ValueError(f"alphabet size must be in 2..{MAX_ALPHABET}, got {k}")
    if not r.bounded:
        raise ValueError("minimal square enumeration needs a bounded period range")
    for q in range(r.pmin, r.pmax + 1):
        u = bytearray()

        def extend(depth: int, distinct: int) -> Iterator[bytes]:
            if depth == q:
                m = bytes(u) * 2
                # u itself is square-free; only junction-crossing factors
                # remain to be checked in each window.
                if not _has_square_ending_in(m[:-1], r, q + 1) and not _has_square_ending_in(m[1:], r, q):
                    yield m
                return
            for letter in range(min(distinct + 1, k)):
                u.append(letter)
                if not square_suffix_periods(bytes(u), r):
                    yield from extend(depth + 1, distinct + (1 if letter == distinct else 0))
                u.pop()

        yield from extend(0, 0)


def minimal_squares(k: int, r: PeriodRange) -> set[bytes]:
    """Set of all normalized minimal squares over ``k`` letters in range."""
    return set(iter_minimal_squares(k, r))
