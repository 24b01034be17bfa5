"""Suffix automaton over prefixes of minimal squares.

The state set holds every normalized proper prefix of a minimal square
(see :func:`thuegames.words.iter_minimal_squares`), the empty word
included.  For any word w that is square-free in range, ``state_of``
maps w to the longest suffix of w that normalizes into the state set;
states therefore capture exactly how far w has progressed towards each
possible square.  The map is a morphism of play: appending a letter to
w moves the state the same way regardless of the rest of w.

Transitions are compressed by letter class.  From a state u with d
distinct letters, each occurring letter is its own class (multiplicity
1) and the k - d unused letters form one fresh class: appending any
unused letter leads to the same state up to permutation.  A transition
is DEAD when the appended letter closes a square with period in range;
since u is square-free, any such square is a suffix of ua.

States are ordered by (length, lexicographic), so state 0 is the empty
word.  A 64-bit FNV-1a hash over the length-prefixed ordered state
words fingerprints the set; certificates embed it so a coefficient
vector can never be verified against the wrong automaton.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from .words import (
    MAX_ALPHABET,
    PeriodRange,
    is_square_free,
    iter_minimal_squares,
    normalize,
    square_suffix_periods,
)

DEAD = -1

LAMBDA_MAGIC = b"TGLAM1"

# Default cap on estimated construction footprint: 8 GiB.
DEFAULT_MEMORY_BUDGET = 8 << 30

# Rough per-prefix footprint (word bytes, set/dict slots, class rows)
# used for the pre-build estimate; deliberately conservative.
_EST_BYTES_PER_PREFIX = 140

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = (1 << 64) - 1


class ResourceLimitError(RuntimeError):
    """Construction would exceed the configured memory budget."""


class ContainsSquareError(ValueError):
    """state_of was handed a word with a square in the tracked range."""


class AutomatonFormatError(ValueError):
    """Dump file is malformed, truncated or fails its fingerprint."""


def fnv1a64(data: bytes, h: int = _FNV_OFFSET) -> int:
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _U64
    return h


@dataclass(frozen=True)
class Edge:
    """One compressed transition: class letter, multiplicity, target state."""

    letter: int
    mult: int
    target: int  # StateId, or DEAD

    @property
    def dead(self) -> bool:
        return self.target == DEAD


@dataclass
class LambdaSet:
    """The automaton: ordered state words plus class-compressed transitions.

    Transition rows are stored CSR-style: state s owns entries
    ``row_ptr[s]:row_ptr[s+1]`` of the class arrays, in class-letter
    order (occurring letters 0..d-1, then the fresh class d if any).
    """

    k: int
    rng: PeriodRange
    words: list[bytes]
    index: dict[bytes, int]
    distinct: np.ndarray          # uint8, per state
    last: np.ndarray              # int16, last letter per state, -1 for the empty word
    row_ptr: np.ndarray           # int64, len n+1
    cls_letter: np.ndarray        # int16, per transition entry
    cls_mult: np.ndarray          # int16
    cls_target: np.ndarray        # int64, DEAD = -1
    fingerprint: int
    entry_state: np.ndarray = field(repr=False, default=None)  # int64, owner per entry

    def __post_init__(self) -> None:
        if self.entry_state is None:
            counts = np.diff(self.row_ptr)
            self.entry_state = np.repeat(np.arange(len(self.words), dtype=np.int64), counts)

    def __len__(self) -> int:
        return len(self.words)

    @property
    def suffix_cap(self) -> int:
        """Longest possible state word: one letter short of the longest square."""
        return 2 * self.rng.pmax - 1


def _compute_fingerprint(words: list[bytes]) -> int:
    h = _FNV_OFFSET
    for w in words:
        h = fnv1a64(bytes([len(w)]) + w, h)
    return h


def build_lambda(k: int, rng: PeriodRange,
                 memory_budget: int | None = DEFAULT_MEMORY_BUDGET) -> LambdaSet:
    """Enumerate states and transitions for alphabet size k and period range.

    A counting pass over the minimal squares estimates the construction
    footprint first; if the estimate exceeds ``memory_budget`` (bytes,
    None to disable) the build aborts before allocating state storage.
    """
    if not 2 <= k <= MAX_ALPHABET:
        raise ValueError(f"alphabet size must be in 2..{MAX_ALPHABET}, got {k}")
    if not rng.bounded or rng.pmax > 127:
        raise ValueError("automaton construction needs a bounded pmax <= 127")

    if memory_budget is not None:
        # Counting pass; aborts as soon as the running estimate crosses the
        # budget so oversized configurations are refused without building.
        prefix_slots = 0
        for m in iter_minimal_squares(k, rng):
            prefix_slots += len(m)
            if prefix_slots * _EST_BYTES_PER_PREFIX > memory_budget:
                raise ResourceLimitError(
                    f"estimated footprint exceeds "
                    f"{memory_budget / (1 << 30):.1f} GiB after "
                    f"{prefix_slots} prefix slots; rerun with a larger "
                    "memory budget to attempt this configuration")

    state_set: set[bytes] = set()
    for m in iter_minimal_squares(k, rng):
        for j in range(len(m)):
            state_set.add(m[:j])

    words = sorted(state_set, key=lambda w: (len(w), w))
    index = {w: i for i, w in enumerate(words)}
    n = len(words)
    cap = 2 * rng.pmax - 1

    distinct = np.zeros(n, dtype=np.uint8)
    last = np.full(n, -1, dtype=np.int16)
    row_ptr = np.zeros(n + 1, dtype=np.int64)
    letters: list[int] = []
    mults: list[int] = []
    targets: list[int] = []

    for sid, u in enumerate(words):
        d = len(set(u))
        distinct[sid] = d
        if u:
            last[sid] = u[-1]
        nclasses = d + (1 if d < k else 0)
        for c in range(nclasses):
            ua = u + bytes([c])
            if square_suffix_periods(ua, rng):
                target = DEAD
            else:
                target = _longest_state_suffix(index, ua, cap)
            letters.append(c)
            mults.append(1 if c < d else k - d)
            targets.append(target)
        row_ptr[sid + 1] = len(targets)

    return LambdaSet(
        k=k,
        rng=rng,
        words=words,
        index=index,
        distinct=distinct,
        last=last,
        row_ptr=row_ptr,
        cls_letter=np.asarray(letters, dtype=np.int16),
        cls_mult=np.asarray(mults, dtype=np.int16),
        cls_target=np.asarray(targets, dtype=np.int64),
        fingerprint=_compute_fingerprint(words),
    )


def _longest_state_suffix(index: dict[bytes, int], x: bytes, cap: int) -> int:
    for length in range(min(len(x), cap), 0, -1):
        sid = index.get(normalize(x[len(x) - length:]))
        if sid is not None:
            return sid
    return 0


def state_of(lam: LambdaSet, w: bytes, check: bool = True) -> int:
    """State of the longest suffix of w in the set, up to permutation.

    With ``check`` the word is first tested square-free in range; the
    engines skip the test because play already maintains the invariant.
    """
    if check and not is_square_free(w, lam.rng):
        raise ContainsSquareError(
            "word contains a square in the tracked period range")
    return _longest_state_suffix(lam.index, w, lam.suffix_cap)


def step(lam: LambdaSet, sid: int, letter: int) -> int:
    """Follow the class transition for ``letter`` out of state ``sid``.

    ``letter`` is in normalized coordinates: 0..d-1 pick an occurring
    letter, d picks the fresh class.  Returns a StateId or DEAD.
    """
    lo = int(lam.row_ptr[sid])
    hi = int(lam.row_ptr[sid + 1])
    if not 0 <= letter < hi - lo:
        raise ValueError(f"state {sid} has no letter class {letter}")
    return int(lam.cls_target[lo + letter])


def out_profile(lam: LambdaSet, sid: int) -> list[Edge]:
    """All compressed transitions out of ``sid`` in class-letter order."""
    lo = int(lam.row_ptr[sid])
    hi = int(lam.row_ptr[sid + 1])
    return [
        Edge(int(lam.cls_letter[e]), int(lam.cls_mult[e]), int(lam.cls_target[e]))
        for e in range(lo, hi)
    ]


def _pack_nibbles(w: bytes) -> bytes:
    out = bytearray((len(w) + 1) // 2)
    for i, b in enumerate(w):
        out[i // 2] |= b << (4 * (i % 2))
    return bytes(out)


def _unpack_nibbles(data: bytes, length: int) -> bytes:
    return bytes((data[i // 2] >> (4 * (i % 2))) & 0xF for i in range(length))


def dump(lam: LambdaSet, path: str) -> None:
    """Write the automaton in the little-endian TGLAM1 container."""
    out = bytearray()
    out += LAMBDA_MAGIC
    out += struct.pack("<BBBQQ", lam.k, lam.rng.pmin, lam.rng.pmax,
                       len(lam.words), lam.fingerprint)
    for sid, w in enumerate(lam.words):
        out += struct.pack("<B", len(w))
        out += _pack_nibbles(w)
        lo = int(lam.row_ptr[sid])
        hi = int(lam.row_ptr[sid + 1])
        out += struct.pack("<B", hi - lo)
        for e in range(lo, hi):
            target = int(lam.cls_target[e])
            out += struct.pack("<BBI", int(lam.cls_letter[e]), int(lam.cls_mult[e]),
                              0xFFFFFFFF if target == DEAD else target)
    out += struct.pack("<I", zlib.crc32(bytes(out)))
    with open(path, "wb") as fh:
        fh.write(bytes(out))


def load(path: str) -> LambdaSet:
    """Read a TGLAM1 dump; fails on bad magic, truncation or fingerprint."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(LAMBDA_MAGIC) + 19 + 4 or data[:6] != LAMBDA_MAGIC:
        raise AutomatonFormatError("not a TGLAM1 automaton dump")
    if zlib.crc32(data[:-4]) != struct.unpack("<I", data[-4:])[0]:
        raise AutomatonFormatError("automaton dump checksum mismatch")
    k, pmin, pmax, n, fp = struct.unpack_from("<BBBQQ", data, 6)
    pos = 6 + struct.calcsize("<BBBQQ")
    words: list[bytes] = []
    letters: list[int] = []
    mults: list[int] = []
    targets: list[int] = []
    row_ptr = np.zeros(n + 1, dtype=np.int64)
    try:
        for sid in range(n):
            (wlen,) = struct.unpack_from("<B", data, pos)
            pos += 1
            packed = (wlen + 1) // 2
            words.append(_unpack_nibbles(data[pos:pos + packed], wlen))
            pos += packed
            (ncls,) = struct.unpack_from("<B", data, pos)
            pos += 1
            for _ in range(ncls):
                letter, mult, target = struct.unpack_from("<BBI", data, pos)
                pos += 6
                letters.append(letter)
                mults.append(mult)
                targets.append(DEAD if target == 0xFFFFFFFF else target)
            row_ptr[sid + 1] = len(targets)
    except struct.error as exc:
        raise AutomatonFormatError("truncated automaton dump") from exc
    if _compute_fingerprint(words) != fp:
        raise AutomatonFormatError("automaton dump fingerprint mismatch")
    distinct = np.array([len(set(w)) for w in words], dtype=np.uint8)
    last = np.array([w[-1] if w else -1 for w in words], dtype=np.int16)
    return LambdaSet(
        k=k,
        rng=PeriodRange(pmin, pmax),
        words=words,
        index={w: i for i, w in enumerate(words)},
        distinct=distinct,
        last=last,
        row_ptr=row_ptr,
        cls_letter=np.asarray(letters, dtype=np.int16),
        cls_mult=np.asarray(mults, dtype=np.int16),
        cls_target=np.asarray(targets, dtype=np.int64),
        fingerprint=fp,
    )
