"""Hot array kernels for the weight iteration, in two interchangeable builds.

The jitted build compiles the per-state loops with numba; the fallback
expresses the same recurrences as vectorized numpy segment reductions.
Setting ``THUEGAMES_NO_NUMBA=1`` (or numba being absent) selects the
fallback.  Both builds are deterministic and agree bit for bit;
``benchmarks/bench_kernels.py`` compares their throughput.

All kernels consume the CSR transition layout of
:class:`thuegames.automaton.LambdaSet`: ``row_ptr`` delimits each
state's class entries, ``target`` is -1 for dead transitions, ``mult``
counts the letters in a class and ``letter`` names the class in
normalized coordinates.  ``entry_state`` maps each entry back to its
owning state and is only touched by the numpy build.
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("THUEGAMES_NO_NUMBA", "").strip().lower()
_disabled = _env in {"1", "true", "yes", "on"}

HAS_NUMBA = False
if not _disabled:
    try:
        from numba import njit
        HAS_NUMBA = True
    except ImportError:
        pass

BACKEND = "numba" if HAS_NUMBA else "numpy"

# Sentinel exceeding any finite candidate in the int64 min reduction.
_INT_INF = 1 << 62


if HAS_NUMBA:

    @njit(cache=True)
    def _sum_step_jit(row_ptr, target, mult, C, out):
        for s in range(out.shape[0]):
            acc = 0
            for e in range(row_ptr[s], row_ptr[s + 1]):
                t = target[e]
                if t >= 0:
                    acc = acc + mult[e] * C[t]
            out[s] = acc

    @njit(cache=True)
    def _min_step_jit(row_ptr, target, letter, last, C2, hard, out):
        for s in range(out.shape[0]):
            best = C2[s]
            have = hard  # the pass branch seeds the minimum in hard mode
            for e in range(row_ptr[s], row_ptr[s + 1]):
                if hard and letter[e] == last[s]:
                    continue
                t = target[e]
                cand = C2[t] if t >= 0 else 0
                if not have or cand < best:
                    best = cand
                    have = True
            out[s] = best


def _sum_step_np(row_ptr, target, mult, C, out, entry_state):
    safe = np.maximum(target, 0)
    contrib = np.where(target >= 0, mult * C[safe], 0)
    np.add.reduceat(contrib, row_ptr[:-1], out=out)


def _min_step_np(row_ptr, target, letter, last, C2, hard, out, entry_state):
    big = np.inf if C2.dtype.kind == "f" else _INT_INF
    safe = np.maximum(target, 0)
    cand = np.where(target >= 0, C2[safe], 0)
    if hard:
        cand = np.where(letter == last[entry_state], big, cand)
    np.minimum.reduceat(cand, row_ptr[:-1], out=out)
    if hard:
        np.minimum(out, C2, out=out)


def sum_step_raw(row_ptr, target, mult, C, entry_state):
    """C''[s] = sum over live classes of mult * C[target].

    ``mult`` must share C's dtype so products never cross-promote.
    """
    out = np.empty_like(C)
    if HAS_NUMBA:
        _sum_step_jit(row_ptr, target, mult, C, out)
    else:
        _sum_step_np(row_ptr, target, mult, C, out, entry_state)
    return out


def min_step_raw(row_ptr, target, letter, last, C2, hard, entry_state):
    """C'[s] = min over adversary branches; dead branches count as 0.

    In hard mode the class of the state's final letter is excluded and
    the stay-put value C2[s] joins the minimum (the pass branch); the
    empty state excludes nothing.
    """
    out = np.empty_like(C2)
    if HAS_NUMBA:
        _min_step_jit(row_ptr, target, letter, last, C2, hard, out)
    else:
        _min_step_np(row_ptr, target, letter, last, C2, hard, out, entry_state)
    return out


def alpha_argmin(C, C1):
    """Index minimizing C1[v]/C[v] over C[v] > 0, exactly; -1 if none.

    Float ratios preselect a candidate window, then exact integer
    cross-multiplication settles the winner, so float rounding can
    never pick a wrong state.
    """
    pos = np.flatnonzero(C > 0)
    if pos.size == 0:
        return -1
    ratios = C1[pos].astype(np.float64) / C[pos].astype(np.float64)
    lo = ratios.min()
    near = pos[ratios <= lo * (1 + 1e-9) + 1e-12]
    best = int(near[0])
    for v in near[1:]:
        v = int(v)
        if int(C1[v]) * int(C[best]) < int(C1[best]) * int(C[v]):
            best = v
    return best
