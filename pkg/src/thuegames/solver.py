"""Fixed-point iteration for per-state weights and exact growth extraction.

The weight recurrence assigns each automaton state v two derived values:
C''_v sums the weights of all one-letter extensions that stay square
free (each dead class contributes nothing), and C'_v takes the worst
case over the opponent's interposed letter, counting a vanished branch
as 0.  In hard mode the opponent may also pass, so C''_v itself joins
the minimum, while the class repeating v's final letter leaves it.

Iterating C -> C' with per-round mean normalization and thresholding
(small values snap to 0, large ones cap at M) drives the vector to a
stable shape; the final vector is rounded onto an integer grid and the
growth factor alpha = min over C_v > 0 of C'_v / C_v is then computed
as an exact rational on those integers.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .automaton import LambdaSet
from .modes import Mode


class SolverDivergenceError(RuntimeError):
    """The iteration collapsed to the zero vector or left the finite range."""


class SolverConvergenceError(RuntimeError):
    """The iteration did not stabilize within the configured budget."""


@dataclass(frozen=True)
class SolverConfig:
    """Iteration knobs; the defaults reproduce the shipped certificates."""

    max_iters: int = 5000
    tol: float = 1e-9
    m_rel: float = 0.42          # zero-out floor, relative to the round mean
    M_rel: float = 1.1           # cap, relative to the round mean
    scale: int = 10000           # integer grid: round mean maps to this value
    init: str = "uniform"        # "uniform" | "random"
    seed: int = 0
    mean_over: str = "nonzero"   # "nonzero" | "all" entries
    log_every: int = 0           # progress lines to stderr; 0 disables


@dataclass
class SolveResult:
    coeffs: np.ndarray           # int64 per state
    alpha: Fraction
    gamma: Fraction
    m: int                      # smallest nonzero coefficient
    M: int                      # largest coefficient
    iterations: int
    backend: str


def _f64(lam: LambdaSet, which: str) -> np.ndarray:
    """Cache float64/int64 views of the multiplicities on the automaton."""
    cache = getattr(lam, "_kernel_cache", None)
    if cache is None:
        cache = {}
        lam._kernel_cache = cache
    if which not in cache:
        cache["mult_f"] = lam.cls_mult.astype(np.float64)
        cache["mult_i"] = lam.cls_mult.astype(np.int64)
    return cache[which]


def sum_step(lam: LambdaSet, C: np.ndarray) -> np.ndarray:
    """Extension-sum C'' for a float64 or int64 weight vector."""
    if C.dtype == np.int64:
        top = int(C.max(initial=0))
        if top * lam.k >= (1 << 62):
            raise OverflowError(
                f"sum_step would overflow int64: max coefficient {top} "
                f"times alphabet {lam.k} exceeds the checked range")
        mult = _f64(lam, "mult_i")
    else:
        mult = _f64(lam, "mult_f")
    return kernels.sum_step_raw(lam.row_ptr, lam.cls_target, mult, C,
                                lam.entry_state)


def min_step(lam: LambdaSet, C2: np.ndarray, mode: Mode) -> np.ndarray:
    """Adversary minimum C' from the extension sums C''."""
    hard = mode is Mode.HARD
    return kernels.min_step_raw(lam.row_ptr, lam.cls_target, lam.cls_letter,
                                lam.last, C2, hard, lam.entry_state)


def normalize_threshold(C: np.ndarray, cfg: SolverConfig = SolverConfig()) -> np.ndarray:
    """Rescale onto the integer grid (mean -> scale), then threshold.

    Values below ``m_rel * scale`` become 0, values above
    ``M_rel * scale`` cap there.  Errors out on an all-zero vector.
    """
    mean = _mean(np.asarray(C, dtype=np.float64), cfg)
    ints = np.rint(np.asarray(C, dtype=np.float64) * (cfg.scale / mean)).astype(np.int64)
    m = int(round(cfg.m_rel * cfg.scale))
    M = int(round(cfg.M_rel * cfg.scale))
    ints[ints < m] = 0
    np.minimum(ints, M, out=ints)
    return ints


def _mean(C: np.ndarray, cfg: SolverConfig) -> float:
    if cfg.mean_over == "nonzero":
        nz = C[C > 0]
        mean = float(nz.mean()) if nz.size else 0.0
    else:
        mean = float(C.mean()) if C.size else 0.0
    if not np.isfinite(mean) or mean <= 0:
        raise SolverDivergenceError("weight vector collapsed to zero")
    return mean


def threat_indicator(lam: LambdaSet, scale: int = 10000) -> np.ndarray:
    """Uniform weights on every state without a near-square suffix.

    States ending one letter short of a square in range are forced to
    zero by the recurrence (the closing letter kills their minimum); the
    flat vector on the remaining states is the simplest certificate and
    is exact for small automata where every surviving branch count is
    at least the alphabet-minus-threats bound.
    """
    from .words import ends_with_two_minus_power

    vals = np.fromiter(
        (0 if ends_with_two_minus_power(w, lam.rng) else scale for w in lam.words),
        dtype=np.int64, count=len(lam))
    return vals


def growth_alpha(lam: LambdaSet, C: np.ndarray, mode: Mode) -> Fraction:
    """Exact alpha = min over C_v > 0 of C'_v / C_v for integer weights."""
    C = np.asarray(C, dtype=np.int64)
    if not (C > 0).any():
        raise SolverDivergenceError("no positive coefficients")
    top = int(C.max())
    if top * lam.k < (1 << 62):
        C1 = min_step(lam, sum_step(lam, C), mode)
        if int(C1.max(initial=0)) * top < (1 << 62):
            v = kernels.alpha_argmin(C, C1)
            return Fraction(int(C1[v]), int(C[v]))
    # Big-integer fallback for coefficients outside the checked int64 range.
    return _growth_alpha_bigint(lam, C, mode)


def _growth_alpha_bigint(lam: LambdaSet, C: np.ndarray, mode: Mode) -> Fraction:
    hard = mode is Mode.HARD
    n = len(lam)
    row_ptr, target, mult = lam.row_ptr, lam.cls_target, lam.cls_mult
    sums = [0] * n
    for s in range(n):
        acc = 0
        for e in range(int(row_ptr[s]), int(row_ptr[s + 1])):
            t = int(target[e])
            if t >= 0:
                acc += int(mult[e]) * int(C[t])
        sums[s] = acc
    best: Fraction | None = None
    for s in range(n):
        if int(C[s]) <= 0:
            continue
        cands = []
        for e in range(int(row_ptr[s]), int(row_ptr[s + 1])):
            if hard and int(lam.cls_letter[e]) == int(lam.last[s]):
                continue
            t = int(target[e])
            cands.append(sums[t] if t >= 0 else 0)
        if hard:
            cands.append(sums[s])
        ratio = Fraction(min(cands), int(C[s]))
        if best is None or ratio < best:
            best = ratio
    assert best is not None
    return best


def solve(lam: LambdaSet, mode: Mode,
          cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """Iterate to a stable weight vector and extract exact alpha and gamma."""
    if mode is Mode.ERASE:
        raise ValueError("erase positions reuse the hard certificate; "
                         "solve with Mode.HARD")
    n = len(lam)
    if cfg.init == "random":
        C = np.random.default_rng(cfg.seed).uniform(0.5, 1.5, n)
    else:
        C = np.ones(n, dtype=np.float64)

    iterations = 0
    for it in range(1, cfg.max_iters + 1):
        iterations = it
        C2 = sum_step(lam, C)
        C1 = min_step(lam, C2, mode)
        mean = _mean(C1, cfg)
        Cn = C1 / mean
        Cn[Cn < cfg.m_rel] = 0.0
        np.minimum(Cn, cfg.M_rel, out=Cn)
        denom = np.maximum(Cn, C)
        active = denom > 0
        rel = float((np.abs(Cn - C)[active] / denom[active]).max()) \
            if active.any() else 0.0
        if cfg.log_every and it % cfg.log_every == 0:
            pos = C > 0
            est = float((C1[pos] / C[pos]).min()) if pos.any() else 0.0
            print(f"solver iter {it}: support {int((Cn > 0).sum())}/{n}, "
                  f"alpha~{est:.6f}, delta {rel:.3e}", file=sys.stderr)
        C = Cn
        if rel < cfg.tol:
            break
    else:
        raise SolverConvergenceError(
            f"no fixed point within {cfg.max_iters} iterations")

    # The loop leaves C thresholded against a unit mean, so scaling by the
    # grid alone keeps every nonzero entry inside [m_rel, M_rel] * scale.
    ints = np.rint(C * cfg.scale).astype(np.int64)
    if not (ints > 0).any():
        raise SolverDivergenceError("weight vector collapsed to zero")
    alpha = growth_alpha(lam, ints, mode)
    nz = ints[ints > 0]
    m, M = int(nz.min()), int(ints.max())
    return SolveResult(coeffs=ints, alpha=alpha, gamma=Fraction(M, m),
                       m=m, M=M, iterations=iterations,
                       backend=kernels.BACKEND)
