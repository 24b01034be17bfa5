"""Weight certificates: exact verification, growth inequalities, file formats.

A certificate packages an automaton reference (alphabet, period range,
state count, fingerprint) with integer per-state weights and claimed
rationals alpha, gamma and beta.  Verification rebuilds or receives the
automaton, recomputes the adversary minimum and checks

    alpha * C_v <= C'_v        for every state v

with integer cross-multiplication; nothing in this module ever decides
an inequality in floating point.  ``check_beta`` then relates (alpha,
gamma) to a per-round growth factor beta purely in rational arithmetic.

Files use the little-endian TGCRT1 container with a trailing CRC32; a
JSON mirror exists for automata below 100000 states.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .automaton import LambdaSet, build_lambda
from .modes import Mode
from .solver import SolveResult, min_step, sum_step
from .words import PeriodRange

CERT_MAGIC = b"TGCRT1"

JSON_MIRROR_LIMIT = 100_000

_CREATED_BY = "thuegames 0.1.0"


class CertificateFormatError(ValueError):
    """Certificate bytes are malformed, truncated or fail the checksum."""


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` or a plain integer string; decimals are refused.

    Rationals cross the CLI and file boundary only in this form, so a
    value can never silently lose precision on the way in.
    """
    s = text.strip()
    if "." in s or "e" in s.lower():
        raise ValueError(f"rational {text!r} must be an integer or num/den, "
                         "not a decimal")
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(s))
    except ZeroDivisionError:
        raise ValueError(f"rational {text!r} has a zero denominator") from None


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


@dataclass(eq=False)
class Certificate:
    mode: Mode
    k: int
    pmin: int
    pmax: int
    lambda_count: int
    fingerprint: int
    coefficients: np.ndarray      # int64 per state, canonical order
    m: int                       # claimed smallest nonzero coefficient
    M: int                       # claimed largest coefficient
    alpha: Fraction
    gamma: Fraction
    beta: Fraction               # certified growth factor; 0 when unclaimed
    created_by: str = _CREATED_BY

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Certificate):
            return NotImplemented
        scalar = ("mode", "k", "pmin", "pmax", "lambda_count", "fingerprint",
                  "m", "M", "alpha", "gamma", "beta", "created_by")
        return all(getattr(self, f) == getattr(other, f) for f in scalar) \
            and np.array_equal(self.coefficients, other.coefficients)

    @property
    def rng(self) -> PeriodRange:
        return PeriodRange(self.pmin, self.pmax)


def make_certificate(lam: LambdaSet, mode: Mode, result: SolveResult,
                     beta: Fraction | None = None) -> Certificate:
    """Bundle a solver result; beta defaults to the feasible-interval middle."""
    if beta is None:
        span = beta_interval(mode, result.alpha, result.gamma, lam.rng.pmax)
        beta = (span[0] + span[1]) / 2 if span else Fraction(0)
    return Certificate(
        mode=mode, k=lam.k, pmin=lam.rng.pmin, pmax=lam.rng.pmax,
        lambda_count=len(lam), fingerprint=lam.fingerprint,
        coefficients=np.asarray(result.coeffs, dtype=np.int64),
        m=result.m, M=result.M,
        alpha=result.alpha, gamma=result.gamma, beta=beta)


@dataclass
class VerificationReport:
    passed: bool
    checks: list[tuple[str, bool, str]]   # (name, ok, detail)
    alpha_recomputed: Fraction | None = None
    gamma_recomputed: Fraction | None = None

    def failures(self) -> list[str]:
        return [f"{name}: {detail}" for name, ok, detail in self.checks if not ok]

    def render(self) -> str:
        lines = []
        for name, ok, detail in self.checks:
            lines.append(f"  [{'ok' if ok else 'FAIL'}] {name}: {detail}")
        lines.append(f"verification {'PASSED' if self.passed else 'FAILED'}")
        return "\n".join(lines)


def verify_certificate(cert: Certificate, lam: LambdaSet | None = None) -> VerificationReport:
    """Exactly re-check every claim a certificate makes.

    Rebuilds the automaton when none is supplied.  Checks, in order:
    automaton identity (state count and fingerprint), coefficient shape
    and value range (each entry is zero or within [m, M] and the state
    of the single-letter word carries positive weight), the growth
    inequality alpha * C_v <= C'_v at every state, and the claimed
    gamma against the recomputed coefficient spread.
    """
    checks: list[tuple[str, bool, str]] = []

    if lam is None:
        lam = build_lambda(cert.k, cert.rng)
    count_ok = len(lam) == cert.lambda_count
    checks.append(("state count", count_ok,
                   f"certificate {cert.lambda_count}, automaton {len(lam)}"))
    fp_ok = lam.fingerprint == cert.fingerprint
    checks.append(("fingerprint", fp_ok,
                   f"certificate {cert.fingerprint:#018x}, automaton {lam.fingerprint:#018x}"))
    if not (count_ok and fp_ok):
        return VerificationReport(False, checks)

    C = np.asarray(cert.coefficients, dtype=np.int64)
    shape_ok = C.shape == (len(lam),) and bool((C >= 0).all())
    checks.append(("coefficient vector", shape_ok,
                   f"{C.shape[0]} nonnegative entries expected {len(lam)}"))
    if not shape_ok:
        return VerificationReport(False, checks)

    nz = C[C > 0]
    range_ok = nz.size > 0 and int(nz.min()) >= cert.m and int(C.max()) <= cert.M
    checks.append(("value range", range_ok,
                   f"nonzero values span [{int(nz.min()) if nz.size else '-'}"
                   f", {int(C.max())}], claimed [{cert.m}, {cert.M}] "
                   "(each coefficient must be zero or inside the claimed bounds)"))

    base = lam.index.get(bytes([0]))
    base_ok = base is not None and int(C[base]) > 0
    checks.append(("single-letter weight", base_ok,
                   "state '0' must carry positive weight"))

    C1 = min_step(lam, sum_step(lam, C), cert.mode)
    an, ad = cert.alpha.numerator, cert.alpha.denominator
    ineq_ok, witness = _alpha_inequality(C, C1, an, ad)
    checks.append(("growth inequality", ineq_ok,
                   "alpha * C_v <= C'_v at every state" if ineq_ok else
                   f"violated at state {witness}: "
                   f"{an}/{ad} * {int(C[witness])} > {int(C1[witness])}"))

    alpha_re = None
    if nz.size:
        pos = np.flatnonzero(C > 0)
        ratios = [Fraction(int(C1[v]), int(C[v])) for v in pos]
        alpha_re = min(ratios)
    gamma_re = Fraction(int(C.max()), int(nz.min())) if nz.size else None
    gamma_ok = gamma_re is not None and gamma_re <= cert.gamma
    checks.append(("spread", gamma_ok,
                   f"recomputed max/min {format_rational(gamma_re) if gamma_re else '-'}"
                   f" vs claimed {format_rational(cert.gamma)}"))

    passed = all(ok for _, ok, _ in checks)
    return VerificationReport(passed, checks, alpha_re, gamma_re)


def _alpha_inequality(C: np.ndarray, C1: np.ndarray, an: int, ad: int) -> tuple[bool, int]:
    """Check an/ad * C <= C1 at every state; exact, int64 fast path."""
    top = max(int(C.max(initial=0)), int(C1.max(initial=0)))
    if max(an, ad) < (1 << 62) // max(top, 1):
        lhs = an * C
        rhs = ad * C1
        bad = np.flatnonzero(lhs > rhs)
        if bad.size == 0:
            return True, -1
        return False, int(bad[0])
    for v in range(C.shape[0]):
        if an * int(C[v]) > ad * int(C1[v]):
            return False, v
    return True, -1


def check_beta(mode: Mode, alpha: Fraction, gamma: Fraction, p: int,
               beta: Fraction) -> bool:
    """Exact test that (alpha, gamma) certify per-round growth beta.

    Nonrepetitive mode (p odd):

        alpha - 2 * gamma * beta**((3 - p) / 2) / (beta - 1) >= beta

    Hard mode (p even), with h = p / 2:

        alpha - gamma * beta**(1 - p)
              * (beta**(3 + h) + 2 * beta**(2 + h) + beta**(1 + h)
                 - beta**2 - 1) / ((1 + beta) * (beta - 1)**2) >= beta

    Both sides are exact rationals; only integer exponents occur.
    """
    alpha, gamma, beta = Fraction(alpha), Fraction(gamma), Fraction(beta)
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    if mode is Mode.NONREPETITIVE:
        if p % 2 == 0:
            raise ValueError("the nonrepetitive growth bound needs odd p")
        loss = 2 * gamma * beta ** ((3 - p) // 2) / (beta - 1)
    elif mode is Mode.HARD:
        if p % 2 == 1:
            raise ValueError("the hard-mode growth bound needs even p")
        h = p // 2
        num = beta ** (3 + h) + 2 * beta ** (2 + h) + beta ** (1 + h) - beta ** 2 - 1
        loss = gamma * beta ** (1 - p) * num / ((1 + beta) * (beta - 1) ** 2)
    else:
        raise ValueError("erase positions inherit the hard-mode bound")
    return alpha - loss >= beta


def _loss_float(mode: Mode, gamma: float, p: int, b: float) -> float:
    if mode is Mode.NONREPETITIVE:
        return 2 * gamma * b ** ((3 - p) // 2) / (b - 1)
    h = p // 2
    num = b ** (3 + h) + 2 * b ** (2 + h) + b ** (1 + h) - b ** 2 - 1
    return gamma * b ** (1 - p) * num / ((1 + b) * (b - 1) ** 2)


def beta_interval(mode: Mode, alpha: Fraction, gamma: Fraction, p: int,
                  resolution: Fraction = Fraction(1, 1000)
                  ) -> tuple[Fraction, Fraction] | None:
    """Outermost grid multiples of ``resolution`` in (1, 100] passing check_beta.

    The grid is scanned with a float prefilter; every point within float
    noise of the feasibility boundary, and both reported endpoints, are
    settled by the exact test.  Returns None when no grid point passes.
    """
    if mode is Mode.NONREPETITIVE and p % 2 == 0:
        raise ValueError("the nonrepetitive growth bound needs odd p")
    if mode is Mode.HARD and p % 2 == 1:
        raise ValueError("the hard-mode growth bound needs even p")
    step = Fraction(resolution)
    if step <= 0:
        raise ValueError("resolution must be positive")
    lo_i = int(1 / step) + 1
    hi_i = int(100 / step)
    grid = np.arange(lo_i, hi_i + 1, dtype=np.int64)
    b = grid * float(step)
    a_f, g_f = float(alpha), float(gamma)
    margin = a_f - np.array([_loss_float(mode, g_f, p, x) for x in b]) - b
    tol = 1e-7 * np.maximum(1.0, np.abs(b))
    feasible = margin > tol
    unsure = np.abs(margin) <= tol
    for i in np.flatnonzero(unsure):
        feasible[i] = check_beta(mode, alpha, gamma, p, grid[int(i)] * step)
    idx = np.flatnonzero(feasible)
    if idx.size == 0:
        return None
    lo = int(grid[idx[0]]) * step
    hi = int(grid[idx[-1]]) * step
    # The prefilter cannot misreport the endpoints; make that a guarantee.
    assert check_beta(mode, alpha, gamma, p, lo)
    assert check_beta(mode, alpha, gamma, p, hi)
    return lo, hi


def encode(cert: Certificate) -> bytes:
    """Serialize to the TGCRT1 container (little-endian, CRC32 tail)."""
    out = bytearray()
    out += CERT_MAGIC
    out += struct.pack("<BBBBQQQQ", 0 if cert.mode is Mode.NONREPETITIVE else 1,
                       cert.k, cert.pmin, cert.pmax,
                       cert.lambda_count, cert.fingerprint, cert.m, cert.M)
    for q in (cert.alpha, cert.gamma, cert.beta):
        out += _pack_rational(q)
    created = cert.created_by.encode()
    out += struct.pack("<H", len(created)) + created
    coeffs = np.asarray(cert.coefficients, dtype=np.int64)
    if coeffs.size and int(coeffs.max()) >= 1 << 32:
        raise CertificateFormatError("coefficients exceed the u32 file range")
    out += coeffs.astype("<u4").tobytes()
    out += struct.pack("<I", zlib.crc32(bytes(out)))
    return bytes(out)


def decode(data: bytes) -> Certificate:
    """Parse TGCRT1 bytes; fails on bad magic, truncation or checksum."""
    if len(data) < 6 or data[:6] != CERT_MAGIC:
        raise CertificateFormatError("not a TGCRT1 certificate")
    if len(data) < 10:
        raise CertificateFormatError("truncated certificate")
    if zlib.crc32(data[:-4]) != struct.unpack("<I", data[-4:])[0]:
        raise CertificateFormatError("certificate checksum mismatch")
    try:
        mode_b, k, pmin, pmax, count, fp, m, M = struct.unpack_from("<BBBBQQQQ", data, 6)
        pos = 6 + struct.calcsize("<BBBBQQQQ")
        alpha, pos = _unpack_rational(data, pos)
        gamma, pos = _unpack_rational(data, pos)
        beta, pos = _unpack_rational(data, pos)
        (clen,) = struct.unpack_from("<H", data, pos)
        pos += 2
        created = data[pos:pos + clen].decode()
        pos += clen
        need = count * 4
        if len(data) - 4 - pos != need:
            raise CertificateFormatError(
                f"coefficient block holds {len(data) - 4 - pos} bytes, "
                f"expected {need}")
        coeffs = np.frombuffer(data, dtype="<u4", count=count, offset=pos).astype(np.int64)
    except struct.error as exc:
        raise CertificateFormatError("truncated certificate") from exc
    return Certificate(
        mode=Mode.NONREPETITIVE if mode_b == 0 else Mode.HARD,
        k=k, pmin=pmin, pmax=pmax, lambda_count=count, fingerprint=fp,
        coefficients=coeffs, m=m, M=M,
        alpha=alpha, gamma=gamma, beta=beta, created_by=created)


def _pack_rational(q: Fraction) -> bytes:
    def _int(v: int) -> bytes:
        raw = v.to_bytes((v.bit_length() + 8) // 8, "little", signed=True)
        return struct.pack("<I", len(raw)) + raw
    return _int(q.numerator) + _int(q.denominator)


def _unpack_rational(data: bytes, pos: int) -> tuple[Fraction, int]:
    def _int(p: int) -> tuple[int, int]:
        (length,) = struct.unpack_from("<I", data, p)
        p += 4
        if p + length > len(data):
            raise CertificateFormatError("truncated certificate")
        return int.from_bytes(data[p:p + length], "little", signed=True), p + length
    num, pos = _int(pos)
    den, pos = _int(pos)
    if den == 0:
        raise CertificateFormatError("rational with zero denominator")
    return Fraction(num, den), pos


def write_certificate(cert: Certificate, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(encode(cert))


def read_certificate(path: str) -> Certificate:
    with open(path, "rb") as fh:
        head = fh.read(6)
        rest = fh.read()
    if head == CERT_MAGIC:
        return decode(head + rest)
    return from_json((head + rest).decode())


def to_json(cert: Certificate) -> str:
    """JSON mirror; refused for automata at or above the mirror limit."""
    if cert.lambda_count >= JSON_MIRROR_LIMIT:
        raise CertificateFormatError(
            f"JSON mirror only covers automata below {JSON_MIRROR_LIMIT} states")
    doc = {
        "format": "tgcrt-json-1",
        "mode": cert.mode.value,
        "k": cert.k,
        "pmin": cert.pmin,
        "pmax": cert.pmax,
        "lambdaCount": cert.lambda_count,
        "fingerprint": f"{cert.fingerprint:#018x}",
        "m": cert.m,
        "M": cert.M,
        "alpha": format_rational(cert.alpha),
        "gamma": format_rational(cert.gamma),
        "beta": format_rational(cert.beta),
        "createdBy": cert.created_by,
        "coefficients": [int(c) for c in cert.coefficients],
    }
    return json.dumps(doc, indent=2)


def from_json(text: str) -> Certificate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateFormatError(f"invalid certificate JSON: {exc}") from exc
    if doc.get("format") != "tgcrt-json-1":
        raise CertificateFormatError("not a tgcrt-json-1 document")
    return Certificate(
        mode=Mode.from_name(doc["mode"]),
        k=doc["k"], pmin=doc["pmin"], pmax=doc["pmax"],
        lambda_count=doc["lambdaCount"],
        fingerprint=int(doc["fingerprint"], 16),
        coefficients=np.asarray(doc["coefficients"], dtype=np.int64),
        m=doc["m"], M=doc["M"],
        alpha=parse_rational(doc["alpha"]),
        gamma=parse_rational(doc["gamma"]),
        beta=parse_rational(doc["beta"]),
        created_by=doc.get("createdBy", ""))
