"""Traces of Frobenius a_p = p + 1 - #E(F_p).

Three backends are available: exhaustive enumeration (small p), a quadratic
character sum (moderate p) and baby-step giant-step on the curve and its
quadratic twist (large p).  `trace` picks one by the size of p.
"""
from __future__ import annotations

import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .curves import RationalCurve, Reduction, ReducedCurve, reduce_mod_p
from .errors import DomainError, InconsistencyError, ThresholdExceededError

NAIVE_MAX = 4096
CHARSUM_MAX = 100_000
BSGS_MIN = 457
MAX_ROUNDS = 64


@dataclass(frozen=True)
class Thresholds:
    naive: int = NAIVE_MAX
    charsum: int = CHARSUM_MAX

    def __post_init__(self):
        if self.naive < 3:
            raise DomainError("naive threshold must cover p = 2, 3")
        if self.charsum < max(self.naive, BSGS_MIN):
            raise DomainError(
                f"charsum threshold must be >= naive threshold and >= {BSGS_MIN}"
            )


DEFAULT_THRESHOLDS = Thresholds()


@dataclass(frozen=True)
class TraceRecord:
    k: int
    p: int
    a: int
    flag: Reduction

    def __post_init__(self):
        if self.flag is Reduction.GOOD:
            check_hasse(self.p, self.a)


def hasse_bound(p: int) -> int:
    """floor(2 sqrt(p))."""
    return math.isqrt(4 * p)


def check_hasse(p, a):
    if abs(a) > hasse_bound(p):
        raise InconsistencyError(f"Hasse bound violated: p={p}, a={a}")


def count_points_naive(rc: ReducedCurve, threshold: int = NAIVE_MAX) -> int:
    if not rc.good:
        raise DomainError(f"bad reduction at p={rc.p}")
    if rc.p > threshold:
        raise ThresholdExceededError(f"p={rc.p} exceeds naive threshold {threshold}")
    return int(K.count_naive(*rc.long, rc.p))


def count_points_charsum(rc: ReducedCurve) -> int:
    if not rc.good:
        raise DomainError(f"bad reduction at p={rc.p}")
    if not rc.has_short_form:
        raise DomainError("character sum needs p > 3")
    return int(K.count_charsum(rc.A, rc.B, rc.p))


def _seed(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


def count_points_bsgs(rc: ReducedCurve, label: str = "") -> int:
    if not rc.good:
        raise DomainError(f"bad reduction at p={rc.p}")
    if rc.p <= BSGS_MIN:
        raise DomainError(f"BSGS needs p > {BSGS_MIN}")
    if rc.p >= K.P_LIMIT:
        raise DomainError(f"p={rc.p} too large for int64 arithmetic")
    seed = (_seed(label) ^ (rc.p * 2654435761)) & 0xFFFFFFFF
    n, status = K.count_bsgs(rc.A, rc.B, rc.p, seed, MAX_ROUNDS)
    if status != K.OK:
        raise InconsistencyError(f"BSGS failed at p={rc.p} (status {status})")
    return int(n)


def trace(curve: RationalCurve, k: int, p: int,
          thresholds: Thresholds = DEFAULT_THRESHOLDS) -> TraceRecord:
    rc = reduce_mod_p(curve, p)
    if not rc.good:
        return TraceRecord(k, p, 0, Reduction.BAD)
    if p <= thresholds.naive:
        n = count_points_naive(rc, threshold=thresholds.naive)
    elif p <= thresholds.charsum:
        n = count_points_charsum(rc)
    else:
        n = count_points_bsgs(rc, curve.label)
    return TraceRecord(k, p, p + 1 - n, Reduction.GOOD)


def _residues(value: int, primes: np.ndarray) -> np.ndarray:
    if -(1 << 62) < value < (1 << 62):
        return np.mod(np.int64(value), primes)
    return np.array([value % int(p) for p in primes], dtype=np.int64)


def _bad_mask(conductor: int, primes: np.ndarray) -> np.ndarray:
    return _residues(conductor, primes) == 0


def trace_array(curve: RationalCurve, primes: np.ndarray,
                thresholds: Thresholds = DEFAULT_THRESHOLDS,
                threads: int = 1, chunk: int = 20_000):
    """Vectorised traces for an ascending array of primes.

    Returns (a, bad) as int64 and bool arrays; a is 0 where bad.  Results do
    not depend on `threads`.
    """
    primes = np.ascontiguousarray(primes, dtype=np.int64)
    if primes.size and primes[-1] >= K.P_LIMIT:
        raise DomainError("primes beyond 2**31 are not supported")
    bad = _bad_mask(curve.conductor, primes)
    A, B = curve.short_invariants()
    coeffs = [_residues(c, primes) for c in (A, B) + curve.a]
    counts = np.zeros(primes.size, dtype=np.int64)
    status = np.zeros(primes.size, dtype=np.int64)
    seed_base = _seed(curve.label)

    def run(lo, hi):
        sl = slice(lo, hi)
        K.count_batch(primes[sl], bad[sl], *(c[sl] for c in coeffs),
                      thresholds.naive, thresholds.charsum, seed_base,
                      MAX_ROUNDS, counts[sl], status[sl])

    bounds = [(i, min(i + chunk, primes.size)) for i in range(0, primes.size, chunk)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(lambda b: run(*b), bounds))
    else:
        for b in bounds:
            run(*b)

    failed = np.flatnonzero(status)
    if failed.size:
        p = int(primes[failed[0]])
        raise InconsistencyError(
            f"{curve.label}: BSGS failed at p={p} (status {int(status[failed[0]])})")
    a = np.where(bad, 0, primes + 1 - counts)
    hb = _hasse_vec(primes)
    viol = np.flatnonzero(~bad & (np.abs(a) > hb))
    if viol.size:
        i = viol[0]
        raise InconsistencyError(
            f"{curve.label}: Hasse bound violated at p={int(primes[i])}, a={int(a[i])}")
    return a, bad


def _hasse_vec(primes: np.ndarray) -> np.ndarray:
    r = np.floor(np.sqrt(4.0 * primes)).astype(np.int64)
    four_p = 4 * primes
    r -= (r * r > four_p)
    r += ((r + 1) * (r + 1) <= four_p)
    return r
