"""Prime tables via an odd-only segmented sieve."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError

DEFAULT_MAX_COUNT = 20_000_000
SEGMENT_SIZE = 1 << 22  # odd numbers per segment


@dataclass(frozen=True)
class PrimeTable:
    count: int
    primes: np.ndarray

    def __len__(self):
        return self.count

    def __getitem__(self, i):
        return self.primes[i]


def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def upper_bound(count: int) -> int:
    """An integer bound on the `count`-th prime (Rosser's bound for n >= 6)."""
    if count < 6:
        return 13
    n = float(count)
    return int(n * (math.log(n) + math.log(math.log(n)))) + 1


def primes_upto(limit: int, max_count: int | None = None) -> np.ndarray:
    """All primes <= limit, stopping early once `max_count` are found."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    base = _simple_sieve(math.isqrt(limit) + 1)[1:]  # odd base primes
    chunks = [np.array([2], dtype=np.int64)]
    found = 1
    low = 3
    while low <= limit and (max_count is None or found < max_count):
        high = min(low + 2 * SEGMENT_SIZE, limit + 1)
        n_odd = (high - low + 1) // 2
        mask = np.ones(n_odd, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= high:
                break
            start = max(p * p, ((low + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start < high:
                mask[(start - low) // 2 :: p] = False
        seg = low + 2 * np.flatnonzero(mask).astype(np.int64)
        seg = seg[seg <= limit]
        chunks.append(seg)
        found += seg.size
        low = high if high % 2 == 1 else high + 1
    out = np.concatenate(chunks)
    if max_count is not None:
        out = out[:max_count]
    return out


def first_primes(count: int, max_count: int = DEFAULT_MAX_COUNT) -> PrimeTable:
    """The first `count` primes in ascending order."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > max_count:
        raise ResourceLimitError(
            f"requested {count} primes, configured maximum is {max_count}"
        )
    bound = upper_bound(count)
    while True:
        primes = primes_upto(bound, max_count=count)
        if primes.size >= count:
            break
        bound *= 2
    primes = primes[:count].copy()
    primes.flags.writeable = False
    return PrimeTable(count=count, primes=primes)
