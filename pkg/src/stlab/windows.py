"""Sliding-window averages of product test functions and their relative
errors against the product Sato-Tate integral."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .angles import AngleSequence
from .errors import InsufficientLengthError, ZeroReferenceError
from .measure import ProductTestFunction

CHUNK = 1 << 15


def _as_angles(seq) -> np.ndarray:
    if isinstance(seq, AngleSequence):
        return seq.angles
    return np.asarray(seq, dtype=float)


def window_products(x: np.ndarray, f: ProductTestFunction, lo: int, hi: int) -> np.ndarray:
    """f(X_k) for 0-based window starts k in [lo, hi)."""
    prod = np.ones(hi - lo)
    for i, fi in enumerate(f.factors):
        prod *= fi(x[lo + i : hi + i])
    prod *= f.scale
    return prod


def _check_length(x, f, K):
    if K < 1:
        raise ValueError("K must be >= 1")
    need = K + f.s - 1
    if x.size < need:
        raise InsufficientLengthError(
            f"need {need} angles for K={K}, s={f.s}; have {x.size}")


def window_average(seq, f: ProductTestFunction, K: int, threads: int = 1) -> float:
    """(1/K) sum_{k=1}^{K} f(x_k, ..., x_{k+s-1}), summed with math.fsum.

    Each window product is formed directly; chunks of k may run on threads,
    but the final sum is correctly rounded so the value does not depend on
    the partitioning.
    """
    x = _as_angles(seq)
    _check_length(x, f, K)
    bounds = [(lo, min(lo + CHUNK, K)) for lo in range(0, K, CHUNK)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda b: window_products(x, f, *b), bounds))
    else:
        parts = [window_products(x, f, *b) for b in bounds]
    return math.fsum(np.concatenate(parts)) / K


def window_average_naive(seq, f: ProductTestFunction, K: int) -> float:
    """Reference O(K s) double loop with scalar evaluations."""
    x = _as_angles(seq)
    _check_length(x, f, K)
    total = []
    for k in range(K):
        total.append(f(x[k : k + f.s]))
    return math.fsum(total) / K


@dataclass(frozen=True)
class AverageReport:
    curve_label: str
    function_name: str
    s: int
    K: int
    empirical: float
    reference: float
    rel_err: float
    log_slope: float
    exact: bool = False

    def as_dict(self):
        return asdict(self)


def log_slope(value: float, K: int) -> float:
    """-ln|value| / ln K; +inf when value is 0, nan when K = 1."""
    if K < 2:
        return math.nan
    if value == 0:
        return math.inf
    return -math.log(abs(value)) / math.log(K)


# The published log-slope tables measure the error against the reference
# integral rounded to six significant digits (114.076, 3.44034, ...); at
# K = 10^7 the rounding is comparable to the error itself, so it matters.
REFERENCE_DIGITS = 6


def rounded_reference(value: float, digits: int | None = REFERENCE_DIGITS) -> float:
    """`value` to `digits` significant digits; None or 0 keeps it as is."""
    if not digits:
        return value
    return float(f"{value:.{digits}g}")


def make_report(label: str, f: ProductTestFunction, K: int, empirical: float,
                digits: int | None = REFERENCE_DIGITS) -> AverageReport:
    ref = rounded_reference(f.reference, digits)
    if ref == 0:
        raise ZeroReferenceError(f"{f.name}: reference integral is zero")
    rel = (empirical - ref) / ref
    return AverageReport(label, f.name, f.s, K, empirical, ref, rel,
                         log_slope(rel, K), exact=(rel == 0))


def relerr_logslope(seq, f: ProductTestFunction, K: int, threads: int = 1,
                    label: str | None = None,
                    digits: int | None = REFERENCE_DIGITS) -> AverageReport:
    """Relative error of the window average and -ln|rel_err| / ln K.

    `digits` rounds the reference integral first (see REFERENCE_DIGITS);
    pass None for the full-precision value.
    """
    if label is None:
        label = seq.curve_label if isinstance(seq, AngleSequence) else ""
    if rounded_reference(f.reference, digits) == 0:
        raise ZeroReferenceError(f"{f.name}: reference integral is zero")
    return make_report(label, f, K, window_average(seq, f, K, threads), digits)
