"""The Sato-Tate measure 2 sin^2(pi u) du on [0, 1], its products, and the
built-in product test functions with their reference integrals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, UnknownNameError
from .quadrature import integrate

TWO_PI = 2.0 * math.pi


def st_density(u):
    return 2.0 * np.sin(np.pi * u) ** 2


def _check_unit(w):
    arr = np.asarray(w, dtype=float)
    if np.any(~((arr >= 0.0) & (arr <= 1.0))):
        raise DomainError("argument outside [0, 1]")
    return arr


# (t - sin t) = sum_k (-1)^k t^(2k+3) / (2k+3)!, used where t = 2 pi w < 1 and
# the direct difference would cancel (and can even turn negative)
_SERIES = np.array([(-1) ** k / math.factorial(2 * k + 3) for k in range(8)])


def _lower_half(w):
    t = TWO_PI * w
    direct = (t - np.sin(t)) / TWO_PI
    t2 = t * t
    poly = np.zeros_like(t)
    for c in _SERIES[::-1]:
        poly = poly * t2 + c
    return np.where(t < 1.0, poly * t2 * t / TWO_PI, direct)


def st_cdf(w):
    """F(w) = w - sin(2 pi w) / (2 pi); scalar or array input.

    Evaluated on [0, 1/2] and reflected, F(w) = 1 - F(1 - w), so that tiny
    arguments keep full relative accuracy at both ends.
    """
    arr = _check_unit(w)
    upper = arr > 0.5
    out = _lower_half(np.where(upper, 1.0 - arr, arr))
    out = np.where(upper, 1.0 - out, out)
    if out.ndim == 0:
        return float(out)
    return out


def product_cdf(W) -> float:
    """Measure of the box [0, w1) x ... x [0, ws) under the product law."""
    vals = st_cdf(np.atleast_1d(np.asarray(W, dtype=float)))
    r = 1.0
    for v in np.atleast_1d(vals):
        r *= float(v)
    return r


def quad_factor_integral(f: Callable, tol: float = 1e-10) -> float:
    """Integral of f(u) * 2 sin^2(pi u) over [0, 1]."""
    return integrate(lambda u: f(u) * st_density(u), 0.0, 1.0, tol=tol)


def g_factor_integral(i: int) -> float:
    """Integral of exp(-u/i) against the Sato-Tate measure, closed form."""
    if i < 1:
        raise DomainError("factor index starts at 1")
    c = 4.0 * math.pi ** 2
    return -math.expm1(-1.0 / i) * c * i ** 3 / (1.0 + c * i * i)


def h_factor_integral(i: int) -> float:
    """Integral of cos(pi u / (2 sqrt i)) against the Sato-Tate measure."""
    if i < 1:
        raise DomainError("factor index starts at 1")
    r = math.sqrt(i)
    return 2.0 * r / math.pi * math.sin(math.pi / (2.0 * r)) * 16.0 * i / (16.0 * i - 1.0)


@dataclass(frozen=True)
class ProductTestFunction:
    """scale * prod_i factors[i](u_i) with precomputed per-factor integrals."""

    name: str
    factors: tuple
    factor_integrals: np.ndarray
    scale: float = 1.0
    reference: float = field(init=False)

    def __post_init__(self):
        fi = np.asarray(self.factor_integrals, dtype=float)
        if fi.shape != (len(self.factors),):
            raise DomainError("one integral per factor required")
        fi.flags.writeable = False
        object.__setattr__(self, "factor_integrals", fi)
        ref = self.scale
        for v in fi:
            ref *= float(v)
        object.__setattr__(self, "reference", ref)

    @property
    def s(self) -> int:
        return len(self.factors)

    def __call__(self, u: Sequence[float]) -> float:
        if len(u) != self.s:
            raise DomainError(f"expected {self.s} coordinates")
        r = 1.0
        for f, x in zip(self.factors, u):
            r *= float(f(np.float64(x)))
        return self.scale * r


def from_factors(name: str, factors: Sequence[Callable], scale: float = 1.0,
                 tol: float = 1e-10) -> ProductTestFunction:
    """Build a test function, integrating each factor numerically."""
    ints = [quad_factor_integral(f, tol) for f in factors]
    return ProductTestFunction(name, tuple(factors), np.array(ints), scale)


F10_FACTORS = (
    lambda u: np.log(2.0 + u),
    lambda u: np.log(3.0 + u),
    lambda u: np.exp(-u),
    lambda u: (1.0 + u) ** 2,
    lambda u: 2.0 + u,
    lambda u: np.sqrt(2.0 + u),
    lambda u: np.sqrt(3.0 + u),
    lambda u: np.cbrt(4.0 + u),
    lambda u: (8.0 + u) ** 0.25,
    lambda u: np.exp(np.sqrt(1.0 + u)),
)


class _ExpFactor:
    __slots__ = ("i", "c")

    def __init__(self, i):
        self.i = i
        self.c = 1.0 / i

    def __call__(self, u):
        return np.exp(-u * self.c)

    def __repr__(self):
        return f"exp(-u/{self.i})"


class _CosFactor:
    __slots__ = ("i", "c")

    def __init__(self, i):
        self.i = i
        self.c = math.pi / (2.0 * math.sqrt(i))

    def __call__(self, u):
        return np.cos(u * self.c)

    def __repr__(self):
        return f"cos(pi u/(2 sqrt {self.i}))"


BUILTIN_NAMES = ("f10", "g", "h")


def builtin_test_function(name: str, s: int | None = None) -> ProductTestFunction:
    if name == "f10":
        if s not in (None, 10):
            raise DomainError("f10 is defined for s = 10 only")
        return from_factors("f10", F10_FACTORS, 1.0)
    if name not in ("g", "h"):
        raise UnknownNameError(f"unknown test function {name!r}; choose from {BUILTIN_NAMES}")
    if s is None or s < 1:
        raise DomainError(f"{name} needs a dimension s >= 1")
    if name == "g":
        factors = tuple(_ExpFactor(i) for i in range(1, s + 1))
        ints = [g_factor_integral(i) for i in range(1, s + 1)]
    else:
        factors = tuple(_CosFactor(i) for i in range(1, s + 1))
        ints = [h_factor_integral(i) for i in range(1, s + 1)]
    return ProductTestFunction(name, factors, np.array(ints), 100.0)
