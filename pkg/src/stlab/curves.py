"""Rational elliptic curves in long Weierstrass form and their reductions."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import DomainError


class Reduction(str, Enum):
    GOOD = "good"
    BAD = "bad"


@dataclass(frozen=True)
class RationalCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with conductor N.

    The conductor is taken as given; it is never recomputed from the model.
    """

    label: str
    a: tuple[int, int, int, int, int]
    conductor: int
    rank: int = 0

    def __post_init__(self):
        if len(self.a) != 5:
            raise DomainError("need exactly five coefficients [a1,a2,a3,a4,a6]")
        object.__setattr__(self, "a", tuple(int(c) for c in self.a))
        if self.conductor <= 0:
            raise DomainError(f"{self.label}: conductor must be positive")
        if self.rank < 0:
            raise DomainError(f"{self.label}: rank must be nonnegative")
        if discriminant(self) == 0:
            raise DomainError(f"{self.label}: singular model (discriminant 0)")

    @property
    def a1(self):
        return self.a[0]

    @property
    def a2(self):
        return self.a[1]

    @property
    def a3(self):
        return self.a[2]

    @property
    def a4(self):
        return self.a[3]

    @property
    def a6(self):
        return self.a[4]

    def short_invariants(self) -> tuple[int, int]:
        """(A, B) of the integral short model y^2 = x^3 - 27 c4 x - 54 c6."""
        _, c4, c6 = _c_invariants(self.a)
        return -27 * c4, -54 * c6

    def is_bad(self, p: int) -> bool:
        return self.conductor % p == 0


def _b_invariants(a: Sequence[int]):
    a1, a2, a3, a4, a6 = a
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def _c_invariants(a: Sequence[int]):
    b2, b4, b6, _ = _b_invariants(a)
    c4 = b2 * b2 - 24 * b4
    c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
    return b2, c4, c6


def discriminant_of(a: Sequence[int]) -> int:
    b2, b4, b6, b8 = _b_invariants([int(c) for c in a])
    return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def discriminant(curve: RationalCurve) -> int:
    return discriminant_of(curve.a)


@dataclass(frozen=True)
class ReducedCurve:
    """A curve reduced mod p.

    For p > 3 the short form (A, B) is filled in; `long` always holds the
    long-form coefficients mod p.
    """

    p: int
    long: tuple[int, int, int, int, int]
    flag: Reduction
    A: int | None = None
    B: int | None = None

    @property
    def good(self) -> bool:
        return self.flag is Reduction.GOOD

    @property
    def has_short_form(self) -> bool:
        return self.A is not None


def reduce_mod_p(curve: RationalCurve, p: int) -> ReducedCurve:
    flag = Reduction.BAD if curve.is_bad(p) else Reduction.GOOD
    long = tuple(c % p for c in curve.a)
    if p > 3 and flag is Reduction.GOOD:
        A, B = curve.short_invariants()
        return ReducedCurve(p, long, flag, A % p, B % p)
    return ReducedCurve(p, long, flag)


def short_form_nonsingular(A: int, B: int, p: int) -> bool:
    return (4 * A ** 3 + 27 * B ** 2) % p != 0
