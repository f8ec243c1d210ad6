"""Clock regions for a single clock bounded by the maximal constant ``cmax``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .guards import Guard, Interval, Value, point


@dataclass(frozen=True, order=True)
class Region:
    """
    One of the 2(cmax+1) classes of clock values.

    ``{i}`` for i <= cmax is a point region, ``(i, i+1)`` for i < cmax an open
    region and ``(cmax, inf)`` the tail.
    """

    lower: int
    is_open: bool
    unbounded: bool = False

    @classmethod
    def at_point(cls, i: int) -> Region:
        return cls(i, False)

    @classmethod
    def between(cls, i: int) -> Region:
        return cls(i, True)

    @classmethod
    def tail(cls, cmax: int) -> Region:
        return cls(cmax, True, True)

    @property
    def is_point(self) -> bool:
        return not self.is_open

    @property
    def is_tail(self) -> bool:
        return self.unbounded

    def contains(self, value: Value) -> bool:
        if self.is_point:
            return value == self.lower
        if self.unbounded:
            return value > self.lower
        return self.lower < value < self.lower + 1

    def sample(self) -> Fraction:
        if self.is_point:
            return Fraction(self.lower)
        return self.lower + Fraction(1, 2)

    def as_guard(self) -> Guard:
        if self.is_point:
            return Guard.of([point(self.lower)])
        if self.unbounded:
            return Guard.of([Interval(self.lower, None, False, False)])
        return Guard.of([Interval(self.lower, self.lower + 1, False, False)])

    def opened(self, cmax: int) -> Region:
        """The region a point region moves into after an arbitrarily small delay."""
        if not self.is_point:
            return self
        if self.lower >= cmax:
            return Region.tail(cmax)
        return Region.between(self.lower)

    def closed_above(self) -> Region:
        """The point region an open bounded region reaches when its value becomes integral."""
        if self.is_point or self.unbounded:
            return self
        return Region.at_point(self.lower + 1)

    def __str__(self) -> str:
        if self.is_point:
            return f"{{{self.lower}}}"
        if self.unbounded:
            return f"({self.lower},inf)"
        return f"({self.lower},{self.lower + 1})"


def regions(cmax: int) -> list[Region]:
    found: list[Region] = []
    for i in range(cmax):
        found.append(Region.at_point(i))
        found.append(Region.between(i))
    found.append(Region.at_point(cmax))
    found.append(Region.tail(cmax))
    return found


def region_of(value: Value, cmax: int) -> Region:
    if value < 0:
        raise ValueError(f"clock values are non-negative, got {value}")
    if value > cmax:
        return Region.tail(cmax)
    whole = math.floor(value)
    if value == whole:
        return Region.at_point(whole)
    return Region.between(whole)


def fract(value: Value) -> Fraction:
    return Fraction(value) - math.floor(value)


def parse_region(text: str, cmax: int | None = None) -> Region:
    """Parse ``{1}``, ``(1,2)`` or ``(2,inf)``."""
    body = text.strip()
    if body.startswith("{") and body.endswith("}"):
        return Region.at_point(int(body[1:-1]))
    if body.startswith("(") and body.endswith(")"):
        lo_text, _, hi_text = body[1:-1].partition(",")
        lo = int(lo_text)
        if hi_text.strip() == "inf":
            if cmax is not None and lo != cmax:
                raise ValueError(f"tail region must start at cmax={cmax}: {text!r}")
            return Region.tail(lo)
        if int(hi_text) != lo + 1:
            raise ValueError(f"open region must have unit width: {text!r}")
        return Region.between(lo)
    raise ValueError(f"not a region: {text!r}")
