"""
Clock guards.

A guard is kept in two forms: the expression written by the user (``GuardExpr``)
and its canonical set of clock values (``Guard``), a finite union of disjoint,
non-adjacent intervals with integer endpoints over the non-negative rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from functools import cache
from itertools import pairwise

Value = Fraction | int


@dataclass(frozen=True)
class Interval:
    lo: int
    hi: int | None  # None is +inf
    lo_closed: bool = True
    hi_closed: bool = False

    def __post_init__(self) -> None:
        if self.lo < 0:
            raise ValueError(f"interval lower bound must be non-negative, got {self.lo}")
        if self.hi is None and self.hi_closed:
            raise ValueError("an unbounded interval cannot be closed on the right")

    @property
    def is_empty(self) -> bool:
        if self.hi is None:
            return False
        if self.lo < self.hi:
            return False
        return not (self.lo == self.hi and self.lo_closed and self.hi_closed)

    @property
    def is_point(self) -> bool:
        return self.hi == self.lo and self.lo_closed and self.hi_closed

    def contains(self, value: Value) -> bool:
        if value < self.lo or (value == self.lo and not self.lo_closed):
            return False
        if self.hi is None:
            return True
        return value < self.hi or (value == self.hi and self.hi_closed)

    def _start_key(self) -> tuple[int, bool]:
        return (self.lo, not self.lo_closed)

    def _end_key(self) -> tuple[bool, int, bool]:
        return (self.hi is None, self.hi or 0, self.hi_closed)

    def __str__(self) -> str:
        if self.is_point:
            return f"{{{self.lo}}}"
        left = "[" if self.lo_closed else "("
        if self.hi is None:
            return f"{left}{self.lo},inf)"
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo},{self.hi}{right}"


def point(c: int) -> Interval:
    return Interval(c, c, True, True)


def _intersect_intervals(a: Interval, b: Interval) -> Interval | None:
    lo_src = max(a, b, key=Interval._start_key)
    hi_src = min(a, b, key=Interval._end_key)
    if hi_src.hi is None:
        candidate = Interval(lo_src.lo, None, lo_src.lo_closed, False)
    elif hi_src.hi < lo_src.lo:
        return None
    else:
        candidate = Interval(lo_src.lo, hi_src.hi, lo_src.lo_closed, hi_src.hi_closed)
    return None if candidate.is_empty else candidate


def _touches(current: Interval, nxt: Interval) -> bool:
    if current.hi is None:
        return True
    if nxt.lo < current.hi:
        return True
    return nxt.lo == current.hi and (current.hi_closed or nxt.lo_closed)


@dataclass(frozen=True)
class Guard:
    """A canonical union of intervals. Build instances with ``Guard.of``."""

    intervals: tuple[Interval, ...] = ()

    @classmethod
    def of(cls, intervals: list[Interval] | tuple[Interval, ...]) -> Guard:
        pieces = sorted((i for i in intervals if not i.is_empty), key=Interval._start_key)
        merged: list[Interval] = []
        for piece in pieces:
            if merged and _touches(merged[-1], piece):
                last = merged[-1]
                end = max(last, piece, key=Interval._end_key)
                merged[-1] = Interval(last.lo, end.hi, last.lo_closed, end.hi_closed)
            else:
                merged.append(piece)
        return cls(tuple(merged))

    @classmethod
    def full(cls) -> Guard:
        return cls((Interval(0, None),))

    @classmethod
    def empty(cls) -> Guard:
        return cls(())

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def is_full(self) -> bool:
        return self == Guard.full()

    def contains(self, value: Value) -> bool:
        return any(i.contains(value) for i in self.intervals)

    def union(self, other: Guard) -> Guard:
        return Guard.of(self.intervals + other.intervals)

    def intersect(self, other: Guard) -> Guard:
        parts = []
        for a in self.intervals:
            for b in other.intervals:
                if (piece := _intersect_intervals(a, b)) is not None:
                    parts.append(piece)
        return Guard.of(parts)

    def complement(self) -> Guard:
        gaps: list[Interval] = []
        cursor, cursor_closed = 0, True
        for interval in self.intervals:
            gap = Interval(cursor, interval.lo, cursor_closed, not interval.lo_closed)
            if not gap.is_empty:
                gaps.append(gap)
            if interval.hi is None:
                return Guard.of(gaps)
            cursor, cursor_closed = interval.hi, not interval.hi_closed
        gaps.append(Interval(cursor, None, cursor_closed, False))
        return Guard.of(gaps)

    def difference(self, other: Guard) -> Guard:
        return self.intersect(other.complement())

    def constants(self) -> frozenset[int]:
        found: set[int] = set()
        for interval in self.intervals:
            found.add(interval.lo)
            if interval.hi is not None:
                found.add(interval.hi)
        return frozenset(found)

    def sample(self) -> Fraction:
        """Return some value inside the guard."""
        if self.is_empty:
            raise ValueError("empty guard has no sample")
        first = self.intervals[0]
        if first.lo_closed:
            return Fraction(first.lo)
        if first.hi is None:
            return Fraction(first.lo) + 1
        return Fraction(first.lo + first.hi, 2)

    def __str__(self) -> str:
        if not self.intervals:
            return "{}"
        return " U ".join(str(i) for i in self.intervals)


def eval_guard(g: Guard, v: Value) -> bool:
    if v < 0:
        raise ValueError(f"clock values are non-negative, got {v}")
    return g.contains(v)


class CmpOp(StrEnum):
    LT = "<"
    LE = "<="
    EQ = "="
    NE = "!="
    GE = ">="
    GT = ">"


@dataclass(frozen=True)
class Compare:
    op: CmpOp
    constant: int

    def __post_init__(self) -> None:
        if self.constant < 0:
            raise ValueError(f"guard constants must be non-negative, got {self.constant}")


@dataclass(frozen=True)
class TrueGuard:
    pass


@dataclass(frozen=True)
class AndGuard:
    left: GuardExpr
    right: GuardExpr


@dataclass(frozen=True)
class OrGuard:
    left: GuardExpr
    right: GuardExpr


@dataclass(frozen=True)
class NotGuard:
    operand: GuardExpr


GuardExpr = Compare | TrueGuard | AndGuard | OrGuard | NotGuard


def _compare_set(op: CmpOp, c: int) -> Guard:
    match op:
        case CmpOp.LT:
            return Guard.of([Interval(0, c, True, False)])
        case CmpOp.LE:
            return Guard.of([Interval(0, c, True, True)])
        case CmpOp.EQ:
            return Guard.of([point(c)])
        case CmpOp.NE:
            return Guard.of([point(c)]).complement()
        case CmpOp.GE:
            return Guard.of([Interval(c, None, True, False)])
        case CmpOp.GT:
            return Guard.of([Interval(c, None, False, False)])


@cache
def normalize_guard(expr: GuardExpr) -> Guard:
    match expr:
        case TrueGuard():
            return Guard.full()
        case Compare(op=op, constant=c):
            return _compare_set(op, c)
        case AndGuard(left=left, right=right):
            return normalize_guard(left).intersect(normalize_guard(right))
        case OrGuard(left=left, right=right):
            return normalize_guard(left).union(normalize_guard(right))
        case NotGuard(operand=operand):
            return normalize_guard(operand).complement()
    raise TypeError(f"not a guard expression: {expr!r}")


def holds(expr: GuardExpr, value: Value) -> bool:
    """Evaluate a guard expression directly on its syntax tree."""
    match expr:
        case TrueGuard():
            return True
        case Compare(op=op, constant=c):
            match op:
                case CmpOp.LT:
                    return value < c
                case CmpOp.LE:
                    return value <= c
                case CmpOp.EQ:
                    return value == c
                case CmpOp.NE:
                    return value != c
                case CmpOp.GE:
                    return value >= c
                case CmpOp.GT:
                    return value > c
        case AndGuard(left=left, right=right):
            return holds(left, value) and holds(right, value)
        case OrGuard(left=left, right=right):
            return holds(left, value) or holds(right, value)
        case NotGuard(operand=operand):
            return not holds(operand, value)
    raise TypeError(f"not a guard expression: {expr!r}")


def _interval_expr(interval: Interval) -> GuardExpr:
    if interval.is_point:
        return Compare(CmpOp.EQ, interval.lo)
    parts: list[GuardExpr] = []
    if interval.lo > 0 or not interval.lo_closed:
        parts.append(Compare(CmpOp.GE if interval.lo_closed else CmpOp.GT, interval.lo))
    if interval.hi is not None:
        parts.append(Compare(CmpOp.LE if interval.hi_closed else CmpOp.LT, interval.hi))
    if not parts:
        return TrueGuard()
    expr = parts[0]
    for part in parts[1:]:
        expr = AndGuard(expr, part)
    return expr


def guard_to_expr(guard: Guard) -> GuardExpr:
    """Render a canonical guard back to an equivalent expression."""
    if guard.is_empty:
        return NotGuard(TrueGuard())
    if len(guard.intervals) == 2:
        first, second = guard.intervals
        if (
            first.lo == 0
            and first.lo_closed
            and not first.hi_closed
            and second.hi is None
            and not second.lo_closed
            and first.hi == second.lo
        ):
            return Compare(CmpOp.NE, second.lo)
    exprs = [_interval_expr(i) for i in guard.intervals]
    expr = exprs[0]
    for part in exprs[1:]:
        expr = OrGuard(expr, part)
    return expr


def format_guard_expr(expr: GuardExpr, clock: str = "x") -> str:
    def render(e: GuardExpr, parent: int) -> str:
        match e:
            case TrueGuard():
                return "tt"
            case Compare(op=op, constant=c):
                return f"{clock}{op.value}{c}"
            case NotGuard(operand=operand):
                return "!" + render(operand, 3)
            case AndGuard(left=left, right=right):
                text = f"{render(left, 2)} & {render(right, 3)}"
                return f"({text})" if parent > 2 else text
            case OrGuard(left=left, right=right):
                text = f"{render(left, 1)} | {render(right, 2)}"
                return f"({text})" if parent > 1 else text
        raise TypeError(f"not a guard expression: {e!r}")

    return render(expr, 0)


def gaps_and_overlaps(guards: list[Guard]) -> tuple[Guard, Guard]:
    """Return the uncovered part of [0, inf) and the part covered more than once."""
    covered = Guard.empty()
    overlap = Guard.empty()
    for guard in guards:
        overlap = overlap.union(covered.intersect(guard))
        covered = covered.union(guard)
    return covered.complement(), overlap


def elementary_cuts(constants: set[int] | frozenset[int]) -> list[Guard]:
    """Split [0, inf) into points at the given constants and the open gaps between them."""
    marks = sorted(constants | {0})
    pieces: list[Guard] = []
    for lo, hi in pairwise(marks):
        pieces.append(Guard.of([point(lo)]))
        pieces.append(Guard.of([Interval(lo, hi, False, False)]))
    pieces.append(Guard.of([point(marks[-1])]))
    pieces.append(Guard.of([Interval(marks[-1], None, False, False)]))
    return pieces
