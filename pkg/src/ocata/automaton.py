"""One-clock alternating timed automata and their structural operations."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from enum import StrEnum
from fractions import Fraction
from functools import cached_property

from .errors import AlphabetMismatchError, IllFormedAutomatonError, PartitionError
from .formulas import Atom, PosBool, conj, disj, dual, has_and, has_or, leaves, locations_of
from .guards import Guard, GuardExpr, Value, elementary_cuts, gaps_and_overlaps, holds
from .guards import normalize_guard

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Rule:
    guard: Guard
    formula: PosBool
    source: GuardExpr | None = field(default=None, compare=False)
    line: int | None = field(default=None, compare=False)

    @classmethod
    def of(cls, expr: GuardExpr, formula: PosBool, line: int | None = None) -> Rule:
        return cls(normalize_guard(expr), formula, expr, line)


@dataclass(frozen=True, eq=True)
class Ata:
    """
    An alternating timed automaton with a single clock.

    ``rules`` maps (location, letter) to the cells of that row. The cells of a
    row are expected to partition [0, inf); ``check_partition`` reports where
    they do not.
    """

    locations: tuple[str, ...]
    initial: str
    alphabet: tuple[str, ...]
    accepting: frozenset[str]
    rules: Mapping[tuple[str, str], tuple[Rule, ...]]
    clock: str = "x"

    __hash__ = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        known = set(self.locations)
        if len(known) != len(self.locations):
            raise IllFormedAutomatonError("duplicate location names")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise IllFormedAutomatonError("duplicate letters in alphabet")
        if self.initial not in known:
            raise IllFormedAutomatonError(f"initial location {self.initial!r} is not declared")
        if unknown := self.accepting - known:
            raise IllFormedAutomatonError(f"unknown accepting locations: {sorted(unknown)}")
        letters = set(self.alphabet)
        for (location, letter), row in self.rules.items():
            if location not in known:
                raise IllFormedAutomatonError(f"rule for unknown location {location!r}")
            if letter not in letters:
                raise IllFormedAutomatonError(f"rule for unknown letter {letter!r}")
            for rule in row:
                if missing := locations_of(rule.formula) - known:
                    raise IllFormedAutomatonError(
                        f"rule {location} {letter} mentions unknown locations {sorted(missing)}"
                    )

    @cached_property
    def cmax(self) -> int:
        constants = [c for row in self.rules.values() for r in row for c in r.guard.constants()]
        return max(constants, default=0)

    def rules_for(self, location: str, letter: str) -> tuple[Rule, ...]:
        return self.rules.get((location, letter), ())

    def cell(self, location: str, letter: str, value: Value) -> Rule:
        """The rule whose guard contains ``value``."""
        for rule in self.rules_for(location, letter):
            if rule.guard.contains(value):
                return rule
        raise IllFormedAutomatonError(
            f"no rule for location {location!r}, letter {letter!r} at clock value {value}"
        )

    def reachable_locations(self) -> frozenset[str]:
        seen = {self.initial}
        stack = [self.initial]
        while stack:
            location = stack.pop()
            for letter in self.alphabet:
                for rule in self.rules_for(location, letter):
                    for target in locations_of(rule.formula) - seen:
                        seen.add(target)
                        stack.append(target)
        return frozenset(seen)

    def with_accepting(self, accepting: Iterable[str]) -> Ata:
        return replace(self, accepting=frozenset(accepting))

    @property
    def size(self) -> int:
        return sum(len(row) for row in self.rules.values())


def build_ata(
    locations: Iterable[str],
    initial: str,
    alphabet: Iterable[str],
    accepting: Iterable[str],
    rules: Iterable[tuple[str, str, GuardExpr, PosBool]],
    clock: str = "x",
) -> Ata:
    """Convenience constructor from (location, letter, guard expression, formula) tuples."""
    table: dict[tuple[str, str], list[Rule]] = {}
    for location, letter, expr, formula in rules:
        table.setdefault((location, letter), []).append(Rule.of(expr, formula))
    return Ata(
        locations=tuple(locations),
        initial=initial,
        alphabet=tuple(alphabet),
        accepting=frozenset(accepting),
        rules={key: tuple(row) for key, row in table.items()},
        clock=clock,
    )


def is_purely_universal(a: Ata) -> bool:
    return not any(has_or(r.formula) for row in a.rules.values() for r in row)


def is_purely_existential(a: Ata) -> bool:
    return not any(has_and(r.formula) for row in a.rules.values() for r in row)


# =================================================================================================
# Partition checking
# =================================================================================================


class ViolationKind(StrEnum):
    GAP = "gap"
    OVERLAP = "overlap"
    MISSING = "missing"


@dataclass(frozen=True)
class PartitionViolation:
    location: str
    letter: str
    kind: ViolationKind
    values: Guard
    lines: tuple[int, ...] = ()

    def __str__(self) -> str:
        where = f" (rules at lines {', '.join(map(str, self.lines))})" if self.lines else ""
        return f"{self.kind} for {self.location} on {self.letter} at {self.values}{where}"


@dataclass(frozen=True)
class PartitionReport:
    violations: tuple[PartitionViolation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def describe(self) -> str:
        if self.ok:
            return "guards partition every row"
        return "guards do not partition: " + "; ".join(str(v) for v in self.violations)


def check_partition(a: Ata, strict: bool | None = None) -> PartitionReport:
    """
    Check that the cells of each (location, letter) row partition [0, inf).

    With ``strict`` off only locations reachable from the initial location are
    inspected. The default comes from the ``partition.strict`` setting.
    """
    if strict is None:
        from .config import get_config

        strict = get_config().partition.strict
    if strict:
        scope = list(a.locations)
    else:
        reachable = a.reachable_locations()
        scope = [q for q in a.locations if q in reachable]
    violations: list[PartitionViolation] = []
    for location in scope:
        for letter in a.alphabet:
            row = a.rules_for(location, letter)
            lines = tuple(r.line for r in row if r.line is not None)
            if not row:
                violations.append(
                    PartitionViolation(location, letter, ViolationKind.MISSING, Guard.full())
                )
                continue
            gap, overlap = gaps_and_overlaps([r.guard for r in row])
            if not gap.is_empty:
                violations.append(
                    PartitionViolation(location, letter, ViolationKind.GAP, gap, lines)
                )
            if not overlap.is_empty:
                violations.append(
                    PartitionViolation(location, letter, ViolationKind.OVERLAP, overlap, lines)
                )
    return PartitionReport(tuple(violations))


def require_partition(a: Ata, strict: bool | None = None) -> None:
    report = check_partition(a, strict)
    if not report.ok:
        raise PartitionError(report)


# =================================================================================================
# Boolean operations
# =================================================================================================


def complement(a: Ata) -> Ata:
    """Dualize every formula and swap accepting with non-accepting locations."""
    require_partition(a)
    rules = {
        key: tuple(replace(rule, formula=dual(rule.formula)) for rule in row)
        for key, row in a.rules.items()
    }
    accepting = frozenset(q for q in a.locations if q not in a.accepting)
    return replace(a, accepting=accepting, rules=rules)


class CombineMode(StrEnum):
    AND = "and"
    OR = "or"


def fresh_name(base: str, taken: Iterable[str]) -> str:
    used = set(taken)
    name = base
    while name in used:
        name += "'"
    return name


def _rename(a: Ata, mapping: Mapping[str, str]) -> Ata:
    def rename_formula(formula: PosBool) -> PosBool:
        match formula:
            case Atom(location=location, reset=reset):
                return Atom(mapping.get(location, location), reset)
            case _:
                return type(formula)(rename_formula(formula.left), rename_formula(formula.right))

    rules = {
        (mapping.get(q, q), letter): tuple(
            replace(rule, formula=rename_formula(rule.formula)) for rule in row
        )
        for (q, letter), row in a.rules.items()
    }
    return Ata(
        locations=tuple(mapping.get(q, q) for q in a.locations),
        initial=mapping.get(a.initial, a.initial),
        alphabet=a.alphabet,
        accepting=frozenset(mapping.get(q, q) for q in a.accepting),
        rules=rules,
        clock=a.clock,
    )


def combine(a: Ata, b: Ata, mode: CombineMode | str = CombineMode.AND) -> Ata:
    """Intersection (``and``) or union (``or``) through a fresh initial location."""
    mode = CombineMode(mode)
    if set(a.alphabet) != set(b.alphabet):
        raise AlphabetMismatchError(
            f"alphabets differ: {sorted(a.alphabet)} vs {sorted(b.alphabet)}"
        )
    require_partition(a)
    require_partition(b)
    clash = set(a.locations) & set(b.locations)
    if clash:
        logger.debug("renaming %d clashing locations before combining", len(clash))
        a = _rename(a, {q: f"l.{q}" for q in a.locations})
        b = _rename(b, {q: f"r.{q}" for q in b.locations})
    locations = a.locations + b.locations
    initial = fresh_name(f"init.{mode.value}", locations)
    make = conj if mode is CombineMode.AND else disj

    rules: dict[tuple[str, str], tuple[Rule, ...]] = {**a.rules, **b.rules}
    for letter in a.alphabet:
        row: list[Rule] = []
        for left in a.rules_for(a.initial, letter):
            for right in b.rules_for(b.initial, letter):
                cell = left.guard.intersect(right.guard)
                if not cell.is_empty:
                    row.append(Rule(cell, make(left.formula, right.formula)))
        rules[(initial, letter)] = tuple(row)

    accepting = set(a.accepting | b.accepting)
    initial_accepts = (
        (a.initial in a.accepting and b.initial in b.accepting)
        if mode is CombineMode.AND
        else (a.initial in a.accepting or b.initial in b.accepting)
    )
    if initial_accepts:
        accepting.add(initial)
    return Ata(
        locations=(initial, *locations),
        initial=initial,
        alphabet=a.alphabet,
        accepting=frozenset(accepting),
        rules=rules,
        clock=a.clock,
    )


def complete_with_sink(a: Ata, sink: str | None = None) -> Ata:
    """Fill every uncovered part of every row with a non-accepting sink location."""
    sink_name = sink or fresh_name("sink", a.locations)
    existing_sink = sink_name in a.locations
    rules = dict(a.rules)
    needed = existing_sink
    for location in a.locations:
        for letter in a.alphabet:
            row = a.rules_for(location, letter)
            gap = Guard.full()
            for rule in row:
                gap = gap.difference(rule.guard)
            if not gap.is_empty:
                rules[(location, letter)] = (*row, Rule(gap, Atom(sink_name)))
                needed = True
    if not needed:
        return a
    locations = a.locations
    if not existing_sink:
        locations = (*locations, sink_name)
        for letter in a.alphabet:
            rules[(sink_name, letter)] = (Rule(Guard.full(), Atom(sink_name)),)
    return Ata(
        locations=locations,
        initial=a.initial,
        alphabet=a.alphabet,
        accepting=a.accepting,
        rules=rules,
        clock=a.clock,
    )


# =================================================================================================
# Non-deterministic one-clock automata
# =================================================================================================


@dataclass(frozen=True)
class NtaTransition:
    source: str
    letter: str
    guard: GuardExpr
    target: str
    reset: bool = False


@dataclass(frozen=True)
class Nta:
    locations: tuple[str, ...]
    initial: str
    alphabet: tuple[str, ...]
    accepting: frozenset[str]
    transitions: tuple[NtaTransition, ...]

    @property
    def cmax(self) -> int:
        constants = [c for t in self.transitions for c in normalize_guard(t.guard).constants()]
        return max(constants, default=0)


def from_nta(n: Nta) -> Ata:
    """
    Translate a non-deterministic one-clock automaton into a purely existential ATA.

    Each row is split into cells over which the set of enabled transitions is
    constant; cells where nothing is enabled lead to a fresh sink.
    """
    sink = fresh_name("sink", n.locations)
    rules: dict[tuple[str, str], tuple[Rule, ...]] = {}
    for location in n.locations:
        for letter in n.alphabet:
            outgoing = [t for t in n.transitions if t.source == location and t.letter == letter]
            constants = {c for t in outgoing for c in normalize_guard(t.guard).constants()}
            cells: dict[tuple[int, ...], Guard] = {}
            for piece in elementary_cuts(constants):
                value = piece.sample()
                enabled = tuple(i for i, t in enumerate(outgoing) if holds(t.guard, value))
                cells[enabled] = cells.get(enabled, Guard.empty()).union(piece)
            row: list[Rule] = []
            for enabled, guard in cells.items():
                atoms = (Atom(outgoing[i].target, outgoing[i].reset) for i in enabled)
                targets = list(dict.fromkeys(atoms))
                formula = disj(*targets) if targets else Atom(sink)
                row.append(Rule(guard, formula))
            rules[(location, letter)] = tuple(row)
    for letter in n.alphabet:
        rules[(sink, letter)] = (Rule(Guard.full(), Atom(sink)),)
    return Ata(
        locations=(*n.locations, sink),
        initial=n.initial,
        alphabet=n.alphabet,
        accepting=n.accepting,
        rules=rules,
    )


def nta_accepts(n: Nta, word: Iterable[tuple[str, Fraction]]) -> bool:
    """Direct simulation of the non-deterministic automaton on an absolute-time word."""
    current: set[tuple[str, Fraction]] = {(n.initial, Fraction(0))}
    now = Fraction(0)
    for letter, stamp in word:
        delay = stamp - now
        now = stamp
        following: set[tuple[str, Fraction]] = set()
        for location, value in current:
            reached = value + delay
            for t in n.transitions:
                if t.source == location and t.letter == letter and holds(t.guard, reached):
                    following.add((t.target, Fraction(0) if t.reset else reached))
        current = following
    return any(location in n.accepting for location, _ in current)
