"""
Concrete semantics: timed words, configuration sets and acceptance.

A run of the automaton on a timed word is a sequence of configuration sets. From
a set, every configuration is advanced by the delay, looks up its cell and
picks one conjunct of the cell's DNF; the successor is the union of all picks.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from itertools import accumulate, product

from .automaton import Ata
from .errors import TimedWordError
from .formulas import And, Atom, Or, PosBool, to_dnf

Event = tuple[str, Fraction]


@dataclass(frozen=True)
class TimedWord:
    """Letters with absolute, non-decreasing, non-negative timestamps."""

    events: tuple[Event, ...] = ()

    def __post_init__(self) -> None:
        previous = Fraction(0)
        for index, (letter, stamp) in enumerate(self.events):
            if not isinstance(stamp, Fraction):
                raise TimedWordError(f"timestamp of event {index} must be a Fraction")
            if stamp < previous:
                raise TimedWordError(
                    f"timestamps must be non-decreasing and non-negative: "
                    f"{letter}@{stamp} at position {index}"
                )
            previous = stamp

    @classmethod
    def of(cls, events: Iterable[tuple[str, Fraction | int | str]]) -> TimedWord:
        return cls(tuple((letter, Fraction(stamp)) for letter, stamp in events))

    @classmethod
    def from_delays(cls, steps: Iterable[tuple[str, Fraction | int | str]]) -> TimedWord:
        pairs = [(letter, Fraction(delay)) for letter, delay in steps]
        if any(delay < 0 for _, delay in pairs):
            raise TimedWordError("delays must be non-negative")
        stamps = accumulate(delay for _, delay in pairs)
        letters = [letter for letter, _ in pairs]
        return cls(tuple(zip(letters, stamps, strict=True)))

    def delays(self) -> list[tuple[str, Fraction]]:
        found = []
        previous = Fraction(0)
        for letter, stamp in self.events:
            found.append((letter, stamp - previous))
            previous = stamp
        return found

    @property
    def letters(self) -> tuple[str, ...]:
        return tuple(letter for letter, _ in self.events)

    def check_alphabet(self, alphabet: Iterable[str]) -> None:
        allowed = set(alphabet)
        for letter, _ in self.events:
            if letter not in allowed:
                raise TimedWordError(f"letter {letter!r} is not in the alphabet")

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def __str__(self) -> str:
        return " ".join(f"{letter}@{stamp}" for letter, stamp in self.events)


@dataclass(frozen=True, order=True)
class Configuration:
    location: str
    value: Fraction

    def __str__(self) -> str:
        return f"({self.location},{self.value})"


@dataclass(frozen=True)
class ConfigSet:
    """A finite set of configurations kept sorted and free of duplicates."""

    items: tuple[Configuration, ...] = ()

    @classmethod
    def of(cls, configurations: Iterable[Configuration | tuple[str, Fraction | int]]) -> ConfigSet:
        found = {
            c if isinstance(c, Configuration) else Configuration(c[0], Fraction(c[1]))
            for c in configurations
        }
        return cls(tuple(sorted(found)))

    @classmethod
    def initial(cls, a: Ata) -> ConfigSet:
        return cls((Configuration(a.initial, Fraction(0)),))

    def __iter__(self) -> Iterator[Configuration]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, item: object) -> bool:
        return item in self.items

    @property
    def locations(self) -> frozenset[str]:
        return frozenset(c.location for c in self.items)

    def __str__(self) -> str:
        return "{" + ", ".join(str(c) for c in self.items) + "}"


def delay(p: ConfigSet, t: Fraction | int) -> ConfigSet:
    if t < 0:
        raise TimedWordError(f"delay must be non-negative, got {t}")
    return ConfigSet(tuple(Configuration(c.location, c.value + t) for c in p.items))


def next_options(a: Ata, c: Configuration, letter: str) -> list[frozenset[Configuration]]:
    """The alternatives a single already-delayed configuration may move to."""
    rule = a.cell(c.location, letter, c.value)

    def place(atom: Atom) -> Configuration:
        return Configuration(atom.location, Fraction(0) if atom.reset else c.value)

    return [frozenset(map(place, conjunct)) for conjunct in to_dnf(rule.formula)]


def configuration_successors(
    p: ConfigSet, letter: str, t: Fraction | int, a: Ata
) -> tuple[ConfigSet, ...]:
    """All configuration sets reachable from ``p`` by waiting ``t`` and reading ``letter``."""
    moved = delay(p, t)
    options = [next_options(a, c, letter) for c in moved]
    found: dict[ConfigSet, None] = {}
    for choice in product(*options):
        found[ConfigSet.of(frozenset().union(*choice))] = None
    return tuple(found)


def is_bad(p: ConfigSet, a: Ata) -> bool:
    """True when every configuration of ``p`` sits in an accepting location."""
    return all(c.location in a.accepting for c in p)


def accepts(a: Ata, w: TimedWord) -> bool:
    """Membership by depth-first search over configuration sets with memoisation."""
    w.check_alphabet(a.alphabet)
    steps = w.delays()
    failed: set[tuple[int, ConfigSet]] = set()

    def search(position: int, p: ConfigSet) -> bool:
        if position == len(steps):
            return is_bad(p, a)
        if (position, p) in failed:
            return False
        letter, t = steps[position]
        for successor in configuration_successors(p, letter, t, a):
            if search(position + 1, successor):
                return True
        failed.add((position, p))
        return False

    return search(0, ConfigSet.initial(a))


def game_accepts(a: Ata, w: TimedWord) -> bool:
    """
    Membership by evaluating the acceptance game directly on the formulas.

    Disjunctions are Eve's choices and conjunctions Adam's; the word is accepted
    when Eve can force every play to end in an accepting location.
    """
    w.check_alphabet(a.alphabet)
    steps = w.delays()

    @cache
    def wins(position: int, location: str, value: Fraction) -> bool:
        if position == len(steps):
            return location in a.accepting
        letter, t = steps[position]
        reached = value + t
        rule = a.cell(location, letter, reached)
        return holds(rule.formula, position, reached)

    def holds(formula: PosBool, position: int, reached: Fraction) -> bool:
        match formula:
            case Atom(location=location, reset=reset):
                return wins(position + 1, location, Fraction(0) if reset else reached)
            case And(left=left, right=right):
                return holds(left, position, reached) and holds(right, position, reached)
            case Or(left=left, right=right):
                return holds(left, position, reached) or holds(right, position, reached)
        raise TypeError(f"not a formula: {formula!r}")

    return wins(0, a.initial, Fraction(0))
