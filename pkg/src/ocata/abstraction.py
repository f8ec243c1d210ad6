"""
Region words: the finite abstraction of configuration sets.

A configuration set is abstracted by grouping its configurations by the
fractional part of their clock value. Each group becomes a letter holding
(location, region) pairs and the letters are ordered by increasing fractional
part, so only the first letter may hold point regions.
"""

from __future__ import annotations

import math
import re
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import chain, combinations, product

from .automaton import Ata
from .formulas import Atom, to_dnf
from .regions import Region, fract, parse_region, region_of
from .semantics import ConfigSet, Configuration


@dataclass(frozen=True, order=True)
class Pair:
    location: str
    region: Region

    def __str__(self) -> str:
        return f"{self.location}:{self.region}"


Letter = frozenset[Pair]


def _letter_key(letter: Letter) -> tuple[tuple[str, Region], ...]:
    return tuple((p.location, p.region) for p in sorted(letter))


@dataclass(frozen=True)
class RegionWord:
    letters: tuple[Letter, ...] = ()

    def __post_init__(self) -> None:
        for index, letter in enumerate(self.letters):
            if not letter:
                raise ValueError("region words do not contain empty letters")
            if index > 0 and any(p.region.is_point for p in letter):
                raise ValueError("only the first letter of a region word may hold point regions")
            if any(p.region.is_point for p in letter) and any(
                not (p.region.is_point or p.region.is_tail) for p in letter
            ):
                raise ValueError("a letter with point regions cannot hold open bounded regions")

    @classmethod
    def of(cls, letters: Iterable[Iterable[Pair | tuple[str, Region]]]) -> RegionWord:
        built = []
        for letter in letters:
            pairs = frozenset(p if isinstance(p, Pair) else Pair(*p) for p in letter)
            if pairs:
                built.append(pairs)
        return cls(tuple(built))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def pairs(self) -> Iterator[Pair]:
        return chain.from_iterable(self.letters)

    @property
    def locations(self) -> frozenset[str]:
        return frozenset(p.location for p in self.pairs())

    def sort_key(self) -> tuple:
        return tuple(_letter_key(letter) for letter in self.letters)

    def __str__(self) -> str:
        return format_region_word(self)


def format_region_word(w: RegionWord) -> str:
    if not w.letters:
        return "ε"
    return " ".join("{" + ", ".join(str(p) for p in sorted(letter)) + "}" for letter in w.letters)


_LETTER_RE = re.compile(r"\{([^{}]*(?:\{[^{}]*\}[^{}]*)*)\}")
_PAIR_RE = re.compile(r"\s*([^:,\s]+)\s*:\s*(\{\d+\}|\(\d+,\s*(?:\d+|inf)\))\s*")


def parse_region_word(text: str, cmax: int | None = None) -> RegionWord:
    """Read the format produced by ``format_region_word``."""
    body = text.strip()
    if body in ("", "ε"):
        return RegionWord()
    letters = []
    position = 0
    for match in _LETTER_RE.finditer(body):
        if body[position : match.start()].strip():
            raise ValueError(f"unexpected text in region word: {body[position:match.start()]!r}")
        position = match.end()
        pairs = []
        for chunk in _PAIR_RE.finditer(match.group(1)):
            pairs.append(Pair(chunk.group(1), parse_region(chunk.group(2), cmax)))
        if not pairs:
            raise ValueError(f"empty letter in region word: {match.group(0)!r}")
        letters.append(frozenset(pairs))
    if body[position:].strip():
        raise ValueError(f"unexpected text in region word: {body[position:]!r}")
    return RegionWord(tuple(letters))


def abstract_H(p: ConfigSet, cmax: int) -> RegionWord:
    """Group configurations by fractional part, in increasing order."""
    groups: dict[Fraction, set[Pair]] = {}
    for c in p:
        groups.setdefault(fract(c.value), set()).add(Pair(c.location, region_of(c.value, cmax)))
    return RegionWord(tuple(frozenset(groups[f]) for f in sorted(groups)))


def initial_word(a: Ata) -> RegionWord:
    return RegionWord((frozenset({Pair(a.initial, Region.at_point(0))}),))


def is_bad_word(w: RegionWord, a: Ata) -> bool:
    return all(p.location in a.accepting for p in w.pairs())


# =================================================================================================
# Time elapse
# =================================================================================================


def delay_step(w: RegionWord, cmax: int) -> RegionWord:
    """
    The abstraction after the smallest delay that changes it.

    If the first letter holds point regions they open up; otherwise the last
    letter reaches the next integer and rotates to the front.
    """
    if not w.letters:
        return w
    front = w.letters[0]
    if any(p.region.is_point for p in front):
        opened = frozenset(Pair(p.location, p.region.opened(cmax)) for p in front)
        return RegionWord((opened, *w.letters[1:]))
    last = w.letters[-1]
    closed = frozenset(Pair(p.location, p.region.closed_above()) for p in last)
    return RegionWord((closed, *w.letters[:-1]))


def delay_closure(w: RegionWord, cmax: int) -> tuple[RegionWord, ...]:
    """Every abstraction reachable by letting time pass, in order of discovery."""
    seen: dict[RegionWord, None] = {}
    current = w
    while current not in seen:
        seen[current] = None
        current = delay_step(current, cmax)
    return tuple(seen)


# =================================================================================================
# Discrete steps
# =================================================================================================


def _nonempty_unions(conjuncts: Sequence[frozenset[Atom]]) -> list[frozenset[Atom]]:
    found: dict[frozenset[Atom], None] = {}
    for size in range(1, len(conjuncts) + 1):
        for chosen in combinations(conjuncts, size):
            found[frozenset().union(*chosen)] = None
    return list(found)


def _assemble(w: RegionWord, kept: list[set[Pair]], resets: set[Pair]) -> list[RegionWord]:
    if not resets:
        return [RegionWord.of(kept)]
    front = w.letters[0] if w.letters else frozenset()
    if any(p.region.is_point for p in front):
        return [RegionWord.of([kept[0] | resets, *kept[1:]])]
    separate = RegionWord.of([resets, *kept])
    if front and all(p.region.is_tail for p in front):
        # a tail-only front letter may have a zero fractional part
        merged = RegionWord.of([kept[0] | resets, *kept[1:]])
        return [separate, merged]
    return [separate]


Slot = tuple[int, Pair]
Options = dict[tuple[str, Region], list[frozenset[Atom]]]


def _free_choices(slots: list[Slot], options: Options) -> Iterator[tuple[frozenset[Atom], ...]]:
    return product(*(options[(p.location, p.region)] for _, p in slots))


def _uniform_choices(
    slots: list[Slot], options: Options
) -> Iterator[tuple[frozenset[Atom], ...]]:
    groups: dict[object, tuple[str, Region]] = {}
    for slot in slots:
        groups.setdefault(_choice_group(slot), (slot[1].location, slot[1].region))
    keys = list(groups)
    for pick in product(*(options[groups[key]] for key in keys)):
        chosen = dict(zip(keys, pick, strict=True))
        yield tuple(chosen[_choice_group(slot)] for slot in slots)


def _choice_group(slot: Slot) -> object:
    # tail values of one location are interchangeable, a bounded pair is a single clock
    p = slot[1]
    return p.location if p.region.is_tail else slot


def discrete_successors(
    w: RegionWord, letter: str, a: Ata, *, uniform: bool = False
) -> tuple[RegionWord, ...]:
    """
    Abstract successors of ``w`` on ``letter`` without delay.

    Each pair picks a conjunct of its cell. A tail pair may stand for several
    configurations, so it may pick any union of conjuncts. With ``uniform`` a
    tail pair picks a single conjunct shared by every tail pair of its location.
    """
    slots: list[Slot] = [(i, p) for i, lt in enumerate(w.letters) for p in sorted(lt)]
    options: Options = {}
    for _, p in slots:
        key = (p.location, p.region)
        if key in options:
            continue
        conjuncts = list(to_dnf(a.cell(p.location, letter, p.region.sample()).formula))
        options[key] = (
            _nonempty_unions(conjuncts) if p.region.is_tail and not uniform else conjuncts
        )

    choices = _uniform_choices(slots, options) if uniform else _free_choices(slots, options)
    found: dict[RegionWord, None] = {}
    for choice in choices:
        kept: list[set[Pair]] = [set() for _ in w.letters]
        resets: set[Pair] = set()
        for (index, p), atoms in zip(slots, choice, strict=True):
            for atom in atoms:
                if atom.reset:
                    resets.add(Pair(atom.location, Region.at_point(0)))
                else:
                    kept[index].add(Pair(atom.location, p.region))
        for successor in _assemble(w, kept, resets):
            found[successor] = None
    return tuple(found)


def successors(
    w: RegionWord, a: Ata, *, uniform: bool = False
) -> tuple[tuple[str, RegionWord], ...]:
    """Delay closure followed by one discrete step on each letter."""
    found: dict[tuple[str, RegionWord], None] = {}
    for delayed in delay_closure(w, a.cmax):
        for letter in a.alphabet:
            for successor in discrete_successors(delayed, letter, a, uniform=uniform):
                found[(letter, successor)] = None
    return tuple(found)


# =================================================================================================
# Well-quasi-order on region words
# =================================================================================================


def preceq(w1: RegionWord, w2: RegionWord) -> bool:
    """Greedy check for a strictly increasing embedding with letter inclusion."""
    position = 0
    for letter in w1.letters:
        while position < len(w2.letters) and not letter <= w2.letters[position]:
            position += 1
        if position == len(w2.letters):
            return False
        position += 1
    return True


# =================================================================================================
# Concrete representatives
# =================================================================================================


def _value_for(region: Region, fraction: Fraction, cmax: int, copy: int) -> Fraction:
    if region.is_point:
        return Fraction(region.lower)
    if region.is_tail:
        return cmax + 1 + copy + fraction
    return region.lower + fraction


def realize(
    w: RegionWord, cmax: int, *, copies: int = 1, zero_front: bool = False
) -> ConfigSet:
    """
    A configuration set whose abstraction is ``w``.

    ``copies`` places that many configurations on each tail pair; ``zero_front``
    gives a tail-only first letter a zero fractional part.
    """
    if not w.letters:
        return ConfigSet()
    count = len(w.letters)
    front = w.letters[0]
    starts_at_zero = any(p.region.is_point for p in front) or (
        zero_front and all(p.region.is_tail for p in front)
    )
    configurations = []
    for index, letter in enumerate(w.letters):
        if starts_at_zero:
            fraction = Fraction(index, count)
        else:
            fraction = Fraction(index + 1, count + 1)
        for p in letter:
            repeat = copies if p.region.is_tail else 1
            for copy in range(repeat):
                value = _value_for(p.region, fraction, cmax, copy)
                configurations.append(Configuration(p.location, value))
    return ConfigSet.of(configurations)


def candidate_delays(p: ConfigSet, cmax: int) -> list[Fraction]:
    """
    Delays covering every class of the delay closure of ``p``'s abstraction.

    These are the delays that make some clock integral, the midpoints between
    consecutive ones and one past the last.
    """
    horizon = cmax + 2
    critical = {Fraction(0)}
    for c in p:
        k = math.ceil(c.value)
        while k - c.value <= horizon:
            critical.add(Fraction(k) - c.value)
            k += 1
    ordered = sorted(critical)
    found = []
    for current, following in zip(ordered, [*ordered[1:], None], strict=True):
        found.append(current)
        found.append(current + Fraction(1, 2) if following is None else (current + following) / 2)
    return found
