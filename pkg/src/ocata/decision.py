"""
Emptiness, universality and inclusion.

The language of an automaton is non-empty exactly when a configuration set
made only of accepting locations is reachable. The search explores region
words breadth-first and drops a word whenever an earlier word embeds into it,
which keeps the tree finite.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from itertools import product

from .abstraction import (
    RegionWord,
    abstract_H,
    candidate_delays,
    initial_word,
    is_bad_word,
    preceq,
    successors,
)
from .automaton import Ata, CombineMode, combine, complement, require_partition
from .errors import AlphabetMismatchError, InvalidPathError, OcataError, SearchBudgetExceeded
from .formulas import Atom, to_dnf
from .regions import region_of
from .semantics import ConfigSet, Configuration, TimedWord, accepts, delay

logger = logging.getLogger(__name__)


# =================================================================================================
# Location trimming
# =================================================================================================


class LocationTrimmer:
    """
    Classifies locations that never matter for reaching an accepting set.

    A *safe* location is accepting and can always move to safe locations only,
    so its configurations never stop a set from becoming accepting. A *doomed*
    location forces a non-accepting location into every later set.
    """

    def __init__(self, a: Ata, enabled: bool = True) -> None:
        self.automaton = a
        self.enabled = enabled
        self.safe = self._safe_locations(a) if enabled else frozenset()
        self.doomed = self._doomed_locations(a) if enabled else frozenset()

    @staticmethod
    def _conjuncts(a: Ata, location: str):
        for letter in a.alphabet:
            for rule in a.rules_for(location, letter):
                yield to_dnf(rule.formula).conjuncts

    @classmethod
    def _safe_locations(cls, a: Ata) -> frozenset[str]:
        safe = set(a.accepting)
        changed = True
        while changed:
            changed = False
            for location in list(safe):
                for conjuncts in cls._conjuncts(a, location):
                    if not any(all(atom.location in safe for atom in c) for c in conjuncts):
                        safe.discard(location)
                        changed = True
                        break
        return frozenset(safe)

    @classmethod
    def _doomed_locations(cls, a: Ata) -> frozenset[str]:
        doomed = set(a.locations) - a.accepting
        changed = True
        while changed:
            changed = False
            for location in list(doomed):
                for conjuncts in cls._conjuncts(a, location):
                    if any(not any(atom.location in doomed for atom in c) for c in conjuncts):
                        doomed.discard(location)
                        changed = True
                        break
        return frozenset(doomed)

    def view(self, w: RegionWord) -> RegionWord | None:
        """``w`` without safe pairs, or None when it holds a doomed location."""
        if not self.enabled:
            return w
        if w.locations & self.doomed:
            return None
        return RegionWord.of([p for p in letter if p.location not in self.safe] for letter in w)

    def relevant(self, p: ConfigSet) -> ConfigSet:
        return ConfigSet(tuple(c for c in p if c.location not in self.safe))

    def safe_move(self, c: Configuration, letter: str) -> frozenset[Configuration]:
        rule = self.automaton.cell(c.location, letter, c.value)
        for conjunct in to_dnf(rule.formula):
            if all(atom.location in self.safe for atom in conjunct):
                return _place(conjunct, c.value)
        raise OcataError(f"safe location {c.location!r} has no safe move")


def _place(conjunct: frozenset[Atom], value: Fraction) -> frozenset[Configuration]:
    return frozenset(
        Configuration(atom.location, Fraction(0) if atom.reset else value) for atom in conjunct
    )


# =================================================================================================
# Results
# =================================================================================================


class Verdict(StrEnum):
    EMPTY = "empty"
    NONEMPTY = "nonempty"
    UNIVERSAL = "universal"
    CONTAINED = "contained"
    COUNTEREXAMPLE = "counterexample"


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    nodes_pruned: int = 0
    nodes_doomed: int = 0
    depth: int = 0
    elapsed_ms: int = 0


@dataclass(frozen=True)
class RegionPath:
    """A root region word followed by (letter, region word) steps."""

    root: RegionWord
    steps: tuple[tuple[str, RegionWord], ...] = ()
    trimmed: bool = False

    def __len__(self) -> int:
        return len(self.steps)

    def sort_key(self) -> tuple:
        return tuple((letter, w.sort_key()) for letter, w in self.steps)


@dataclass(frozen=True)
class EmptinessVerdict:
    verdict: Verdict
    path: RegionPath | None = None
    witness: TimedWord | None = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def is_empty(self) -> bool:
        return self.verdict is Verdict.EMPTY


@dataclass(frozen=True)
class LanguageVerdict:
    verdict: Verdict
    counterexample: TimedWord | None
    emptiness: EmptinessVerdict

    @property
    def holds(self) -> bool:
        return self.verdict is not Verdict.COUNTEREXAMPLE


# =================================================================================================
# Emptiness search
# =================================================================================================


@dataclass
class _Node:
    word: RegionWord
    letter: str | None = None
    parent: _Node | None = None
    depth: int = 0

    def ancestors(self):
        node: _Node | None = self
        while node is not None:
            yield node
            node = node.parent

    def path(self, trimmed: bool) -> RegionPath:
        chain = list(self.ancestors())[::-1]
        steps = tuple((n.letter, n.word) for n in chain[1:] if n.letter is not None)
        return RegionPath(chain[0].word, steps, trimmed)


@dataclass
class _SearchOptions:
    pruning: str
    trim: bool
    max_nodes: int
    budget_seconds: float

    @classmethod
    def resolve(
        cls,
        pruning: str | None,
        trim: bool | None,
        max_nodes: int | None,
        budget_seconds: float | None,
    ) -> _SearchOptions:
        from .config import get_config

        cfg = get_config()
        return cls(
            pruning=pruning if pruning is not None else cfg.search.pruning,
            trim=trim if trim is not None else cfg.search.trim_locations,
            max_nodes=max_nodes if max_nodes is not None else cfg.search.max_nodes,
            budget_seconds=budget_seconds if budget_seconds is not None else cfg.budget.seconds,
        )


def check_empty(
    a: Ata,
    *,
    pruning: str | None = None,
    trim: bool | None = None,
    max_nodes: int | None = None,
    budget_seconds: float | None = None,
) -> EmptinessVerdict:
    """
    Decide whether ``a`` accepts no timed word.

    Returns a verdict with a region path and a concrete witness when the
    language is non-empty. Options left as None come from the config.
    """
    require_partition(a)
    options = _SearchOptions.resolve(pruning, trim, max_nodes, budget_seconds)
    if options.pruning not in ("ancestors", "global"):
        raise ValueError(f"unknown pruning mode {options.pruning!r}")
    trimmer = LocationTrimmer(a, options.trim)
    stats = SearchStats()
    started = time.monotonic()

    def finish(verdict: Verdict, node: _Node | None = None) -> EmptinessVerdict:
        stats.elapsed_ms = int((time.monotonic() - started) * 1000)
        if node is None:
            logger.info("language is empty after %d expansions", stats.nodes_expanded)
            return EmptinessVerdict(verdict, stats=stats)
        path = node.path(options.trim)
        witness = concretize_witness(path, a)
        stats.elapsed_ms = int((time.monotonic() - started) * 1000)
        logger.info("found accepted word of length %d: %s", len(witness), witness)
        return EmptinessVerdict(verdict, path, witness, stats)

    root_word = trimmer.view(initial_word(a))
    if root_word is None:
        return finish(Verdict.EMPTY)
    root = _Node(root_word)
    if is_bad_word(root_word, a):
        return finish(Verdict.NONEMPTY, root)

    kept: list[RegionWord] = [root_word]
    frontier = [root]
    while frontier:
        following: list[_Node] = []
        found: list[_Node] = []
        for node in frontier:
            _check_budget(options, stats, started)
            stats.nodes_expanded += 1
            for letter, raw in successors(node.word, a, uniform=True):
                child = trimmer.view(raw)
                if child is None:
                    stats.nodes_doomed += 1
                    continue
                if options.pruning == "global":
                    dominated = any(preceq(w, child) for w in kept)
                else:
                    dominated = any(preceq(n.word, child) for n in node.ancestors())
                if dominated:
                    stats.nodes_pruned += 1
                    continue
                successor = _Node(child, letter, node, node.depth + 1)
                if options.pruning == "global":
                    kept.append(child)
                if is_bad_word(child, a):
                    found.append(successor)
                else:
                    following.append(successor)
        stats.depth += 1
        logger.debug(
            "depth %d: %d new nodes, %d pruned, %d doomed",
            stats.depth,
            len(following) + len(found),
            stats.nodes_pruned,
            stats.nodes_doomed,
        )
        if found:
            best = min(found, key=lambda n: n.path(options.trim).sort_key())
            return finish(Verdict.NONEMPTY, best)
        frontier = following
    return finish(Verdict.EMPTY)


def _check_budget(options: _SearchOptions, stats: SearchStats, started: float) -> None:
    elapsed = time.monotonic() - started
    over_time = options.budget_seconds and elapsed > options.budget_seconds
    over_nodes = options.max_nodes and stats.nodes_expanded >= options.max_nodes
    if over_time or over_nodes:
        stats.elapsed_ms = int(elapsed * 1000)
        raise SearchBudgetExceeded(
            f"search budget exhausted after {stats.nodes_expanded} expansions",
            stats.nodes_expanded,
            stats.nodes_pruned,
            stats.elapsed_ms,
        )


# =================================================================================================
# Witness concretization
# =================================================================================================


def _uniform_moves(
    p: ConfigSet, letter: str, a: Ata, trimmer: LocationTrimmer
) -> list[ConfigSet]:
    """Successors where the configurations of one location past ``cmax`` move alike."""
    cmax = a.cmax
    fixed: set[Configuration] = set()
    groups: dict[object, list[Configuration]] = {}
    for c in p:
        if c.location in trimmer.safe:
            fixed |= trimmer.safe_move(c, letter)
        elif region_of(c.value, cmax).is_tail:
            groups.setdefault(c.location, []).append(c)
        else:
            groups.setdefault(c, []).append(c)
    keys = list(groups)
    choices = [
        list(to_dnf(a.cell(groups[k][0].location, letter, groups[k][0].value).formula))
        for k in keys
    ]
    found: dict[ConfigSet, None] = {}
    for pick in product(*choices):
        moved = set(fixed)
        for key, conjunct in zip(keys, pick, strict=True):
            for c in groups[key]:
                moved |= _place(conjunct, c.value)
        found[ConfigSet.of(moved)] = None
    return list(found)


def concretize_witness(path: RegionPath, a: Ata) -> TimedWord:
    """
    Turn a region path from the initial word into a timed word.

    Delays are searched among the values that make some clock integral and the
    midpoints between them, backtracking when a step cannot be matched.
    """
    trimmer = LocationTrimmer(a, path.trimmed)
    cmax = a.cmax

    def view(p: ConfigSet) -> RegionWord | None:
        return trimmer.view(abstract_H(p, cmax))

    start = ConfigSet.initial(a)
    if view(start) != path.root:
        raise InvalidPathError(f"path does not start at the initial word: {path.root}")
    failed: set[tuple[int, ConfigSet]] = set()

    def extend(index: int, p: ConfigSet) -> list[tuple[str, Fraction]] | None:
        if index == len(path.steps):
            return []
        if (index, p) in failed:
            return None
        letter, target = path.steps[index]
        for t in candidate_delays(trimmer.relevant(p), cmax):
            for successor in _uniform_moves(delay(p, t), letter, a, trimmer):
                if view(successor) != target:
                    continue
                rest = extend(index + 1, successor)
                if rest is not None:
                    return [(letter, t), *rest]
        failed.add((index, p))
        return None

    steps = extend(0, start)
    if steps is None:
        raise InvalidPathError("region path cannot be realized by a timed word")
    word = TimedWord.from_delays(steps)
    if not accepts(a, word):
        raise OcataError(f"concretized word {word} is not accepted")
    return word


# =================================================================================================
# Reference search without pruning
# =================================================================================================


def reachable_bad_unpruned(a: Ata, max_depth: int, max_nodes: int = 20000) -> bool | None:
    """
    Breadth-first search without embedding checks or trimming, where every pair
    picks its conjunct independently.

    Returns True when an accepting region word is found, False when the search
    runs out of new words, None when ``max_depth`` or ``max_nodes`` is hit first.
    """
    require_partition(a)
    root = initial_word(a)
    if is_bad_word(root, a):
        return True
    seen = {root}
    queue = deque([(root, 0)])
    while queue:
        word, depth = queue.popleft()
        if depth == max_depth:
            return None
        for _, child in successors(word, a):
            if child in seen:
                continue
            if is_bad_word(child, a):
                return True
            seen.add(child)
            if len(seen) > max_nodes:
                return None
            queue.append((child, depth + 1))
    return False


# =================================================================================================
# Universality and inclusion
# =================================================================================================


def check_universal(a: Ata, **options) -> LanguageVerdict:
    """Universality through emptiness of the complement."""
    emptiness = check_empty(complement(a), **options)
    if emptiness.is_empty:
        return LanguageVerdict(Verdict.UNIVERSAL, None, emptiness)
    return LanguageVerdict(Verdict.COUNTEREXAMPLE, emptiness.witness, emptiness)


def check_contains(a: Ata, b: Ata, **options) -> LanguageVerdict:
    """Whether every word accepted by ``a`` is accepted by ``b``."""
    if set(a.alphabet) != set(b.alphabet):
        raise AlphabetMismatchError(
            f"alphabets differ: {sorted(a.alphabet)} vs {sorted(b.alphabet)}"
        )
    emptiness = check_empty(combine(a, complement(b), CombineMode.AND), **options)
    if emptiness.is_empty:
        return LanguageVerdict(Verdict.CONTAINED, None, emptiness)
    return LanguageVerdict(Verdict.COUNTEREXAMPLE, emptiness.witness, emptiness)
