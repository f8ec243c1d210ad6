"""
Lossy channel systems and their encoding into purely universal automata.

A computation of a lossy channel system is laid out as a timed word read from
the last configuration back to the first: segment i holds the control state at
time n - i, the rule that produced it and the channel content, each letter at a
fixed fractional offset so that a message surviving a step reappears exactly
one time unit later.
"""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from itertools import combinations, pairwise
from typing import TypeVar

from .automaton import Ata, CombineMode, Rule, combine, complete_with_sink
from .errors import ChannelSystemError, InvalidRunError
from .formulas import Atom, PosBool, conj
from .guards import AndGuard, CmpOp, Compare, GuardExpr, TrueGuard
from .semantics import TimedWord

logger = logging.getLogger(__name__)

T = TypeVar("T")


class Op(StrEnum):
    EPS = "eps"
    WRITE = "write"
    READ = "read"


@dataclass(frozen=True, order=True)
class ChannelRule:
    source: str
    op: Op
    message: str | None
    target: str

    def __post_init__(self) -> None:
        if (self.op is Op.EPS) != (self.message is None):
            expected = "no message" if self.op is Op.EPS else "a message"
            raise ChannelSystemError(f"{self.op} rules take {expected}")

    @property
    def letter(self) -> str:
        if self.op is Op.EPS:
            return f"{self.source}.eps.{self.target}"
        prefix = "w" if self.op is Op.WRITE else "r"
        return f"{self.source}.{prefix}_{self.message}.{self.target}"

    def __str__(self) -> str:
        action = "eps" if self.op is Op.EPS else f"{self.op.value} {self.message}"
        return f"{self.source} -> {self.target} : {action}"


@dataclass(frozen=True)
class ChannelSystem:
    states: tuple[str, ...]
    initial: str
    alphabet: tuple[str, ...]
    rules: tuple[ChannelRule, ...]

    def __post_init__(self) -> None:
        if self.initial not in self.states:
            raise ChannelSystemError(f"initial state {self.initial!r} is not declared")
        known = set(self.states)
        messages = set(self.alphabet)
        for rule in self.rules:
            if rule.source not in known or rule.target not in known:
                raise ChannelSystemError(f"rule {rule} uses an undeclared state")
            if rule.message is not None and rule.message not in messages:
                raise ChannelSystemError(f"rule {rule} uses an undeclared message")
            if rule.target == self.initial:
                raise ChannelSystemError(f"rule {rule} targets the initial state")
        letters = [*self.states, *self.alphabet, *(r.letter for r in self.rules)]
        if len(set(letters)) != len(letters):
            raise ChannelSystemError("state, message and rule names must be pairwise distinct")

    @property
    def encoding_alphabet(self) -> tuple[str, ...]:
        return reduction_alphabet(self)

    def rule_for_letter(self, letter: str) -> ChannelRule | None:
        return next((r for r in self.rules if r.letter == letter), None)

    def rules_from(self, state: str) -> list[ChannelRule]:
        return [r for r in self.rules if r.source == state]


def reduction_alphabet(s: ChannelSystem) -> tuple[str, ...]:
    """States, then messages, then one letter per rule."""
    return (*s.states, *s.alphabet, *(r.letter for r in s.rules))


@dataclass(frozen=True, order=True)
class ChannelConfig:
    state: str
    channel: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"<{self.state}, {' '.join(self.channel) or 'ε'}>"


LossyRun = tuple[tuple[ChannelRule, ChannelConfig], ...]


# =================================================================================================
# Lossy semantics
# =================================================================================================


def subseq(u: Sequence[T], w: Sequence[T]) -> bool:
    remaining = iter(w)
    return all(any(x == y for y in remaining) for x in u)


def subsequences(w: Sequence[T]) -> set[tuple[T, ...]]:
    found: set[tuple[T, ...]] = set()
    for size in range(len(w) + 1):
        for indices in combinations(range(len(w)), size):
            found.add(tuple(w[i] for i in indices))
    return found


def _perfect_move(channel: tuple[str, ...], rule: ChannelRule) -> tuple[str, ...] | None:
    match rule.op:
        case Op.EPS:
            return channel
        case Op.WRITE:
            return (rule.message, *channel)  # type: ignore[return-value]
        case Op.READ:
            if channel and channel[-1] == rule.message:
                return channel[:-1]
            return None


def lossy_step(c: ChannelConfig, rule: ChannelRule) -> frozenset[ChannelConfig]:
    """Every configuration reachable by losing messages, applying ``rule``, and losing again."""
    if rule.source != c.state:
        return frozenset()
    found: set[tuple[str, ...]] = set()
    for before in subsequences(c.channel):
        after = _perfect_move(before, rule)
        if after is not None:
            found |= subsequences(after)
    return frozenset(ChannelConfig(rule.target, channel) for channel in found)


def find_lossy_run(
    s: ChannelSystem, target: ChannelConfig, channel_cap: int
) -> LossyRun | None:
    """Breadth-first search for a shortest run reaching ``target``."""
    start = ChannelConfig(s.initial)
    parents: dict[ChannelConfig, tuple[ChannelConfig, ChannelRule] | None] = {start: None}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        if current == target:
            steps: list[tuple[ChannelRule, ChannelConfig]] = []
            node = current
            while (link := parents[node]) is not None:
                previous, rule = link
                steps.append((rule, node))
                node = previous
            return tuple(reversed(steps))
        for rule in s.rules_from(current.state):
            for successor in sorted(lossy_step(current, rule)):
                if len(successor.channel) > channel_cap or successor in parents:
                    continue
                parents[successor] = (current, rule)
                queue.append(successor)
    return None


def lossy_reachable(s: ChannelSystem, target: ChannelConfig, channel_cap: int) -> bool:
    return find_lossy_run(s, target, channel_cap) is not None


def enumerate_runs(s: ChannelSystem, max_steps: int, channel_cap: int) -> Iterator[LossyRun]:
    """All runs from the initial configuration with at most ``max_steps`` steps."""

    def extend(run: LossyRun, current: ChannelConfig) -> Iterator[LossyRun]:
        yield run
        if len(run) == max_steps:
            return
        for rule in s.rules_from(current.state):
            for successor in sorted(lossy_step(current, rule)):
                if len(successor.channel) <= channel_cap:
                    yield from extend((*run, (rule, successor)), successor)

    yield from extend((), ChannelConfig(s.initial))


def check_run(s: ChannelSystem, run: LossyRun) -> None:
    current = ChannelConfig(s.initial)
    for index, (rule, config) in enumerate(run):
        if rule not in s.rules:
            raise InvalidRunError(f"step {index + 1} uses unknown rule {rule}")
        if config not in lossy_step(current, rule):
            raise InvalidRunError(
                f"step {index + 1}: {config} is not a lossy successor of {current}"
            )
        current = config


# =================================================================================================
# Computation encodings
# =================================================================================================


TimedLetter = tuple[str, Fraction]


@dataclass(frozen=True)
class Segment:
    state: str
    state_time: Fraction
    rule: ChannelRule | None = None
    rule_time: Fraction | None = None
    channel: tuple[TimedLetter, ...] = ()


@dataclass(frozen=True)
class ComputationEncoding:
    """``segments[i]`` describes the i-th configuration of the computation."""

    word: TimedWord
    segments: tuple[Segment, ...]

    @property
    def length(self) -> int:
        return len(self.segments) - 1


def _embedding(inner: Sequence[str], outer: Sequence[str]) -> list[int] | None:
    positions: list[int] = []
    start = 0
    for letter in inner:
        while start < len(outer) and outer[start] != letter:
            start += 1
        if start == len(outer):
            return None
        positions.append(start)
        start += 1
    return positions


def _track_messages(run: LossyRun) -> list[list[int]]:
    """Message identities for the channel content after each step, numbered by write order."""
    identities: list[list[int]] = [[]]
    previous: tuple[str, ...] = ()
    written = 0
    for rule, config in run:
        ids = identities[-1]
        after = config.channel
        if rule.op is Op.WRITE and after and after[0] == rule.message:
            positions = _embedding(after[1:], previous)
            if positions is not None:
                written += 1
                identities.append([written, *(ids[p] for p in positions)])
                previous = after
                continue
        if rule.op is Op.READ:
            cut = next(
                (
                    j
                    for j in range(len(previous) - 1, -1, -1)
                    if previous[j] == rule.message and subseq(after, previous[:j])
                ),
                None,
            )
            if cut is None:
                raise InvalidRunError(f"cannot match read of {rule.message} in {config}")
            positions = _embedding(after, previous[:cut])
        else:
            positions = _embedding(after, previous)
        if positions is None:
            raise InvalidRunError(f"channel {after} does not embed into {previous}")
        identities.append([ids[p] for p in positions])
        previous = after
    return identities


def encode_computation(run: LossyRun, s: ChannelSystem) -> ComputationEncoding:
    """
    Lay out ``run`` as a timed word.

    The rule letter of each step sits at offset 1/(W+2) and the k-th written
    message at offset (W-k+2)/(W+2), where W is the number of messages written.
    Newer messages thus come first inside a segment and keep their offset.
    """
    check_run(s, run)
    identities = _track_messages(run)
    written = max((m for ids in identities for m in ids), default=0)
    denominator = written + 2
    n = len(run)

    def offset(message: int) -> Fraction:
        return Fraction(written - message + 2, denominator)

    segments: list[Segment] = [Segment(s.initial, Fraction(n))]
    for i, (rule, config) in enumerate(run, start=1):
        base = Fraction(n - i)
        channel = tuple(
            (letter, base + offset(m))
            for letter, m in zip(config.channel, identities[i], strict=True)
        )
        rule_time = base + Fraction(1, denominator)
        segments.append(Segment(config.state, base, rule, rule_time, channel))

    events: list[TimedLetter] = []
    for segment in reversed(segments):
        events.append((segment.state, segment.state_time))
        if segment.rule is not None and segment.rule_time is not None:
            events.append((segment.rule.letter, segment.rule_time))
        events.extend(segment.channel)
    return ComputationEncoding(TimedWord(tuple(events)), tuple(segments))


class EncodingCondition(StrEnum):
    STRUCTURE = "structure"
    TIMING = "timing"
    EPSILON_MOVE = "epsilon-move"
    WRITE_MOVE = "write-move"
    READ_MOVE = "read-move"


@dataclass(frozen=True)
class EncodingReport:
    ok: bool
    condition: EncodingCondition | None = None
    message: str = ""
    step: int | None = None

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        where = f" at step {self.step}" if self.step is not None else ""
        return f"{self.condition} violated{where}: {self.message}"


class _Invalid(Exception):
    def __init__(self, condition: EncodingCondition, message: str, step: int | None = None):
        super().__init__(message)
        self.report = EncodingReport(False, condition, message, step)


def _malformed(message: str) -> _Invalid:
    return _Invalid(EncodingCondition.STRUCTURE, message)


def _decode(w: TimedWord, s: ChannelSystem) -> ComputationEncoding:
    states, messages = set(s.states), set(s.alphabet)
    events = list(w)
    reversed_segments: list[Segment] = []
    expected_state: str | None = None
    position = 0
    while True:
        if position >= len(events):
            raise _malformed("word does not end with the initial state")
        state, state_time = events[position]
        if state not in states:
            raise _malformed(f"expected a state, found {state!r}")
        if expected_state is not None and state != expected_state:
            raise _malformed(f"state {state!r} does not match rule source {expected_state!r}")
        position += 1
        if position == len(events):
            if state != s.initial:
                raise _malformed(f"last state {state!r} is not initial")
            reversed_segments.append(Segment(state, state_time))
            break
        letter, rule_time = events[position]
        rule = s.rule_for_letter(letter)
        if rule is None or rule.target != state:
            raise _malformed(f"expected a rule into {state!r}, found {letter!r}")
        position += 1
        channel: list[TimedLetter] = []
        while position < len(events) and events[position][0] in messages:
            channel.append(events[position])
            position += 1
        reversed_segments.append(Segment(state, state_time, rule, rule_time, tuple(channel)))
        expected_state = rule.source
    return ComputationEncoding(w, tuple(reversed(reversed_segments)))


def decode_encoding(w: TimedWord, s: ChannelSystem) -> ComputationEncoding:
    """Split ``w`` into segments; raises ChannelSystemError on a malformed word."""
    try:
        return _decode(w, s)
    except _Invalid as exc:
        raise ChannelSystemError(str(exc.report)) from exc


def _shifted(channel: Sequence[TimedLetter]) -> tuple[TimedLetter, ...]:
    return tuple((letter, t + 1) for letter, t in channel)


def _check_timing(encoding: ComputationEncoding) -> None:
    n = encoding.length
    for i, segment in enumerate(encoding.segments):
        if segment.state_time != n - i:
            message = f"state {segment.state} at {segment.state_time}, expected {n - i}"
            raise _Invalid(EncodingCondition.TIMING, message, i)
        stamps = [segment.state_time]
        if segment.rule_time is not None:
            stamps.append(segment.rule_time)
        stamps.extend(t for _, t in segment.channel)
        stamps.append(segment.state_time + 1)
        if any(a >= b for a, b in pairwise(stamps)):
            message = "letters are not strictly increasing inside the unit interval"
            raise _Invalid(EncodingCondition.TIMING, message, i)


def _check_moves(encoding: ComputationEncoding) -> None:
    for i in range(1, len(encoding.segments)):
        segment = encoding.segments[i]
        rule = segment.rule
        assert rule is not None
        copies = _shifted(segment.channel)
        previous = encoding.segments[i - 1].channel
        match rule.op:
            case Op.EPS:
                if not subseq(copies, previous):
                    message = "channel letters lack copies one unit later"
                    raise _Invalid(EncodingCondition.EPSILON_MOVE, message, i)
            case Op.WRITE:
                fresh = bool(copies) and copies[0][0] == rule.message
                if not ((fresh and subseq(copies[1:], previous)) or subseq(copies, previous)):
                    message = "older channel letters lack copies one unit later"
                    raise _Invalid(EncodingCondition.WRITE_MOVE, message, i)
            case Op.READ:
                if not any(
                    letter == rule.message and subseq(copies, previous[:j])
                    for j, (letter, _) in enumerate(previous)
                ):
                    message = f"no {rule.message} follows the copies of the channel letters"
                    raise _Invalid(EncodingCondition.READ_MOVE, message, i)


def validate_encoding(
    w: TimedWord, s: ChannelSystem, q_f: str, w_f: Sequence[str]
) -> EncodingReport:
    """Check that ``w`` encodes a lossy computation of ``s`` ending in ``(q_f, w_f)``."""
    try:
        encoding = _decode(w, s)
        last = encoding.segments[-1]
        if last.state != q_f:
            raise _malformed(f"computation ends in {last.state!r}, not {q_f!r}")
        if tuple(letter for letter, _ in last.channel) != tuple(w_f):
            raise _malformed("final channel content differs from the goal")
        _check_timing(encoding)
        _check_moves(encoding)
    except _Invalid as exc:
        logger.debug("encoding rejected: %s", exc.report)
        return exc.report
    return EncodingReport(True)


# =================================================================================================
# Reduction automaton
# =================================================================================================


_ZERO: GuardExpr = Compare(CmpOp.EQ, 0)
_POSITIVE: GuardExpr = Compare(CmpOp.GT, 0)
_ONE: GuardExpr = Compare(CmpOp.EQ, 1)
_BELOW_ONE: GuardExpr = Compare(CmpOp.LT, 1)
_UP_TO_ONE: GuardExpr = Compare(CmpOp.LE, 1)
_ABOVE_ONE: GuardExpr = Compare(CmpOp.GT, 1)
_INSIDE_UNIT: GuardExpr = AndGuard(_POSITIVE, _BELOW_ONE)
_ALWAYS: GuardExpr = TrueGuard()


class _Component:
    """Collects rows of one sub-automaton; uncovered cells go to its sink."""

    def __init__(self, prefix: str, alphabet: tuple[str, ...]) -> None:
        self.prefix = prefix
        self.alphabet = alphabet
        self.locations: list[str] = []
        self.rows: dict[tuple[str, str], list[Rule]] = {}

    def loc(self, name: str) -> str:
        full = f"{self.prefix}.{name}"
        if full not in self.locations:
            self.locations.append(full)
        return full

    def atom(self, name: str, reset: bool = False) -> Atom:
        return Atom(self.loc(name), reset)

    def add(self, source: str, letters: Sequence[str], guard: GuardExpr, formula: PosBool) -> None:
        location = self.loc(source)
        for letter in letters:
            self.rows.setdefault((location, letter), []).append(Rule.of(guard, formula))

    def build(self, initial: str, accepting: Sequence[str]) -> Ata:
        ata = Ata(
            locations=tuple(self.locations),
            initial=self.loc(initial),
            alphabet=self.alphabet,
            accepting=frozenset(self.loc(name) for name in accepting),
            rules={key: tuple(row) for key, row in self.rows.items()},
        )
        return complete_with_sink(ata, sink=f"{self.prefix}.sink")


def _structure_automaton(s: ChannelSystem, q_f: str, w_f: Sequence[str]) -> Ata:
    c = _Component("struct", reduction_alphabet(s))
    c.loc("start")
    c.add("start", [q_f], _ALWAYS, c.atom("head"))
    for rule in s.rules:
        if rule.target == q_f:
            c.add("head", [rule.letter], _ALWAYS, c.atom(f"wf.{rule.source}.0"))
    for p in s.states:
        for k, letter in enumerate(w_f):
            c.add(f"wf.{p}.{k}", [letter], _ALWAYS, c.atom(f"wf.{p}.{k + 1}"))
        c.add(f"wf.{p}.{len(w_f)}", [p], _ALWAYS, c.atom(f"state.{p}"))
    for q in s.states:
        c.loc(f"state.{q}")
        if q == s.initial:
            continue
        for rule in s.rules:
            if rule.target == q:
                c.add(f"state.{q}", [rule.letter], _ALWAYS, c.atom(f"chan.{rule.source}"))
    for p in s.states:
        c.add(f"chan.{p}", s.alphabet, _ALWAYS, c.atom(f"chan.{p}"))
        c.add(f"chan.{p}", [p], _ALWAYS, c.atom(f"state.{p}"))
    return c.build("start", [f"state.{s.initial}"])


def _unit_automaton(s: ChannelSystem) -> Ata:
    c = _Component("unit", reduction_alphabet(s))
    others = [*s.alphabet, *(r.letter for r in s.rules)]
    c.add("start", s.states, _ZERO, c.atom("at_state", reset=True))
    for name in ("at_state", "inside"):
        c.add(name, s.states, _ONE, c.atom("at_state", reset=True))
        c.add(name, others, _INSIDE_UNIT, c.atom("inside"))
    return c.build("start", ["at_state"])


def _strict_automaton(s: ChannelSystem) -> Ata:
    c = _Component("strict", reduction_alphabet(s))
    everything = reduction_alphabet(s)
    c.add("start", everything, _ZERO, c.atom("step"))
    c.add("step", everything, _POSITIVE, c.atom("step", reset=True))
    return c.build("start", ["start", "step"])


def _check_automaton(s: ChannelSystem) -> Ata:
    c = _Component("check", reduction_alphabet(s))
    everything = reduction_alphabet(s)
    states, messages = list(s.states), list(s.alphabet)
    rule_letters = [r.letter for r in s.rules]
    written = sorted({r.message for r in s.rules if r.op is Op.WRITE and r.message})
    read = sorted({r.message for r in s.rules if r.op is Op.READ and r.message})
    top = c.atom("top")

    spawn = conj(c.atom("start"), c.atom("step", reset=True))
    c.add("start", [q for q in states if q != s.initial], _ALWAYS, spawn)
    c.add("start", [s.initial], _ALWAYS, top)
    c.add("start", [*messages, *rule_letters], _ALWAYS, c.atom("start"))
    c.add("top", everything, _ALWAYS, top)

    for rule in s.rules:
        match rule.op:
            case Op.EPS:
                step = c.atom("channel")
            case Op.WRITE:
                step = c.atom(f"write.{rule.message}")
            case Op.READ:
                step = conj(c.atom(f"read.{rule.message}"), c.atom(f"emptyread.{rule.message}"))
        c.add("step", [rule.letter], _ALWAYS, step)

    for a in messages:
        c.add("channel", [a], _ALWAYS, conj(c.atom("channel"), c.atom(f"plus1.{a}", reset=True)))
        c.add(f"plus1.{a}", everything, _BELOW_ONE, c.atom(f"plus1.{a}"))
        c.add(f"plus1.{a}", [a], _ONE, top)
    c.add("channel", states, _ALWAYS, top)

    for a in written:
        c.add(f"write.{a}", [a], _ALWAYS, c.atom("channel"))
        for b in messages:
            if b != a:
                copied = conj(c.atom(f"plus1.{b}", reset=True), c.atom("channel"))
                c.add(f"write.{a}", [b], _ALWAYS, copied)
        c.add(f"write.{a}", states, _ALWAYS, top)

    for a in read:
        others = [b for b in messages if b != a]
        for b in messages:
            copied = conj(
                c.atom(f"read.{a}"),
                c.atom(f"plus1.{b}", reset=True),
                c.atom(f"tryread.{a}", reset=True),
            )
            c.add(f"read.{a}", [b], _ALWAYS, copied)
        c.add(f"read.{a}", states, _ALWAYS, top)
        # only the last channel letter looks for the read message
        c.add(f"tryread.{a}", messages, _ALWAYS, top)
        c.add(f"tryread.{a}", states, _ALWAYS, c.atom(f"checkread.{a}"))
        c.add(f"checkread.{a}", everything, _UP_TO_ONE, c.atom(f"checkread.{a}"))
        c.add(f"checkread.{a}", [a], _ABOVE_ONE, top)
        c.add(f"checkread.{a}", others, _ABOVE_ONE, c.atom(f"checkread.{a}"))
        # an empty channel may read any a of the older segment
        c.add(f"emptyread.{a}", messages, _ALWAYS, top)
        c.add(f"emptyread.{a}", states, _ALWAYS, c.atom(f"findread.{a}"))
        c.add(f"findread.{a}", [a], _ALWAYS, top)
        c.add(f"findread.{a}", [*others, *rule_letters], _ALWAYS, c.atom(f"findread.{a}"))
    return c.build("start", ["top"])


def build_reduction_ata(s: ChannelSystem, q_f: str, w_f: Sequence[str]) -> Ata:
    """A purely universal automaton accepting the encodings of runs that reach ``(q_f, w_f)``."""
    if q_f == s.initial:
        raise ChannelSystemError("the goal state must differ from the initial state")
    if q_f not in s.states:
        raise ChannelSystemError(f"unknown goal state {q_f!r}")
    if unknown := set(w_f) - set(s.alphabet):
        raise ChannelSystemError(f"goal channel uses undeclared messages {sorted(unknown)}")
    parts = [
        _structure_automaton(s, q_f, w_f),
        _unit_automaton(s),
        _strict_automaton(s),
        _check_automaton(s),
    ]
    result = parts[0]
    for part in parts[1:]:
        result = combine(result, part, CombineMode.AND)
    logger.debug("reduction automaton has %d locations", len(result.locations))
    return result
