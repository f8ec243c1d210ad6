"""Fixed automata and seeded random generators shared by the test modules."""

import random
from fractions import Fraction

from ocata.automaton import Ata, Nta, NtaTransition, Rule, build_ata
from ocata.channels import ChannelConfig, ChannelRule, ChannelSystem, Op
from ocata.formulas import And, Atom, Or, PosBool, conj, disj
from ocata.guards import (
    CmpOp,
    Compare,
    Guard,
    GuardExpr,
    NotGuard,
    TrueGuard,
    elementary_cuts,
    guard_to_expr,
)
from ocata.semantics import ConfigSet, Configuration, TimedWord

EXAMPLE_ONE_SOURCE = """\
# no two letters exactly one time unit apart
ata {
  clock x;
  alphabet a;
  locations q0 q1 q2;
  init q0;
  accepting q0 q1;
  q0 a [tt] -> (q0) & (q1,reset);
  q1 a [x=1] -> (q2);
  q1 a [x!=1] -> (q1);
  q2 a [tt] -> (q2);
}
"""


def example_one() -> Ata:
    return build_ata(
        locations=["q0", "q1", "q2"],
        initial="q0",
        alphabet=["a"],
        accepting=["q0", "q1"],
        rules=[
            ("q0", "a", TrueGuard(), conj(Atom("q0"), Atom("q1", reset=True))),
            ("q1", "a", Compare(CmpOp.EQ, 1), Atom("q2")),
            ("q1", "a", Compare(CmpOp.NE, 1), Atom("q1")),
            ("q2", "a", TrueGuard(), Atom("q2")),
        ],
    )


def accept_all(alphabet: tuple[str, ...] = ("a",)) -> Ata:
    return build_ata(
        locations=["top"],
        initial="top",
        alphabet=alphabet,
        accepting=["top"],
        rules=[("top", letter, TrueGuard(), Atom("top")) for letter in alphabet],
    )


def worked_example() -> Ata:
    """q3 past 2 either restarts q1 or splits into q2 and q3; q1 and q2 idle."""
    return build_ata(
        locations=["q1", "q2", "q3"],
        initial="q1",
        alphabet=["a"],
        accepting=["q1"],
        rules=[
            ("q1", "a", TrueGuard(), Atom("q1")),
            ("q2", "a", TrueGuard(), Atom("q2")),
            ("q3", "a", Compare(CmpOp.LE, 2), Atom("q3")),
            (
                "q3",
                "a",
                NotGuard(Compare(CmpOp.LE, 2)),
                disj(Atom("q1", reset=True), conj(Atom("q2"), Atom("q3"))),
            ),
        ],
    )


TOY_LCS_SOURCE = """\
lcs
# write a, pad with b, then read the a back
state q0 q1 q2
alphabet a b
init q0
rule q0 -> q1 : write a
rule q1 -> q1 : write b
rule q1 -> q2 : read a
rule q2 -> q1 : eps
goal q2 : b
"""


def toy_system() -> ChannelSystem:
    return ChannelSystem(
        states=("q0", "q1", "q2"),
        initial="q0",
        alphabet=("a", "b"),
        rules=(
            ChannelRule("q0", Op.WRITE, "a", "q1"),
            ChannelRule("q1", Op.WRITE, "b", "q1"),
            ChannelRule("q1", Op.READ, "a", "q2"),
            ChannelRule("q2", Op.EPS, None, "q1"),
        ),
    )


def toy_rule(letter: str) -> ChannelRule:
    rule = toy_system().rule_for_letter(letter)
    assert rule is not None
    return rule


def timed(*events: tuple[str, str]) -> TimedWord:
    """``timed(("a", "3/10"), ("a", "1.3"))`` with exact rationals."""
    return TimedWord.of((letter, Fraction(stamp)) for letter, stamp in events)


# =================================================================================================
# Random generators
# =================================================================================================


def random_partition(rng: random.Random, cmax: int) -> list[Guard]:
    constants = {c for c in range(cmax + 1) if rng.random() < 0.6}
    pieces = elementary_cuts(constants)
    cells = [pieces[0]]
    for piece in pieces[1:]:
        if rng.random() < 0.5:
            cells[-1] = cells[-1].union(piece)
        else:
            cells.append(piece)
    return cells


def random_formula(rng: random.Random, locations: list[str], max_leaves: int = 3) -> PosBool:
    count = rng.randint(1, max_leaves)
    atoms = [Atom(rng.choice(locations), rng.random() < 0.4) for _ in range(count)]
    formula: PosBool = atoms[0]
    for atom in atoms[1:]:
        formula = And(formula, atom) if rng.random() < 0.5 else Or(formula, atom)
    return formula


def random_ata(
    rng: random.Random,
    *,
    max_locations: int = 3,
    cmax: int = 2,
    alphabet: tuple[str, ...] = ("a",),
    max_leaves: int = 3,
) -> Ata:
    locations = [f"q{i}" for i in range(rng.randint(1, max_locations))]
    accepting = [q for q in locations if rng.random() < 0.5]
    rules: dict[tuple[str, str], tuple[Rule, ...]] = {}
    for location in locations:
        for letter in alphabet:
            rules[(location, letter)] = tuple(
                Rule(cell, random_formula(rng, locations, max_leaves))
                for cell in random_partition(rng, cmax)
            )
    return Ata(tuple(locations), "q0", alphabet, frozenset(accepting), rules)


def random_value(rng: random.Random, cmax: int, denominator: int = 3) -> Fraction:
    return Fraction(rng.randint(0, (cmax + 2) * denominator), denominator)


def random_word(
    rng: random.Random,
    alphabet: tuple[str, ...] = ("a",),
    max_length: int = 4,
    denominator: int = 4,
    max_delay: int = 3,
) -> TimedWord:
    steps = [
        (rng.choice(alphabet), Fraction(rng.randint(0, max_delay * denominator), denominator))
        for _ in range(rng.randint(0, max_length))
    ]
    return TimedWord.from_delays(steps)


def random_configset(
    rng: random.Random, locations: tuple[str, ...], cmax: int, max_size: int = 4
) -> ConfigSet:
    return ConfigSet.of(
        Configuration(rng.choice(locations), random_value(rng, cmax))
        for _ in range(rng.randint(1, max_size))
    )


def random_guard_expr(rng: random.Random, cmax: int) -> GuardExpr:
    return guard_to_expr(rng.choice(random_partition(rng, cmax)))


def random_nta(rng: random.Random, alphabet: tuple[str, ...] = ("a",), cmax: int = 2) -> Nta:
    locations = ("p0", "p1")
    transitions = tuple(
        NtaTransition(
            rng.choice(locations),
            rng.choice(alphabet),
            random_guard_expr(rng, cmax),
            rng.choice(locations),
            rng.random() < 0.5,
        )
        for _ in range(rng.randint(1, 4))
    )
    accepting = frozenset(q for q in locations if rng.random() < 0.5)
    return Nta(locations, "p0", alphabet, accepting, transitions)


def random_channel_system(rng: random.Random) -> ChannelSystem:
    states = tuple(f"s{i}" for i in range(rng.randint(2, 3)))
    alphabet = ("a", "b")[: rng.randint(1, 2)]
    rules: set[ChannelRule] = set()
    for _ in range(rng.randint(1, 4)):
        op = rng.choice(list(Op))
        message = None if op is Op.EPS else rng.choice(alphabet)
        rules.add(ChannelRule(rng.choice(states), op, message, rng.choice(states[1:])))
    return ChannelSystem(states, states[0], alphabet, tuple(sorted(rules)))


def random_goal(rng: random.Random, s: ChannelSystem) -> ChannelConfig:
    channel = tuple(rng.choice(s.alphabet) for _ in range(rng.randint(0, 1)))
    return ChannelConfig(rng.choice(s.states[1:]), channel)
