import random
from itertools import chain, combinations

import pytest
from factories import random_formula

from ocata.formulas import (
    And,
    Atom,
    Or,
    conj,
    disj,
    dual,
    evaluate,
    format_formula,
    has_and,
    has_or,
    leaves,
    locations_of,
    to_dnf,
)

P, Q, R = Atom("p"), Atom("q"), Atom("r", reset=True)


def _assignments(atoms):
    atoms = sorted(set(atoms))
    return chain.from_iterable(combinations(atoms, k) for k in range(len(atoms) + 1))


def test_dnf_distributes_conjunction_over_disjunction():
    formula = And(Or(P, Q), R)
    assert set(to_dnf(formula)) == {frozenset({P, R}), frozenset({Q, R})}


def test_dnf_absorbs_supersets_and_duplicates():
    formula = disj(P, conj(P, Q), P)
    assert to_dnf(formula).conjuncts == (frozenset({P}),)


def test_reset_and_plain_atoms_are_different_leaves():
    assert len(to_dnf(Or(Atom("p"), Atom("p", reset=True)))) == 2


def test_dual_swaps_connectives():
    assert dual(And(P, Or(Q, R))) == Or(P, And(Q, R))
    assert dual(dual(And(P, Q))) == And(P, Q)


@pytest.mark.parametrize("seed", range(40))
def test_dnf_is_equivalent_to_formula(seed):
    rng = random.Random(seed)
    formula = random_formula(rng, ["p", "q", "r"], max_leaves=4)
    dnf = to_dnf(formula)
    for chosen in _assignments(leaves(formula)):
        truth = set(chosen)
        assert evaluate(formula, truth) == any(c <= truth for c in dnf)


@pytest.mark.parametrize("seed", range(40))
def test_dual_is_the_boolean_dual(seed):
    rng = random.Random(seed)
    formula = random_formula(rng, ["p", "q"], max_leaves=4)
    atoms = set(leaves(formula))
    for chosen in _assignments(atoms):
        truth = set(chosen)
        assert evaluate(dual(formula), truth) == (not evaluate(formula, atoms - truth))


def test_structure_helpers():
    formula = Or(P, And(Q, R))
    assert locations_of(formula) == frozenset({"p", "q", "r"})
    assert has_and(formula) and has_or(formula)
    assert not has_and(Or(P, Q))
    assert not has_or(And(P, Q))


@pytest.mark.parametrize(
    "formula,text",
    [
        (P, "(p)"),
        (R, "(r,reset)"),
        (And(P, R), "(p) & (r,reset)"),
        (Or(P, And(Q, R)), "(p) | (q) & (r,reset)"),
        (And(Or(P, Q), R), "((p) | (q)) & (r,reset)"),
    ],
)
def test_format_formula(formula, text):
    assert format_formula(formula) == text
