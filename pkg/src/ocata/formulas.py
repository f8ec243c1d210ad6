"""Positive boolean formulas over (location, reset) leaves and their DNF."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass
from functools import cache
from itertools import product


@dataclass(frozen=True, order=True)
class Atom:
    location: str
    reset: bool = False

    def __str__(self) -> str:
        return f"({self.location},reset)" if self.reset else f"({self.location})"


@dataclass(frozen=True)
class And:
    left: PosBool
    right: PosBool


@dataclass(frozen=True)
class Or:
    left: PosBool
    right: PosBool


PosBool = Atom | And | Or


def conj(first: PosBool, *rest: PosBool) -> PosBool:
    formula = first
    for part in rest:
        formula = And(formula, part)
    return formula


def disj(first: PosBool, *rest: PosBool) -> PosBool:
    formula = first
    for part in rest:
        formula = Or(formula, part)
    return formula


def leaves(formula: PosBool) -> Iterator[Atom]:
    match formula:
        case Atom():
            yield formula
        case And(left=left, right=right) | Or(left=left, right=right):
            yield from leaves(left)
            yield from leaves(right)


def locations_of(formula: PosBool) -> frozenset[str]:
    return frozenset(atom.location for atom in leaves(formula))


def has_and(formula: PosBool) -> bool:
    match formula:
        case Atom():
            return False
        case And():
            return True
        case Or(left=left, right=right):
            return has_and(left) or has_and(right)
    raise TypeError(f"not a formula: {formula!r}")


def has_or(formula: PosBool) -> bool:
    match formula:
        case Atom():
            return False
        case Or():
            return True
        case And(left=left, right=right):
            return has_or(left) or has_or(right)
    raise TypeError(f"not a formula: {formula!r}")


def dual(formula: PosBool) -> PosBool:
    """Swap every conjunction with a disjunction, keeping the leaves."""
    match formula:
        case Atom():
            return formula
        case And(left=left, right=right):
            return Or(dual(left), dual(right))
        case Or(left=left, right=right):
            return And(dual(left), dual(right))
    raise TypeError(f"not a formula: {formula!r}")


def evaluate(formula: PosBool, true_atoms: frozenset[Atom] | set[Atom]) -> bool:
    match formula:
        case Atom():
            return formula in true_atoms
        case And(left=left, right=right):
            return evaluate(left, true_atoms) and evaluate(right, true_atoms)
        case Or(left=left, right=right):
            return evaluate(left, true_atoms) or evaluate(right, true_atoms)
    raise TypeError(f"not a formula: {formula!r}")


@dataclass(frozen=True)
class Dnf:
    """Disjunction of conjuncts; absorbed and duplicate conjuncts are dropped."""

    conjuncts: tuple[frozenset[Atom], ...]

    def __iter__(self) -> Iterator[frozenset[Atom]]:
        return iter(self.conjuncts)

    def __len__(self) -> int:
        return len(self.conjuncts)


def _absorb(conjuncts: list[frozenset[Atom]]) -> tuple[frozenset[Atom], ...]:
    unique = list(dict.fromkeys(conjuncts))
    return tuple(c for c in unique if not any(other < c for other in unique))


def _expand(formula: PosBool) -> list[frozenset[Atom]]:
    match formula:
        case Atom():
            return [frozenset((formula,))]
        case Or(left=left, right=right):
            return _expand(left) + _expand(right)
        case And(left=left, right=right):
            return [a | b for a, b in product(_expand(left), _expand(right))]
    raise TypeError(f"not a formula: {formula!r}")


@cache
def to_dnf(formula: PosBool) -> Dnf:
    return Dnf(_absorb(_expand(formula)))


def format_formula(formula: PosBool) -> str:
    def render(f: PosBool, parent: int) -> str:
        match f:
            case Atom():
                return str(f)
            case And(left=left, right=right):
                text = f"{render(left, 2)} & {render(right, 3)}"
                return f"({text})" if parent > 2 else text
            case Or(left=left, right=right):
                text = f"{render(left, 1)} | {render(right, 2)}"
                return f"({text})" if parent > 1 else text
        raise TypeError(f"not a formula: {f!r}")

    return render(formula, 0)
