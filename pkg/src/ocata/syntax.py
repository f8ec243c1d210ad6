"""
Text formats for automata, timed words and lossy channel systems.

    ata {
      clock x;
      alphabet a;
      locations q0 q1 q2;
      init q0;
      accepting q0 q1;
      q0 a [tt] -> (q0) & (q1,reset);
      q1 a [x!=1] -> (q1);
      ...
    }

Words are whitespace separated ``letter@time`` items with absolute times
written as integers, fractions (``3/10``) or decimals (``0.3``). Comments start
with ``#`` and run to the end of the line in every format.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .automaton import Ata, Rule, require_partition
from .channels import ChannelConfig, ChannelRule, ChannelSystem, Op
from .errors import AtaSyntaxError, LcsSyntaxError, OcataSyntaxError, WordSyntaxError
from .formulas import And, Atom, Or, PosBool, format_formula
from .guards import (
    AndGuard,
    CmpOp,
    Compare,
    GuardExpr,
    NotGuard,
    OrGuard,
    TrueGuard,
    format_guard_expr,
    guard_to_expr,
)
from .semantics import TimedWord

KEYWORDS = frozenset({"ata", "clock", "alphabet", "locations", "init", "accepting", "tt", "reset"})

_TOKEN_RE = re.compile(
    r"""
    (?P<skip>[ \t\r]+|\#[^\n]*)
    |(?P<newline>\n)
    |(?P<number>\d+(?:/\d+|\.\d+)?)
    |(?P<ident>[A-Za-z_][A-Za-z0-9_.']*)
    |(?P<op>->|<=|>=|!=|[{}\[\]();,&|!<>=@:])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(
    text: str, error: type[OcataSyntaxError] = OcataSyntaxError, keep_newlines: bool = False
) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, position = 1, 0, 0
    while position < len(text):
        match = _TOKEN_RE.match(text, position)
        if match is None:
            column = position - line_start + 1
            raise error(f"unexpected character {text[position]!r}", line, column)
        kind = match.lastgroup or ""
        column = position - line_start + 1
        position = match.end()
        if kind == "newline":
            if keep_newlines:
                tokens.append(Token("newline", "\n", line, column))
            line, line_start = line + 1, position
        elif kind != "skip":
            tokens.append(Token(kind, match.group(), line, column))
    tokens.append(Token("eof", "", line, position - line_start + 1))
    return tokens


class _Parser:
    error: type[OcataSyntaxError] = OcataSyntaxError

    def __init__(self, text: str, keep_newlines: bool = False) -> None:
        self.tokens = tokenize(text, self.error, keep_newlines)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def fail(self, message: str, token: Token | None = None) -> OcataSyntaxError:
        token = token or self.current
        return self.error(message, token.line, token.column)

    def at(self, text: str) -> bool:
        return self.current.text == text and self.current.kind != "eof"

    def advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.current.text or "end of input"
            raise self.fail(f"expected {text!r}, found {found!r}")
        return self.advance()

    def name(self, what: str = "name") -> Token:
        token = self.current
        if token.kind != "ident":
            raise self.fail(f"expected {what}, found {token.text or 'end of input'!r}")
        if token.text in KEYWORDS:
            raise self.fail(f"{token.text!r} is a reserved word")
        return self.advance()

    def names_until(self, stop: str) -> list[Token]:
        found = []
        while not self.at(stop) and self.current.kind == "ident":
            found.append(self.name())
        return found


# =================================================================================================
# Automata
# =================================================================================================


class _AtaParser(_Parser):
    error = AtaSyntaxError

    def parse(self, strict: bool | None) -> Ata:
        start = self.expect("ata")
        self.expect("{")
        clock = "x"
        alphabet: list[Token] | None = None
        declared: list[Token] | None = None
        initial: Token | None = None
        accepting: list[Token] = []
        rows: list[tuple[Token, Token, GuardExpr, PosBool, list[Token]]] = []
        while not self.at("}"):
            if self.current.kind == "eof":
                raise self.fail("missing '}' at end of automaton")
            token = self.current
            match token.text:
                case "clock":
                    self.advance()
                    clock = self.name("clock name").text
                case "alphabet":
                    self.advance()
                    alphabet = self.names_until(";")
                case "locations":
                    self.advance()
                    declared = self.names_until(";")
                case "init":
                    self.advance()
                    initial = self.name("initial location")
                case "accepting":
                    self.advance()
                    accepting = self.names_until(";")
                case _:
                    rows.append(self._rule(clock))
            self.expect(";")
        self.expect("}")
        if self.current.kind != "eof":
            raise self.fail(f"unexpected {self.current.text!r} after automaton")
        if alphabet is None:
            raise self.fail("missing 'alphabet' declaration", start)
        if initial is None:
            raise self.fail("missing 'init' declaration", start)

        letters = [t.text for t in alphabet]
        if declared is not None:
            locations = list(dict.fromkeys(t.text for t in declared))
            known = set(locations)
            mentioned = [initial, *accepting]
            for source, _, _, _, targets in rows:
                mentioned += [source, *targets]
            for token in mentioned:
                if token.text not in known:
                    raise self.fail(f"undeclared location {token.text!r}", token)
        else:
            order = [initial, *accepting]
            for source, _, _, _, targets in rows:
                order += [source, *targets]
            locations = list(dict.fromkeys(t.text for t in order))

        table: dict[tuple[str, str], list[Rule]] = {}
        for source, letter, expr, formula, _ in rows:
            if letter.text not in letters:
                raise self.fail(f"letter {letter.text!r} is not in the alphabet", letter)
            rule = Rule.of(expr, formula, source.line)
            table.setdefault((source.text, letter.text), []).append(rule)
        ata = Ata(
            locations=tuple(locations),
            initial=initial.text,
            alphabet=tuple(letters),
            accepting=frozenset(t.text for t in accepting),
            rules={key: tuple(row) for key, row in table.items()},
            clock=clock,
        )
        require_partition(ata, strict)
        return ata

    def _rule(self, clock: str) -> tuple[Token, Token, GuardExpr, PosBool, list[Token]]:
        source = self.name("location")
        letter = self.name("letter")
        self.expect("[")
        expr = self._guard_or(clock)
        self.expect("]")
        self.expect("->")
        targets: list[Token] = []
        formula = self._formula_or(targets)
        return source, letter, expr, formula, targets

    def _guard_or(self, clock: str) -> GuardExpr:
        expr = self._guard_and(clock)
        while self.at("|"):
            self.advance()
            expr = OrGuard(expr, self._guard_and(clock))
        return expr

    def _guard_and(self, clock: str) -> GuardExpr:
        expr = self._guard_unary(clock)
        while self.at("&"):
            self.advance()
            expr = AndGuard(expr, self._guard_unary(clock))
        return expr

    def _guard_unary(self, clock: str) -> GuardExpr:
        if self.at("!"):
            self.advance()
            return NotGuard(self._guard_unary(clock))
        if self.at("("):
            self.advance()
            expr = self._guard_or(clock)
            self.expect(")")
            return expr
        if self.at("tt"):
            self.advance()
            return TrueGuard()
        token = self.current
        if token.kind != "ident" or token.text != clock:
            raise self.fail(f"expected a constraint on clock {clock!r}, found {token.text!r}")
        self.advance()
        op_token = self.current
        try:
            op = CmpOp(op_token.text)
        except ValueError:
            raise self.fail(f"expected a comparison, found {op_token.text!r}") from None
        self.advance()
        constant = self.current
        if constant.kind != "number" or not constant.text.isdigit():
            raise self.fail(f"guard constants are natural numbers, found {constant.text!r}")
        self.advance()
        return Compare(op, int(constant.text))

    def _formula_or(self, targets: list[Token]) -> PosBool:
        formula = self._formula_and(targets)
        while self.at("|"):
            self.advance()
            formula = Or(formula, self._formula_and(targets))
        return formula

    def _formula_and(self, targets: list[Token]) -> PosBool:
        formula = self._formula_leaf(targets)
        while self.at("&"):
            self.advance()
            formula = And(formula, self._formula_leaf(targets))
        return formula

    def _formula_leaf(self, targets: list[Token]) -> PosBool:
        self.expect("(")
        following = self.tokens[self.index + 1]
        if self.current.kind == "ident" and following.text in (")", ","):
            target = self.name("location")
            targets.append(target)
            reset = False
            if self.at(","):
                self.advance()
                self.expect("reset")
                reset = True
            self.expect(")")
            return Atom(target.text, reset)
        formula = self._formula_or(targets)
        self.expect(")")
        return formula


def parse_ata(text: str, strict: bool | None = None) -> Ata:
    """
    Parse an automaton and check that its guards partition every row.

    Raises AtaSyntaxError with a line and column, or PartitionError naming the
    offending rows and the lines of their rules.
    """
    return _AtaParser(text).parse(strict)


def print_ata(a: Ata) -> str:
    lines = [
        "ata {",
        f"  clock {a.clock};",
        f"  alphabet {' '.join(a.alphabet)};",
        f"  locations {' '.join(a.locations)};",
        f"  init {a.initial};",
        f"  accepting {' '.join(q for q in a.locations if q in a.accepting)};",
    ]
    for location in a.locations:
        for letter in a.alphabet:
            for rule in a.rules_for(location, letter):
                expr = rule.source if rule.source is not None else guard_to_expr(rule.guard)
                guard = format_guard_expr(expr, a.clock)
                lines.append(f"  {location} {letter} [{guard}] -> {format_formula(rule.formula)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# =================================================================================================
# Timed words
# =================================================================================================


class _WordParser(_Parser):
    error = WordSyntaxError

    def parse(self) -> TimedWord:
        events: list[tuple[str, Fraction]] = []
        previous = Fraction(0)
        while self.current.kind != "eof":
            letter = self.current
            if letter.kind != "ident":
                raise self.fail(f"expected a letter, found {letter.text!r}")
            self.advance()
            self.expect("@")
            stamp = self.current
            if stamp.kind != "number":
                raise self.fail(f"expected a time stamp, found {stamp.text!r}")
            self.advance()
            try:
                value = Fraction(stamp.text)
            except ZeroDivisionError:
                raise self.fail(f"malformed rational {stamp.text!r}", stamp) from None
            if value < previous:
                message = f"time {stamp.text} is smaller than the previous {previous}"
                raise self.fail(message, stamp)
            previous = value
            events.append((letter.text, value))
        return TimedWord(tuple(events))


def parse_word(text: str) -> TimedWord:
    return _WordParser(text).parse()


def print_word(w: TimedWord) -> str:
    return str(w)


# =================================================================================================
# Lossy channel systems
# =================================================================================================


@dataclass(frozen=True)
class LcsProblem:
    system: ChannelSystem
    goal: ChannelConfig


class _LcsParser(_Parser):
    error = LcsSyntaxError

    def __init__(self, text: str) -> None:
        super().__init__(text, keep_newlines=True)

    def skip_blank(self) -> None:
        while self.current.kind == "newline":
            self.advance()

    def end_of_line(self) -> None:
        if self.current.kind not in ("newline", "eof"):
            raise self.fail(f"unexpected {self.current.text!r} at end of line")
        self.skip_blank()

    def ident(self, what: str) -> str:
        if self.current.kind != "ident":
            found = self.current.text.strip() or "end of line"
            raise self.fail(f"expected {what}, found {found!r}")
        return self.advance().text

    def words(self) -> list[str]:
        found = []
        while self.current.kind == "ident":
            found.append(self.advance().text)
        return found

    def parse(self) -> LcsProblem:
        self.skip_blank()
        header = self.current
        if header.text != "lcs":
            raise self.fail("expected 'lcs' header")
        self.advance()
        self.end_of_line()
        states: list[str] = []
        alphabet: list[str] = []
        initial: str | None = None
        rules: list[ChannelRule] = []
        goal: ChannelConfig | None = None
        while self.current.kind != "eof":
            keyword = self.advance()
            match keyword.text:
                case "state":
                    states += self.words()
                case "alphabet":
                    alphabet += self.words()
                case "init":
                    initial = self.ident("initial state")
                case "rule":
                    rules.append(self._rule())
                case "goal":
                    state = self.ident("goal state")
                    channel: list[str] = []
                    if self.at(":"):
                        self.advance()
                        channel = self.words()
                    goal = ChannelConfig(state, tuple(channel))
                case _:
                    raise self.fail(f"unknown declaration {keyword.text!r}", keyword)
            self.end_of_line()
        if initial is None:
            raise self.fail("missing 'init' declaration", header)
        if goal is None:
            raise self.fail("missing 'goal' declaration", header)
        system = ChannelSystem(tuple(states), initial, tuple(alphabet), tuple(rules))
        return LcsProblem(system, goal)

    def _rule(self) -> ChannelRule:
        source = self.ident("source state")
        self.expect("->")
        target = self.ident("target state")
        self.expect(":")
        action = self.advance()
        match action.text:
            case "eps":
                return ChannelRule(source, Op.EPS, None, target)
            case "write" | "read":
                message = self.current
                if message.kind != "ident":
                    raise self.fail(f"expected a message after {action.text!r}")
                self.advance()
                return ChannelRule(source, Op(action.text), message.text, target)
        raise self.fail(f"expected 'write', 'read' or 'eps', found {action.text!r}", action)


def parse_lcs(text: str) -> LcsProblem:
    return _LcsParser(text).parse()


def print_lcs(problem: LcsProblem) -> str:
    s = problem.system
    lines = ["lcs", f"state {' '.join(s.states)}"]
    if s.alphabet:
        lines.append(f"alphabet {' '.join(s.alphabet)}")
    lines.append(f"init {s.initial}")
    lines.extend(f"rule {rule}" for rule in s.rules)
    goal = problem.goal
    lines.append(f"goal {goal.state} : {' '.join(goal.channel)}".rstrip())
    return "\n".join(lines) + "\n"
