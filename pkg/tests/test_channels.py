import random
from fractions import Fraction

import pytest
from factories import random_channel_system, random_goal, timed, toy_rule, toy_system

from ocata.automaton import check_partition, is_purely_universal
from ocata.channels import (
    ChannelConfig,
    ChannelRule,
    ChannelSystem,
    EncodingCondition,
    Op,
    build_reduction_ata,
    check_run,
    decode_encoding,
    encode_computation,
    enumerate_runs,
    find_lossy_run,
    lossy_reachable,
    lossy_step,
    subseq,
    subsequences,
    validate_encoding,
)
from ocata.decision import check_empty
from ocata.errors import ChannelSystemError, InvalidRunError
from ocata.semantics import TimedWord, accepts

WRITE_A = toy_rule("q0.w_a.q1")
WRITE_B = toy_rule("q1.w_b.q1")
READ_A = toy_rule("q1.r_a.q2")
BACK = toy_rule("q2.eps.q1")

WRITE_THEN_READ = (
    (WRITE_A, ChannelConfig("q1", ("a",))),
    (READ_A, ChannelConfig("q2")),
)
PADDED = (
    (WRITE_A, ChannelConfig("q1", ("a",))),
    (WRITE_B, ChannelConfig("q1", ("b", "a"))),
    (READ_A, ChannelConfig("q2", ("b",))),
)
WRITE_THEN_READ_WORD = timed(
    ("q2", "0"), ("q1.r_a.q2", "1/3"), ("q1", "1"), ("q0.w_a.q1", "4/3"), ("a", "5/3"), ("q0", "2")
)


def _nudge(w: TimedWord, index: int, stamp: str) -> TimedWord:
    events = list(w.events)
    events[index] = (events[index][0], Fraction(stamp))
    return TimedWord.of(events)


class TestLossySemantics:
    @pytest.mark.parametrize(
        "u,w,expected",
        [("tata", "atlanta", True), ("", "ab", True), ("ab", "ba", False), ("aa", "a", False)],
    )
    def test_subseq(self, u, w, expected):
        assert subseq(u, w) is expected

    def test_subsequences(self):
        assert subsequences("ab") == {(), ("a",), ("b",), ("a", "b")}

    def test_epsilon_step_loses_anything(self):
        found = lossy_step(ChannelConfig("q2", ("a", "b")), BACK)
        assert {c.channel for c in found} == {(), ("a",), ("b",), ("a", "b")}
        assert {c.state for c in found} == {"q1"}

    def test_write_step(self):
        found = lossy_step(ChannelConfig("q0"), WRITE_A)
        assert found == {ChannelConfig("q1", ("a",)), ChannelConfig("q1")}

    def test_read_step_consumes_the_last_message(self):
        found = lossy_step(ChannelConfig("q1", ("b", "a")), READ_A)
        assert found == {ChannelConfig("q2"), ChannelConfig("q2", ("b",))}

    def test_inapplicable_steps_are_empty(self):
        assert lossy_step(ChannelConfig("q1"), READ_A) == frozenset()
        assert lossy_step(ChannelConfig("q2", ("a",)), WRITE_B) == frozenset()

    def test_steps_are_downward_closed(self):
        s = toy_system()
        for run in enumerate_runs(s, max_steps=2, channel_cap=2):
            current = run[-1][1] if run else ChannelConfig(s.initial)
            for rule in s.rules_from(current.state):
                found = lossy_step(current, rule)
                for config in found:
                    for smaller in subsequences(config.channel):
                        assert ChannelConfig(config.state, smaller) in found


class TestReachability:
    def test_write_then_read(self):
        s = toy_system()
        assert find_lossy_run(s, ChannelConfig("q2"), channel_cap=1) == WRITE_THEN_READ
        assert lossy_reachable(s, ChannelConfig("q2", ("b",)), channel_cap=3)

    def test_read_message_never_stays_behind(self):
        assert not lossy_reachable(toy_system(), ChannelConfig("q2", ("a",)), channel_cap=3)

    def test_channel_cap_bounds_the_search(self):
        target = ChannelConfig("q1", ("b", "b", "b", "a"))
        assert not lossy_reachable(toy_system(), target, channel_cap=3)
        assert lossy_reachable(toy_system(), target, channel_cap=4)

    def test_direct_epsilon_rule(self):
        s = ChannelSystem(("p", "r"), "p", (), (ChannelRule("p", Op.EPS, None, "r"),))
        assert lossy_reachable(s, ChannelConfig("r"), channel_cap=0)

    def test_check_run(self):
        s = toy_system()
        check_run(s, PADDED)
        with pytest.raises(InvalidRunError, match="not a lossy successor"):
            check_run(s, ((WRITE_A, ChannelConfig("q1", ("b",))),))
        foreign = ChannelRule("q0", Op.EPS, None, "q2")
        with pytest.raises(InvalidRunError, match="unknown rule"):
            check_run(s, ((foreign, ChannelConfig("q2")),))

    def test_enumerated_runs_are_valid(self):
        s = toy_system()
        runs = list(enumerate_runs(s, max_steps=3, channel_cap=2))
        assert () in runs and WRITE_THEN_READ in runs and PADDED in runs
        for run in runs:
            check_run(s, run)


class TestSystemValidation:
    def test_rules_may_not_target_the_initial_state(self):
        with pytest.raises(ChannelSystemError, match="targets the initial state"):
            ChannelSystem(("p", "r"), "p", (), (ChannelRule("r", Op.EPS, None, "p"),))

    def test_undeclared_names(self):
        with pytest.raises(ChannelSystemError, match="undeclared state"):
            ChannelSystem(("p",), "p", (), (ChannelRule("p", Op.EPS, None, "r"),))
        with pytest.raises(ChannelSystemError, match="undeclared message"):
            ChannelSystem(("p", "r"), "p", ("a",), (ChannelRule("p", Op.WRITE, "b", "r"),))
        with pytest.raises(ChannelSystemError, match="not declared"):
            ChannelSystem(("p",), "q", (), ())

    def test_messages_and_epsilon(self):
        with pytest.raises(ChannelSystemError):
            ChannelRule("p", Op.EPS, "a", "r")
        with pytest.raises(ChannelSystemError):
            ChannelRule("p", Op.READ, None, "r")

    def test_names_must_be_distinct(self):
        with pytest.raises(ChannelSystemError, match="pairwise distinct"):
            ChannelSystem(("p", "a"), "p", ("a",), ())

    def test_rule_letters(self):
        assert WRITE_A.letter == "q0.w_a.q1"
        assert BACK.letter == "q2.eps.q1"
        assert str(READ_A) == "q1 -> q2 : read a"
        assert toy_system().encoding_alphabet[:5] == ("q0", "q1", "q2", "a", "b")


class TestEncoding:
    def test_empty_computation(self):
        encoding = encode_computation((), toy_system())
        assert encoding.word == timed(("q0", "0"))
        assert encoding.length == 0

    def test_single_write(self):
        run = ((WRITE_A, ChannelConfig("q1", ("a",))),)
        encoding = encode_computation(run, toy_system())
        assert encoding.word == timed(("q1", "0"), ("q0.w_a.q1", "1/3"), ("a", "2/3"), ("q0", "1"))

    def test_single_epsilon_step(self):
        s = ChannelSystem(("p", "r"), "p", (), (ChannelRule("p", Op.EPS, None, "r"),))
        run = ((s.rules[0], ChannelConfig("r")),)
        assert encode_computation(run, s).word == timed(("r", "0"), ("p.eps.r", "1/2"), ("p", "1"))

    def test_write_then_read(self):
        encoding = encode_computation(WRITE_THEN_READ, toy_system())
        assert encoding.word == WRITE_THEN_READ_WORD
        assert [seg.state for seg in encoding.segments] == ["q0", "q1", "q2"]

    def test_surviving_messages_move_one_unit(self):
        encoding = encode_computation(PADDED, toy_system())
        assert str(encoding.word) == (
            "q2@0 q1.r_a.q2@1/4 b@1/2 q1@1 q1.w_b.q1@5/4 b@3/2 a@7/4 "
            "q1@2 q0.w_a.q1@9/4 a@11/4 q0@3"
        )

    def test_invalid_runs_are_refused(self):
        with pytest.raises(InvalidRunError):
            encode_computation(((READ_A, ChannelConfig("q2")),), toy_system())

    def test_decode(self):
        encoding = decode_encoding(WRITE_THEN_READ_WORD, toy_system())
        assert encoding.segments[1].rule == WRITE_A
        assert encoding.segments[1].channel == (("a", Fraction(5, 3)),)
        with pytest.raises(ChannelSystemError):
            decode_encoding(timed(("a", "0")), toy_system())


class TestValidation:
    def test_encodings_are_valid(self):
        s = toy_system()
        assert validate_encoding(WRITE_THEN_READ_WORD, s, "q2", ()).ok
        assert validate_encoding(encode_computation(PADDED, s).word, s, "q2", ["b"]).ok

    def test_wrong_goal(self):
        report = validate_encoding(WRITE_THEN_READ_WORD, toy_system(), "q1", ())
        assert report.condition is EncodingCondition.STRUCTURE
        report = validate_encoding(WRITE_THEN_READ_WORD, toy_system(), "q2", ["a"])
        assert report.condition is EncodingCondition.STRUCTURE

    def test_state_off_the_integer_grid(self):
        w = _nudge(WRITE_THEN_READ_WORD, 2, "9/10")
        report = validate_encoding(w, toy_system(), "q2", ())
        assert report.condition is EncodingCondition.TIMING
        assert report.step == 1

    def test_read_without_the_message(self):
        w = TimedWord.of(e for i, e in enumerate(WRITE_THEN_READ_WORD.events) if i != 4)
        report = validate_encoding(w, toy_system(), "q2", ())
        assert report.condition is EncodingCondition.READ_MOVE
        assert "read-move violated at step 2" in str(report)

    def test_broken_copy_after_a_read(self):
        w = _nudge(encode_computation(PADDED, toy_system()).word, 2, "5/8")
        report = validate_encoding(w, toy_system(), "q2", ["b"])
        assert report.condition is EncodingCondition.READ_MOVE
        assert report.step == 3

    def test_broken_copy_after_an_epsilon_step(self):
        run = (*PADDED, (BACK, ChannelConfig("q1", ("b",))))
        w = _nudge(encode_computation(run, toy_system()).word, 2, "5/8")
        report = validate_encoding(w, toy_system(), "q1", ["b"])
        assert report.condition is EncodingCondition.EPSILON_MOVE
        assert report.step == 4

    def test_broken_copy_after_a_write(self):
        w = _nudge(encode_computation(PADDED, toy_system()).word, 6, "15/8")
        report = validate_encoding(w, toy_system(), "q2", ["b"])
        assert report.condition is EncodingCondition.WRITE_MOVE
        assert report.step == 2


class TestReduction:
    def test_shape(self):
        a = build_reduction_ata(toy_system(), "q2", ())
        assert is_purely_universal(a)
        assert check_partition(a, strict=True).ok
        assert set(a.alphabet) == set(toy_system().encoding_alphabet)

    def test_goal_checks(self):
        s = toy_system()
        with pytest.raises(ChannelSystemError, match="differ from the initial"):
            build_reduction_ata(s, "q0", ())
        with pytest.raises(ChannelSystemError, match="unknown goal state"):
            build_reduction_ata(s, "q9", ())
        with pytest.raises(ChannelSystemError, match="undeclared messages"):
            build_reduction_ata(s, "q2", ["c"])

    def test_accepts_encodings(self):
        s = toy_system()
        assert accepts(build_reduction_ata(s, "q2", ()), WRITE_THEN_READ_WORD)
        padded = encode_computation(PADDED, s).word
        assert accepts(build_reduction_ata(s, "q2", ["b"]), padded)
        assert not accepts(build_reduction_ata(s, "q2", ()), padded)

    def test_rejects_broken_encodings(self):
        a = build_reduction_ata(toy_system(), "q2", ())
        assert not accepts(a, _nudge(WRITE_THEN_READ_WORD, 2, "9/10"))
        without_message = TimedWord.of(
            e for i, e in enumerate(WRITE_THEN_READ_WORD.events) if i != 4
        )
        assert not accepts(a, without_message)


def _perturb(rng: random.Random, w: TimedWord, s: ChannelSystem) -> TimedWord | None:
    events = list(w.events)
    messages = [i for i, (letter, _) in enumerate(events) if letter in s.alphabet]
    if not messages:
        return None
    i = rng.choice(messages)
    letter, stamp = events[i]
    match rng.choice(["drop", "swap", "earlier", "later"]):
        case "drop":
            del events[i]
        case "swap":
            events[i] = (next(b for b in s.alphabet if b != letter), stamp)
        case "earlier":
            events[i] = (letter, (events[i - 1][1] + stamp) / 2)
        case "later":
            events[i] = (letter, (stamp + events[i + 1][1]) / 2)
    return TimedWord.of(events)


@pytest.mark.slow
class TestReductionCrossCheck:
    def test_every_short_run_is_accepted(self):
        s = toy_system()
        automata = {}
        for run in enumerate_runs(s, max_steps=3, channel_cap=2):
            if not run:
                continue
            goal = run[-1][1]
            a = automata.setdefault(goal, build_reduction_ata(s, goal.state, goal.channel))
            w = encode_computation(run, s).word
            assert validate_encoding(w, s, goal.state, goal.channel).ok, run
            assert accepts(a, w), run

    def test_perturbed_words_agree(self):
        s = toy_system()
        rng = random.Random(11)
        runs = [run for run in enumerate_runs(s, max_steps=3, channel_cap=2) if run]
        automata = {}
        checked = 0
        while checked < 100:
            run = rng.choice(runs)
            w = _perturb(rng, encode_computation(run, s).word, s)
            if w is None:
                continue
            goal = run[-1][1]
            a = automata.setdefault(goal, build_reduction_ata(s, goal.state, goal.channel))
            expected = validate_encoding(w, s, goal.state, goal.channel).ok
            assert accepts(a, w) == expected, (run, w)
            checked += 1

    def test_emptiness_of_a_direct_step(self):
        s = ChannelSystem(("p", "r"), "p", ("a",), (ChannelRule("p", Op.EPS, None, "r"),))
        result = check_empty(build_reduction_ata(s, "r", ()), budget_seconds=120)
        assert not result.is_empty
        assert validate_encoding(result.witness, s, "r", ()).ok

    @pytest.mark.parametrize("seed", range(20))
    def test_emptiness_matches_reachability(self, seed):
        rng = random.Random(seed)
        s = random_channel_system(rng)
        goal = random_goal(rng, s)
        a = build_reduction_ata(s, goal.state, goal.channel)
        result = check_empty(a, pruning="global", budget_seconds=25)
        assert result.is_empty == (not lossy_reachable(s, goal, channel_cap=3))
        if not result.is_empty:
            assert validate_encoding(result.witness, s, goal.state, goal.channel).ok
