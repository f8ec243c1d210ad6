import random
from fractions import Fraction

import pytest
from factories import random_ata, random_word, timed

from ocata.automaton import complement
from ocata.errors import TimedWordError
from ocata.semantics import (
    ConfigSet,
    Configuration,
    TimedWord,
    accepts,
    configuration_successors,
    delay,
    game_accepts,
    is_bad,
    next_options,
)


class TestTimedWord:
    def test_delays_and_absolute_times(self):
        w = TimedWord.from_delays([("a", "1/2"), ("b", 0), ("a", 2)])
        assert w.events == (("a", Fraction(1, 2)), ("b", Fraction(1, 2)), ("a", Fraction(5, 2)))
        assert w.delays() == [("a", Fraction(1, 2)), ("b", Fraction(0)), ("a", Fraction(2))]
        assert str(w) == "a@1/2 b@1/2 a@5/2"

    def test_decreasing_timestamps_are_rejected(self):
        with pytest.raises(TimedWordError):
            TimedWord.of([("a", 2), ("a", 1)])

    def test_negative_delay_is_rejected(self):
        with pytest.raises(TimedWordError):
            TimedWord.from_delays([("a", -1)])

    def test_unknown_letter(self, ex1):
        with pytest.raises(TimedWordError):
            accepts(ex1, timed(("b", "1")))


class TestConfigurations:
    def test_sets_are_deduplicated_and_sorted(self):
        p = ConfigSet.of([("q", 1), ("p", 2), ("q", 1)])
        assert p.items == (Configuration("p", Fraction(2)), Configuration("q", Fraction(1)))

    def test_delay(self):
        p = delay(ConfigSet.of([("q", Fraction(1, 3))]), Fraction(1, 2))
        assert p.items == (Configuration("q", Fraction(5, 6)),)
        with pytest.raises(TimedWordError):
            delay(p, -1)

    def test_next_options_follow_the_dnf(self, worked):
        options = next_options(worked, Configuration("q3", Fraction(5, 2)), "a")
        assert set(options) == {
            frozenset({Configuration("q1", Fraction(0))}),
            frozenset({Configuration("q2", Fraction(5, 2)), Configuration("q3", Fraction(5, 2))}),
        }

    def test_successors_combine_every_choice(self, worked):
        p = ConfigSet.of([("q3", Fraction(5, 2)), ("q3", Fraction(11, 4))])
        found = configuration_successors(p, "a", 0, worked)
        assert len(found) == 4
        assert ConfigSet.of([("q1", 0)]) in found

    def test_is_bad(self, ex1):
        assert is_bad(ConfigSet.of([("q0", 0), ("q1", 1)]), ex1)
        assert not is_bad(ConfigSet.of([("q0", 0), ("q2", 1)]), ex1)
        assert is_bad(ConfigSet(), ex1)


class TestAcceptance:
    def test_example_words(self, ex1):
        assert accepts(ex1, timed(("a", "3/10"), ("a", "7/10")))
        assert not accepts(ex1, timed(("a", "3/10"), ("a", "13/10")))
        assert accepts(ex1, TimedWord())

    def test_letters_at_the_same_instant(self, ex1):
        assert accepts(ex1, timed(("a", "1"), ("a", "1"), ("a", "3/2")))
        assert not accepts(ex1, timed(("a", "1"), ("a", "1"), ("a", "2")))

    def test_worked_example_restarts(self, worked):
        assert accepts(worked, timed(("a", "1")))
        assert accepts(worked, timed(("a", "1"), ("a", "5/2")))

    def test_complement_and_oracle_agree_on_random_instances(self):
        rng = random.Random(2024)
        for _ in range(1000):
            a = random_ata(rng, cmax=2, max_leaves=2)
            w = random_word(rng, max_length=3)
            accepted = accepts(a, w)
            assert accepted != accepts(complement(a), w), (a, w)
            assert accepted == game_accepts(a, w), (a, w)

    @pytest.mark.parametrize("seed", range(25))
    def test_oracle_with_two_letters(self, seed):
        rng = random.Random(seed)
        a = random_ata(rng, cmax=1, alphabet=("a", "b"))
        for _ in range(10):
            w = random_word(rng, alphabet=("a", "b"), max_length=3)
            assert accepts(a, w) == game_accepts(a, w)
