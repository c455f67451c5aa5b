"""Random alphabet space: enumeration, metric, concentration bounds."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from fupcantor import alphabets as alph
from fupcantor import cantor
from fupcantor.errors import (
    CapExceeded,
    NonpositiveLipschitz,
    ValidationError,
)


def test_space_cardinality_frozen():
    assert alph.space_cardinality(4, 2) == 6
    assert alph.space_cardinality(10, 5) == 252
    assert alph.space_cardinality(64, 8) == 4426165368


def test_enumerate_lexicographic_frozen():
    got = [a.digits for a in alph.enumerate_alphabets(4, 2)]
    assert got == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        list(alph.enumerate_alphabets(64, 8))


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 12), st.data())
def test_rank_unrank_roundtrip(m, data):
    a_card = data.draw(st.integers(1, m))
    total = alph.space_cardinality(m, a_card)
    rank = data.draw(st.integers(0, total - 1))
    a = alph.unrank_alphabet(m, a_card, rank)
    assert a.card_a == a_card
    assert alph.rank_alphabet(a) == rank


def test_rank_matches_enumeration_order():
    for rank, a in enumerate(alph.enumerate_alphabets(6, 3)):
        assert alph.rank_alphabet(a) == rank
        assert alph.unrank_alphabet(6, 3, rank) == a


def test_sampler_uniformity_chisquare():
    rng = np.random.default_rng(12345)
    total = alph.space_cardinality(6, 3)  # 20 cells
    counts = np.zeros(total)
    for _ in range(100_000):
        counts[alph.rank_alphabet(alph.sample_alphabet(6, 3, rng))] += 1
    p = stats.chisquare(counts).pvalue
    assert p > 0.001, f"sampler looks non-uniform, p={p}"


def test_metric_frozen():
    d = alph.metric
    assert d(cantor.new_alphabet(4, [0, 2]), cantor.new_alphabet(4, [0, 1])) == 2
    assert d(cantor.new_alphabet(4, [0, 1]), cantor.new_alphabet(4, [2, 3])) == 4
    a = cantor.new_alphabet(5, [1, 3])
    assert d(a, a) == 0


def test_metric_base_check():
    with pytest.raises(ValidationError):
        alph.metric(cantor.new_alphabet(4, [0, 1]), cantor.new_alphabet(5, [0, 1]))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_metric_axioms(data):
    m = data.draw(st.integers(3, 8))
    pick = lambda: cantor.new_alphabet(
        m, data.draw(st.sets(st.integers(0, m - 1), min_size=1, max_size=m))
    )
    a, b, c = pick(), pick(), pick()
    assert alph.metric(a, b) == alph.metric(b, a) >= 0
    assert (alph.metric(a, b) == 0) == (a == b)
    assert alph.metric(a, c) <= alph.metric(a, b) + alph.metric(b, c)


def test_exp_sum_frozen():
    assert alph.exp_sum(cantor.new_alphabet(4, [0, 2]), 1) == pytest.approx(0, abs=1e-15)
    a_full = cantor.new_alphabet(5, range(5))
    assert alph.exp_sum(a_full, 0) == pytest.approx(5)
    for freq in range(1, 5):
        assert abs(alph.exp_sum(a_full, freq)) <= 1e-13
    a = cantor.new_alphabet(6, [1, 4])
    direct = sum(np.exp(2j * np.pi * d * 2 / 6) for d in a.digits)
    assert alph.exp_sum(a, 2) == pytest.approx(direct, abs=1e-13)


def test_expectation_exact_frozen():
    space = alph.alphabet_space(4, 2)
    res = alph.expectation(lambda a: float(0 in a.digits), space)
    assert res.value == pytest.approx(0.5, abs=1e-15)
    assert res.mode == "exact"
    assert res.stderr == 0.0


def test_expectation_zero_mean_exponential_sums():
    # E over the space of exp_sum(., m) vanishes exactly for m != 0.
    for m, a_card in [(5, 2), (6, 3), (7, 4)]:
        space = alph.alphabet_space(m, a_card)
        for freq in range(1, m):
            res = alph.expectation(
                lambda a, f=freq: alph.exp_sum(a, f), space
            )
            assert abs(res.value) <= 1e-12, (m, a_card, freq)


def test_expectation_mc_mode():
    space = alph.alphabet_space(8, 3)
    f = lambda a: float(len(set(a.digits) & {0, 1}))
    exact = alph.expectation(f, space).value
    mc1 = alph.expectation(f, space, mode="mc", samples=4000, seed=9)
    mc2 = alph.expectation(f, space, mode="mc", samples=4000, seed=9)
    assert mc1.value == mc2.value  # deterministic under a fixed seed
    assert mc1.stderr > 0
    assert abs(mc1.value - exact) <= 5 * mc1.stderr + 1e-3


def test_lipschitz_swap_equals_exact_frozen():
    space = alph.alphabet_space(8, 3)
    f = lambda a: abs(alph.exp_sum(a, 1))
    swap = alph.lipschitz_norm(f, space, mode="swap")
    exact = alph.lipschitz_norm(f, space, mode="exact")
    assert swap == pytest.approx(exact, abs=1e-12)
    assert swap > 0


def test_lipschitz_constant_function_is_zero():
    space = alph.alphabet_space(6, 2)
    assert alph.lipschitz_norm(lambda a: 3.25, space, mode="swap") == 0.0
    assert alph.lipschitz_norm(lambda a: 3.25, space, mode="exact") == 0.0


def test_concentration_bound_frozen():
    # 2 exp(-t^2 / (16 A lip^2)) at A=4, lip=1, t=8: 2 e^{-1}
    assert alph.concentration_bound(4, 1.0, 8.0) == pytest.approx(
        2 * math.exp(-1), abs=1e-15
    )
    assert alph.concentration_bound(3, 2.0, 0.0) == 1.0  # capped at one
    with pytest.raises(NonpositiveLipschitz):
        alph.concentration_bound(4, 0.0, 1.0)


def test_tail_probability_basics():
    space = alph.alphabet_space(6, 2)
    f = lambda a: float(sum(a.digits))
    assert alph.tail_probability(f, space, 0.0) == 1.0
    assert alph.tail_probability(f, space, 1e9) == 0.0


def test_concentration_inequality_holds_exactly():
    # Exact tails under the measured Lipschitz bound, on a full space.
    space = alph.alphabet_space(7, 3)
    f = lambda a: abs(alph.exp_sum(a, 2))
    lip = alph.lipschitz_norm(f, space, mode="exact")
    for t in (0.5, 1.0, 2.0, 4.0):
        emp = alph.tail_probability(f, space, t)
        assert emp <= alph.concentration_bound(3, lip, t) + 1e-12


def test_good_set_member_frozen():
    a = cantor.new_alphabet(4, [0, 2])
    # |S_A(2)| = 2 > 1 * sqrt(2): not in the L=1 good set
    assert not alph.good_set_member(a, 1.0)
    # 2 <= 2 * sqrt(2): inside the L=2 good set
    assert alph.good_set_member(a, 2.0)


def test_good_set_complement_measure_brute_force():
    m, a_card, big_l = 5, 2, 1.2
    report = alph.good_set_complement_measure(m, a_card, big_l)
    outside = sum(
        not alph.good_set_member(a, big_l)
        for a in alph.enumerate_alphabets(m, a_card)
    )
    assert report.complement_measure == pytest.approx(
        outside / alph.space_cardinality(m, a_card), abs=1e-15
    )
    assert report.bound_chained == pytest.approx(
        min(1.0, 4 * m * math.exp(-big_l ** 2 / 64)), abs=1e-15
    )
    assert report.bound_per_freq == pytest.approx(
        min(1.0, 2 * (m - 1) * math.exp(-big_l ** 2 / 16)), abs=1e-15
    )


def test_wilson_interval_sane():
    lo, hi = alph.wilson_interval(50, 100)
    assert 0.0 <= lo < 0.5 < hi <= 1.0
    lo0, hi0 = alph.wilson_interval(0, 100)
    assert lo0 == 0.0 or lo0 == pytest.approx(0.0, abs=1e-12)
    assert hi0 < 0.1
    lo1, hi1 = alph.wilson_interval(100, 100)
    assert lo1 > 0.9
