"""Ordered alphabets, projection, and partition-chain certificates."""

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fupcantor import alphabets as alph
from fupcantor import cantor, permutations as perm
from fupcantor.errors import (
    CertificateViolation,
    EnumerationTooLarge,
    NonpositiveInput,
    ShapeMismatch,
    ValidationError,
)


def test_space_cardinality():
    assert perm.permutation_space_cardinality(5, 3) == 60
    assert perm.permutation_space_cardinality(4, 4) == 24
    assert perm.permutation_space_cardinality(10, 1) == 10
    with pytest.raises(ValidationError):
        perm.permutation_space_cardinality(4, 5)


def test_enumeration_count_and_cap():
    assert len(list(perm.enumerate_permutations(5, 3))) == 60
    with pytest.raises(EnumerationTooLarge):
        list(perm.enumerate_permutations(20, 12))


def test_new_permutation_validation():
    with pytest.raises(ValidationError):
        perm.new_permutation(4, [0, 0])
    with pytest.raises(ValidationError):
        perm.new_permutation(4, [4])
    with pytest.raises(ValidationError):
        perm.new_permutation(4, [])


def test_metric_p_frozen():
    d = perm.metric_p
    assert d(perm.new_permutation(3, [0, 1]), perm.new_permutation(3, [1, 0])) == 2
    assert (
        d(perm.new_permutation(4, [0, 1, 2]), perm.new_permutation(4, [0, 2, 1]))
        == 2
    )
    with pytest.raises(ShapeMismatch):
        d(perm.new_permutation(4, [0, 1]), perm.new_permutation(4, [0, 1, 2]))


def test_project_frozen():
    a = perm.project(perm.new_permutation(3, [2, 0]))
    assert a == cantor.new_alphabet(3, [0, 2])


def test_fibers_have_constant_size():
    counts = {}
    for p in perm.enumerate_permutations(5, 3):
        counts.setdefault(perm.project(p), 0)
        counts[perm.project(p)] += 1
    assert len(counts) == alph.space_cardinality(5, 3)
    assert set(counts.values()) == {math.factorial(3)}


def test_projection_lemma_counterexample():
    """One disagreeing position can move the projected alphabet by two
    elements, so d(P(p1), P(p2)) <= d^p(p1, p2) is false in general;
    only the doubled comparison d <= 2 d^p holds."""
    p1 = perm.new_permutation(4, [0, 1])
    p2 = perm.new_permutation(4, [0, 2])
    dp = perm.metric_p(p1, p2)
    da = alph.metric(perm.project(p1), perm.project(p2))
    assert dp == 1 and da == 2
    assert da > dp  # the naive projection inequality fails here
    assert da <= 2 * dp  # the doubled form holds


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_projection_doubles_at_most(data):
    m = data.draw(st.integers(3, 6))
    a_card = data.draw(st.integers(1, m))
    draw_perm = lambda: perm.new_permutation(
        m,
        data.draw(
            st.permutations(range(m)).map(lambda v: tuple(v[:a_card]))
        ),
    )
    p1, p2 = draw_perm(), draw_perm()
    da = alph.metric(perm.project(p1), perm.project(p2))
    assert da <= 2 * perm.metric_p(p1, p2)


def test_lift_and_compare_exp_sum_5_3():
    f = lambda a: abs(alph.exp_sum(a, 1))
    rep = perm.lift_and_compare(f, 5, 3)
    assert rep.exp_equal
    assert abs(rep.exp_perm - rep.exp_alphabet) <= 1e-12
    assert rep.lip_alphabet == pytest.approx(0.5, abs=1e-12)
    # one Hamming step can swap out a digit entirely, while the alphabet
    # metric charges two for the same move: the lift pays exactly double
    # here, refuting any hope that projection is 1-Lipschitz
    assert rep.lip_perm == pytest.approx(2 * rep.lip_alphabet, abs=1e-12)
    assert not rep.lip_contracts
    assert rep.lip_at_most_double


def test_lift_preserves_expectation_6_3():
    f = lambda a: alph.exp_sum(a, 2)
    rep = perm.lift_and_compare(f, 6, 3)
    assert rep.exp_equal
    assert rep.lip_at_most_double


def test_prefix_chain_5_3():
    chain = perm.build_prefix_chain(5, 3)
    assert chain.num_points == 60
    assert len(chain.levels) == 4  # whole space + one level per position
    assert chain.step_bounds == (2.0, 2.0, 2.0)
    assert all(len(b) == 1 for b in chain.levels[-1])
    points = list(perm.enumerate_permutations(5, 3))
    length = perm.verify_length_certificate(points, perm.metric_p, chain)
    assert length == pytest.approx(2 * math.sqrt(3), abs=1e-12)


def test_prefix_chain_singleton_case():
    chain = perm.build_prefix_chain(3, 1)
    assert chain.num_points == 3
    assert chain.step_bounds == (2.0,)
    points = list(perm.enumerate_permutations(3, 1))
    length = perm.verify_length_certificate(points, perm.metric_p, chain)
    assert length == pytest.approx(2.0, abs=1e-15)


def test_certificate_rejects_corruption():
    chain = perm.build_prefix_chain(4, 2)
    points = list(perm.enumerate_permutations(4, 2))
    # corrupt one pairing by sending two sources to the same target
    key = next(iter(chain.pairings))
    pairs = list(chain.pairings[key])
    pairs[0] = (pairs[0][0], pairs[1][1])
    corrupted = perm.PartitionChain(
        num_points=chain.num_points,
        levels=chain.levels,
        step_bounds=chain.step_bounds,
        pairings={**chain.pairings, key: tuple(pairs)},
    )
    with pytest.raises(CertificateViolation, match="bijection"):
        perm.verify_length_certificate(points, perm.metric_p, corrupted)


def test_certificate_rejects_oversized_step():
    chain = perm.build_prefix_chain(4, 2)
    points = list(perm.enumerate_permutations(4, 2))
    # level-1 pairings swap the leading value, displacing points by 2;
    # claiming a bound of 1 there must be rejected
    tight = perm.PartitionChain(
        num_points=chain.num_points,
        levels=chain.levels,
        step_bounds=(1.0, 2.0),
        pairings=chain.pairings,
    )
    with pytest.raises(CertificateViolation, match="farther"):
        perm.verify_length_certificate(points, perm.metric_p, tight)
    with pytest.raises(NonpositiveInput):
        perm.verify_length_certificate(
            points,
            perm.metric_p,
            perm.PartitionChain(
                num_points=chain.num_points,
                levels=chain.levels,
                step_bounds=(2.0, 0.0),
                pairings=chain.pairings,
            ),
        )


def test_chain_json_roundtrip():
    chain = perm.build_prefix_chain(4, 2)
    doc = json.loads(json.dumps(perm.chain_to_json(chain)))
    back = perm.chain_from_json(doc)
    assert back.num_points == chain.num_points
    assert back.levels == chain.levels
    assert back.step_bounds == chain.step_bounds
    assert back.pairings == chain.pairings
    points = list(perm.enumerate_permutations(4, 2))
    assert perm.verify_length_certificate(
        points, perm.metric_p, back
    ) == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    with pytest.raises(ValidationError):
        perm.chain_from_json({"num_points": 3})


def test_metric_space_tail_bound_matches_alphabet_bound():
    # with the prefix-chain length 2 sqrt(A), the chain bound reproduces
    # the alphabet-space concentration bound exactly
    for a_card in (2, 3, 5):
        for lip in (0.5, 1.0, 2.0):
            for t in (0.0, 0.7, 3.0):
                chained = perm.metric_space_tail_bound(
                    2 * math.sqrt(a_card), lip, t
                )
                direct = alph.concentration_bound(a_card, lip, t)
                assert chained == pytest.approx(direct, abs=1e-15)
    assert perm.metric_space_tail_bound(2.0, 1.0, 0.0) == 1.0
