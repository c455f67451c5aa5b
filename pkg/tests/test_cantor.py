"""Alphabet and Cantor-set construction."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fupcantor import cantor
from fupcantor.errors import (
    BaseTooSmall,
    DigitOutOfRange,
    DuplicateDigit,
    EmptyAlphabet,
    IndexOutOfRange,
    OrderTooLarge,
    ValidationError,
)


def alphabets_strategy(max_m=12):
    return st.integers(3, max_m).flatmap(
        lambda m: st.sets(st.integers(0, m - 1), min_size=1, max_size=m).map(
            lambda digs: cantor.new_alphabet(m, digs)
        )
    )


def test_new_alphabet_sorts_and_freezes():
    a = cantor.new_alphabet(5, [3, 0, 1])
    assert a.digits == (0, 1, 3)
    assert a.base_m == 5
    assert a.card_a == 3
    with pytest.raises(AttributeError):
        a.base_m = 7


def test_new_alphabet_validation():
    with pytest.raises(BaseTooSmall):
        cantor.new_alphabet(2, [0])
    with pytest.raises(EmptyAlphabet):
        cantor.new_alphabet(4, [])
    with pytest.raises(DuplicateDigit):
        cantor.new_alphabet(4, [1, 1])
    with pytest.raises(DigitOutOfRange):
        cantor.new_alphabet(4, [4])
    with pytest.raises(DigitOutOfRange):
        cantor.new_alphabet(4, [-1])


def test_dimension_examples():
    assert cantor.dimension(cantor.new_alphabet(4, [0, 1])) == pytest.approx(0.5)
    assert cantor.dimension(cantor.new_alphabet(9, [0, 1, 2])) == pytest.approx(0.5)
    assert cantor.dimension(cantor.new_alphabet(5, range(5))) == 1.0
    assert cantor.dimension(cantor.new_alphabet(7, [3])) == 0.0


def test_parse_roundtrip():
    a = cantor.parse_alphabet("4:0,1")
    assert a == cantor.new_alphabet(4, [0, 1])
    assert cantor.alphabet_to_string(a) == "4:0,1"
    assert cantor.parse_alphabet(" 12:11,0 ").digits == (0, 11)


def test_parse_diagnostics():
    with pytest.raises(ValidationError, match="':'"):
        cantor.parse_alphabet("40,1")
    with pytest.raises(ValidationError, match="position 1"):
        cantor.parse_alphabet("4:0,x")
    with pytest.raises(ValidationError, match="base"):
        cantor.parse_alphabet("four:0")


def test_build_cantor_small_frozen():
    c = cantor.build_cantor(cantor.new_alphabet(3, [0, 2]), 2)
    assert c.n == 9
    # digit strings over {0,2} at places 1 and 3: {0,2} + {0,6}
    assert c.indices.tolist() == [0, 2, 6, 8]
    assert c.cardinality == 4


def test_build_cantor_sorted_and_sized():
    a = cantor.new_alphabet(5, [1, 4, 2])
    c = cantor.build_cantor(a, 3)
    assert c.cardinality == 3 ** 3
    assert np.all(np.diff(c.indices) > 0)
    assert c.indices[0] == 1 + 5 + 25  # smallest digit in every place
    assert c.indices[-1] == 4 + 20 + 100


def test_build_cantor_order_validation():
    a = cantor.new_alphabet(3, [0, 2])
    with pytest.raises(ValidationError):
        cantor.build_cantor(a, 0)
    with pytest.raises(OrderTooLarge):
        cantor.build_cantor(a, 2, n_cap=8)


def test_indices_immutable():
    c = cantor.build_cantor(cantor.new_alphabet(3, [0, 2]), 2)
    with pytest.raises(ValueError):
        c.indices[0] = 5


def test_contains_matches_enumeration():
    c = cantor.build_cantor(cantor.new_alphabet(6, [0, 2, 5]), 3)
    members = set(c.indices.tolist())
    for idx in range(c.n):
        assert cantor.contains(c, idx) == (idx in members)
    with pytest.raises(IndexOutOfRange):
        cantor.contains(c, c.n)
    with pytest.raises(IndexOutOfRange):
        cantor.contains(c, -1)


@settings(max_examples=40, deadline=None)
@given(alphabets_strategy(max_m=8), st.integers(1, 3))
def test_self_similarity(a, k):
    """C_{k+1} is the union of digit-shifted copies of C_k."""
    small = cantor.build_cantor(a, k)
    big = cantor.build_cantor(a, k + 1)
    place = a.base_m ** k
    shifted = np.sort(
        np.concatenate([small.indices + d * place for d in a.digits])
    )
    assert np.array_equal(big.indices, shifted)
    assert big.cardinality == a.card_a ** (k + 1)


@settings(max_examples=30, deadline=None)
@given(alphabets_strategy(max_m=10), st.integers(1, 3))
def test_indices_are_exactly_digit_strings(a, k):
    c = cantor.build_cantor(a, k)
    allowed = set(a.digits)
    for idx in c.indices.tolist():
        for _ in range(k):
            assert idx % a.base_m in allowed
            idx //= a.base_m
