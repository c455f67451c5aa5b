"""Digit alphabets and the discrete Cantor sets they generate.

An alphabet is a nonempty set of digits A inside {0, ..., M-1} with base
M >= 3.  Iterating k digit positions produces the discrete Cantor set

    C_k = { sum_j a_j M^j : a_j in the alphabet, 0 <= j < k }

inside Z_N with N = M^k.  Its cardinality is A^k and its dimension is
delta = log A / log M, mirroring the classical Cantor construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BaseTooSmall,
    DigitOutOfRange,
    DuplicateDigit,
    EmptyAlphabet,
    IndexOutOfRange,
    OrderTooLarge,
    ValidationError,
)

# Sizes N = M^k beyond this are refused (int64 indexing headroom).
N_CAP = 2 ** 40


@dataclass(frozen=True)
class Alphabet:
    """Base M together with a sorted tuple of distinct digits."""

    base_m: int
    digits: tuple[int, ...]

    @property
    def card_a(self) -> int:
        return len(self.digits)


def new_alphabet(m: int, digits) -> Alphabet:
    """Validate and canonicalize (sort) an alphabet."""
    if m < 3:
        raise BaseTooSmall(f"base M must be >= 3, got {m}")
    digits = [int(d) for d in digits]
    if not digits:
        raise EmptyAlphabet("alphabet needs at least one digit")
    if len(set(digits)) != len(digits):
        raise DuplicateDigit(f"digits contain duplicates: {sorted(digits)}")
    for d in digits:
        if not 0 <= d < m:
            raise DigitOutOfRange(f"digit {d} outside range 0..{m - 1}")
    return Alphabet(m, tuple(sorted(digits)))


def dimension(a: Alphabet) -> float:
    """Dimension delta = log A / log M, in (0, 1]."""
    return math.log(a.card_a) / math.log(a.base_m)


def parse_alphabet(text: str) -> Alphabet:
    """Parse the text form ``"M:d0,d1,..."``, e.g. ``"3:0,2"``.

    Raises ValidationError subclasses with position diagnostics.
    """
    text = text.strip()
    head, sep, tail = text.partition(":")
    if not sep:
        raise ValidationError(f"expected ':' separator in alphabet {text!r}")
    try:
        m = int(head)
    except ValueError:
        raise ValidationError(
            f"bad base {head!r} before ':' in alphabet {text!r}"
        ) from None
    parts = tail.split(",") if tail else []
    digits = []
    for pos, part in enumerate(parts):
        try:
            digits.append(int(part))
        except ValueError:
            raise ValidationError(
                f"bad digit {part!r} at position {pos} in alphabet {text!r}"
            ) from None
    return new_alphabet(m, digits)


def alphabet_to_string(a: Alphabet) -> str:
    """Inverse of parse_alphabet: ``"M:d0,d1,..."`` with sorted digits."""
    return f"{a.base_m}:{','.join(str(d) for d in a.digits)}"


@dataclass(frozen=True)
class CantorSet:
    """Order-k Cantor set: sorted member indices inside Z_N, N = M^k."""

    alphabet: Alphabet
    order_k: int
    n: int
    indices: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.indices.flags.writeable = False

    @property
    def cardinality(self) -> int:
        return int(self.indices.size)


def build_cantor(a: Alphabet, k: int, n_cap: int = N_CAP) -> CantorSet:
    """Enumerate C_k in increasing order.

    Built digit position by digit position: appending one position maps
    members x to x + d * M^j for each digit d, which keeps blocks sorted
    because every existing member is below M^j.
    """
    if k < 1:
        raise ValidationError(f"order k must be >= 1, got {k}")
    n = a.base_m ** k
    if n > n_cap:
        raise OrderTooLarge(f"N = {a.base_m}^{k} exceeds cap {n_cap}")
    digits = np.asarray(a.digits, dtype=np.int64)
    indices = np.zeros(1, dtype=np.int64)
    place = 1
    for _ in range(k):
        indices = (np.add.outer(digits * place, indices)).ravel()
        place *= a.base_m
    return CantorSet(a, k, n, indices)


def contains(c: CantorSet, idx: int) -> bool:
    """Membership test by base-M digit inspection, O(k)."""
    if not 0 <= idx < c.n:
        raise IndexOutOfRange(f"index {idx} outside 0..{c.n - 1}")
    allowed = set(c.alphabet.digits)
    m = c.alphabet.base_m
    idx = int(idx)
    for _ in range(c.order_k):
        if idx % m not in allowed:
            return False
        idx //= m
    return True
