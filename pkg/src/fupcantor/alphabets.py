"""The probability space of alphabets and concentration of measure on it.

A(M, A) is the set of all size-A digit subsets of {0, ..., M-1} with
the uniform measure and the symmetric-difference metric

    d(A1, A2) = card(A1 symdiff A2).

The statistic of interest is the exponential sum

    F(A) = sum_{l in A} exp(2 pi i m l / M)

whose expectation vanishes at every nonzero frequency and whose
Lipschitz norm is at most 1 (a one-digit swap moves two points of the
unit circle, distance 2, against metric distance 2).  Concentration of
measure then pins F near zero: the tail at distance t is at most
2 exp(-t^2 / (16 A lip^2)).  Alphabets where every nonzero frequency
obeys |F| <= L sqrt(A) form the good set; the complement is union
bounded by either 2(M-1) e^{-L^2/16} (per-frequency, sharp constant)
or 4 M e^{-L^2/64} (chained constant used by the covering argument).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .cantor import Alphabet, new_alphabet
from .errors import (
    BaseMismatch,
    BaseTooSmall,
    EnumerationTooLarge,
    IndexOutOfRange,
    NonpositiveInput,
    NonpositiveLipschitz,
    ValidationError,
)

ENUMERATION_CAP = 10 ** 7
# All-pairs scans (exact Lipschitz mode) are capped on pair count.
PAIR_CAP = 10 ** 7


@dataclass(frozen=True)
class AlphabetSpace:
    """Uniform measure on all size-A alphabets over base M."""

    m: int
    a_card: int
    cardinality: int


def space_cardinality(m: int, a_card: int) -> int:
    """Binomial count C(M, A) as an exact big integer."""
    if m < 3:
        raise BaseTooSmall(f"base M must be >= 3, got {m}")
    if not 0 <= a_card <= m:
        raise ValidationError(f"need 0 <= A <= M, got A={a_card}, M={m}")
    return math.comb(m, a_card)


def alphabet_space(m: int, a_card: int) -> AlphabetSpace:
    if a_card < 1:
        raise ValidationError(f"space of alphabets needs A >= 1, got {a_card}")
    return AlphabetSpace(m, a_card, space_cardinality(m, a_card))


def enumerate_alphabets(m: int, a_card: int, cap: int = ENUMERATION_CAP):
    """Yield all alphabets of A(M, A) in lexicographic digit order."""
    space = alphabet_space(m, a_card)
    if space.cardinality > cap:
        raise EnumerationTooLarge(
            f"C({m},{a_card}) = {space.cardinality} exceeds cap {cap}"
        )
    for digits in itertools.combinations(range(m), a_card):
        yield Alphabet(m, digits)


def rank_alphabet(a: Alphabet) -> int:
    """Position of an alphabet in the lexicographic enumeration."""
    m = a.base_m
    a_card = a.card_a
    r = 0
    prev = -1
    for i, d in enumerate(a.digits):
        for j in range(prev + 1, d):
            r += math.comb(m - 1 - j, a_card - 1 - i)
        prev = d
    return r


def unrank_alphabet(m: int, a_card: int, rank: int) -> Alphabet:
    """Inverse of rank_alphabet."""
    total = space_cardinality(m, a_card)
    if not 0 <= rank < total:
        raise IndexOutOfRange(f"rank {rank} outside 0..{total - 1}")
    digits = []
    j = 0
    remaining = a_card
    while remaining > 0:
        c = math.comb(m - 1 - j, remaining - 1)
        if rank < c:
            digits.append(j)
            remaining -= 1
        else:
            rank -= c
        j += 1
    return new_alphabet(m, digits)


def sample_alphabet(m: int, a_card: int, rng: np.random.Generator) -> Alphabet:
    """Uniform draw by partial Fisher-Yates over {0, ..., M-1}.

    Only the first A swap positions are realized (sparse table), so a
    draw costs O(A) regardless of M.
    """
    alphabet_space(m, a_card)
    swap: dict[int, int] = {}
    picked = []
    for i in range(a_card):
        j = int(rng.integers(i, m))
        vi = swap.get(i, i)
        vj = swap.get(j, j)
        swap[i], swap[j] = vj, vi
        picked.append(vj)
    return new_alphabet(m, picked)


def metric(a1: Alphabet, a2: Alphabet) -> int:
    """Symmetric-difference metric; operands must share the base."""
    if a1.base_m != a2.base_m:
        raise BaseMismatch(
            f"bases differ: {a1.base_m} vs {a2.base_m}"
        )
    return len(set(a1.digits) ^ set(a2.digits))


def exp_sum(a: Alphabet, freq: int) -> complex:
    """F(A) = sum over digits l of exp(2 pi i freq l / M)."""
    digits = np.asarray(a.digits, dtype=np.float64)
    return complex(np.exp(2j * np.pi * freq / a.base_m * digits).sum())


@dataclass(frozen=True)
class MeanResult:
    """Expectation of a statistic, exact or Monte Carlo with stderr."""

    value: complex
    stderr: float
    mode: str
    samples: int | None
    seed: int | None


def _exact_values(f, m: int, a_card: int, cap: int) -> np.ndarray:
    vals = [f(a) for a in enumerate_alphabets(m, a_card, cap)]
    return np.asarray(vals, dtype=np.complex128)


def _mc_values(f, m: int, a_card: int, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return np.asarray(
        [f(sample_alphabet(m, a_card, rng)) for _ in range(samples)],
        dtype=np.complex128,
    )


def expectation(
    f,
    space: AlphabetSpace,
    mode: str = "exact",
    samples: int | None = None,
    seed: int = 0,
    cap: int = ENUMERATION_CAP,
) -> MeanResult:
    """Mean of f over the space: full enumeration or seeded Monte Carlo."""
    if mode == "exact":
        vals = _exact_values(f, space.m, space.a_card, cap)
        return MeanResult(complex(vals.mean()), 0.0, "exact", None, None)
    if mode == "mc":
        if not samples or samples < 2:
            raise ValidationError("mc mode needs samples >= 2")
        vals = _mc_values(f, space.m, space.a_card, samples, seed)
        mean = complex(vals.mean())
        spread = float(np.sqrt(np.mean(np.abs(vals - mean) ** 2) * samples / (samples - 1)))
        return MeanResult(mean, spread / math.sqrt(samples), "mc", samples, seed)
    raise ValidationError(f"unknown mode {mode!r}")


def lipschitz_norm(
    f,
    space: AlphabetSpace,
    mode: str = "swap",
    cap: int = ENUMERATION_CAP,
    pair_cap: int = PAIR_CAP,
) -> float:
    """Lipschitz norm of f for the symmetric-difference metric.

    Swap mode scans only distance-2 neighbors (one digit exchanged),
    which suffices because any pair is joined by a chain of swaps
    realizing its distance.  Exact mode scans all pairs and exists to
    validate swap mode on small spaces.
    """
    m, a_card = space.m, space.a_card
    if mode == "swap":
        values = {
            a.digits: f(a) for a in enumerate_alphabets(m, a_card, cap)
        }
        best = 0.0
        for digits, v in values.items():
            inside = set(digits)
            for x in digits:
                rest = inside - {x}
                for y in range(m):
                    if y in inside:
                        continue
                    nb = tuple(sorted(rest | {y}))
                    best = max(best, abs(v - values[nb]) / 2.0)
        return best
    if mode == "exact":
        if space.cardinality ** 2 > pair_cap:
            raise EnumerationTooLarge(
                f"all-pairs scan needs {space.cardinality ** 2} pairs, cap {pair_cap}"
            )
        items = list(enumerate_alphabets(m, a_card, cap))
        vals = np.asarray([f(a) for a in items], dtype=np.complex128)
        sets = [set(a.digits) for a in items]
        best = 0.0
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                d = len(sets[i] ^ sets[j])
                best = max(best, abs(vals[i] - vals[j]) / d)
        return best
    raise ValidationError(f"unknown mode {mode!r}")


def tail_probability(
    f,
    space: AlphabetSpace,
    t: float,
    mode: str = "exact",
    samples: int | None = None,
    seed: int = 0,
    cap: int = ENUMERATION_CAP,
) -> float:
    """Measure of {|f - mean(f)| >= t}; the mean comes from the same mode."""
    if t < 0:
        raise ValidationError(f"threshold t must be >= 0, got {t}")
    if mode == "exact":
        vals = _exact_values(f, space.m, space.a_card, cap)
    elif mode == "mc":
        if not samples or samples < 1:
            raise ValidationError("mc mode needs samples >= 1")
        vals = _mc_values(f, space.m, space.a_card, samples, seed)
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    mean = vals.mean()
    return float(np.mean(np.abs(vals - mean) >= t))


def concentration_bound(a_card: int, lip: float, t: float) -> float:
    """Tail bound min(1, 2 exp(-t^2 / (16 A lip^2))) on alphabet space."""
    if lip <= 0:
        raise NonpositiveLipschitz(f"Lipschitz norm must be > 0, got {lip}")
    if a_card < 1:
        raise ValidationError(f"need A >= 1, got {a_card}")
    if t < 0:
        raise ValidationError(f"threshold t must be >= 0, got {t}")
    return min(1.0, 2.0 * math.exp(-(t * t) / (16.0 * a_card * lip * lip)))


def good_set_member(a: Alphabet, big_l: float) -> bool:
    """Whether |F(A)| <= L sqrt(A) at every frequency 1..M-1.

    Conjugate symmetry |F at -m| = |F at m| makes this range complete.
    """
    if big_l <= 0:
        raise NonpositiveInput(f"level L must be > 0, got {big_l}")
    digits = np.asarray(a.digits, dtype=np.float64)
    freqs = np.arange(1, a.base_m)
    sums = np.exp(2j * np.pi / a.base_m * np.outer(freqs, digits)).sum(axis=1)
    return bool(np.all(np.abs(sums) <= big_l * math.sqrt(a.card_a)))


@dataclass(frozen=True)
class GoodSetReport:
    """Complement measure of the good set next to both union bounds."""

    m: int
    a_card: int
    big_l: float
    complement_measure: float
    bound_chained: float    # 4 M exp(-L^2/64)
    bound_per_freq: float   # 2 (M-1) exp(-L^2/16)
    mode: str
    samples: int | None
    seed: int | None


def good_set_complement_measure(
    m: int,
    a_card: int,
    big_l: float,
    mode: str = "exact",
    samples: int | None = None,
    seed: int = 0,
    cap: int = ENUMERATION_CAP,
) -> GoodSetReport:
    """Measure of alphabets failing the good-set condition at level L."""
    if big_l <= 0:
        raise NonpositiveInput(f"level L must be > 0, got {big_l}")
    space = alphabet_space(m, a_card)
    threshold = big_l * math.sqrt(a_card)
    phases = np.exp(2j * np.pi / m * np.outer(np.arange(m), np.arange(1, m)))
    if mode == "exact":
        if space.cardinality > cap:
            raise EnumerationTooLarge(
                f"C({m},{a_card}) = {space.cardinality} exceeds cap {cap}"
            )
        members = np.zeros((space.cardinality, m), dtype=np.float64)
        for i, digits in enumerate(itertools.combinations(range(m), a_card)):
            members[i, list(digits)] = 1.0
        sums = members @ phases
        bad = np.any(np.abs(sums) > threshold, axis=1)
        measure = float(bad.mean())
        n_used = None
        seed_used = None
    elif mode == "mc":
        if not samples or samples < 1:
            raise ValidationError("mc mode needs samples >= 1")
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        bad_count = 0
        for _ in range(samples):
            a = sample_alphabet(m, a_card, rng)
            if not good_set_member(a, big_l):
                bad_count += 1
        measure = bad_count / samples
        n_used = samples
        seed_used = seed
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    return GoodSetReport(
        m=m,
        a_card=a_card,
        big_l=big_l,
        complement_measure=measure,
        bound_chained=min(1.0, 4.0 * m * math.exp(-big_l * big_l / 64.0)),
        bound_per_freq=min(1.0, 2.0 * (m - 1) * math.exp(-big_l * big_l / 16.0)),
        mode=mode,
        samples=n_used,
        seed=seed_used,
    )


def wilson_interval(successes: int, n: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ValidationError("interval needs n >= 1")
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class TailReport:
    """Empirical tail of a statistic on a threshold grid, with bounds."""

    t_grid: np.ndarray
    empirical: np.ndarray
    bound: np.ndarray
    mode: str
    samples: int | None
    seed: int | None
    bound_per_freq: np.ndarray | None = None
    bound_chained: np.ndarray | None = None
    ci_low: np.ndarray | None = None
    ci_high: np.ndarray | None = None


TAIL_CSV_COLUMNS = ["t", "empirical", "bound", "mode", "samples", "seed"]


def tail_report_rows(r: TailReport) -> list[list[str]]:
    """Serialize one TailReport as canonical CSV rows (one per threshold)."""
    rows = []
    for t, emp, b in zip(r.t_grid, r.empirical, r.bound):
        rows.append(
            [
                repr(float(t)),
                repr(float(emp)),
                repr(float(b)),
                r.mode,
                "" if r.samples is None else str(r.samples),
                "" if r.seed is None else str(r.seed),
            ]
        )
    return rows
