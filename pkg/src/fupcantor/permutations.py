"""Ordered digit tuples, their projection to alphabets, and length
certificates for concentration on finite metric spaces.

Pi(M, A) is the space of injective maps {0, ..., A-1} -> {0, ..., M-1}
(ordered alphabets) with the Hamming metric d^p counting positions that
differ.  Forgetting order projects onto A(M, A) with fibers of constant
size A!, so the uniform measure pushes forward to the uniform measure
and lifted statistics keep their expectation while their Lipschitz norm
can only shrink (d^p dominates the symmetric-difference metric).

Concentration on a finite metric space is certified by a chain of
partitions, from the whole space down to singletons, where any two
sibling blocks admit a bijection moving points at most a_k at level k.
The certificate's length l = sqrt(sum a_k^2) yields the tail bound
2 exp(-t^2 / (4 l^2 lip^2)).  For Pi(M, A) the prefix chain (partition
by the first k values, siblings matched by swapping two values) gives
a_k = 2 at every level, hence l = 2 sqrt(A).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .cantor import Alphabet, new_alphabet
from .errors import (
    CertificateViolation,
    EnumerationTooLarge,
    NonpositiveInput,
    NonpositiveLipschitz,
    ShapeMismatch,
    ValidationError,
)
from . import alphabets as alph

PERM_CAP = 10 ** 6


@dataclass(frozen=True)
class Permutation:
    """Injective tuple of digits over base M; values[i] is the i-th digit."""

    base_m: int
    values: tuple[int, ...]


def new_permutation(m: int, values) -> Permutation:
    values = tuple(int(v) for v in values)
    if not values:
        raise ValidationError("permutation needs at least one value")
    if len(set(values)) != len(values):
        raise ValidationError(f"values must be distinct: {values}")
    for v in values:
        if not 0 <= v < m:
            raise ValidationError(f"value {v} outside range 0..{m - 1}")
    return Permutation(m, values)


def permutation_space_cardinality(m: int, a_card: int) -> int:
    """Falling factorial M! / (M-A)! as an exact integer."""
    if not 1 <= a_card <= m:
        raise ValidationError(f"need 1 <= A <= M, got A={a_card}, M={m}")
    return math.perm(m, a_card)


def enumerate_permutations(m: int, a_card: int, cap: int = PERM_CAP):
    """Yield Pi(M, A) in lexicographic value order."""
    total = permutation_space_cardinality(m, a_card)
    if total > cap:
        raise EnumerationTooLarge(f"P({m},{a_card}) = {total} exceeds cap {cap}")
    for values in itertools.permutations(range(m), a_card):
        yield Permutation(m, values)


def metric_p(p1: Permutation, p2: Permutation) -> int:
    """Hamming metric: number of positions where the tuples differ."""
    if p1.base_m != p2.base_m or len(p1.values) != len(p2.values):
        raise ShapeMismatch("operands must share base M and tuple length")
    return sum(1 for x, y in zip(p1.values, p2.values) if x != y)


def project(p: Permutation) -> Alphabet:
    """Forget order: the alphabet whose digits are the tuple's values."""
    return new_alphabet(p.base_m, sorted(p.values))


@dataclass(frozen=True)
class LiftReport:
    """Expectation and Lipschitz comparison of f against its lift f o P.

    lip_contracts records the strict comparison Lip(f o P) <= Lip(f).
    With the full symmetric difference as the alphabet metric and the
    Hamming count as the permutation metric, only the doubled form is a
    theorem (a single disagreeing position can move the image by two
    elements), so lip_at_most_double carries the provable comparison
    Lip(f o P) <= 2 Lip(f).
    """

    m: int
    a_card: int
    exp_alphabet: complex
    exp_perm: complex
    exp_equal: bool
    lip_alphabet: float
    lip_perm: float
    lip_contracts: bool
    lip_at_most_double: bool


def lift_and_compare(f, m: int, a_card: int, cap: int = PERM_CAP, tol: float = 1e-12) -> LiftReport:
    """Full-enumeration check that lifting preserves mean and contracts Lip."""
    perms = list(enumerate_permutations(m, a_card, cap))
    if len(perms) ** 2 > alph.PAIR_CAP:
        raise EnumerationTooLarge(
            f"all-pairs scan needs {len(perms) ** 2} pairs, cap {alph.PAIR_CAP}"
        )
    lifted = np.asarray([f(project(p)) for p in perms], dtype=np.complex128)
    exp_perm = complex(lifted.mean())
    space = alph.alphabet_space(m, a_card)
    exp_alphabet = alph.expectation(f, space, mode="exact").value
    lip_alphabet = alph.lipschitz_norm(f, space, mode="exact")
    lip_perm = 0.0
    for i in range(len(perms)):
        for j in range(i + 1, len(perms)):
            d = metric_p(perms[i], perms[j])
            lip_perm = max(lip_perm, abs(lifted[i] - lifted[j]) / d)
    return LiftReport(
        m=m,
        a_card=a_card,
        exp_alphabet=exp_alphabet,
        exp_perm=exp_perm,
        exp_equal=abs(exp_perm - exp_alphabet) <= tol,
        lip_alphabet=lip_alphabet,
        lip_perm=lip_perm,
        lip_contracts=lip_perm <= lip_alphabet + tol,
        lip_at_most_double=lip_perm <= 2.0 * lip_alphabet + tol,
    )


@dataclass(frozen=True)
class PartitionChain:
    """Nested partitions with explicit sibling bijections.

    levels[k] is a partition of point ranks (tuple of blocks, each a
    sorted tuple); levels[0] is the whole space and the last level is
    all singletons.  step_bounds[k-1] bounds the displacement of the
    bijection between any two siblings at level k.  pairings maps
    (level, block_i, block_j) with block_i < block_j (indices into
    levels[level]) to the matched point pairs, stored explicitly so the
    certificate serializes.
    """

    num_points: int
    levels: tuple[tuple[tuple[int, ...], ...], ...]
    step_bounds: tuple[float, ...]
    pairings: dict = field(compare=False)


def build_prefix_chain(m: int, a_card: int, cap: int = PERM_CAP) -> PartitionChain:
    """The prefix chain on Pi(M, A): level k fixes the first k values.

    Siblings differ only in the k-th value, r vs s; swapping the values
    r and s wherever they occur maps one block onto the other and moves
    at most two positions, so every step bound is 2.
    """
    perms = [p.values for p in enumerate_permutations(m, a_card, cap)]
    rank_of = {v: i for i, v in enumerate(perms)}
    n = len(perms)
    levels = [(tuple(range(n)),)]
    for k in range(1, a_card + 1):
        groups: dict[tuple[int, ...], list[int]] = {}
        for i, v in enumerate(perms):
            groups.setdefault(v[:k], []).append(i)
        blocks = tuple(tuple(groups[pref]) for pref in sorted(groups))
        levels.append(blocks)
    pairings: dict = {}
    for k in range(1, a_card + 1):
        prefixes = sorted({perms[b[0]][:k] for b in levels[k]})
        index_of = {perms[b[0]][:k]: i for i, b in enumerate(levels[k])}
        by_parent: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
        for pref in prefixes:
            by_parent.setdefault(pref[: k - 1], []).append(pref)
        for siblings in by_parent.values():
            for pref_p, pref_q in itertools.combinations(siblings, 2):
                r, s = pref_p[-1], pref_q[-1]
                bi, bj = index_of[pref_p], index_of[pref_q]
                pairs = []
                for x in levels[k][bi]:
                    swapped = tuple(
                        s if v == r else r if v == s else v for v in perms[x]
                    )
                    pairs.append((x, rank_of[swapped]))
                pairings[(k, bi, bj)] = tuple(pairs)
    return PartitionChain(
        num_points=n,
        levels=tuple(levels),
        step_bounds=tuple(2.0 for _ in range(a_card)),
        pairings=pairings,
    )


def verify_length_certificate(points, metric_fn, chain: PartitionChain) -> float:
    """Check a partition chain against Definition conditions and return
    its length sqrt(sum a_k^2).

    points[i] is the point with rank i; metric_fn(points[i], points[j])
    is the space's metric.  Raises CertificateViolation naming the
    level, blocks, and witness point on the first failure.
    """
    n = chain.num_points
    if len(points) != n:
        raise ShapeMismatch(f"expected {n} points, got {len(points)}")
    if len(chain.levels) != len(chain.step_bounds) + 1:
        raise ValidationError("need exactly one step bound per refinement level")
    for a_k in chain.step_bounds:
        if a_k <= 0:
            raise NonpositiveInput(f"step bounds must be > 0, got {a_k}")
    if len(chain.levels[0]) != 1 or tuple(chain.levels[0][0]) != tuple(range(n)):
        raise CertificateViolation("level 0 must be the single full block", level=0)
    for k, partition in enumerate(chain.levels):
        seen = sorted(x for block in partition for x in block)
        if seen != list(range(n)):
            raise CertificateViolation(
                f"level {k} is not a partition of the {n} points", level=k
            )
    if any(len(block) != 1 for block in chain.levels[-1]):
        raise CertificateViolation(
            "last level must consist of singletons", level=len(chain.levels) - 1
        )
    for k in range(1, len(chain.levels)):
        parent_of = {}
        for pi, block in enumerate(chain.levels[k - 1]):
            for x in block:
                parent_of[x] = pi
        parents: dict[int, list[int]] = {}
        for bi, block in enumerate(chain.levels[k]):
            ps = {parent_of[x] for x in block}
            if len(ps) != 1:
                raise CertificateViolation(
                    f"level {k} block {bi} straddles parent blocks",
                    level=k,
                    blocks=(bi,),
                )
            parents.setdefault(ps.pop(), []).append(bi)
        a_k = chain.step_bounds[k - 1]
        for siblings in parents.values():
            for bi, bj in itertools.combinations(sorted(siblings), 2):
                pairing = chain.pairings.get((k, bi, bj))
                if pairing is None:
                    raise CertificateViolation(
                        f"missing pairing for level {k} blocks {bi},{bj}",
                        level=k,
                        blocks=(bi, bj),
                    )
                src = [p for p, _ in pairing]
                dst = [q for _, q in pairing]
                if sorted(src) != sorted(chain.levels[k][bi]) or sorted(
                    dst
                ) != sorted(chain.levels[k][bj]):
                    raise CertificateViolation(
                        f"pairing for level {k} blocks {bi},{bj} is not a bijection",
                        level=k,
                        blocks=(bi, bj),
                    )
                for p, q in pairing:
                    if metric_fn(points[p], points[q]) > a_k + 1e-12:
                        raise CertificateViolation(
                            f"pairing moves point {p} farther than {a_k}",
                            level=k,
                            blocks=(bi, bj),
                            witness=p,
                        )
    return math.sqrt(sum(a * a for a in chain.step_bounds))


def metric_space_tail_bound(length_l: float, lip: float, t: float) -> float:
    """Tail bound min(1, 2 exp(-t^2 / (4 l^2 lip^2))) from a chain length l."""
    if length_l <= 0:
        raise NonpositiveInput(f"length must be > 0, got {length_l}")
    if lip <= 0:
        raise NonpositiveLipschitz(f"Lipschitz norm must be > 0, got {lip}")
    if t < 0:
        raise ValidationError(f"threshold t must be >= 0, got {t}")
    return min(1.0, 2.0 * math.exp(-(t * t) / (4.0 * length_l * length_l * lip * lip)))


def chain_to_json(chain: PartitionChain) -> dict:
    """JSON-serializable certificate document."""
    return {
        "num_points": chain.num_points,
        "levels": [[list(block) for block in level] for level in chain.levels],
        "step_bounds": list(chain.step_bounds),
        "pairings": [
            {
                "level": k,
                "block_p": bi,
                "block_q": bj,
                "pairs": [list(pq) for pq in pairs],
            }
            for (k, bi, bj), pairs in sorted(chain.pairings.items())
        ],
    }


def chain_from_json(doc: dict) -> PartitionChain:
    """Inverse of chain_to_json."""
    try:
        levels = tuple(
            tuple(tuple(int(x) for x in block) for block in level)
            for level in doc["levels"]
        )
        pairings = {
            (int(e["level"]), int(e["block_p"]), int(e["block_q"])): tuple(
                (int(p), int(q)) for p, q in e["pairs"]
            )
            for e in doc["pairings"]
        }
        return PartitionChain(
            num_points=int(doc["num_points"]),
            levels=levels,
            step_bounds=tuple(float(a) for a in doc["step_bounds"]),
            pairings=pairings,
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed certificate document: {exc}") from exc
