"""Self-contained invariant suite behind the ``verify`` subcommand.

Each check exercises one proven property on concrete sizes and returns
quietly or raises with a counterexample.  Quick mode shrinks the
parameter grids to keep the whole run in seconds; full mode widens them
for a more convincing sweep.  The test suite covers the same ground and
more; this runner exists so a deployed install can be smoke-checked
without test infrastructure.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from . import alphabets as alph
from . import experiments, oqm, permutations, spectral
from .cantor import build_cantor, contains, dimension, new_alphabet
from .errors import CertificateViolation, FupError


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _assert(cond: bool, msg: str):
    if not cond:
        raise AssertionError(msg)


def check_cantor_sets(quick: bool) -> str:
    a = new_alphabet(3, [0, 2])
    _assert(abs(dimension(a) - math.log(2) / math.log(3)) < 1e-15, "dimension")
    c2 = build_cantor(a, 2)
    _assert(list(c2.indices) == [0, 2, 6, 8], "order-2 members")
    cases = [(3, (0, 2), 5), (5, (0, 3), 4)] if quick else [
        (3, (0, 2), 8),
        (5, (0, 3), 6),
        (4, (1, 2, 3), 5),
    ]
    for m, digits, k in cases:
        a = new_alphabet(m, digits)
        c = build_cantor(a, k)
        _assert(c.cardinality == len(digits) ** k, "cardinality mismatch")
        _assert(
            np.all(np.diff(c.indices) > 0), "indices must increase strictly"
        )
        members = set(int(x) for x in c.indices)
        for i in range(c.n):
            _assert(contains(c, i) == (i in members), f"membership at {i}")
        k1 = k // 2
        k2 = k - k1
        c1 = build_cantor(a, k1)
        cc2 = build_cantor(a, k2)
        composed = np.sort(
            (c1.indices[:, None] + (m ** k1) * cc2.indices[None, :]).ravel()
        )
        _assert(np.array_equal(composed, c.indices), "self-similarity")
    return f"{len(cases)} alphabets"


def check_fourier_transform(quick: bool) -> str:
    from .fourier import dft, idft

    sizes = [1, 4, 9, 27, 25, 12] if quick else [1, 4, 9, 27, 81, 25, 125, 49, 12, 30, 101]
    rng = np.random.default_rng(11)
    worst = 0.0
    for n in sizes:
        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = dft(n, u)
        kernel = np.exp(-2j * np.pi / n * np.outer(np.arange(n), np.arange(n)))
        ref = kernel @ u / math.sqrt(n)
        worst = max(worst, float(np.max(np.abs(v - ref))))
        _assert(worst <= 1e-10, f"naive mismatch at n={n}")
        _assert(abs(np.linalg.norm(v) - np.linalg.norm(u)) <= 1e-10 * max(1, np.linalg.norm(u)), "unitarity")
        _assert(np.max(np.abs(idft(n, v) - u)) <= 1e-10, "round trip")
    return f"max naive deviation {worst:.2e}"


def check_restricted_adjoint(quick: bool) -> str:
    from .fourier import restricted_apply, restricted_apply_adjoint

    rng = np.random.default_rng(5)
    for m, digits, k in [(3, (0, 2), 3), (4, (0, 1), 2)]:
        c = build_cantor(new_alphabet(m, digits), k)
        u = rng.standard_normal(c.n) + 1j * rng.standard_normal(c.n)
        v = rng.standard_normal(c.n) + 1j * rng.standard_normal(c.n)
        lhs = np.vdot(v, restricted_apply(c, u))
        rhs = np.vdot(restricted_apply_adjoint(c, v), u)
        _assert(abs(lhs - rhs) <= 1e-10, "adjoint identity")
    return "adjoint identity holds"


def check_closed_form_norms(quick: bool) -> str:
    for m in (3, 5, 7):
        r = spectral.r1_dense(new_alphabet(m, [1])).r_k
        _assert(abs(r - m ** -0.5) <= 1e-10, f"singleton r_1 for M={m}")
    for m in (3, 4):
        rep = spectral.rk_power(new_alphabet(m, range(m)), 2, seed=3)
        _assert(abs(rep.r_k - 1.0) <= 1e-9, f"full alphabet r_2 for M={m}")
    _assert(
        abs(spectral.r1_dense(new_alphabet(3, [0, 2])).r_k - 1.0) <= 1e-10,
        "r_1(3, {0,2})",
    )
    want = math.sqrt(0.5 + math.sqrt(2) / 4)
    _assert(
        abs(spectral.r1_dense(new_alphabet(4, [0, 1])).r_k - want) <= 1e-10,
        "r_1(4, {0,1})",
    )
    return "hand Gram eigenvalues reproduced"


def check_dense_power_agreement(quick: bool) -> str:
    ms = range(3, 7) if quick else range(3, 11)
    worst = 0.0
    for m in ms:
        for a_card in range(1, m + 1):
            for digits in itertools.combinations(range(m), a_card):
                a = new_alphabet(m, digits)
                dense = spectral.r1_dense(a).r_k
                power = spectral.rk_power(a, 1, seed=9).r_k
                worst = max(worst, abs(dense - power))
                _assert(worst <= 1e-8, f"dense/power gap at {m}:{digits}")
    return f"max |dense-power| = {worst:.2e}"


def check_norm_sandwich(quick: bool) -> str:
    ms = range(3, 6) if quick else range(3, 9)
    k_top = 2 if quick else 3
    for m in ms:
        for a_card in range(2, m):
            for digits in itertools.combinations(range(m), a_card):
                a = new_alphabet(m, digits)
                for k in range(1, k_top + 1):
                    lower, upper = spectral.envelopes(a, k)
                    r = spectral.rk_power(a, k, seed=1).r_k
                    _assert(
                        lower - 1e-9 <= r <= upper + 1e-9,
                        f"sandwich fails at {m}:{digits} k={k}: {r}",
                    )
    return "volume bound and lower envelope hold"


def check_submultiplicative(quick: bool) -> str:
    rng = np.random.default_rng(17)
    trials = 10 if quick else 40
    for _ in range(trials):
        m = int(rng.integers(3, 7))
        a_card = int(rng.integers(1, m + 1))
        a = alph.sample_alphabet(m, a_card, rng)
        k1 = int(rng.integers(1, 3))
        k2 = int(rng.integers(1, 3))
        r1 = spectral.rk_power(a, k1, seed=2).r_k
        r2 = spectral.rk_power(a, k2, seed=3).r_k
        r12 = spectral.rk_power(a, k1 + k2, seed=4).r_k
        _assert(
            r12 <= r1 * r2 + 1e-9,
            f"submultiplicativity fails at {m}:{a.digits} ({k1},{k2})",
        )
    return f"{trials} random cases"


def check_schur_domination(quick: bool) -> str:
    ms = range(3, 8) if quick else range(3, 13)
    for m in ms:
        for a_card in range(1, m + 1):
            for digits in itertools.combinations(range(m), a_card):
                a = new_alphabet(m, digits)
                g = spectral.gram_matrix(a).entries
                _assert(np.max(np.abs(g - g.conj().T)) <= 1e-12, "hermitian")
                eigs, _, _ = spectral._jacobi_eigenvalues(g)
                _assert(float(eigs[0]) >= -1e-10, "psd")
                r1 = spectral.r1_dense(a).r_k
                _assert(
                    r1 * r1 <= spectral.schur_bound(a) + 1e-12,
                    f"Schur bound fails at {m}:{digits}",
                )
    return "r_1^2 <= Schur row bound everywhere"


def check_alphabet_space(quick: bool) -> str:
    m, a_card = (5, 2) if quick else (6, 3)
    items = list(alph.enumerate_alphabets(m, a_card))
    _assert(len(items) == math.comb(m, a_card), "enumeration count")
    for r, a in enumerate(items):
        _assert(alph.rank_alphabet(a) == r, "rank")
        _assert(alph.unrank_alphabet(m, a_card, r) == a, "unrank")
    for a1 in items[:10]:
        for a2 in items[:10]:
            d = alph.metric(a1, a2)
            _assert(d == alph.metric(a2, a1), "symmetry")
            _assert((d == 0) == (a1 == a2), "identity")
            for a3 in items[:10]:
                _assert(
                    alph.metric(a1, a3) <= d + alph.metric(a2, a3),
                    "triangle inequality",
                )
    return f"space ({m},{a_card}) checked"


def check_exp_sum_statistics(quick: bool) -> str:
    m, a_card = (8, 3) if quick else (12, 4)
    space = alph.alphabet_space(m, a_card)
    for freq in range(1, m):
        mean = alph.expectation(lambda a: alph.exp_sum(a, freq), space).value
        _assert(abs(mean) <= 1e-12, f"nonzero mean at freq {freq}")
    lip = alph.lipschitz_norm(lambda a: alph.exp_sum(a, 1), space, mode="swap")
    _assert(lip <= 1.0 + 1e-12, f"Lipschitz norm {lip} above 1")
    t = 2.0 * math.sqrt(a_card)
    emp = alph.tail_probability(lambda a: alph.exp_sum(a, 1), space, t)
    _assert(
        emp <= alph.concentration_bound(a_card, max(lip, 1e-300), t) + 1e-12,
        "empirical tail above theorem bound",
    )
    return f"zero mean at {m - 1} frequencies, lip = {lip:.3f}"


def check_good_sets(quick: bool) -> str:
    m, a_card = (10, 3) if quick else (12, 4)
    rep = alph.good_set_complement_measure(m, a_card, 4.0)
    _assert(
        rep.complement_measure <= rep.bound_chained + 1e-12,
        "chained bound fails",
    )
    _assert(
        rep.complement_measure <= rep.bound_per_freq + 1e-12,
        "per-frequency bound fails",
    )
    return f"complement measure {rep.complement_measure:.4f}"


def check_permutation_projection(quick: bool) -> str:
    m, a_card = (5, 3) if quick else (6, 3)
    from collections import Counter

    fibers = Counter(
        permutations.project(p).digits
        for p in permutations.enumerate_permutations(m, a_card)
    )
    _assert(len(fibers) == math.comb(m, a_card), "projection misses alphabets")
    _assert(
        set(fibers.values()) == {math.factorial(a_card)},
        "fibers must all have size A!",
    )
    rep = permutations.lift_and_compare(
        lambda a: alph.exp_sum(a, 1), m, a_card
    )
    _assert(rep.exp_equal, "lifted expectation differs")
    _assert(
        rep.lip_at_most_double,
        "lifting inflated the Lipschitz norm beyond the provable factor 2",
    )
    return (
        f"fibers of size {math.factorial(a_card)}, lifted Lipschitz "
        f"{rep.lip_perm:.4f} <= 2 x {rep.lip_alphabet:.4f}"
    )


def check_partition_chain(quick: bool) -> str:
    m, a_card = (4, 2) if quick else (5, 3)
    chain = permutations.build_prefix_chain(m, a_card)
    points = list(permutations.enumerate_permutations(m, a_card))
    length = permutations.verify_length_certificate(
        points, permutations.metric_p, chain
    )
    _assert(
        abs(length - 2.0 * math.sqrt(a_card)) <= 1e-12,
        f"prefix chain length {length}",
    )
    # A corrupted pairing (two sources sent to one target) must be rejected.
    key = next(iter(chain.pairings))
    pairs = list(chain.pairings[key])
    if len(pairs) >= 2:
        bad = dict(chain.pairings)
        bad[key] = tuple([(pairs[0][0], pairs[1][1])] + pairs[1:])
        broken = permutations.PartitionChain(
            chain.num_points, chain.levels, chain.step_bounds, bad
        )
        try:
            permutations.verify_length_certificate(
                points, permutations.metric_p, broken
            )
        except CertificateViolation:
            pass
        else:
            raise AssertionError("corrupted certificate accepted")
    return f"length {length:.4f} certified"


def check_open_quantum_map(quick: bool) -> str:
    a = new_alphabet(3, [0, 2])
    k = 3 if quick else 4
    b = oqm.build_bn(a, k)
    norm = oqm.bn_norm(b, seed=3)
    _assert(norm <= 1.0 + 1e-9, f"norm {norm} above 1")
    mid = oqm.middle_factor(b)
    q = b.n // 3
    _assert(np.max(np.abs(mid[q : 2 * q, :])) == 0.0, "middle rows must vanish")
    _assert(np.max(np.abs(mid[:, q : 2 * q])) == 0.0, "middle cols must vanish")
    rng = np.random.default_rng(23)
    for _ in range(3):
        u = rng.standard_normal(b.n) + 1j * rng.standard_normal(b.n)
        _assert(
            np.max(np.abs(b.matrix @ u - oqm.apply_bn(b, u))) <= 1e-9,
            "dense and matrix-free application differ",
        )
    rad = oqm.spectral_radius(b, seed=5)
    _assert(rad.rho <= norm + 1e-6, "spectral radius above norm")
    full = oqm.build_bn(new_alphabet(3, [0, 1, 2]), 2)
    rad_full = oqm.spectral_radius(full, seed=5)
    _assert(abs(rad_full.rho - 1.0) <= 1e-6, "unitary map radius must be 1")
    return f"N={b.n}: norm {norm:.6f}, rho {rad.rho:.6f}"


def check_experiment_curves(quick: bool) -> str:
    m, a_card = (4, 2) if quick else (5, 2)
    point = experiments.expectation_experiment(m, a_card, k_max=2, seed=0)
    _assert(
        point.mean_beta_lower >= point.volume_bound - 1e-6,
        "mean exponent below volume bound",
    )
    rec = experiments.fupc_experiment(m, a_card, epsilon=0.2, k_max=2, seed=0)
    _assert(rec.meets_floor, "success fraction below theorem floor")
    return (
        f"mean beta {point.mean_beta_lower:.4f} >= "
        f"volume bound {point.volume_bound:.4f}"
    )


ALL_CHECKS = [
    ("cantor-sets", check_cantor_sets),
    ("fourier-transform", check_fourier_transform),
    ("restricted-adjoint", check_restricted_adjoint),
    ("closed-form-norms", check_closed_form_norms),
    ("dense-power-agreement", check_dense_power_agreement),
    ("norm-sandwich", check_norm_sandwich),
    ("submultiplicative", check_submultiplicative),
    ("schur-domination", check_schur_domination),
    ("alphabet-space", check_alphabet_space),
    ("exp-sum-statistics", check_exp_sum_statistics),
    ("good-sets", check_good_sets),
    ("permutation-projection", check_permutation_projection),
    ("partition-chain", check_partition_chain),
    ("open-quantum-map", check_open_quantum_map),
    ("experiment-curves", check_experiment_curves),
]


def run_checks(quick: bool = False) -> list[CheckResult]:
    results = []
    for name, fn in ALL_CHECKS:
        start = time.perf_counter()
        try:
            detail = fn(quick)
            passed = True
        except (AssertionError, FupError) as exc:
            detail = str(exc)
            passed = False
        results.append(
            CheckResult(name, passed, detail, time.perf_counter() - start)
        )
    return results
