"""Restriction-operator norms r_k and exponent lower bounds.

The central object is the Cantor-restricted Fourier operator
T = 1_C F_N 1_C with C = C_k(M, alphabet) and N = M^k.  Its operator
norm r_k controls the uncertainty exponent through

    beta_k = -log(r_k) / (k log M),

and submultiplicativity r_{k1+k2} <= r_{k1} r_{k2} makes every beta_k a
certified lower bound for the limiting exponent, so the best available
bound is the max over computed orders.

Two independent routes compute r_k.  The dense route diagonalizes the
A x A Gram matrix of restricted Fourier rows with cyclic Jacobi
rotations (k = 1 only).  The iterative route runs power iteration on
T* T; for small Cantor sets the active A^k x A^k block of F_N is
materialized so each step is one dense mat-vec, otherwise steps go
through the full-size FFT with masking.  Both routes are exposed so
they can be checked against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cantor import (
    N_CAP,
    Alphabet,
    CantorSet,
    alphabet_to_string,
    build_cantor,
    dimension,
)
from .errors import (
    DenseCapExceeded,
    InvariantViolation,
    ShapeMismatch,
    TrivialAlphabet,
    ValidationError,
)
from .fourier import _transform

# Jacobi diagonalization is refused above this matrix side.
DENSE_CAP = 512
# Power-iteration steps use a materialized Cantor block up to this size.
BLOCK_CAP = 1024
MAX_POWER_ITER = 100_000
# Sweep-path subspace iteration carries this many vectors at once; the
# width lets the top Ritz value converge at the gap to the ninth
# singular value, stepping over the tight top clusters these operators
# often have (where a single power vector's Rayleigh quotient stalls).
_SIM_WIDTH = 8
# Squarings used by the trace-power stopping estimate; 2^11 powers push
# the multiplicity overshoot factor below 8^(1/2048) - 1 < 1.1e-3.
_RITZ_SQUARINGS = 11
# r_k is clamped here before taking logs.
R_FLOOR = 1e-300

_JACOBI_OFF_TOL = 1e-13
_JACOBI_MAX_SWEEPS = 60


@dataclass(frozen=True)
class GramMatrix:
    """Gram matrix of restricted Fourier rows, indexed by alphabet digits."""

    alphabet: Alphabet
    entries: np.ndarray

    def __post_init__(self):
        self.entries.flags.writeable = False


@dataclass(frozen=True)
class SpectralReport:
    """One computed restriction norm with its provenance."""

    alphabet: Alphabet
    k: int
    r_k: float
    beta_k: float
    iterations: int
    residual: float
    method: str


SPECTRAL_CSV_COLUMNS = [
    "m",
    "alphabet",
    "k",
    "r_k",
    "beta_k",
    "method",
    "residual",
    "iterations",
]


def spectral_report_row(r: SpectralReport) -> list[str]:
    """Serialize one report as the canonical CSV row."""
    return [
        str(r.alphabet.base_m),
        alphabet_to_string(r.alphabet),
        str(r.k),
        repr(float(r.r_k)),
        repr(float(r.beta_k)),
        r.method,
        repr(float(r.residual)),
        str(r.iterations),
    ]


def gram_matrix(a: Alphabet) -> GramMatrix:
    """Entries F_jk = (1/M) sum_{l in alphabet} exp(2 pi i (k-j) l / M).

    Hermitian positive semidefinite with constant diagonal A/M; its
    largest eigenvalue is r_1^2.
    """
    m = a.base_m
    digits = np.asarray(a.digits, dtype=np.int64)
    diff = digits[None, :] - digits[:, None]
    phase = np.exp(2j * np.pi / m * np.multiply.outer(diff, digits).astype(np.float64))
    entries = phase.sum(axis=2) / m
    return GramMatrix(a, entries)


def _jacobi_eigenvalues(h: np.ndarray, off_tol: float = _JACOBI_OFF_TOL):
    """Cyclic Jacobi on a Hermitian matrix; returns (eigs, rotations, off).

    Each rotation annihilates one off-diagonal pair with a unitary
    plane rotation whose phase absorbs the complex argument of the
    entry.  Sweeps repeat until the off-diagonal Frobenius norm falls
    below off_tol.
    """
    h = np.array(h, dtype=np.complex128)
    n = h.shape[0]
    if n == 1:
        return np.array([h[0, 0].real]), 0, 0.0
    skip = off_tol / (n * n)
    rotations = 0
    off = _off_norm(h)
    for _ in range(_JACOBI_MAX_SWEEPS):
        if off <= off_tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = h[p, q]
                absg = abs(g)
                if absg <= skip:
                    continue
                u = g / absg
                tau = (h[p, p].real - h[q, q].real) / (2.0 * absg)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = -math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = h[:, p].copy()
                col_q = h[:, q].copy()
                h[:, p] = c * col_p - s * np.conj(u) * col_q
                h[:, q] = s * u * col_p + c * col_q
                row_p = h[p, :].copy()
                row_q = h[q, :].copy()
                h[p, :] = c * row_p - s * u * row_q
                h[q, :] = s * np.conj(u) * row_p + c * row_q
                h[p, q] = 0.0
                h[q, p] = 0.0
                h[p, p] = h[p, p].real
                h[q, q] = h[q, q].real
                rotations += 1
        off = _off_norm(h)
    if off > off_tol:
        raise InvariantViolation(
            f"Jacobi sweeps stalled with off-diagonal norm {off:.3e}"
        )
    return np.sort(np.diag(h).real), rotations, off


def _off_norm(h: np.ndarray) -> float:
    d = h - np.diag(np.diag(h))
    return float(np.linalg.norm(d))


def _beta_from_r(r: float, k: int, m: int) -> float:
    return -math.log(max(r, R_FLOOR)) / (k * math.log(m)) + 0.0


def r1_dense(a: Alphabet, dense_cap: int = DENSE_CAP) -> SpectralReport:
    """r_1 as the square root of the top Gram eigenvalue (Jacobi route)."""
    if a.card_a > dense_cap:
        raise DenseCapExceeded(
            f"alphabet size {a.card_a} exceeds dense cap {dense_cap}"
        )
    eigs, rotations, off = _jacobi_eigenvalues(gram_matrix(a).entries)
    lam = max(float(eigs[-1]), 0.0)
    r1 = math.sqrt(lam)
    return SpectralReport(
        alphabet=a,
        k=1,
        r_k=r1,
        beta_k=_beta_from_r(r1, 1, a.base_m),
        iterations=rotations,
        residual=off,
        method="dense",
    )


def _outer_mod(idx: np.ndarray, n: int) -> np.ndarray:
    # Pairwise products mod n without int64 overflow (n may reach 2^40).
    x = idx[:, None]
    y_hi, y_lo = np.divmod(idx[None, :], 1 << 20)
    part = (x * y_hi) % n
    return ((part << 20) % n + x * y_lo) % n


def cantor_block(c: CantorSet) -> np.ndarray:
    """Active block of F_N on C x C: exp(-2 pi i x y / N) / sqrt(N).

    Symmetric (not Hermitian); its singular values are those of the
    restricted operator.
    """
    mod = _outer_mod(c.indices, c.n)
    return np.exp(-2j * np.pi / c.n * mod.astype(np.float64)) / math.sqrt(c.n)


def _block_applier(c: CantorSet):
    block = cantor_block(c)
    block_conj = np.conj(block)

    def hx(x):
        return block_conj @ (block @ x)

    return hx


def _fft_applier(c: CantorSet):
    idx = c.indices
    n = c.n

    def hx(x):
        full = np.zeros(n, dtype=np.complex128)
        full[idx] = x
        w = _transform(full, -1)
        inner = np.zeros(n, dtype=np.complex128)
        inner[idx] = w[idx]
        z = _transform(inner, +1)
        return z[idx] / n

    return hx


def _power_run(hx, dim: int, rng, tol: float, max_iter: int):
    """One power-iteration run on a Hermitian PSD operator.

    Stops when the relative change of the Rayleigh quotient drops to
    tol; the quotient is non-decreasing for PSD operators, so the last
    value is the best available lower estimate of the top eigenvalue.
    """
    x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    x /= np.linalg.norm(x)
    lam_prev = None
    lam = 0.0
    rel = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        y = hx(x)
        lam = float(np.real(np.vdot(x, y)))
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            return 0.0, it, 0.0
        x = y / ny
        if lam_prev is not None:
            rel = abs(lam - lam_prev) / max(abs(lam), R_FLOOR)
            if rel <= tol:
                break
        lam_prev = lam
    return lam, it, rel


def rk_power(
    a: Alphabet,
    k: int,
    tol: float = 1e-12,
    seed: int = 0,
    max_iter: int = MAX_POWER_ITER,
    n_cap: int = N_CAP,
    block_cap: int = BLOCK_CAP,
) -> SpectralReport:
    """r_k by power iteration on T* T, two independent restarts.

    Restart seeds derive from the given seed; the larger Rayleigh
    quotient wins.  The reported residual is the winning run's final
    relative change (residual > tol means the iteration cap was hit;
    this is reported, never raised).
    """
    c = build_cantor(a, k, n_cap)
    if c.cardinality <= block_cap:
        hx = _block_applier(c)
    else:
        hx = _fft_applier(c)
    dim = c.cardinality
    best_lam = -math.inf
    best_rel = math.inf
    total_iters = 0
    for child in np.random.SeedSequence(seed).spawn(2):
        rng = np.random.default_rng(child)
        lam, it, rel = _power_run(hx, dim, rng, tol, max_iter)
        total_iters += it
        if lam > best_lam:
            best_lam = lam
            best_rel = rel
    r_k = math.sqrt(max(best_lam, 0.0))
    return SpectralReport(
        alphabet=a,
        k=k,
        r_k=r_k,
        beta_k=_beta_from_r(r_k, k, a.base_m),
        iterations=total_iters,
        residual=best_rel,
        method="power",
    )


def rk_power_many(
    alphabets,
    k: int,
    seeds,
    tol: float = 1e-12,
    max_iter: int = MAX_POWER_ITER,
    n_cap: int = N_CAP,
    block_cap: int = BLOCK_CAP,
) -> list[SpectralReport]:
    """Sweep-oriented sibling of rk_power for one (M, A) shape.

    Computes the same quantity as rk_power(a, k, tol, seeds[i]) for
    each item, but with width-8 subspace iteration instead of a single
    power vector: the block is re-orthonormalized every step and the
    top Ritz value of the projected operator is tracked.  A lone power
    vector's Rayleigh quotient stalls inside the tight clusters of
    near-equal top singular values these operators often carry; the
    block converges at the gap to the first value outside it.  The
    reported r_k is the square root of the converged top Ritz value, a
    Rayleigh quotient over the block span, hence never above the true
    r_k - the same safe direction as rk_power.

    Stopping matches rk_power's rule in block form: relative change of
    the top Ritz estimate <= tol (residual > tol reports a capped run).
    """
    alphabets = list(alphabets)
    seeds = list(seeds)
    if len(seeds) != len(alphabets):
        raise ShapeMismatch("one seed per alphabet required")
    if not alphabets:
        return []
    m = alphabets[0].base_m
    card = alphabets[0].card_a
    for a in alphabets:
        if a.base_m != m or a.card_a != card:
            raise ShapeMismatch("batch requires a single (M, A) shape")
    out: list[SpectralReport] = []
    for a, seed in zip(alphabets, seeds):
        c = build_cantor(a, k, n_cap)
        if c.cardinality <= block_cap:
            hx = _block_applier(c)
        else:
            hx = _sim_fft_applier(c)
        lam, iters, rel = _sim_run(hx, c.cardinality, seed, tol, max_iter)
        r_k = math.sqrt(max(lam, 0.0))
        out.append(
            SpectralReport(
                alphabet=a,
                k=k,
                r_k=r_k,
                beta_k=_beta_from_r(r_k, k, a.base_m),
                iterations=iters,
                residual=rel,
                method="power",
            )
        )
    return out


def _sim_fft_applier(c: CantorSet):
    # Like _fft_applier but acting on (s, p) column blocks; the rows
    # buffer keeps the transform axis contiguous.
    idx = c.indices
    n = c.n

    def hx(x):
        p = x.shape[1]
        full = np.zeros((p, n), dtype=np.complex128)
        full[:, idx] = x.T
        w = _transform(full, -1)
        inner = np.zeros((p, n), dtype=np.complex128)
        inner[:, idx] = w[:, idx]
        z = _transform(inner, +1)
        return z[:, idx].T / n

    return hx


def _mgs_cols(v: np.ndarray) -> None:
    """In-place modified Gram-Schmidt on the columns of v.

    Two projection passes per column (the classic twice-is-enough
    rule): after heavy cancellation a single pass leaves a residual of
    roundoff noise that is far from orthogonal to earlier columns, and
    normalizing that noise silently breaks the orthonormality the Ritz
    values rely on.  Columns whose residual falls below a relative
    cutoff are numerically dependent on earlier ones and are zeroed -
    a zero column just carries a zero row in the projected matrix.
    """
    for j in range(v.shape[1]):
        col = v[:, j]
        norm0 = math.sqrt(np.vdot(col, col).real)
        if norm0 <= 1e-300:
            col[:] = 0.0
            continue
        for _ in range(2):
            for i in range(j):
                col -= np.vdot(v[:, i], col) * v[:, i]
        norm = math.sqrt(np.vdot(col, col).real)
        if norm <= 1e-10 * norm0:
            col[:] = 0.0
        else:
            col /= norm


def _ritz_top_estimate(pmat: np.ndarray) -> float:
    """Top-eigenvalue estimate of a small Hermitian PSD matrix.

    Scaled repeated squaring: (tr((P/t)^(2^m)))^(1/2^m) * t, carrying
    scale in log space so 2^11-th powers neither overflow nor vanish.
    Lands within a factor p^(1/2^m) above the true top eigenvalue -
    tight and smooth enough to drive a relative-change stopping rule;
    final reported values use an exact Jacobi solve instead.
    """
    diag = np.abs(np.diag(pmat).real)
    top = float(diag.max(initial=0.0))
    if top <= R_FLOOR:
        return 0.0
    q = pmat / top
    log_scale = 0.0
    for _ in range(_RITZ_SQUARINGS):
        q = q @ q
        scale = float(np.abs(np.diag(q).real).max())
        if scale <= R_FLOOR:
            return 0.0
        q /= scale
        log_scale = 2.0 * log_scale + math.log(scale)
    trace = max(float(np.trace(q).real), R_FLOOR)
    return top * math.exp((log_scale + math.log(trace)) / 2.0 ** _RITZ_SQUARINGS)


def _sim_run(hx, dim: int, seed: int, tol: float, max_iter: int):
    """Subspace iteration on a Hermitian PSD operator; returns
    (top Ritz value, iterations, final relative change)."""
    width = min(_SIM_WIDTH, dim)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((dim, width)) + 1j * rng.standard_normal((dim, width))
    _mgs_cols(v)
    prev = math.inf
    rel = math.inf
    pmat = None
    it = 0
    for it in range(1, max_iter + 1):
        z = hx(v)
        pmat = np.conj(v.T) @ z
        pmat = 0.5 * (pmat + np.conj(pmat.T))
        est = _ritz_top_estimate(pmat)
        rel = abs(est - prev) / max(est, R_FLOOR)
        if rel <= tol:
            break
        prev = est
        v = z
        _mgs_cols(v)
    if pmat is None:
        return 0.0, it, rel
    eigs, _, _ = _jacobi_eigenvalues(pmat)
    return max(float(eigs[-1]), 0.0), it, rel


def beta_lower(
    a: Alphabet,
    k_max: int,
    tol: float = 1e-12,
    seed: int = 0,
    n_cap: int = N_CAP,
) -> float:
    """Certified exponent lower bound: max of beta_k over k <= k_max.

    Submultiplicativity of r_k makes each beta_k a valid lower bound
    for the limiting exponent, so the max is one too.  Requires a
    nontrivial alphabet (1 < A < M); the trivial ones pin r_k exactly
    and carry no exponent information.
    """
    if a.card_a <= 1 or a.card_a >= a.base_m:
        raise TrivialAlphabet(
            f"need 1 < A < M, got A={a.card_a}, M={a.base_m}"
        )
    if k_max < 1:
        raise ValidationError(f"k_max must be >= 1, got {k_max}")
    best = -math.inf
    for k in range(1, k_max + 1):
        rep = rk_power(a, k, tol=tol, seed=seed, n_cap=n_cap)
        best = max(best, rep.beta_k)
    return best


def schur_bound(a: Alphabet) -> float:
    """Largest Gram row sum of absolute values; dominates r_1^2."""
    g = gram_matrix(a).entries
    return float(np.max(np.sum(np.abs(g), axis=1)))


def envelopes(a: Alphabet, k: int) -> tuple[float, float]:
    """Proven sandwich for r_k: (N^{-(1-delta)/2}, min(1, N^{-(1/2-delta)}))."""
    delta = dimension(a)
    log_n = k * math.log(a.base_m)
    lower = math.exp(-0.5 * (1.0 - delta) * log_n)
    upper = min(1.0, math.exp(-(0.5 - delta) * log_n))
    return lower, upper
