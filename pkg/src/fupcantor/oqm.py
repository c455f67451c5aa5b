"""Open quantum baker's maps quantizing Cantor-type trapped sets.

For N = M^k the map is

    B_N = F_N^{-1} . blockdiag(chi F_{N/M} chi  at block a, a in alphabet;
                               0                at block a otherwise)

with M blocks of side N/M and chi a real cutoff tabulated on one block
(identity by default).  Blocks outside the alphabet are annihilated, so
the middle factor's rows and columns there vanish; e.g. M = 3 with
digits {0, 2} leaves the center block zero.  The norm of B_N is at most
1, its eigenvalues lie in the closed unit disk, and the spectral radius
is estimated by Gelfand iteration: repeated squaring with per-step
normalization, rho ~ ||B^{2^j}||^{1/2^j}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cantor import Alphabet, alphabet_to_string, dimension
from .errors import (
    DenseCapExceeded,
    LengthMismatch,
    OrderTooSmall,
    ValidationError,
)
from .fourier import _kernel, _transform, dft, idft
from .spectral import _power_run

OQM_DENSE_CAP = 4096
RADIUS_J_MAX = 12


@dataclass(frozen=True)
class OpenQuantumMap:
    """One quantized map; matrix is None when built matrix-free."""

    alphabet: Alphabet
    order_k: int
    n: int
    cutoff: np.ndarray | None
    matrix: np.ndarray | None


def _check_cutoff(cutoff, q: int) -> np.ndarray | None:
    if cutoff is None:
        return None
    chi = np.asarray(cutoff, dtype=np.float64)
    if chi.ndim != 1 or chi.shape[0] != q:
        raise LengthMismatch(f"cutoff must have length N/M = {q}")
    if not np.all(np.isfinite(chi)):
        raise ValidationError("cutoff contains non-finite weights")
    return chi


def build_bn(
    a: Alphabet,
    k: int,
    cutoff=None,
    dense: bool = True,
    dense_cap: int = OQM_DENSE_CAP,
) -> OpenQuantumMap:
    """Assemble B_N; k >= 2 so the inner transform has size M^{k-1}."""
    if k < 2:
        raise OrderTooSmall(f"open quantum map needs k >= 2, got {k}")
    n = a.base_m ** k
    q = n // a.base_m
    chi = _check_cutoff(cutoff, q)
    matrix = None
    if dense:
        if n > dense_cap:
            raise DenseCapExceeded(f"N = {n} exceeds dense cap {dense_cap}")
        inner = _kernel(q, -1) / math.sqrt(q)
        if chi is not None:
            inner = chi[:, None] * inner * chi[None, :]
        middle = np.zeros((n, n), dtype=np.complex128)
        for d in a.digits:
            middle[d * q : (d + 1) * q, d * q : (d + 1) * q] = inner
        # F_N^{-1} applied to every column of the middle factor.
        matrix = (_transform(middle.T, +1) / math.sqrt(n)).T
        matrix.flags.writeable = False
    return OpenQuantumMap(a, k, n, chi, matrix)


def middle_factor(b: OpenQuantumMap) -> np.ndarray:
    """Dense block-diagonal factor of B_N (before the inverse transform)."""
    q = b.n // b.alphabet.base_m
    inner = _kernel(q, -1) / math.sqrt(q)
    if b.cutoff is not None:
        inner = b.cutoff[:, None] * inner * b.cutoff[None, :]
    middle = np.zeros((b.n, b.n), dtype=np.complex128)
    for d in b.alphabet.digits:
        middle[d * q : (d + 1) * q, d * q : (d + 1) * q] = inner
    return middle


def apply_bn(b: OpenQuantumMap, u) -> np.ndarray:
    """Matrix-free application of B_N to one vector."""
    v = np.asarray(u, dtype=np.complex128)
    if v.ndim != 1 or v.shape[0] != b.n:
        raise LengthMismatch(f"expected a length-{b.n} vector, got shape {v.shape}")
    q = b.n // b.alphabet.base_m
    staged = np.zeros(b.n, dtype=np.complex128)
    for d in b.alphabet.digits:
        block = v[d * q : (d + 1) * q]
        if b.cutoff is not None:
            block = b.cutoff * block
        block = dft(q, block)
        if b.cutoff is not None:
            block = b.cutoff * block
        staged[d * q : (d + 1) * q] = block
    return idft(b.n, staged)


def apply_bn_adjoint(b: OpenQuantumMap, u) -> np.ndarray:
    """Matrix-free application of B_N* (blocks conjugate-transposed)."""
    v = np.asarray(u, dtype=np.complex128)
    if v.ndim != 1 or v.shape[0] != b.n:
        raise LengthMismatch(f"expected a length-{b.n} vector, got shape {v.shape}")
    q = b.n // b.alphabet.base_m
    w = dft(b.n, v)
    out = np.zeros(b.n, dtype=np.complex128)
    for d in b.alphabet.digits:
        block = w[d * q : (d + 1) * q]
        if b.cutoff is not None:
            block = b.cutoff * block
        block = idft(q, block)
        if b.cutoff is not None:
            block = b.cutoff * block
        out[d * q : (d + 1) * q] = block
    return out


def bn_norm(
    b: OpenQuantumMap,
    tol: float = 1e-12,
    seed: int = 0,
    max_iter: int = 20_000,
) -> float:
    """Operator norm by power iteration on B* B, two restarts."""
    if b.matrix is not None:
        mat = b.matrix
        mat_h = mat.conj().T

        def hx(x):
            return mat_h @ (mat @ x)

    else:

        def hx(x):
            return apply_bn_adjoint(b, apply_bn(b, x))

    best = 0.0
    for child in np.random.SeedSequence(seed).spawn(2):
        rng = np.random.default_rng(child)
        lam, _, _ = _power_run(hx, b.n, rng, tol, max_iter)
        best = max(best, lam)
    return math.sqrt(max(best, 0.0))


def _matrix_norm(mat: np.ndarray, tol: float, seed, max_iter: int = 20_000) -> float:
    mat_h = mat.conj().T

    def hx(x):
        return mat_h @ (mat @ x)

    best = 0.0
    for child in np.random.SeedSequence(seed).spawn(2):
        rng = np.random.default_rng(child)
        lam, _, _ = _power_run(hx, mat.shape[0], rng, tol, max_iter)
        best = max(best, lam)
    return math.sqrt(max(best, 0.0))


@dataclass(frozen=True)
class RadiusReport:
    """Gelfand iteration record: estimates rho_j = ||B^{2^j}||^{1/2^j}."""

    rho: float
    j_used: int
    norm_sequence: tuple[float, ...]
    converged: bool


def spectral_radius(
    b: OpenQuantumMap,
    j_max: int = RADIUS_J_MAX,
    tol: float = 1e-4,
    seed: int = 0,
) -> RadiusReport:
    """Spectral radius via repeated squaring with normalization.

    Powers are renormalized at every squaring and the true norm is
    tracked in log space, so estimates stay finite even when
    ||B^{2^j}|| underflows.  The estimates rho_j are non-increasing but
    contractions typically hold a plateau near ||B|| for the first few
    squarings before the geometric tail appears, so a small decrement at
    low j proves nothing; the iteration therefore always runs to j_max
    (or an exactly zero norm) and the flag reports whether the final
    decrement fell below tol.  Non-convergence is reported, never
    raised.
    """
    if b.matrix is None:
        raise ValidationError("spectral radius needs a dense-mode map")
    q = np.array(b.matrix)
    log_scale = 0.0
    estimates: list[float] = []
    converged = False
    j_used = 0
    for j in range(j_max + 1):
        sigma = _matrix_norm(q, 1e-10, [seed, j])
        j_used = j
        if sigma == 0.0:
            estimates.append(0.0)
            converged = True
            break
        log_norm = log_scale + math.log(sigma)
        rho = math.exp(log_norm / (1 << j))
        estimates.append(rho)
        if j >= 1:
            converged = abs(estimates[-2] - rho) <= tol * max(rho, 1e-300)
        if j == j_max:
            break
        q = q / sigma
        q = q @ q
        log_scale = 2.0 * log_norm
    return RadiusReport(
        rho=estimates[-1],
        j_used=j_used,
        norm_sequence=tuple(estimates),
        converged=converged,
    )


@dataclass(frozen=True)
class GapRow:
    """One (alphabet, k) spectral-gap record with candidate comparisons."""

    m: int
    alphabet: str
    k: int
    n: int
    rho: float
    norm: float
    epsilon: float
    beta_thm: float
    m_neg_thm: float
    m_pos_thm: float
    beta_volume: float
    m_neg_volume: float
    m_pos_volume: float
    beta_best: float
    m_neg_best: float
    m_pos_best: float
    flag: str


GAP_CSV_COLUMNS = [
    "m",
    "alphabet",
    "k",
    "n",
    "rho",
    "norm",
    "epsilon",
    "beta_thm",
    "m_neg_thm",
    "m_pos_thm",
    "beta_volume",
    "m_neg_volume",
    "m_pos_volume",
    "beta_best",
    "m_neg_best",
    "m_pos_best",
    "flag",
]


def gap_row_values(row: GapRow) -> list[str]:
    out = []
    for name in GAP_CSV_COLUMNS:
        v = getattr(row, name)
        out.append(repr(float(v)) if isinstance(v, float) else str(v))
    return out


def gap_report(
    a: Alphabet,
    k_range,
    epsilon: float = 0.1,
    cutoff=None,
    j_max: int = RADIUS_J_MAX,
    tol: float = 1e-4,
    seed: int = 0,
    dense_cap: int = OQM_DENSE_CAP,
) -> list[GapRow]:
    """Spectral radius against candidate gap exponents, one row per k.

    Candidate exponents: the uncertainty threshold 1/2 - 3 delta/4 - eps,
    the volume bound max(0, 1/2 - delta), and the best possible
    (1 - delta)/2.  For each, both M^{-beta} and M^{+beta} are recorded.
    A row is flagged as outside the asymptotic regime when rho exceeds
    every M^{-beta} column that actually promises decay (value < 1);
    with no such column the flag fires vacuously, so full alphabets
    (rho = 1, no decaying candidate) are always flagged.
    """
    delta = dimension(a)
    betas = {
        "thm": 0.5 - 0.75 * delta - epsilon,
        "volume": max(0.0, 0.5 - delta),
        "best": (1.0 - delta) / 2.0,
    }
    rows = []
    for k in k_range:
        b = build_bn(a, k, cutoff=cutoff, dense=True, dense_cap=dense_cap)
        norm = bn_norm(b, seed=seed)
        rad = spectral_radius(b, j_max=j_max, tol=tol, seed=seed)
        neg = {name: a.base_m ** (-beta) for name, beta in betas.items()}
        pos = {name: a.base_m ** beta for name, beta in betas.items()}
        flag = ""
        if all(rad.rho > v for v in neg.values() if v < 1.0):
            flag = "asymptotic regime not reached"
        rows.append(
            GapRow(
                m=a.base_m,
                alphabet=alphabet_to_string(a),
                k=k,
                n=b.n,
                rho=rad.rho,
                norm=norm,
                epsilon=epsilon,
                beta_thm=betas["thm"],
                m_neg_thm=neg["thm"],
                m_pos_thm=pos["thm"],
                beta_volume=betas["volume"],
                m_neg_volume=neg["volume"],
                m_pos_volume=pos["volume"],
                beta_best=betas["best"],
                m_neg_best=neg["best"],
                m_pos_best=pos["best"],
                flag=flag,
            )
        )
    return rows
