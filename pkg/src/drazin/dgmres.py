"""Restarted DGMRES for the Drazin-inverse solution of a singular system.

Each cycle runs ``m`` Arnoldi steps on the seed ``A^a r0`` (``a`` the index
of ``A``), forms the stacked Hessenberg product representing ``A^(a+1)`` on
the Krylov basis, solves the small least-squares problem by QR, and updates
the iterate inside ``x0 + span{A^a r0, ..., A^(m-1) r0}``.  The restart loop
repeats cycles until the relative seminorm ``|A^a r| / |A^a b|`` drops below
the configured tolerance.

A lucky Arnoldi breakdown means the Krylov subspace is invariant; the cycle
then proceeds with the exhausted basis width in place of ``m``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .densela import (
    BREAKDOWN_TOL,
    as_matrix,
    as_vector,
    mgs_orthogonalize,
    qr_factor,
    solve_upper_triangular,
)

__all__ = [
    "CycleRecord",
    "CycleResult",
    "KrylovBasis",
    "RunHistory",
    "SolverConfig",
    "ZeroSeedError",
    "build_krylov",
    "dgmres_cycle",
    "dgmres_restarted",
    "stacked_hessenberg",
]


class ZeroSeedError(ValueError):
    """The Drazin-consistent residual ``A^a r0`` is already annihilated.

    Callers treat the current iterate as converged: the seminorm objective
    is identically zero.
    """


@dataclass(frozen=True)
class SolverConfig:
    """Shared configuration for the DGMRES/ADGMRES restart loops.

    ``index_a`` is the (known) index of the system matrix, ``restart_m`` the
    Arnoldi depth per cycle, ``tol_eps`` the relative-seminorm stopping
    tolerance.  ``breakdown_tol`` and ``zero_ritz_tol`` are relative
    thresholds for Arnoldi breakdown and the nonzero-Ritz filter.
    """

    index_a: int
    restart_m: int
    tol_eps: float = 1e-12
    max_cycles: int = 10000
    breakdown_tol: float = BREAKDOWN_TOL
    zero_ritz_tol: float = 1e-8

    def __post_init__(self):
        if self.index_a < 0:
            raise ValueError("index_a must be nonnegative")
        if self.restart_m <= self.index_a:
            raise ValueError(
                f"restart_m must exceed index_a (got m={self.restart_m}, a={self.index_a})")
        if self.tol_eps <= 0:
            raise ValueError("tol_eps must be positive")
        if self.max_cycles < 0:
            raise ValueError("max_cycles must be nonnegative")
        if self.breakdown_tol <= 0:
            raise ValueError("breakdown_tol must be positive")
        if self.zero_ritz_tol < 0:
            raise ValueError("zero_ritz_tol must be nonnegative")


@dataclass(frozen=True)
class KrylovBasis:
    """Arnoldi output: orthonormal columns ``V`` and extended Hessenberg ``Hbar``.

    After ``j`` completed steps ``Hbar`` has shape (j+1, j); without
    breakdown ``V`` has j+1 columns and ``A @ V[:, :j] == V @ Hbar[:, :j]``.
    On breakdown at step ``breakdown_at`` the basis is exhausted: ``V`` has
    ``breakdown_at`` columns and the last Hessenberg row is negligible.
    """

    V: np.ndarray
    Hbar: np.ndarray
    breakdown_at: int | None = None

    @property
    def steps(self):
        """Number of completed Arnoldi steps (columns of ``Hbar``)."""
        return self.Hbar.shape[1]

    @property
    def width(self):
        """Number of basis vectors."""
        return self.V.shape[1]


@dataclass(frozen=True)
class CycleResult:
    """Outcome of a single minimization cycle."""

    x_new: np.ndarray
    seminorm: float
    ls_residual: float
    basis_dim: int
    breakdown: bool
    fallback: bool = False


@dataclass(frozen=True)
class CycleRecord:
    """One restart-loop history entry."""

    cycle: int
    seminorm: float
    relative_seminorm: float
    wall_time: float
    fallback: bool = False


@dataclass(frozen=True)
class RunHistory:
    """Per-cycle convergence history of a restarted solve."""

    records: list[CycleRecord] = field(default_factory=list)
    converged: bool = False
    final_x: np.ndarray | None = None

    def relative_seminorms(self):
        return np.array([r.relative_seminorm for r in self.records])


def build_krylov(A, seed, steps, cfg):
    """Arnoldi process: orthonormal basis of ``span{seed, A seed, ...}``.

    ``v1 = seed / |seed|``; each step orthogonalizes ``A v_j`` against the
    current basis by modified Gram-Schmidt.  Stops early with
    ``breakdown_at`` set when the remainder norm falls below the relative
    breakdown threshold.  A zero seed raises :class:`ZeroSeedError`.
    """
    A = as_matrix(A, square=True)
    seed = as_vector(seed, dim=A.shape[0])
    if steps < 1:
        raise ValueError("steps must be at least 1")
    beta = float(np.linalg.norm(seed))
    if beta == 0.0:
        raise ZeroSeedError("Drazin-consistent residual already annihilated")
    n = A.shape[0]
    V = np.empty((n, steps + 1), dtype=np.complex128)
    V[:, 0] = seed / beta
    Hbar = np.zeros((steps + 1, steps), dtype=np.complex128)
    for j in range(steps):
        w = A @ V[:, j]
        h, hnext, vnext = mgs_orthogonalize(V[:, :j + 1], w, cfg.breakdown_tol)
        Hbar[:j + 1, j] = h
        Hbar[j + 1, j] = hnext
        if vnext is None:
            width = j + 1
            return KrylovBasis(V=V[:, :width].copy(),
                               Hbar=Hbar[:width + 1, :width].copy(),
                               breakdown_at=width)
        V[:, j + 1] = vnext
    return KrylovBasis(V=V, Hbar=Hbar, breakdown_at=None)


def stacked_hessenberg(hbar_full, m, a):
    """Product of the leading extended-Hessenberg blocks.

    Given the (m+1) x m extended Hessenberg of a length-``m`` Arnoldi run,
    returns the (m+1) x (m-a) product of the leading (k+1) x k blocks for
    ``k = m, m-1, ..., m-a``, which represents ``A^(a+1)`` acting on the
    first ``m-a`` basis vectors.
    """
    hbar_full = as_matrix(hbar_full)
    if a < 0:
        raise ValueError("a must be nonnegative")
    if m <= a:
        raise ValueError(f"need m > a, got m={m}, a={a}")
    if hbar_full.shape != (m + 1, m):
        raise ValueError(
            f"expected a ({m + 1}, {m}) extended Hessenberg, got {hbar_full.shape}")
    P = hbar_full[:m - a + 1, :m - a]
    for k in range(m - a + 1, m + 1):
        P = _matmul_cols(hbar_full[:k + 1, :k], P)
    return P


def _apply_power(A, p, x):
    y = x
    for _ in range(p):
        y = A @ y
    return y


def _matmul_cols(L, R):
    # column-by-column product so stacked and chained Hessenberg products
    # of the same factors agree bit for bit regardless of column count
    out = np.empty((L.shape[0], R.shape[1]), dtype=np.complex128)
    for j in range(R.shape[1]):
        out[:, j] = L @ R[:, j]
    return out


def _square_power(T, p):
    P = np.eye(T.shape[0], dtype=np.complex128)
    for _ in range(p):
        P = T @ P
    return P


def _lsq_solve(M, beta, rank_tol=1e-13):
    """Minimize ``| beta e1 - M y |`` by QR, tolerating rank deficiency.

    Columns whose R-diagonal falls below ``rank_tol`` times the largest are
    dropped (their ``y`` entries set to zero) and the reduced system is
    re-factored; with an exactly dependent column this reproduces the
    full-rank solve on the independent columns.  Wide systems (possible
    after heavy breakdown skipping) are padded with zero rows, which leaves
    the minimization unchanged.
    """
    M = np.asarray(M, dtype=np.complex128)
    rows, cols = M.shape
    if cols > rows:
        M = np.vstack([M, np.zeros((cols - rows, cols), dtype=np.complex128)])
    kept = np.arange(cols)
    y = np.zeros(cols, dtype=np.complex128)
    while kept.size:
        Q, R = qr_factor(M[:, kept])
        diag = np.abs(np.diagonal(R))
        dmax = float(diag.max())
        if dmax == 0.0:
            kept = kept[:0]
            break
        bad = diag <= rank_tol * dmax
        if not bad.any():
            c = beta * np.conj(Q[0, :])
            y[kept] = solve_upper_triangular(R, c)
            break
        kept = kept[~bad]
    rhs = np.zeros(M.shape[0], dtype=np.complex128)
    rhs[0] = beta
    resid = float(np.linalg.norm(rhs - M @ y))
    return y, resid


def _minimization_operator(basis, a):
    """Least-squares operator and update basis for one cycle.

    The stacked product over the first ``j - a`` basis vectors, ``j`` the
    number of completed Arnoldi steps: a breakdown simply truncates the
    cycle to the exhausted basis width.  Only when the basis is too short
    to stack ``a + 1`` blocks (``j <= a``, where the update formula has no
    columns at all) does the cycle fall back to powers of the square
    Hessenberg block, exact on the invariant subspace.
    """
    j = basis.steps
    if j > a:
        return stacked_hessenberg(basis.Hbar, j, a), basis.V[:, :j - a]
    T = basis.Hbar[:j, :j]
    return _square_power(T, a + 1), basis.V[:, :j]


def dgmres_cycle(A, b, x0, cfg):
    """One DGMRES(m) cycle from ``x0``.

    Returns the minimizer of ``|A^a (b - A x)|`` over the cycle subspace,
    with the seminorm recomputed directly from the new iterate (not
    propagated from the least-squares residual).
    """
    A = as_matrix(A, square=True)
    b = as_vector(b, dim=A.shape[0])
    x0 = as_vector(x0, dim=A.shape[0])
    a = cfg.index_a
    r0 = b - A @ x0
    s0 = _apply_power(A, a, r0)
    beta = float(np.linalg.norm(s0))
    if beta == 0.0:
        return CycleResult(x_new=x0.copy(), seminorm=0.0, ls_residual=0.0,
                           basis_dim=0, breakdown=False)
    basis = build_krylov(A, s0, cfg.restart_m, cfg)
    Hhat, Vup = _minimization_operator(basis, a)
    y, ls_resid = _lsq_solve(Hhat, beta)
    x_new = x0 + Vup @ y
    seminorm = float(np.linalg.norm(_apply_power(A, a, b - A @ x_new)))
    return CycleResult(x_new=x_new, seminorm=seminorm, ls_residual=ls_resid,
                       basis_dim=Vup.shape[1],
                       breakdown=basis.breakdown_at is not None)


def _relative(seminorm, denom):
    if denom > 0.0:
        return seminorm / denom
    return 0.0 if seminorm == 0.0 else seminorm


def _run_restarted(cycle_fn, A, b, x0, cfg):
    A = as_matrix(A, square=True)
    b = as_vector(b, dim=A.shape[0])
    x = np.zeros(A.shape[0], dtype=np.complex128) if x0 is None \
        else as_vector(x0, dim=A.shape[0]).copy()
    t0 = time.perf_counter()
    denom = float(np.linalg.norm(_apply_power(A, cfg.index_a, b)))
    seminorm = float(np.linalg.norm(_apply_power(A, cfg.index_a, b - A @ x)))
    rel = _relative(seminorm, denom)
    records = [CycleRecord(0, seminorm, rel, time.perf_counter() - t0)]
    converged = rel < cfg.tol_eps
    cycle = 0
    while not converged and cycle < cfg.max_cycles:
        cycle += 1
        t1 = time.perf_counter()
        result = cycle_fn(A, b, x)
        x = result.x_new
        rel = _relative(result.seminorm, denom)
        records.append(CycleRecord(cycle, result.seminorm, rel,
                                   time.perf_counter() - t1,
                                   fallback=result.fallback))
        converged = rel < cfg.tol_eps
    return RunHistory(records=records, converged=converged, final_x=x)


def dgmres_restarted(A, b, x0, cfg):
    """Restarted DGMRES(m): repeat cycles until ``|A^a r| / |A^a b| < eps``.

    ``x0 = None`` starts from zero.  Reaching ``max_cycles`` yields a
    history with ``converged=False`` (not an error).
    """
    return _run_restarted(lambda A_, b_, x_: dgmres_cycle(A_, b_, x_, cfg),
                          A, b, x0, cfg)
