"""Dense complex linear-algebra kernel.

Everything downstream (the Krylov solvers and the Drazin oracle) is built on
the small set of operations in this module: matrix-vector products, modified
Gram-Schmidt orthogonalization with one reorthogonalization pass, Householder
QR, back substitution, a shifted-QR Hessenberg eigensolver with inverse
iteration, and full-pivot Gaussian elimination for numerical rank.

All operations promote their inputs to ``complex128`` and reject non-finite
entries.  They are pure functions with no shared state, so concurrent calls
on independent inputs are safe.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "BREAKDOWN_TOL",
    "EigenConvergenceError",
    "RankDeficientError",
    "as_matrix",
    "as_vector",
    "hessenberg_eig",
    "matvec",
    "mgs_orthogonalize",
    "power_apply",
    "qr_factor",
    "rank_of",
    "solve_upper_triangular",
]

#: default breakdown threshold, relative to the norm of the incoming vector
BREAKDOWN_TOL = 1e-13

#: norm-drop factor (DGKS criterion) that triggers the reorthogonalization pass
_REORTH_DROP = 1.0 / np.sqrt(2.0)

_EPS = np.finfo(np.float64).eps


class RankDeficientError(ArithmeticError):
    """A triangular solve hit a diagonal entry below the singularity threshold."""

    def __init__(self, index, message):
        super().__init__(message)
        self.index = index


class EigenConvergenceError(ArithmeticError):
    """The shifted-QR iteration failed to deflate within its sweep budget.

    ``partial_values`` carries the eigenvalues isolated before the failure.
    """

    def __init__(self, message, partial_values):
        super().__init__(message)
        self.partial_values = list(partial_values)


def as_matrix(a, square=False):
    """Coerce ``a`` to a finite complex128 2-D array (no copies when possible)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix contains non-finite entries")
    return m


def as_vector(a, dim=None):
    """Coerce ``a`` to a finite complex128 1-D array."""
    v = np.asarray(a, dtype=np.complex128)
    if v.ndim != 1 or v.shape[0] < 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"expected a vector of length {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
        raise ValueError("vector contains non-finite entries")
    return v


def matvec(A, x):
    """Matrix-vector product ``A @ x`` with shape and finiteness validation."""
    A = as_matrix(A)
    x = as_vector(x)
    if A.shape[1] != x.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape} @ ({x.shape[0]},)")
    return A @ x


def power_apply(A, p, x):
    """Apply ``A`` to ``x`` a total of ``p`` times (never forms ``A**p``)."""
    A = as_matrix(A, square=True)
    x = as_vector(x, dim=A.shape[0])
    if p < 0:
        raise ValueError("power must be nonnegative")
    y = x
    for _ in range(int(p)):
        y = A @ y
    return y


def mgs_orthogonalize(V, w, breakdown_tol=BREAKDOWN_TOL):
    """Orthogonalize ``w`` against the orthonormal columns of ``V``.

    Modified Gram-Schmidt with a single reorthogonalization pass when the
    norm drops by more than a factor ``1/sqrt(2)``.

    Parameters
    ----------
    V : ndarray of shape (n, j)
        Orthonormal basis columns (``j`` may be zero).
    w : ndarray of shape (n,)
        Vector to orthogonalize.
    breakdown_tol : float
        Breakdown threshold relative to ``norm(w)``.

    Returns
    -------
    coeffs : ndarray of shape (j,)
        Accumulated projection coefficients ``<w, v_i>``.
    hnext : float
        Norm of the orthogonalized remainder.
    vnext : ndarray or None
        The normalized remainder, or ``None`` on breakdown (``w`` lies in
        the span of ``V`` to within the threshold).  Breakdown is a normal
        outcome, not an error.
    """
    w = as_vector(w)
    n = w.shape[0]
    if V is None:
        V = np.zeros((n, 0), dtype=np.complex128)
    else:
        V = np.asarray(V, dtype=np.complex128)
        if V.ndim == 1:
            V = V[:, None]
        if V.ndim != 2 or V.shape[0] != n:
            raise ValueError(f"basis shape {V.shape} incompatible with vector of length {n}")
    j = V.shape[1]
    scale = float(np.linalg.norm(w))
    v = w.copy()
    h = np.zeros(j, dtype=np.complex128)
    for i in range(j):
        c = np.vdot(V[:, i], v)
        h[i] = c
        v -= c * V[:, i]
    if float(np.linalg.norm(v)) < _REORTH_DROP * scale:
        for i in range(j):
            c = np.vdot(V[:, i], v)
            h[i] += c
            v -= c * V[:, i]
    hnext = float(np.linalg.norm(v))
    if hnext <= breakdown_tol * scale:
        return h, hnext, None
    return h, hnext, v / hnext


def qr_factor(M):
    """Householder QR of a tall matrix ``M`` (rows >= cols).

    Returns ``(Q, R)`` with ``Q`` of shape (rows, cols) having orthonormal
    columns and ``R`` of shape (cols, cols) upper triangular with real
    nonnegative diagonal, such that ``M = Q @ R``.
    """
    M = as_matrix(M)
    p, q = M.shape
    if p < q:
        raise ValueError(f"qr_factor expects rows >= cols, got {M.shape}")
    R = M.astype(np.complex128, copy=True)
    Q = np.eye(p, dtype=np.complex128)
    for j in range(q):
        x = R[j:, j]
        nx = float(np.linalg.norm(x))
        if nx == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0
        v = x.copy()
        v[0] += phase * nx
        v /= np.linalg.norm(v)
        R[j:, j:] -= 2.0 * np.outer(v, v.conj() @ R[j:, j:])
        R[j + 1:, j] = 0.0
        Q[:, j:] -= 2.0 * np.outer(Q[:, j:] @ v, v.conj())
    Q = Q[:, :q]
    R = np.triu(R[:q, :])
    for j in range(q):
        d = R[j, j]
        if d != 0 and (d.imag != 0 or d.real < 0):
            ph = d / abs(d)
            R[j, j:] *= np.conj(ph)
            Q[:, j] *= ph
    return Q, R


def solve_upper_triangular(R, c, singular_tol=1e-14):
    """Back substitution for ``R y = c`` with ``R`` upper triangular.

    Raises :class:`RankDeficientError` identifying the first diagonal entry
    whose magnitude is at most ``singular_tol * norm(R)``.
    """
    R = as_matrix(R, square=True)
    c = as_vector(c, dim=R.shape[0])
    n = R.shape[0]
    scale = float(np.linalg.norm(R))
    y = np.zeros(n, dtype=np.complex128)
    for i in range(n - 1, -1, -1):
        d = R[i, i]
        if abs(d) <= singular_tol * scale:
            raise RankDeficientError(
                i, f"triangular solve: diagonal entry {i} has magnitude {abs(d):.3e} "
                   f"<= {singular_tol:.1e} * norm(R)")
        y[i] = (c[i] - R[i, i + 1:] @ y[i + 1:]) / d
    return y


def rank_of(M, tol):
    """Numerical rank: pivots above ``tol * norm(M)`` under full-pivot elimination."""
    M = as_matrix(M)
    if tol <= 0:
        raise ValueError("rank tolerance must be positive")
    W = M.astype(np.complex128, copy=True)
    p, q = W.shape
    thr = tol * float(np.linalg.norm(M))
    rank = 0
    for s in range(min(p, q)):
        sub = np.abs(W[s:, s:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= thr:
            break
        i += s
        j += s
        if i != s:
            W[[s, i], :] = W[[i, s], :]
        if j != s:
            W[:, [s, j]] = W[:, [j, s]]
        W[s + 1:, s:] -= np.outer(W[s + 1:, s] / W[s, s], W[s, s:])
        rank += 1
    return rank


def hessenberg_eig(H, eig_tol=1e-14, max_sweeps=64, eig_max_dim=200, vector_iters=5):
    """All eigenpairs of an upper Hessenberg matrix.

    Eigenvalues come from a single-shift (Wilkinson) QR iteration with
    deflation; eigenvectors from inverse iteration on ``H - lambda*I`` with
    perturbed pivots.  For defective eigenvalues a residual-satisfying pair
    is still returned (repeated eigenvalues may share a direction).

    Returns a list of ``(value, vector)`` pairs with unit-norm vectors, in
    deflation order.  Raises :class:`EigenConvergenceError` carrying the
    partial eigenvalue list if some eigenvalue fails to deflate within
    ``max_sweeps`` consecutive sweeps.
    """
    H = as_matrix(H, square=True)
    n = H.shape[0]
    if n > eig_max_dim:
        raise ValueError(f"matrix dimension {n} exceeds eig_max_dim={eig_max_dim}")
    norm_h = float(np.linalg.norm(H))
    if n > 2 and np.max(np.abs(np.tril(H, -2))) > 1e-13 * max(norm_h, 1.0):
        raise ValueError("matrix is not upper Hessenberg")
    values = _qr_eigenvalues(H, eig_tol, max_sweeps, norm_h)
    rng = np.random.default_rng(0x44474D)
    pairs = []
    for lam in values:
        vec = _inverse_iteration(H, lam, rng, norm_h, vector_iters)
        pairs.append((complex(lam), vec))
    return pairs


def _qr_eigenvalues(H, eig_tol, max_sweeps, norm_h):
    T = H.astype(np.complex128, copy=True)
    n = T.shape[0]
    values = []
    hi = n - 1
    stall = 0
    while hi >= 0:
        for p_ in range(1, hi + 1):
            thr = eig_tol * (abs(T[p_ - 1, p_ - 1]) + abs(T[p_, p_]) + norm_h)
            if abs(T[p_, p_ - 1]) <= thr:
                T[p_, p_ - 1] = 0.0
        if hi == 0 or T[hi, hi - 1] == 0.0:
            values.append(T[hi, hi])
            hi -= 1
            stall = 0
            continue
        lo = hi
        while lo > 0 and T[lo, lo - 1] != 0.0:
            lo -= 1
        stall += 1
        if stall > max_sweeps:
            raise EigenConvergenceError(
                f"QR iteration did not deflate within {max_sweeps} sweeps "
                f"(block {lo}..{hi})", values)
        if stall % 16 == 0:
            # exceptional shift to break symmetric stalling
            mu = T[hi, hi] + 0.75 * abs(T[hi, hi - 1])
        else:
            a_, b_ = T[hi - 1, hi - 1], T[hi - 1, hi]
            c_, d_ = T[hi, hi - 1], T[hi, hi]
            disc = np.sqrt((a_ - d_) ** 2 + 4.0 * b_ * c_ + 0j)
            r1 = (a_ + d_ + disc) / 2.0
            r2 = (a_ + d_ - disc) / 2.0
            mu = r1 if abs(r1 - d_) < abs(r2 - d_) else r2
        _qr_step(T, lo, hi, mu)
    return values


def _qr_step(T, lo, hi, mu):
    # explicit single-shift QR step on the active block, via complex Givens
    nb = hi - lo + 1
    B = T[lo:hi + 1, lo:hi + 1] - mu * np.eye(nb)
    rots = []
    for i in range(nb - 1):
        f, g = B[i, i], B[i + 1, i]
        r = np.hypot(abs(f), abs(g))
        if r == 0.0:
            rots.append(None)
            continue
        U = np.array([[np.conj(f), np.conj(g)], [-g, f]], dtype=np.complex128) / r
        B[i:i + 2, i:] = U @ B[i:i + 2, i:]
        rots.append(U)
    for i, U in enumerate(rots):
        if U is None:
            continue
        B[:i + 2, i:i + 2] = B[:i + 2, i:i + 2] @ U.conj().T
    B += mu * np.eye(nb)
    T[lo:hi + 1, lo:hi + 1] = B


def _lu_factor(M):
    LU = M.astype(np.complex128, copy=True)
    n = LU.shape[0]
    piv = np.arange(n)
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(LU[k:, k])))
        if p != k:
            LU[[k, p], :] = LU[[p, k], :]
            piv[[k, p]] = piv[[p, k]]
        if LU[k, k] != 0.0:
            LU[k + 1:, k] /= LU[k, k]
            LU[k + 1:, k + 1:] -= np.outer(LU[k + 1:, k], LU[k, k + 1:])
    return LU, piv


def _lu_solve_floored(LU, piv, b, floor):
    n = LU.shape[0]
    y = b[piv].astype(np.complex128, copy=True)
    for i in range(1, n):
        y[i] -= LU[i, :i] @ y[:i]
    for i in range(n - 1, -1, -1):
        y[i] -= LU[i, i + 1:] @ y[i + 1:]
        d = LU[i, i]
        if abs(d) < floor:
            d = floor if d == 0 else d / abs(d) * floor
        y[i] /= d
    return y


def _inverse_iteration(H, lam, rng, norm_h, iters):
    n = H.shape[0]
    scale = norm_h + abs(lam)
    if scale == 0.0:
        v = np.zeros(n, dtype=np.complex128)
        v[0] = 1.0
        return v
    M = H - lam * np.eye(n)
    LU, piv = _lu_factor(M)
    floor = _EPS * scale
    best_resid = np.inf
    best_v = None
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    for _ in range(iters):
        y = _lu_solve_floored(LU, piv, v, floor)
        ny = float(np.linalg.norm(y))
        if not np.isfinite(ny) or ny == 0.0:
            v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            v /= np.linalg.norm(v)
            continue
        v = y / ny
        resid = float(np.linalg.norm(H @ v - lam * v))
        if resid < best_resid:
            best_resid = resid
            best_v = v.copy()
        if resid <= 1e-13 * scale:
            break
    return best_v if best_v is not None else v
