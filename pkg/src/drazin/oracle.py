"""Reference computation of the matrix index and the Drazin inverse.

This module is the independent yardstick for the Krylov solvers: it is built
entirely from full-pivot Gaussian eliminations and matrix powers, sharing no
algorithmic path with the Arnoldi/QR machinery.

The index comes from rank stabilization of the power sequence.  The Drazin
inverse is assembled from the invariant splitting induced by ``A**l`` for
any ``l >= ind(A)``:

    C^n = range(A**l) (+) null(A**l),   A restricted to range(A**l) invertible,

with both bases read off one full-pivot Gauss-Jordan reduction of ``A**l``.
Inverting the restricted block and padding with zeros gives ``A^D``.  This
needs only the ``l``-th power, so a large eigenvalue spread (say 1000 vs 1)
does not wash the small blocks out of the arithmetic the way the classical
``A^D = A^l (A**(2l+1))^(1) A^l`` identity does; the {1}-inverse factor of
that identity is still computed and returned for reference.  Intended for
test-scale matrices (dense, explicit powers).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .densela import as_matrix, as_vector, qr_factor, rank_of

__all__ = [
    "DrazinAxiomError",
    "DrazinFactors",
    "drazin_inverse",
    "drazin_solution",
    "index_of",
    "one_inverse",
]

#: default rank-decision tolerance, relative to the Frobenius norm; tight
#: enough that a small nonzero eigenvalue powered up to the index is still
#: counted (0.001**3 against |A**3| needs better than 1e-12)
RANK_TOL = 1e-13

#: default scaled tolerance for the Drazin axiom checks
AXIOM_TOL = 1e-9


class DrazinAxiomError(ArithmeticError):
    """The assembled candidate failed a Drazin axiom (tolerance misconfiguration).

    ``residuals`` maps axiom names to their scaled residual norms.
    """

    def __init__(self, message, residuals):
        super().__init__(message)
        self.residuals = dict(residuals)


@dataclass(frozen=True)
class DrazinFactors:
    """Index, {1}-inverse ingredient and assembled Drazin inverse of a matrix."""

    index_a: int
    one_inverse_B: np.ndarray
    drazin: np.ndarray


def index_of(A, tol=RANK_TOL):
    """Smallest ``a >= 0`` with ``rank(A**(a+1)) == rank(A**a)`` (``A**0 = I``).

    Equals ind(A) whenever the rank decisions are unambiguous at ``tol``;
    a nonsingular matrix returns 0.
    """
    A = as_matrix(A, square=True)
    n = A.shape[0]
    prev_rank = n
    P = np.eye(n, dtype=np.complex128)
    for a in range(n + 1):
        P = P @ A
        r = rank_of(P, tol)
        if r == prev_rank:
            return a
        prev_rank = r
    return n


def _gauss_jordan(B, thr):
    """Full-pivot reduction ``E @ B @ F = [[I_r, 0], [0, 0]]``.

    Returns ``(E, F, rank)`` with ``E``, ``F`` invertible.  The trailing
    columns ``F[:, rank:]`` span the nullspace of ``B``; the leading ones
    map onto independent columns of ``B``.
    """
    n = B.shape[0]
    W = B.astype(np.complex128, copy=True)
    E = np.eye(n, dtype=np.complex128)
    F = np.eye(n, dtype=np.complex128)
    rank = 0
    for s in range(n):
        sub = np.abs(W[s:, s:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= thr:
            break
        i += s
        j += s
        if i != s:
            W[[s, i], :] = W[[i, s], :]
            E[[s, i], :] = E[[i, s], :]
        if j != s:
            W[:, [s, j]] = W[:, [j, s]]
            F[:, [s, j]] = F[:, [j, s]]
        piv = W[s, s]
        W[s, :] /= piv
        E[s, :] /= piv
        for r2 in range(n):
            if r2 == s or W[r2, s] == 0:
                continue
            f = W[r2, s]
            W[r2, :] -= f * W[s, :]
            E[r2, :] -= f * E[s, :]
        for c2 in range(s + 1, n):
            g = W[s, c2]
            if g == 0:
                continue
            W[:, c2] -= g * W[:, s]
            F[:, c2] -= g * F[:, s]
        rank += 1
    return E, F, rank


def one_inverse(B, tol=RANK_TOL):
    """A {1}-inverse of ``B``: a matrix ``G`` with ``B @ G @ B == B``.

    Constructed by full-pivot Gauss-Jordan reduction to the rank normal form
    ``E @ B @ F = [[I_r, 0], [0, 0]]`` and ``G = F @ [[I_r, 0], [0, 0]] @ E``.
    For nonsingular ``B`` this is the true inverse.
    """
    B = as_matrix(B, square=True)
    n = B.shape[0]
    E, F, rank = _gauss_jordan(B, tol * float(np.linalg.norm(B)))
    N = np.zeros((n, n), dtype=np.complex128)
    N[:rank, :rank] = np.eye(rank)
    return F @ N @ E


def _matrix_power(A, p):
    n = A.shape[0]
    P = np.eye(n, dtype=np.complex128)
    for _ in range(p):
        P = P @ A
    return P


def drazin_inverse(A, tol=RANK_TOL, l=None, axiom_tol=AXIOM_TOL):
    """Drazin inverse of ``A`` via the invariant splitting of ``A**l``.

    ``l`` defaults to the computed index; any ``l >= ind(A)`` yields the
    same inverse (up to rounding), which the tests use as a uniqueness
    probe.  Raises :class:`DrazinAxiomError` if the assembled matrix
    violates one of the Drazin axioms at ``axiom_tol`` (scaled).
    """
    A = as_matrix(A, square=True)
    n = A.shape[0]
    a = index_of(A, tol)
    if l is None:
        l = a
    elif l < a:
        raise ValueError(f"l={l} is below the computed index {a}")
    B = _matrix_power(A, 2 * l + 1)
    G = one_inverse(B, tol)
    Pl = _matrix_power(A, l)
    E, F, rank = _gauss_jordan(Pl, tol * float(np.linalg.norm(Pl)))
    if rank == 0:
        X = np.zeros((n, n), dtype=np.complex128)
    else:
        # orthonormal basis of range(A**l); null(A**l) from the reduction
        U, _ = qr_factor(Pl @ F[:, :rank])
        C = U.conj().T @ A @ U
        S = np.hstack([U, F[:, rank:]])
        S_inv = one_inverse(S, tol)
        X = U @ one_inverse(C, tol) @ S_inv[:rank, :]
    norm_a = float(np.linalg.norm(A))
    norm_x = float(np.linalg.norm(X))
    Aa = _matrix_power(A, a)
    residuals = {
        "A^(a+1) X = A^a": float(np.linalg.norm(A @ Aa @ X - Aa)),
        "X A X = X": float(np.linalg.norm(X @ A @ X - X)),
        "A X = X A": float(np.linalg.norm(A @ X - X @ A)),
    }
    limits = {
        "A^(a+1) X = A^a": axiom_tol * max(norm_a ** (a + 1) * max(norm_x, 1.0), 1.0),
        "X A X = X": axiom_tol * max(norm_x ** 2 * max(norm_a, 1.0), 1.0),
        "A X = X A": axiom_tol * max(norm_a * norm_x, 1.0),
    }
    bad = {k: v for k, v in residuals.items() if v > limits[k]}
    if bad:
        raise DrazinAxiomError(
            f"Drazin axiom check failed (rank tolerance {tol:.1e} likely "
            f"misconfigured for this matrix): {bad}", residuals)
    return DrazinFactors(index_a=a, one_inverse_B=G, drazin=X)


def drazin_solution(A, b, tol=RANK_TOL):
    """The Drazin-inverse solution ``A^D @ b`` of the system ``A x = b``."""
    A = as_matrix(A, square=True)
    b = as_vector(b, dim=A.shape[0])
    return drazin_inverse(A, tol).drazin @ b
