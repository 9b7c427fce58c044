"""DGMRES augmented with approximate eigenvectors (ADGMRES).

Per cycle: run ``m - a`` Arnoldi steps, take the ``k`` smallest-magnitude
nonzero Ritz pairs of the projected square Hessenberg block, append the Ritz
vectors to the update subspace, then extend the orthonormal basis stage by
stage so that ``A^(a+1) W = V H`` holds for the augmented matrix ``W`` and a
product ``H`` of extended Hessenberg factors.  Each stage reuses the
coefficients already recorded for processed columns and computes only the
new entries.  The small least-squares problem is solved by QR exactly as in
plain DGMRES; with ``k = 0`` the method reduces to DGMRES(m).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .densela import as_matrix, as_vector, hessenberg_eig, mgs_orthogonalize
from .dgmres import (
    CycleResult,
    _apply_power,
    _lsq_solve,
    _matmul_cols,
    _minimization_operator,
    _run_restarted,
    build_krylov,
    dgmres_cycle,
)

__all__ = [
    "AugmentedSystem",
    "RitzExtractionError",
    "RitzSet",
    "adgmres_cycle",
    "adgmres_restarted",
    "augment_basis",
    "build_h_chain",
    "ritz_pairs",
]


class RitzExtractionError(ArithmeticError):
    """Fewer usable (nonzero) Ritz pairs than requested."""


@dataclass(frozen=True)
class RitzSet:
    """Selected Ritz values/vectors, sorted ascending by magnitude.

    ``vectors`` holds the unit-norm Ritz vectors as columns;
    ``discarded_near_zero`` counts eigenvalues dropped by the nonzero
    filter before selection.
    """

    values: np.ndarray
    vectors: np.ndarray
    discarded_near_zero: int

    @property
    def k(self):
        return self.vectors.shape[1]


@dataclass(frozen=True)
class AugmentedSystem:
    """Augmented update basis and its Hessenberg chain.

    ``W`` holds the update directions ``[v_1..v_{m-a}, z_1..z_k]``;
    ``V_final`` the orthonormal basis after the last completed stage;
    ``H_chain`` the per-stage factors and ``H_product`` their product once
    :func:`build_h_chain` has run (``A^(a+1) W = V_final @ H_product``).

    ``skipped_sources`` records (stage, column) pairs whose extension
    vanished (span already contained); ``fresh_entries`` counts the newly
    computed coefficients per stage.  ``image_columns`` and
    ``first_pending`` carry the chain-continuation state: recorded
    expansions of the leading basis columns, and the first basis column
    whose image under ``A`` is not yet known.
    """

    W: np.ndarray
    V_final: np.ndarray
    H_chain: list[np.ndarray]
    H_product: np.ndarray | None = None
    skipped_sources: list[tuple[int, int]] = field(default_factory=list)
    fresh_entries: list[int] = field(default_factory=list)
    image_columns: dict[int, np.ndarray] = field(default_factory=dict)
    first_pending: int = 0


def ritz_pairs(basis, k, cfg, a_norm=None):
    """The ``k`` smallest-magnitude nonzero Ritz pairs of a Krylov basis.

    Eigenpairs come from the square Hessenberg block ``H = V* A V``;
    values with ``|value| <= zero_ritz_tol * scale`` are discarded
    (counted), where ``scale`` is ``a_norm`` when given, else the norm of
    the projected block.  Ritz vectors are lifted through the basis and
    normalized.  Raises :class:`RitzExtractionError` when fewer than ``k``
    nonzero values survive.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if basis.width < k + 1:
        raise ValueError(
            f"basis has {basis.width} columns; need at least k+1 = {k + 1}")
    p = basis.steps
    H_sq = np.array(basis.Hbar[:p, :p])
    pairs = hessenberg_eig(H_sq)
    scale = float(a_norm) if a_norm is not None else float(np.linalg.norm(H_sq))
    thr = cfg.zero_ritz_tol * scale
    kept = [(lam, y) for lam, y in pairs if abs(lam) > thr]
    discarded = len(pairs) - len(kept)
    if len(kept) < k:
        raise RitzExtractionError(
            f"only {len(kept)} nonzero Ritz values available (need {k}); "
            f"increase restart_m or decrease k")
    kept.sort(key=lambda pair: abs(pair[0]))
    selected = kept[:k]
    zs = []
    for _, y in selected:
        z = basis.V[:, :p] @ y
        zs.append(z / np.linalg.norm(z))
    return RitzSet(values=np.array([lam for lam, _ in selected]),
                   vectors=np.column_stack(zs),
                   discarded_near_zero=discarded)


def augment_basis(A, basis, ritz, cfg):
    """Append Ritz vectors to the subspace and extend the orthonormal basis.

    Orthogonalizes each ``A z_i`` against all current basis columns,
    recording the coefficients into the first chain factor so that
    ``A @ W = V_final @ H_chain[0]``.  A vanishing remainder skips the
    extension column (the span is already contained) and is recorded in
    ``skipped_sources``.  With an empty Ritz set this is the identity
    embedding of the Krylov data (pure DGMRES recovered).
    """
    A = as_matrix(A, square=True)
    if basis.breakdown_at is not None:
        raise ValueError("cannot augment an exhausted (broken-down) Krylov basis")
    p = basis.steps
    k = ritz.vectors.shape[1] if ritz.vectors.size else 0
    vecs = [basis.V[:, i].copy() for i in range(basis.width)]
    images = {j: basis.Hbar[:j + 2, j].copy() for j in range(p)}
    new_cols = {}
    skipped = []
    fresh = 0
    for i in range(k):
        z = ritz.vectors[:, i]
        w = A @ z
        h, hnext, vnext = mgs_orthogonalize(np.column_stack(vecs), w, cfg.breakdown_tol)
        fresh += len(h) + 1
        if vnext is None:
            new_cols[p + i] = h
            skipped.append((0, p + i))
        else:
            new_cols[p + i] = np.append(h, hnext)
            vecs.append(vnext)
    rows = len(vecs)
    H0 = np.zeros((rows, p + k), dtype=np.complex128)
    for j in range(p):
        H0[:j + 2, j] = images[j]
    for j, col in new_cols.items():
        H0[:len(col), j] = col
    if k:
        W = np.column_stack([basis.V[:, :p], ritz.vectors])
    else:
        W = basis.V[:, :p].copy()
    return AugmentedSystem(W=W, V_final=np.column_stack(vecs), H_chain=[H0],
                           H_product=None, skipped_sources=skipped,
                           fresh_entries=[fresh], image_columns=images,
                           first_pending=p)


def build_h_chain(A, system, a, cfg):
    """Complete the Hessenberg chain up to stage ``a`` and form the product.

    Stage ``t`` applies ``A`` to the basis columns whose images are still
    unknown, orthogonalizing against the current basis; coefficients of
    already-processed columns are reused, so only the staircase of new
    entries is computed.  On exit ``A^(a+1) @ W = V_final @ H_product``.
    """
    A = as_matrix(A, square=True)
    vecs = [system.V_final[:, i].copy() for i in range(system.V_final.shape[1])]
    images = dict(system.image_columns)
    pending = system.first_pending
    chain = list(system.H_chain)
    skipped = list(system.skipped_sources)
    fresh_entries = list(system.fresh_entries)
    for t in range(1, a + 1):
        width_prev = len(vecs)
        if pending >= width_prev:
            # basis is A-invariant: every column's expansion is on record
            Ht = np.zeros((width_prev, width_prev), dtype=np.complex128)
            for j in range(width_prev):
                col = images[j]
                Ht[:len(col), j] = col
            chain.append(Ht)
            fresh_entries.append(0)
            continue
        out = vecs[:pending + 1]
        new_cols = {}
        fresh = 0
        for q in range(pending, width_prev):
            w = A @ vecs[q]
            h, hnext, vnext = mgs_orthogonalize(np.column_stack(out), w,
                                                cfg.breakdown_tol)
            fresh += len(h) + 1
            if vnext is None:
                new_cols[q] = h
                skipped.append((t, q))
            else:
                new_cols[q] = np.append(h, hnext)
                out.append(vnext)
        rows = len(out)
        Ht = np.zeros((rows, width_prev), dtype=np.complex128)
        for j in range(pending):
            col = images[j]
            Ht[:len(col), j] = col
        for q, col in new_cols.items():
            Ht[:len(col), q] = col
        images = {j: images[j] for j in range(pending)}
        images[pending] = new_cols[pending]
        pending += 1
        vecs = out
        chain.append(Ht)
        fresh_entries.append(fresh)
    product = chain[0]
    for factor in chain[1:]:
        product = _matmul_cols(factor, product)
    return AugmentedSystem(W=system.W, V_final=np.column_stack(vecs),
                           H_chain=chain, H_product=product,
                           skipped_sources=skipped, fresh_entries=fresh_entries,
                           image_columns=images, first_pending=pending)


def adgmres_cycle(A, b, x0, k, cfg):
    """One ADGMRES(m, k) cycle from ``x0``.

    Builds a Krylov basis of width ``m - a``, augments it with ``k`` Ritz
    vectors, completes the Hessenberg chain and minimizes the seminorm over
    the augmented subspace.  If Ritz extraction fails the cycle falls back
    to an unaugmented DGMRES(m) cycle (flagged in the result); an Arnoldi
    breakdown solves exactly in the exhausted subspace instead.
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
    basis = build_krylov(A, s0, cfg.restart_m - a, cfg)
    if basis.breakdown_at is not None:
        Hhat, Vup = _minimization_operator(basis, a)
        y, ls_resid = _lsq_solve(Hhat, beta)
        x_new = x0 + Vup @ y
        seminorm = float(np.linalg.norm(_apply_power(A, a, b - A @ x_new)))
        return CycleResult(x_new=x_new, seminorm=seminorm, ls_residual=ls_resid,
                           basis_dim=Vup.shape[1], breakdown=True)
    if k == 0:
        ritz = RitzSet(values=np.zeros(0, dtype=np.complex128),
                       vectors=np.zeros((A.shape[0], 0), dtype=np.complex128),
                       discarded_near_zero=0)
    else:
        try:
            ritz = ritz_pairs(basis, k, cfg, a_norm=np.linalg.norm(A))
        except RitzExtractionError:
            result = dgmres_cycle(A, b, x0, cfg)
            return replace(result, fallback=True)
    system = augment_basis(A, basis, ritz, cfg)
    system = build_h_chain(A, system, a, cfg)
    y, ls_resid = _lsq_solve(system.H_product, beta)
    x_new = x0 + system.W @ y
    seminorm = float(np.linalg.norm(_apply_power(A, a, b - A @ x_new)))
    return CycleResult(x_new=x_new, seminorm=seminorm, ls_residual=ls_resid,
                       basis_dim=system.W.shape[1], breakdown=False)


def adgmres_restarted(A, b, x0, k, cfg):
    """Restarted ADGMRES(m, k); Ritz pairs are recomputed fresh each cycle.

    Same stopping rule and history layout as :func:`dgmres_restarted`;
    cycles that fell back to plain DGMRES are flagged per record.
    """
    return _run_restarted(
        lambda A_, b_, x_: adgmres_cycle(A_, b_, x_, k, cfg), A, b, x0, cfg)
