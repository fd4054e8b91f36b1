"""Eigenvalue counting via factorization inertia, and low-eigenpair extraction.

Counting N(lambda) uses Sylvester's law: factor (M - lambda I) = LU without
row pivoting (natural column order, SymmetricMode) so that U's diagonal
carries the pivot signs; the count is the number of negative pivots.  This is
preferred over iterative extraction because the Weyl-regime scans need counts
for lambda deep inside the spectrum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .discretize import SparseHermitianOperator

__all__ = ["EigError", "CountResult", "count_below", "lowest_eigenpairs"]

PIVOT_RTOL = 1e-13          # pivots within this band of zero trigger a retry
_DENSE_CUTOFF = 400


class EigError(RuntimeError):
    pass


@dataclass(frozen=True)
class CountResult:
    lam: float
    count: int
    shift_perturbed: bool = False
    perturbation: float = 0.0


def _as_operator_matrix(op) -> tuple[sp.csr_matrix, list[slice]]:
    if isinstance(op, SparseHermitianOperator):
        return op.entries, op.block_slices()
    M = sp.csr_matrix(op)
    return M, [slice(0, M.shape[0])]


def _inertia_of_block(M: sp.csc_matrix, lam: float) -> int:
    """Number of negative pivots of (M - lam I), or None on breakdown."""
    n = M.shape[0]
    if n == 0:
        return 0
    shifted = (M - lam * sp.identity(n, dtype=M.dtype, format="csc")).tocsc()
    norm1 = spla.norm(shifted, 1) if shifted.nnz else 0.0
    try:
        lu = spla.splu(shifted, permc_spec="NATURAL", diag_pivot_thresh=0.0,
                       options=dict(SymmetricMode=True))
    except RuntimeError as exc:      # exactly singular pivot
        raise _Breakdown(str(exc)) from exc
    if not np.array_equal(lu.perm_r, np.arange(n)):
        # row pivoting kicked in: pivot signs no longer give the inertia
        raise _Breakdown("row pivoting occurred")
    piv = lu.U.diagonal()
    if np.abs(piv).min() <= PIVOT_RTOL * max(norm1, 1e-300):
        raise _Breakdown("near-zero pivot")
    return int((piv.real < 0.0).sum())


class _Breakdown(Exception):
    pass


def count_below(op, lam: float) -> CountResult:
    """N(lam): the number of eigenvalues <= lam, by factorization inertia.

    If lam collides with an eigenvalue at machine precision the shift is
    nudged to lam*(1+1e-12)+1e-300 (twice, growing) before giving up.
    Eigenvalues within the pivot tolerance of lam may be counted either way.
    """
    M, blocks = _as_operator_matrix(op)
    lam = float(lam)
    shift = lam
    last_err = ""
    for attempt in range(3):
        try:
            total = 0
            for blk in blocks:
                sub = M[blk, blk] if len(blocks) > 1 else M
                total += _inertia_of_block(sub.tocsc(), shift)
            return CountResult(lam=lam, count=total,
                               shift_perturbed=(attempt > 0),
                               perturbation=shift - lam)
        except _Breakdown as exc:
            last_err = str(exc)
            bump = (1e-12 if attempt == 0 else 1e-8) * max(abs(lam), 1.0)
            shift = lam + bump + 1e-300
    raise EigError(f"factorization failed near lambda={lam!r}: {last_err}")


def lowest_eigenpairs(op, k: int, tol: float = 1e-8,
                      maxiter: int | None = None):
    """The k smallest eigenpairs, ascending, with certified residuals.

    Residual contract: ||M v - lam v|| <= tol * ||M||_1 for unit v.
    Small problems fall back to dense diagonalization.
    """
    M, _ = _as_operator_matrix(op)
    n = M.shape[0]
    if k < 1 or k >= n:
        raise EigError(f"need 1 <= k < dimension, got k={k}, dim={n}")
    norm1 = spla.norm(M, 1) if M.nnz else 0.0

    if n <= _DENSE_CUTOFF:
        w, V = np.linalg.eigh(M.toarray())
        vals, vecs = w[:k], V[:, :k]
    else:
        d = M.diagonal().real
        radius = np.asarray(np.abs(M).sum(axis=1)).ravel() - np.abs(M.diagonal())
        gmin, gmax = (d - radius).min(), (d + radius).max()
        sigma = gmin - 0.01 * max(gmax - gmin, 1.0)
        kk = min(k + 4, n - 1)       # a few extra vectors to settle multiplets
        try:
            w, V = spla.eigsh(M, k=kk, sigma=sigma, which="LM",
                              maxiter=maxiter, tol=tol / 10.0)
        except spla.ArpackNoConvergence as exc:
            got = getattr(exc, "eigenvalues", None)
            raise EigError(
                f"eigsh did not converge; best residual count "
                f"{0 if got is None else len(got)}/{kk}") from exc
        order = np.argsort(w)[:k]
        vals, vecs = w[order], V[:, order]

    res = []
    for i in range(vals.size):
        v = vecs[:, i]
        nv = np.linalg.norm(v)
        res.append(np.linalg.norm(M @ v - vals[i] * v) / nv)
    res = np.array(res)
    if (res > tol * max(norm1, 1e-300)).any():
        raise EigError(f"residual bound violated: max {res.max():.3e} "
                       f"> {tol:.1e} * ||M||_1")
    return [(float(vals[i]), vecs[:, i]) for i in range(vals.size)]
