"""Dense symmetric linear algebra: Jacobi eigendecomposition, PSD square
root, Cholesky factorization and SPD solves.

Matrices are plain float ndarrays. Symmetry is a contract, not a wrapper
class: ``as_symmetric`` mirrors the upper triangle exactly and rejects
inputs whose asymmetry exceeds tolerance. Everything here is deterministic
(fixed sweep order, no pivoting); results are bit-identical across runs.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import (
    ConvergenceError,
    NotPositiveDefiniteError,
    NotPositiveSemidefiniteError,
    NotSymmetricError,
)

DEFAULT_TOL = 1e-12
MAX_SWEEPS = 100
PSD_CLAMP_REL = 1e-8


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray   # ascending
    eigenvectors: np.ndarray  # orthonormal columns, aligned with eigenvalues


def as_symmetric(a: np.ndarray, rtol: float = 1e-8) -> np.ndarray:
    """Return a copy with the upper triangle mirrored exactly onto the lower.

    Raises NotSymmetricError when max |a - a.T| exceeds rtol * max|a|.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetricError("matrix must be square")
    scale = max(np.abs(a).max(), 1.0) if a.size else 1.0
    gap = np.abs(a - a.T).max() if a.size else 0.0
    if gap > rtol * scale:
        raise NotSymmetricError(f"matrix asymmetry {gap:.3e} exceeds {rtol:.1e} * scale")
    return np.triu(a) + np.triu(a, 1).T


def jacobi_eigen(a: np.ndarray, tol: float = DEFAULT_TOL, max_sweeps: int = MAX_SWEEPS) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix by cyclic-by-row Jacobi.

    Eigenvalues come back ascending; eigenvector columns are orthonormal and
    satisfy ||A v - lambda v|| <= tol * ||A||.
    """
    work = as_symmetric(a)
    diag, vecs, sweeps = kernels.jacobi_sweeps(work, tol, max_sweeps)
    if sweeps < 0:
        raise ConvergenceError(f"jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(diag).copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], np.ascontiguousarray(vecs[:, order]))


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root via the spectral decomposition.

    Eigenvalues in [-PSD_CLAMP_REL * ||a||, 0) are clamped to zero; anything
    more negative raises NotPositiveSemidefiniteError.
    """
    w, v = jacobi_eigen(a)
    scale = max(np.abs(w).max(), np.finfo(float).tiny)
    if w[0] < -PSD_CLAMP_REL * scale:
        raise NotPositiveSemidefiniteError(f"eigenvalue {w[0]:.3e} below -{PSD_CLAMP_REL:.0e} * scale")
    root = np.sqrt(np.clip(w, 0.0, None))
    s = (v * root) @ v.T
    return (s + s.T) / 2.0


def cholesky(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor L with L L^T = a; raises NotPD on a bad pivot."""
    work = as_symmetric(a)
    low, failed = kernels.cholesky(work)
    if failed >= 0:
        raise NotPositiveDefiniteError(f"nonpositive pivot at index {failed}")
    return low


def cholesky_solve(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    rhs = np.asarray(b, dtype=float)
    squeeze = rhs.ndim == 1
    if squeeze:
        rhs = rhs[:, None]
    x = kernels.cholesky_solve(low, rhs)
    return x[:, 0] if squeeze else x


def solve_spd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b for symmetric positive definite a via Cholesky."""
    return cholesky_solve(cholesky(a), b)


def spd_inverse(a: np.ndarray) -> np.ndarray:
    return cholesky_solve(cholesky(a), np.eye(a.shape[0]))


def write_matrix_csv(fh, row_ids, col_ids, m: np.ndarray) -> None:
    """Matrix CSV: first row/column carry ids, entries at 17 significant digits."""
    fh.write("," + ",".join(col_ids) + "\n")
    for rid, row in zip(row_ids, np.atleast_2d(m)):
        fh.write(rid + "," + ",".join("%.17g" % x for x in row) + "\n")
