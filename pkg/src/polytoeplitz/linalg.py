"""Shared numerical kernels: Hermitian eigenwork, norms, PSD tests, matrix I/O.

Everything here is a thin, deterministic wrapper over numpy/scipy dense
routines.  Sparse inputs (scipy COO/CSR) are accepted and densified where an
eigensolver needs them; verdict paths never use randomized initialization.
"""

from __future__ import annotations

from typing import IO, Tuple, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg

from .errors import DimensionMismatch, NumericalRankError, SpecError

__all__ = [
    "as_dense",
    "adjoint",
    "hermitize",
    "psd_check",
    "op_norm",
    "herm_sqrt",
    "pinv_on_range",
    "save_matrix",
    "load_matrix",
]

MatrixLike = Union[np.ndarray, sp.spmatrix]

# dense 2-norm via full SVD up to this size, Lanczos above
_DENSE_NORM_CUTOFF = 600


def as_dense(mat: MatrixLike) -> np.ndarray:
    if sp.issparse(mat):
        return np.asarray(mat.todense(), dtype=complex)
    return np.asarray(mat, dtype=complex)


def adjoint(mat: MatrixLike) -> MatrixLike:
    if sp.issparse(mat):
        return mat.conj().T
    return np.conj(mat).T


def hermitize(mat: MatrixLike) -> np.ndarray:
    m = as_dense(mat)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {m.shape}")
    return 0.5 * (m + m.conj().T)


def psd_check(mat: MatrixLike, tol: float = 1e-9) -> Tuple[bool, float]:
    """Test positive semidefiniteness after Hermitizing.

    Returns ``(verdict, lambda_min)``; the verdict is true iff
    ``lambda_min >= -tol * max(1, lambda_max)``.
    """
    h = hermitize(mat)
    if h.shape[0] == 0:
        return True, 0.0
    eigs = np.linalg.eigvalsh(h)
    lo, hi = float(eigs[0]), float(eigs[-1])
    return lo >= -tol * max(1.0, hi), lo


def op_norm(mat: MatrixLike) -> float:
    """Largest singular value."""
    if sp.issparse(mat):
        if min(mat.shape) <= 2:
            return op_norm(as_dense(mat))
        if max(mat.shape) > _DENSE_NORM_CUTOFF:
            v0 = np.ones(min(mat.shape))
            s = scipy.sparse.linalg.svds(
                mat.astype(complex), k=1, v0=v0, return_singular_vectors=False
            )
            return float(s[0])
        mat = as_dense(mat)
    m = np.asarray(mat)
    if m.size == 0:
        return 0.0
    if max(m.shape) > _DENSE_NORM_CUTOFF and min(m.shape) > 2:
        v0 = np.ones(min(m.shape))
        s = scipy.sparse.linalg.svds(
            np.asarray(m, dtype=complex), k=1, v0=v0, return_singular_vectors=False
        )
        return float(s[0])
    return float(np.linalg.norm(m, 2))


def herm_sqrt(mat: MatrixLike, tol: float = 1e-10) -> np.ndarray:
    """Hermitian square root via eigendecomposition.

    Eigenvalues in ``[-tol*scale, 0)`` are clamped to zero; anything more
    negative is a genuine failure and raises.
    """
    h = hermitize(mat)
    eigs, vecs = np.linalg.eigh(h)
    scale = max(1.0, float(eigs[-1])) if eigs.size else 1.0
    if eigs.size and eigs[0] < -tol * scale:
        raise SpecError(
            f"herm_sqrt input is not PSD: min eigenvalue {eigs[0]:.3e} below -{tol:.1e}*scale"
        )
    clipped = np.clip(eigs, 0.0, None)
    return (vecs * np.sqrt(clipped)) @ vecs.conj().T


def pinv_on_range(mat: MatrixLike, rank_tol: float = 1e-12) -> np.ndarray:
    """Pseudo-inverse of a Hermitian PSD matrix, restricted to its range.

    Eigenvalues <= ``rank_tol * lambda_max`` count as kernel.  An eigenvalue
    within a factor of 10 of the cutoff (on either side) is ambiguous and
    raises :class:`NumericalRankError`.
    """
    h = hermitize(mat)
    eigs, vecs = np.linalg.eigh(h)
    lam_max = float(eigs[-1]) if eigs.size else 0.0
    if lam_max <= 0.0:
        return np.zeros_like(h)
    cut = rank_tol * lam_max
    ambiguous = (np.abs(eigs) > cut / 10.0) & (np.abs(eigs) < cut * 10.0)
    if np.any(ambiguous):
        worst = float(eigs[np.argmax(ambiguous)])
        raise NumericalRankError(
            f"eigenvalue {worst:.3e} within x10 of rank cutoff {cut:.3e}"
        )
    inv = np.where(eigs > cut, 1.0 / np.where(eigs > cut, eigs, 1.0), 0.0)
    return (vecs * inv) @ vecs.conj().T


def save_matrix(fh: IO[str], mat: MatrixLike) -> None:
    """Write the coordinate text format: header ``rows cols nnz``, lines ``row col re im``.

    Indices are 0-based; values carry 17 significant digits so a round-trip
    is lossless in double precision.
    """
    coo = sp.coo_matrix(mat)
    coo.sum_duplicates()
    fh.write(f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
    for r, c, v in zip(coo.row, coo.col, coo.data):
        v = complex(v)
        fh.write(f"{r} {c} {v.real:.17g} {v.imag:.17g}\n")


def load_matrix(fh: IO[str]) -> sp.coo_matrix:
    """Read the coordinate text format written by :func:`save_matrix`."""
    header = fh.readline().split()
    if len(header) != 3:
        raise DimensionMismatch("matrix file: malformed header (want 'rows cols nnz')")
    try:
        rows, cols, nnz = (int(x) for x in header)
    except ValueError as exc:
        raise DimensionMismatch(f"matrix file: bad header {header!r}") from exc
    rr = np.empty(nnz, dtype=np.int64)
    cc = np.empty(nnz, dtype=np.int64)
    vv = np.empty(nnz, dtype=complex)
    for idx in range(nnz):
        parts = fh.readline().split()
        if len(parts) != 4:
            raise DimensionMismatch(f"matrix file: malformed entry line {idx + 2}")
        rr[idx] = int(parts[0])
        cc[idx] = int(parts[1])
        vv[idx] = float(parts[2]) + 1j * float(parts[3])
    if nnz and (rr.max() >= rows or cc.max() >= cols or rr.min() < 0 or cc.min() < 0):
        raise DimensionMismatch("matrix file: entry index outside declared shape")
    return sp.coo_matrix((vv, (rr, cc)), shape=(rows, cols))
