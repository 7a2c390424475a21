"""Row contractions from the right model, Cauchy duals, and the structural equation.

For each factor the weighted right creations assemble into a row contraction
whose columns are scaled by the square roots of the (reversed) series
coefficients.  Multi-Toeplitz operators satisfy a compression identity
against that row; the residual computed here measures its failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from . import linalg
from .errors import DimensionMismatch, SpecError
from .freemonoid import MultiWord, Word, reverse
from .model import FockOperator, FockSpace
from .weights import PolydomainSpec

__all__ = [
    "RowOperator",
    "build_row",
    "phi_right",
    "alternating_phi_sum",
    "range_projection",
    "cauchy_dual",
    "cauchy_dual_projection",
    "bh_residual",
    "bh_scan",
]


@dataclass
class RowOperator:
    """The row ``[sqrt(a_reversed) Lambda_word ...]`` for one factor.

    ``gamma`` lists the creation words in graded-lexicographic order; they
    range over the reversal of the coefficient support, so that ``C C^*``
    equals the reversed-series completely positive map applied to the
    identity.  Columns act on the coefficient-ampliated space.
    """

    space: FockSpace
    factor: int
    gamma: tuple[Word, ...]
    columns: tuple[sp.spmatrix, ...]
    scales: tuple[float, ...]

    @property
    def n_columns(self) -> int:
        return len(self.gamma)

    def as_matrix(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            sp.hstack([s * col for s, col in zip(self.scales, self.columns)])
        )

    def cc_star(self) -> np.ndarray:
        """``C C^*`` on the space, a.k.a. the reversed-series map at the identity."""
        n = self.space.total_dim
        acc = np.zeros((n, n), dtype=complex)
        for s, col in zip(self.scales, self.columns):
            acc += (s * s) * linalg.as_dense(col @ col.conj().T)
        return acc

    def apply_diag(self, Y: np.ndarray) -> np.ndarray:
        """``C diag(Y) C^*`` without forming the stacked matrix."""
        n = self.space.total_dim
        acc = np.zeros((n, n), dtype=complex)
        for s, col in zip(self.scales, self.columns):
            acc += (s * s) * linalg.as_dense(col @ Y @ col.conj().T)
        return acc


def build_row(
    spec: PolydomainSpec, space: FockSpace, i: int, tol: float = 1e-9
) -> RowOperator:
    """Assemble the factor-``i`` row contraction on ``space`` and check it.

    The column for word ``alpha`` is ``sqrt(a at reverse(alpha))`` times the
    right creation by ``alpha``; the row-contraction bound ``||CC*|| <= 1``
    is verified up to ``tol``.
    """
    if not 0 <= i < spec.k:
        raise DimensionMismatch(f"factor index {i} outside range")
    support = {reverse(w): a for w, a in spec.coeffs[i].items() if a != 0.0}
    gamma = sorted(support, key=lambda w: (len(w), w.letters))
    columns = []
    scales = []
    for alpha in gamma:
        parts = [Word.identity(spec.n[p]) for p in range(spec.k)]
        parts[i] = alpha
        lam = space.creation_product(MultiWord(tuple(parts)), side="right")
        columns.append(space.lift(lam).matrix)
        scales.append(math.sqrt(support[alpha]))
    row = RowOperator(
        space=space,
        factor=i,
        gamma=tuple(gamma),
        columns=tuple(columns),
        scales=tuple(scales),
    )
    top = linalg.op_norm(row.cc_star())
    if top > 1.0 + tol:
        raise SpecError(f"row is not a contraction: ||CC*|| = {top:.6f}")
    return row


def phi_right(space: FockSpace, i: int, Y: np.ndarray) -> np.ndarray:
    """The reversed-series map of factor ``i`` on the ampliated right model.

    Each creation moves basis vectors injectively, so conjugation is a
    weighted gather/scatter on index arrays rather than a matrix product.
    """
    spec = space.spec
    n = space.total_dim
    if Y.shape != (n, n):
        raise DimensionMismatch("operand shape differs from the space dimension")
    acc = np.zeros((n, n), dtype=complex)
    for w, a in spec.coeffs[i].items():
        src, dst, vals = space.creation_action(i, reverse(w), side="right")
        weights = a * np.outer(vals, vals.conj())
        acc[np.ix_(dst, dst)] += weights * Y[np.ix_(src, src)]
    return acc


def alternating_phi_sum(space: FockSpace, i: int, T: np.ndarray) -> np.ndarray:
    """``sum_{j=1}^{m_i} (-1)^(j-1) C(m_i, j) Phi^j(T)`` for the factor's order."""
    m = space.spec.m[i]
    acc = np.zeros_like(T)
    power = T
    for j in range(1, m + 1):
        power = phi_right(space, i, power)
        acc += ((-1) ** (j - 1)) * math.comb(m, j) * power
    return acc


def range_projection(space: FockSpace, i: int) -> np.ndarray:
    """Projection onto the vectors with nonvacuum factor-``i`` component."""
    degs = space.degree_table()
    diag = (degs[:, i] > 0).astype(complex)
    c = space.coeff_dim
    return np.diag(np.kron(np.ones(c), diag))


def cauchy_dual(C: RowOperator, rank_tol: float = 1e-10) -> np.ndarray:
    """``C (C*C)^{-1}`` with the inverse taken on the range of ``C^*``.

    Realized through the Hermitian pseudo-inverse of ``C*C``; eigenvalues near
    the rank cutoff raise :class:`NumericalRankError`.  Sized for spaces where
    the stacked Gram matrix is tractable.
    """
    mat = linalg.as_dense(C.as_matrix())
    gram = mat.conj().T @ mat
    return mat @ linalg.pinv_on_range(gram, rank_tol=rank_tol)


def cauchy_dual_projection(C: RowOperator, rank_tol: float = 1e-10) -> np.ndarray:
    """``C (C*C)^{-1} C^*``, the orthogonal projection onto the range of ``C``."""
    dual = cauchy_dual(C, rank_tol=rank_tol)
    return dual @ linalg.as_dense(C.as_matrix()).conj().T


def _min_positive_gram_eig(space: FockSpace, i: int, rank_tol: float = 1e-12) -> float:
    # CC* acts as identity off factor i, so its positive spectrum equals that
    # of the factor-level sum and the small eigenproblem suffices
    cache = getattr(space, "_bh_gram_cache", None)
    if cache is None:
        cache = {}
        setattr(space, "_bh_gram_cache", cache)
    if i not in cache:
        d = space.factor_dims[i]
        M = np.zeros((d, d), dtype=complex)
        for w, a in space.spec.coeffs[i].items():
            lam = space.factor_creation(i, reverse(w), side="right")
            M += a * (lam @ lam.conj().T).toarray()
        eigs = np.linalg.eigvalsh(linalg.hermitize(M))
        lam_max = float(eigs[-1]) if eigs.size else 0.0
        positive = eigs[eigs > rank_tol * max(lam_max, 1.0)]
        cache[i] = float(positive[0]) if positive.size else 0.0
    return cache[i]


def bh_residual(
    T: FockOperator,
    spec: PolydomainSpec,
    i: int,
    headroom: Optional[Sequence[int]] = None,
) -> float:
    """Residual of the factor-``i`` structural equation for ``T``.

    The equation compressed to the range of ``C^*`` is conjugated by the row
    into the equivalent base-space identity

        ``Q T Q = sum_{j=1}^{m_i} (-1)^(j-1) C(m_i, j) Phi^j(T)``

    with ``Q`` the projection onto nonvacuum factor-``i`` vectors.  The
    conjugation is injective on operators supported on that range, and
    dividing the deviation norm by the smallest positive eigenvalue of the
    row's Gram matrix upper-bounds the norm of the original compressed
    residual.  Lowering operators never leave the truncation, so the identity
    is exact on the whole truncated space; ``headroom`` defaults to zero and
    only shrinks the compared block further.
    """
    space = T.space
    if spec is not space.spec:
        if spec != space.spec:
            raise DimensionMismatch("spec differs from the operator space's spec")
    if not 0 <= i < spec.k:
        raise DimensionMismatch(f"factor index {i} outside range")
    degs = space.degree_table()
    q = np.tile((degs[:, i] > 0).astype(float), space.coeff_dim)
    Td = T.dense
    lhs = Td * np.outer(q, q)
    rhs = alternating_phi_sum(space, i, Td)
    diff = lhs - rhs
    if headroom is not None:
        mask = np.tile(space.safe_mask(headroom), space.coeff_dim)
        diff = diff[np.ix_(mask, mask)]
    lam = _min_positive_gram_eig(space, i)
    if lam <= 0.0:
        raise SpecError("row Gram matrix has no positive spectrum")
    return float(np.linalg.norm(diff)) / lam


def bh_scan(
    T: FockOperator, spec: PolydomainSpec, tol: float = 1e-9
) -> dict:
    """Per-factor residual report for the structural equation.

    A clean scan is labeled ``BH-consistent``: satisfying the equation is
    necessary for the weighted multi-Toeplitz class but not known to be
    sufficient, so no structural claim is made.
    """
    residuals = [bh_residual(T, spec, i) for i in range(spec.k)]
    satisfied = all(r <= tol for r in residuals)
    return {
        "residuals": residuals,
        "tolerance": tol,
        "satisfied": satisfied,
        "classification": "BH-consistent" if satisfied else "BH-violated",
    }
