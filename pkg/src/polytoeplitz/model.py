"""Truncated tensor Fock spaces and the universal model operators.

The space is the span of ``e_w`` for multi-words ``w`` within a per-factor
degree truncation, tensored with a coefficient space of dimension
``coeff_dim``.  Weighted left/right creation operators are compressions
``P T P`` of their full-space counterparts; each verification routine states
the subspace on which the identity it checks is exact.

Basis order is graded-lexicographic per factor with the vacuum first and the
first factor slowest, so Kronecker products of per-factor matrices line up
with :func:`polytoeplitz.freemonoid.multiword_index`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

from . import linalg
from .errors import DimensionMismatch, SpecError, TruncationError
from .freemonoid import IndexPair, MultiWord, Word, enumerate_words, reverse
from .weights import PolydomainSpec, WeightTable, build_weight_table, univariate_series_weights

__all__ = [
    "FockSpace",
    "FockOperator",
    "PairStructure",
    "weighted_left_creation",
    "weighted_right_creation",
    "monomial",
    "graded_projection",
    "weighted_fock_unitary",
    "scalar_kernel",
    "truncated_gram_kernel",
]


class FockSpace:
    """Truncated ``K (x) F^2(H_{n_1}) (x) ... (x) F^2(H_{n_k})`` with its weights."""

    def __init__(
        self,
        spec: PolydomainSpec,
        trunc: Sequence[int],
        coeff_dim: int = 1,
        weights: Optional[WeightTable] = None,
    ) -> None:
        if len(trunc) != spec.k:
            raise SpecError("truncation tuple length differs from factor count")
        if coeff_dim < 1:
            raise SpecError("coefficient dimension must be >= 1")
        self.spec = spec
        self.trunc = tuple(int(L) for L in trunc)
        self.coeff_dim = int(coeff_dim)
        self.weights = weights if weights is not None else build_weight_table(spec, self.trunc)
        if self.weights.trunc != self.trunc:
            raise SpecError("weight table truncation differs from requested truncation")
        self.factor_words: list[list[Word]] = [
            enumerate_words(n, L) for n, L in zip(spec.n, self.trunc)
        ]
        self.factor_index: list[dict[Word, int]] = [
            {w: idx for idx, w in enumerate(ws)} for ws in self.factor_words
        ]
        self.factor_dims = tuple(len(ws) for ws in self.factor_words)
        self.dim = int(np.prod(self.factor_dims))
        self._basis: Optional[list[MultiWord]] = None
        self._degrees: Optional[np.ndarray] = None
        self._pairs: Optional[PairStructure] = None

    # -- basis bookkeeping -------------------------------------------------

    @property
    def total_dim(self) -> int:
        return self.coeff_dim * self.dim

    def basis(self) -> list[MultiWord]:
        if self._basis is None:
            self._basis = [
                MultiWord(combo) for combo in itertools.product(*self.factor_words)
            ]
        return self._basis

    def index_of(self, w: MultiWord) -> int:
        idx = 0
        for i, part in enumerate(w.parts):
            pos = self.factor_index[i].get(part)
            if pos is None:
                raise TruncationError(f"{part.render()} outside truncation {self.trunc[i]}")
            idx = idx * self.factor_dims[i] + pos
        return idx

    def multiword_at(self, idx: int) -> MultiWord:
        return self.basis()[idx]

    def degree_table(self) -> np.ndarray:
        """Integer array (dim, k): degree vector of each basis multi-word."""
        if self._degrees is None:
            per_factor = [
                np.array([len(w) for w in ws], dtype=np.int64) for ws in self.factor_words
            ]
            cols = []
            for i, degs in enumerate(per_factor):
                before = int(np.prod(self.factor_dims[:i])) if i else 1
                after = int(np.prod(self.factor_dims[i + 1 :])) if i + 1 < self.spec.k else 1
                cols.append(np.tile(np.repeat(degs, after), before))
            self._degrees = np.stack(cols, axis=1)
        return self._degrees

    def safe_mask(self, headroom: Sequence[int]) -> np.ndarray:
        """Boolean mask over Fock basis indices with per-factor degree headroom."""
        if len(headroom) != self.spec.k:
            raise DimensionMismatch("headroom tuple length differs from factor count")
        degs = self.degree_table()
        limits = np.array([L - h for L, h in zip(self.trunc, headroom)], dtype=np.int64)
        return np.all(degs <= limits[None, :], axis=1)

    # -- operator construction ----------------------------------------------

    def lift(self, fock_matrix: Union[np.ndarray, sp.spmatrix], label: str = "") -> "FockOperator":
        """Ampliate a Fock-only matrix by the identity on the coefficient space."""
        if self.coeff_dim == 1:
            mat = fock_matrix
        elif sp.issparse(fock_matrix):
            mat = sp.kron(sp.identity(self.coeff_dim, format="csr"), fock_matrix, format="csr")
        else:
            mat = np.kron(np.eye(self.coeff_dim), fock_matrix)
        return FockOperator(self, mat, label)

    def factor_creation(self, i: int, word: Word, side: str = "left") -> sp.csr_matrix:
        """Per-factor creation matrix for a whole word on factor ``i``.

        ``side="left"`` prepends ``word``; ``side="right"`` appends the
        reversed word.  Columns whose image leaves the truncation are zero.
        """
        if not 0 <= i < self.spec.k:
            raise DimensionMismatch(f"factor index {i} outside range")
        if word.alphabet_size != self.spec.n[i]:
            raise DimensionMismatch("word alphabet does not match the factor")
        ws = self.factor_words[i]
        index = self.factor_index[i]
        b = self.weights.tables[i]
        rows, cols, vals = [], [], []
        for col, gamma in enumerate(ws):
            if side == "left":
                target = word.concat(gamma)
            elif side == "right":
                target = gamma.concat(reverse(word))
            else:
                raise SpecError(f"unknown side {side!r}")
            pos = index.get(target)
            if pos is None:
                continue
            rows.append(pos)
            cols.append(col)
            vals.append(math.sqrt(b[gamma] / b[target]))
        d = self.factor_dims[i]
        return sp.csr_matrix(
            (np.asarray(vals, dtype=complex), (rows, cols)), shape=(d, d)
        )

    def fock_kron(self, factors: Sequence[sp.spmatrix]) -> sp.csr_matrix:
        out = factors[0]
        for f in factors[1:]:
            out = sp.kron(out, f, format="csr")
        return sp.csr_matrix(out)

    def creation_product(self, w: MultiWord, side: str = "left") -> sp.csr_matrix:
        """Fock-part matrix of the (left or right) creation by a multi-word."""
        mats = [self.factor_creation(i, part, side) for i, part in enumerate(w.parts)]
        return self.fock_kron(mats)

    def creation_action(self, i: int, word: Word, side: str = "left"):
        """Index-level view of a single-factor creation on the lifted space.

        Returns ``(src, dst, vals)`` with ``A e_src = vals * e_dst`` column by
        column; creations have at most one entry per column, so gather/scatter
        with these arrays replaces sparse matrix products in hot paths.
        """
        cache = getattr(self, "_action_cache", None)
        if cache is None:
            cache = {}
            self._action_cache = cache
        key = (side, i, word.letters)
        if key not in cache:
            coo = self.factor_creation(i, word, side=side).tocoo()
            pre = int(np.prod(self.factor_dims[:i])) if i else 1
            post = int(np.prod(self.factor_dims[i + 1 :])) if i + 1 < self.spec.k else 1
            d_i = self.factor_dims[i]
            base = (
                np.arange(pre)[:, None, None] * (d_i * post)
                + np.arange(post)[None, None, :]
            )
            src = (base + coo.col[None, :, None] * post).ravel()
            dst = (base + coo.row[None, :, None] * post).ravel()
            vals = np.broadcast_to(
                coo.data[None, :, None], (pre, coo.nnz, post)
            ).ravel()
            if self.coeff_dim > 1:
                offs = np.arange(self.coeff_dim) * self.dim
                src = (offs[:, None] + src[None, :]).ravel()
                dst = (offs[:, None] + dst[None, :]).ravel()
                vals = np.tile(vals, self.coeff_dim)
            cache[key] = (src, dst, np.asarray(vals, dtype=complex))
        return cache[key]

    def identity(self) -> "FockOperator":
        return FockOperator(self, sp.identity(self.total_dim, format="csr", dtype=complex), "I")

    # -- comparability structure --------------------------------------------

    def pair_structure(self) -> "PairStructure":
        if self._pairs is None:
            self._pairs = _build_pair_structure(self)
        return self._pairs


@dataclass
class FockOperator:
    """An operator on ``K (x) Fock`` with basis bookkeeping attached."""

    space: FockSpace
    matrix: Union[np.ndarray, sp.spmatrix]
    label: str = ""

    def __post_init__(self) -> None:
        n = self.space.total_dim
        if self.matrix.shape != (n, n):
            raise DimensionMismatch(
                f"operator shape {self.matrix.shape} does not match space dim {n}"
            )

    @property
    def dense(self) -> np.ndarray:
        return linalg.as_dense(self.matrix)

    def adjoint(self) -> "FockOperator":
        return FockOperator(self.space, linalg.adjoint(self.matrix), f"({self.label})*")

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        self._check_same_space(other)
        return FockOperator(self.space, self.matrix @ other.matrix, f"{self.label}{other.label}")

    def __add__(self, other: "FockOperator") -> "FockOperator":
        self._check_same_space(other)
        return FockOperator(self.space, self.matrix + other.matrix, self.label)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        self._check_same_space(other)
        return FockOperator(self.space, self.matrix - other.matrix, self.label)

    def __rmul__(self, c: complex) -> "FockOperator":
        return FockOperator(self.space, c * self.matrix, self.label)

    def norm(self) -> float:
        return linalg.op_norm(self.matrix)

    def blocks(self) -> np.ndarray:
        """View as (c, c, dim, dim): coefficient block (x, y) against basis pair (row, col)."""
        c, d = self.space.coeff_dim, self.space.dim
        return self.dense.reshape(c, d, c, d).transpose(0, 2, 1, 3)

    def _check_same_space(self, other: "FockOperator") -> None:
        if other.space is not self.space and (
            other.space.total_dim != self.space.total_dim
        ):
            raise DimensionMismatch("operators live on different spaces")


@dataclass
class PairStructure:
    """Vectorized comparability data over all basis pairs of a space.

    ``cls`` assigns every comparable pair the integer id of its reduced
    representative; ``rep_row``/``rep_col`` give that representative's basis
    indices, so structure checks reduce to numpy gathers.
    """

    space: FockSpace
    comp: np.ndarray          # (dim, dim) bool
    tau: np.ndarray           # (dim, dim) float, 0 where not comparable
    cls: np.ndarray           # (dim, dim) int, -1 where not comparable
    n_classes: int
    rep_row: np.ndarray       # (n_classes,) basis index of the left word
    rep_col: np.ndarray       # (n_classes,) basis index of the right word
    tau_rep: np.ndarray       # (n_classes,)
    s_abs: np.ndarray         # (n_classes,) total |s|
    s_vectors: np.ndarray     # (n_classes, k) signed degree vectors

    def class_pair(self, c: int) -> IndexPair:
        space = self.space
        return IndexPair(
            left=space.multiword_at(int(self.rep_row[c])),
            right=space.multiword_at(int(self.rep_col[c])),
        )

    def reduced_pairs(self) -> list[IndexPair]:
        return [self.class_pair(c) for c in range(self.n_classes)]


def _factor_pair_tables(space: FockSpace, i: int):
    ws = space.factor_words[i]
    count = len(ws)
    b = space.weights.tables[i]
    comp = np.zeros((count, count), dtype=bool)
    tau = np.zeros((count, count), dtype=float)
    jid = np.full((count, count), -1, dtype=np.int64)
    letters = [w.letters for w in ws]
    index = space.factor_index[i]
    n = space.spec.n[i]
    for x in range(count):
        lx = letters[x]
        bx = b[ws[x]]
        for y in range(count):
            ly = letters[y]
            if len(lx) >= len(ly):
                if len(ly) == 0 or lx[len(lx) - len(ly):] == ly:
                    # omega >=_r gamma: reduced pair (quotient, e)
                    quotient = Word(lx[: len(lx) - len(ly)], n)
                    comp[x, y] = True
                    tau[x, y] = math.sqrt(b[ws[y]] / bx)
                    jid[x, y] = index[quotient]
            elif ly[len(ly) - len(lx):] == lx:
                # gamma >_r omega: reduced pair (e, quotient)
                quotient = Word(ly[: len(ly) - len(lx)], n)
                comp[x, y] = True
                tau[x, y] = math.sqrt(bx / b[ws[y]])
                jid[x, y] = count + index[quotient] - 1
    return comp, tau, jid, 2 * count - 1


def _build_pair_structure(space: FockSpace) -> PairStructure:
    k = space.spec.k
    comp, tau, cls = None, None, None
    radices = []
    for i in range(k):
        c_i, t_i, j_i, ncls_i = _factor_pair_tables(space, i)
        radices.append(ncls_i)
        if comp is None:
            comp, tau, cls = c_i, t_i, j_i
        else:
            comp = (comp[:, None, :, None] & c_i[None, :, None, :]).reshape(
                comp.shape[0] * c_i.shape[0], -1
            )
            tau = (tau[:, None, :, None] * t_i[None, :, None, :]).reshape(comp.shape)
            cls = (cls[:, None, :, None] * ncls_i + j_i[None, :, None, :]).reshape(comp.shape)
    cls = np.where(comp, cls, -1)
    tau = np.where(comp, tau, 0.0)

    n_classes = 1
    for r in radices:
        n_classes *= r
    ids = np.arange(n_classes, dtype=np.int64)
    # decompose class ids back into per-factor reduced pairs
    per_factor_ids = []
    rem = ids
    for r in reversed(radices):
        per_factor_ids.append(rem % r)
        rem = rem // r
    per_factor_ids.reverse()
    rep_row = np.zeros(n_classes, dtype=np.int64)
    rep_col = np.zeros(n_classes, dtype=np.int64)
    s_vectors = np.zeros((n_classes, k), dtype=np.int64)
    for i, jids in enumerate(per_factor_ids):
        count = space.factor_dims[i]
        left_rank = np.where(jids < count, jids, 0)
        right_rank = np.where(jids < count, 0, jids - count + 1)
        rep_row = rep_row * count + left_rank
        rep_col = rep_col * count + right_rank
        lengths = np.array([len(w) for w in space.factor_words[i]], dtype=np.int64)
        s_vectors[:, i] = lengths[left_rank] - lengths[right_rank]
    tau_rep = tau[rep_row, rep_col]
    s_abs = np.abs(s_vectors).sum(axis=1)
    return PairStructure(
        space=space,
        comp=comp,
        tau=tau,
        cls=cls,
        n_classes=n_classes,
        rep_row=rep_row,
        rep_col=rep_col,
        tau_rep=tau_rep,
        s_abs=s_abs,
        s_vectors=s_vectors,
    )


# -- universal model operators ----------------------------------------------


def weighted_left_creation(space: FockSpace, i: int, j: int) -> FockOperator:
    """The weighted left creation by generator ``g_j`` of factor ``i``.

    Maps ``e_w`` to ``sqrt(b_w / b_{g_j w})`` times the shifted basis vector,
    zero when the shift leaves the truncation; ampliated over the other
    factors and the coefficient space.
    """
    n = space.spec.n[i]
    if not 1 <= j <= n:
        raise DimensionMismatch(f"generator index {j} outside 1..{n}")
    parts = [Word.identity(space.spec.n[p]) for p in range(space.spec.k)]
    parts[i] = Word((j,), n)
    mat = space.creation_product(MultiWord(tuple(parts)), side="left")
    return space.lift(mat, f"W[{i + 1},{j}]")


def weighted_right_creation(space: FockSpace, i: int, j: int) -> FockOperator:
    """The weighted right creation by generator ``g_j`` of factor ``i``."""
    n = space.spec.n[i]
    if not 1 <= j <= n:
        raise DimensionMismatch(f"generator index {j} outside 1..{n}")
    parts = [Word.identity(space.spec.n[p]) for p in range(space.spec.k)]
    parts[i] = Word((j,), n)
    mat = space.creation_product(MultiWord(tuple(parts)), side="right")
    return space.lift(mat, f"L[{i + 1},{j}]")


def monomial(space: FockSpace, pair: IndexPair, coefficient: np.ndarray) -> FockOperator:
    """The elementary operator ``A (x) W_left W_right^*`` for a reduced pair."""
    A = np.atleast_2d(np.asarray(coefficient, dtype=complex))
    c = space.coeff_dim
    if A.shape != (c, c):
        raise DimensionMismatch(f"coefficient shape {A.shape} does not match ({c}, {c})")
    wl = space.creation_product(pair.left, side="left")
    wr = space.creation_product(pair.right, side="left")
    fock = sp.csr_matrix(wl @ wr.conj().T)
    if c == 1:
        mat = complex(A[0, 0]) * fock
    else:
        mat = sp.kron(sp.csr_matrix(A), fock, format="csr")
    return FockOperator(space, mat, f"A(x)W{pair.render()}")


def graded_projection(space: FockSpace, p: Sequence[int]) -> FockOperator:
    """Orthogonal projection onto multi-degree ``p``; zero off the degree grid.

    Degree-block extraction is exact on the truncation, so no torus
    quadrature is involved.
    """
    if len(p) != space.spec.k:
        raise DimensionMismatch("degree tuple length differs from factor count")
    degs = space.degree_table()
    target = np.asarray(p, dtype=np.int64)
    if np.any(target < 0) or np.any(target > np.asarray(space.trunc)):
        diag = np.zeros(space.dim)
    else:
        diag = np.all(degs == target[None, :], axis=1).astype(float)
    return space.lift(sp.diags(diag.astype(complex)), f"P{tuple(int(x) for x in p)}")


def weighted_fock_unitary(space: FockSpace, direction: str = "forward") -> FockOperator:
    """Diagonal change of coordinates between the weighted and unweighted pictures.

    Forward entries are ``sqrt(prod_i b_{i, w_i})``; the inverse is its
    reciprocal and equals the adjoint with respect to the weighted norm on
    the target, which is the sense in which the map is unitary.  Conjugation
    ``U W U^{-1}`` turns the weighted creations into unit-coefficient shifts
    on columns of degree below the truncation.
    """
    entries = np.array([space.weights.b_multi(w) for w in space.basis()], dtype=float)
    if direction == "forward":
        diag = np.sqrt(entries)
    elif direction == "inverse":
        diag = 1.0 / np.sqrt(entries)
    else:
        raise SpecError(f"unknown direction {direction!r}")
    return space.lift(sp.diags(diag.astype(complex)), f"U[{direction}]")


# -- scalar reproducing kernel (all n_i = 1) ---------------------------------


def scalar_kernel(
    spec: PolydomainSpec,
    m: Optional[Sequence[int]],
    z: Sequence[complex],
    w: Sequence[complex],
) -> complex:
    """Closed-form reproducing kernel ``prod_i (1 - sum_p a_{i,p} conj(z_i)^p w_i^p)^{-m_i}``.

    Requires every factor to have a single generator and the argument of each
    factor's series to stay inside the unit disc.
    """
    if any(n != 1 for n in spec.n):
        raise SpecError("scalar kernel requires n_i = 1 in every factor")
    orders = tuple(m) if m is not None else spec.m
    if len(orders) != spec.k or len(z) != spec.k or len(w) != spec.k:
        raise DimensionMismatch("z, w, m must have one entry per factor")
    value = 1.0 + 0.0j
    for i in range(spec.k):
        inner = 0.0 + 0.0j
        for word, a in spec.coeffs[i].items():
            p = len(word)
            inner += a * (np.conj(z[i]) ** p) * (w[i] ** p)
        if abs(inner) >= 1.0:
            raise SpecError(
                f"factor {i + 1}: |sum a_p conj(z)^p w^p| = {abs(inner):.4f} >= 1 (divergent)"
            )
        value *= (1.0 - inner) ** (-orders[i])
    return complex(value)


def truncated_gram_kernel(
    spec: PolydomainSpec,
    m: Optional[Sequence[int]],
    z: Sequence[complex],
    w: Sequence[complex],
    trunc: Sequence[int],
    horizon: int = 40,
) -> tuple[complex, float]:
    """Truncated Gram sum ``sum_w (prod_i b_{i,w_i}) conj(z)^w w^w`` and a tail bound.

    The bound per factor sums ``b_p |conj(z) w|^p`` beyond the truncation up
    to ``trunc + horizon`` and closes with a geometric extrapolation of the
    observed term ratio; factor tails combine by a product rule.
    """
    if any(n != 1 for n in spec.n):
        raise SpecError("gram kernel comparison requires n_i = 1 in every factor")
    orders = tuple(m) if m is not None else spec.m
    work_spec = PolydomainSpec(k=spec.k, n=spec.n, m=orders, coeffs=spec.coeffs)
    partials: list[complex] = []
    tails: list[float] = []
    for i in range(spec.k):
        L = trunc[i]
        series = univariate_series_weights(work_spec, i, L + horizon)
        x = np.conj(z[i]) * w[i]
        ax = abs(x)
        partials.append(sum(series[p] * x**p for p in range(L + 1)))
        terms = [series[p] * ax**p for p in range(L + 1, L + horizon + 1)]
        tail = float(sum(terms))
        if terms[-1] > 0 and terms[-2] > 0:
            ratio = terms[-1] / terms[-2]
            if ratio < 1.0:
                tail += terms[-1] * ratio / (1.0 - ratio)
            else:
                tail = float("inf")
        tails.append(tail)
    value = 1.0 + 0.0j
    for pv in partials:
        value *= pv
    # |prod full - prod truncated| <= sum_i tail_i * prod_{j != i} (|partial_j| + tail_j)
    bound = 0.0
    for i in range(spec.k):
        other = 1.0
        for jdx in range(spec.k):
            if jdx != i:
                other *= abs(partials[jdx]) + tails[jdx]
        bound += tails[i] * other
    return complex(value), bound
