"""Completely positive maps, polydomain membership, and Berezin transforms.

An :class:`OperatorTuple` holds one matrix tuple per factor, acting on a
common finite-dimensional Hilbert space; entries of different factors must
commute.  The maps here implement the defining positivity conditions of the
polydomain and the kernel that transports operators from the universal model
to an arbitrary member tuple.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

from . import linalg
from .errors import DimensionMismatch, SpecError
from .freemonoid import MultiWord, Word
from .model import FockOperator, FockSpace
from .weights import PolydomainSpec, build_weight_table

__all__ = [
    "OperatorTuple",
    "universal_tuple",
    "phi_map",
    "defect",
    "is_member",
    "is_pure",
    "BerezinKernel",
    "berezin_kernel",
    "berezin_transform",
    "intertwining_residual",
    "random_pure_tuple",
]

Matrix = Union[np.ndarray, sp.spmatrix]


@dataclass
class OperatorTuple:
    """A point of (a candidate for) the polydomain on a concrete Hilbert space."""

    spec: PolydomainSpec
    ops: tuple[tuple[Matrix, ...], ...]
    dim_h: int
    commutation_checked: bool = False
    label: str = ""
    _word_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if len(self.ops) != self.spec.k:
            raise DimensionMismatch("need one operator tuple per factor")
        for i, fac in enumerate(self.ops):
            if len(fac) != self.spec.n[i]:
                raise DimensionMismatch(
                    f"factor {i + 1} needs {self.spec.n[i]} operators, got {len(fac)}"
                )
            for X in fac:
                if X.shape != (self.dim_h, self.dim_h):
                    raise DimensionMismatch("operator shape differs from dim_h")

    def check_commutation(self, tol: float = 1e-10) -> float:
        """Max cross-factor commutator norm; marks the tuple checked when small."""
        worst = 0.0
        for p, q in itertools.combinations(range(self.spec.k), 2):
            for A in self.ops[p]:
                for B in self.ops[q]:
                    comm = A @ B - B @ A
                    scale = max(1.0, linalg.op_norm(A) * linalg.op_norm(B))
                    worst = max(worst, linalg.op_norm(comm) / scale)
        if worst > tol:
            raise SpecError(f"cross-factor commutation violated: {worst:.3e} > {tol:.1e}")
        self.commutation_checked = True
        return worst

    def word_op(self, i: int, w: Word) -> Matrix:
        """Product ``X_{i, j_1} ... X_{i, j_p}`` for a word, cached."""
        key = (i, w.letters)
        cached = self._word_cache.get(key)
        if cached is not None:
            return cached
        if len(w) == 0:
            out: Matrix = sp.identity(self.dim_h, format="csr", dtype=complex) if sp.issparse(
                self.ops[i][0]
            ) else np.eye(self.dim_h, dtype=complex)
        else:
            out = self.word_op(i, Word(w.letters[:-1], w.alphabet_size)) @ self.ops[i][
                w.letters[-1] - 1
            ]
        self._word_cache[key] = out
        return out

    def multi_word_op(self, w: MultiWord) -> Matrix:
        out = self.word_op(0, w.parts[0])
        for i in range(1, self.spec.k):
            out = out @ self.word_op(i, w.parts[i])
        return out

    def scaled(self, r: float) -> "OperatorTuple":
        return OperatorTuple(
            spec=self.spec,
            ops=tuple(tuple(r * X for X in fac) for fac in self.ops),
            dim_h=self.dim_h,
            commutation_checked=self.commutation_checked,
            label=f"{r:g}*{self.label}" if self.label else "",
        )


def universal_tuple(space: FockSpace, side: str = "left") -> OperatorTuple:
    """The weighted creation tuple of ``space`` as an operator tuple on the Fock part."""
    ops = []
    for i in range(space.spec.k):
        row = []
        for j in range(1, space.spec.n[i] + 1):
            parts = [Word.identity(space.spec.n[p]) for p in range(space.spec.k)]
            parts[i] = Word((j,), space.spec.n[i])
            row.append(space.creation_product(MultiWord(tuple(parts)), side=side))
        ops.append(tuple(row))
    tup = OperatorTuple(
        spec=space.spec, ops=tuple(ops), dim_h=space.dim, label=f"model[{side}]"
    )
    tup.commutation_checked = True  # cross-factor Kronecker slots commute exactly
    return tup


def phi_map(spec: PolydomainSpec, i: int, X: OperatorTuple, Y: Matrix) -> np.ndarray:
    """The factor-i completely positive map ``Y -> sum a_w X_w Y X_w^*``."""
    acc = np.zeros((X.dim_h, X.dim_h), dtype=complex)
    for w, a in spec.coeffs[i].items():
        Xw = X.word_op(i, w)
        term = Xw @ Y @ linalg.adjoint(Xw)
        acc += a * linalg.as_dense(term)
    return acc


def defect(spec: PolydomainSpec, X: OperatorTuple, p: Sequence[int]) -> np.ndarray:
    """``(id - Phi_1)^{p_1} ... (id - Phi_k)^{p_k}`` applied to the identity.

    The rightmost factor acts first; for commuting tuples the order is
    immaterial.
    """
    if len(p) != spec.k:
        raise DimensionMismatch("power tuple length differs from factor count")
    if any(pi < 0 or pi > mi for pi, mi in zip(p, spec.m)):
        raise SpecError(f"powers {tuple(p)} outside 0..m = {spec.m}")
    Y = np.eye(X.dim_h, dtype=complex)
    for i in reversed(range(spec.k)):
        for _ in range(p[i]):
            Y = Y - phi_map(spec, i, X, Y)
    return Y


def is_member(
    spec: PolydomainSpec, X: OperatorTuple, tol: float = 1e-9
) -> tuple[bool, tuple[tuple[int, ...], float]]:
    """Membership test: every defect ``0 <= p <= m`` must be PSD up to ``tol``.

    Returns the verdict and a witness ``(p, min eigenvalue)`` for the most
    negative defect found.
    """
    if not X.commutation_checked:
        X.check_commutation()
    verdict = True
    witness = ((0,) * spec.k, np.inf)
    for p in itertools.product(*(range(mi + 1) for mi in spec.m)):
        D = defect(spec, X, p)
        h = linalg.hermitize(D)
        eigs = np.linalg.eigvalsh(h)
        lo, hi = float(eigs[0]), float(eigs[-1])
        if lo < witness[1]:
            witness = (p, lo)
        if lo < -tol * (1.0 + max(hi, 0.0)):
            verdict = False
    return verdict, witness


def is_pure(
    spec: PolydomainSpec,
    X: OperatorTuple,
    power_cap: int = 60,
    tol: float = 1e-9,
) -> tuple[bool, dict]:
    """Whether iterates ``Phi_i^p(I)`` fall below ``tol`` within ``power_cap`` powers.

    The report carries the per-factor norm sequences and a crude spectral
    radius estimate from the last ratio, as a fallback diagnostic when the
    cap is hit.
    """
    report: dict = {"factors": []}
    pure = True
    for i in range(spec.k):
        Y = np.eye(X.dim_h, dtype=complex)
        norms = []
        reached = None
        for p in range(1, power_cap + 1):
            Y = phi_map(spec, i, X, Y)
            norms.append(linalg.op_norm(Y))
            if norms[-1] < tol:
                reached = p
                break
        radius_est = None
        if len(norms) >= 2 and norms[-2] > 0:
            radius_est = norms[-1] / norms[-2]
        report["factors"].append(
            {"power": reached, "norms_tail": norms[-3:], "radius_estimate": radius_est}
        )
        if reached is None:
            pure = False
    report["pure"] = pure
    return pure, report


# -- Berezin kernel -----------------------------------------------------------


@dataclass
class BerezinKernel:
    """The truncated kernel matrix together with its basis and tail metadata.

    ``matrix`` maps H into Fock (x) H with the Fock index slow; ``rows`` is
    the same data as a (dim, d_H, d_H) stack, one block per basis multi-word.
    ``tail_bound`` is a rigorous scalar-majorant bound on the norm of the
    discarded part of the defining series; ``phi_power_norms`` records the
    per-factor norms of the power iterates at one degree past the truncation.
    """

    spec: PolydomainSpec
    trunc: tuple[int, ...]
    dim_h: int
    rows: np.ndarray
    tail_bound: float
    phi_power_norms: tuple[float, ...]

    @property
    def matrix(self) -> np.ndarray:
        d = self.rows.shape[0]
        return self.rows.reshape(d * self.dim_h, self.dim_h)

    def gram(self) -> np.ndarray:
        """K*K on H."""
        return np.einsum("oij,oik->jk", self.rows.conj(), self.rows)

    def norm(self) -> float:
        eigs = np.linalg.eigvalsh(linalg.hermitize(self.gram()))
        return math.sqrt(max(float(eigs[-1]), 0.0))


def _scalar_majorant_masses(
    coeffs: dict[int, float], m: int, L: int, horizon: int = 60
) -> tuple[float, float]:
    """Head and tail mass of the scalar series ``(1 - sum c_d z^d)^{-m}`` at z=1.

    ``coeffs`` maps degree to a nonnegative weight.  Uses the order-1
    recursion, convolution powers, then geometric extrapolation of the last
    observed ratio.  Returns ``(sum up to L, tail past L)``; the tail is inf
    when the terms do not decay.
    """
    if not coeffs or all(c == 0.0 for c in coeffs.values()):
        return 1.0, 0.0
    top = L + horizon
    b1 = [0.0] * (top + 1)
    b1[0] = 1.0
    for p in range(1, top + 1):
        b1[p] = sum(coeffs.get(d, 0.0) * b1[p - d] for d in range(1, min(p, max(coeffs)) + 1))
    bm = b1
    for _ in range(m - 1):
        bm = [sum(b1[q] * bm[p - q] for q in range(p + 1)) for p in range(top + 1)]
    head = float(sum(bm[: L + 1]))
    tail = sum(bm[L + 1 :])
    if bm[top] > 0.0 and bm[top - 1] > 0.0:
        ratio = bm[top] / bm[top - 1]
        if ratio < 1.0:
            tail += bm[top] * ratio / (1.0 - ratio)
        else:
            return head, float("inf")
    return head, float(tail)


def berezin_kernel(
    spec: PolydomainSpec,
    X: OperatorTuple,
    trunc: Sequence[int],
    sqrt_tol: float = 1e-10,
) -> BerezinKernel:
    """The kernel rows ``sqrt(b_w) Delta^{1/2} X_w^*`` over the truncated basis.

    ``Delta`` is the full defect at ``p = m``; its Hermitian square root clamps
    eigenvalues within ``sqrt_tol`` below zero and refuses anything worse.
    The discarded-tail bound multiplies per-factor scalar majorants built
    from the shell norms ``||Phi_{i,d}(I)||``.
    """
    trunc = tuple(int(L) for L in trunc)
    table = build_weight_table(spec, trunc)
    delta = defect(spec, X, spec.m)
    root = linalg.herm_sqrt(delta, tol=sqrt_tol)
    space = FockSpace(spec, trunc, coeff_dim=1, weights=table)
    rows = np.empty((space.dim, X.dim_h, X.dim_h), dtype=complex)
    for idx, w in enumerate(space.basis()):
        Xw = linalg.as_dense(X.multi_word_op(w))
        rows[idx] = math.sqrt(table.b_multi(w)) * (root @ Xw.conj().T)

    # scalar majorants: per factor, shell norms ||Phi_{i,d}(I)|| for d <= deg f_i
    tails, fulls, power_norms = [], [], []
    for i in range(spec.k):
        shells: dict[int, float] = {}
        for d in range(1, spec.degree(i) + 1):
            acc = np.zeros((X.dim_h, X.dim_h), dtype=complex)
            for w, a in spec.coeffs[i].items():
                if len(w) == d:
                    Xw = linalg.as_dense(X.word_op(i, w))
                    acc += a * (Xw @ Xw.conj().T)
            shells[d] = linalg.op_norm(acc)
        head, t = _scalar_majorant_masses(shells, spec.m[i], trunc[i])
        tails.append(t)
        fulls.append(head + t)
        Y = np.eye(X.dim_h, dtype=complex)
        for _ in range(trunc[i] + 1):
            Y = phi_map(spec, i, X, Y)
        power_norms.append(linalg.op_norm(Y))
    bound = 0.0
    for i in range(spec.k):
        other = 1.0
        for j in range(spec.k):
            if j != i:
                other *= fulls[j]
        bound += tails[i] * other
    return BerezinKernel(
        spec=spec,
        trunc=trunc,
        dim_h=X.dim_h,
        rows=rows,
        tail_bound=float(bound),
        phi_power_norms=tuple(power_norms),
    )


def berezin_transform(
    g: FockOperator, X: OperatorTuple, kernel: Optional[BerezinKernel] = None
) -> np.ndarray:
    """The compression ``(I (x) K^*)(g (x) I)(I (x) K)`` as a matrix on K (x) H.

    Completely positive by construction; unital up to the kernel's tail on
    pure tuples.
    """
    space = g.space
    if kernel is None:
        kernel = berezin_kernel(space.spec, X, space.trunc)
    if kernel.trunc != space.trunc or kernel.rows.shape[0] != space.dim:
        raise DimensionMismatch("kernel truncation differs from the operator's space")
    R = kernel.rows
    dH = kernel.dim_h
    c = space.coeff_dim
    blocks = g.blocks()
    out = np.zeros((c * dH, c * dH), dtype=complex)
    for x in range(c):
        for y in range(c):
            G = blocks[x, y]
            GR = np.tensordot(G, R, axes=([1], [0]))
            out[x * dH : (x + 1) * dH, y * dH : (y + 1) * dH] = np.einsum(
                "oij,oik->jk", R.conj(), GR
            )
    return out


def intertwining_residual(
    kernel: BerezinKernel, X: OperatorTuple, space: FockSpace
) -> float:
    """Max over (i, j) of ``||K X_{i,j}^* - (W_{i,j}^* (x) I) K||`` on the safe rows.

    The identity is exact on rows whose factor-i degree leaves one unit of
    headroom, so the residual is measured there (headroom 1 in the tested
    factor only).
    """
    R = kernel.rows
    dH = kernel.dim_h
    worst = 0.0
    for i in range(space.spec.k):
        headroom = [0] * space.spec.k
        headroom[i] = 1
        mask = space.safe_mask(headroom)
        for j in range(1, space.spec.n[i] + 1):
            W = space.factor_creation(i, Word((j,), space.spec.n[i]), side="left")
            parts = [sp.identity(space.factor_dims[p], format="csr") for p in range(space.spec.k)]
            parts[i] = W
            Wfull = space.fock_kron(parts)
            lhs = np.tensordot(
                linalg.as_dense(Wfull.conj().T), R, axes=([1], [0])
            )
            Xij = linalg.as_dense(X.ops[i][j - 1])
            rhs = R @ Xij.conj().T
            diff = (lhs - rhs)[mask]
            worst = max(worst, linalg.op_norm(diff.reshape(-1, dH)))
    return worst


# -- test-point generator -----------------------------------------------------


def random_pure_tuple(
    spec: PolydomainSpec,
    rng: np.random.Generator,
    dims: Optional[Sequence[int]] = None,
    shrink: float = 1.0,
    member_tol: float = 1e-9,
    bisect_tol: float = 1e-6,
) -> OperatorTuple:
    """Draw a random member of the polydomain on a small tensor-product space.

    Each factor acts on its own tensor slot (``X_{i,j} = I (x) Y_{i,j} (x) I``),
    which makes cross-factor commutation automatic; a single factor needs no
    tensor structure.  The raw draw is scaled to the largest radius that
    keeps membership (bisection to ``bisect_tol``), then by ``shrink``;
    ``shrink < 1`` buys strict purity and finite tail bounds.
    """
    if dims is None:
        dims = [2] * spec.k
    if len(dims) != spec.k:
        raise DimensionMismatch("one slot dimension per factor required")
    dim_h = int(np.prod(dims))
    ops: list[tuple[np.ndarray, ...]] = []
    for i in range(spec.k):
        row = []
        for _ in range(spec.n[i]):
            Y = rng.standard_normal((dims[i], dims[i])) + 1j * rng.standard_normal(
                (dims[i], dims[i])
            )
            Y /= max(1.0, linalg.op_norm(Y))
            before = int(np.prod(dims[:i])) if i else 1
            after = int(np.prod(dims[i + 1 :])) if i + 1 < spec.k else 1
            row.append(np.kron(np.kron(np.eye(before), Y), np.eye(after)).astype(complex))
        ops.append(tuple(row))
    raw = OperatorTuple(spec=spec, ops=tuple(ops), dim_h=dim_h, label="random")
    raw.commutation_checked = True

    def member_at(r: float) -> bool:
        ok, _ = is_member(spec, raw.scaled(r), tol=member_tol)
        return ok

    lo, hi = 0.0, 1.0
    while member_at(hi):
        lo = hi
        hi *= 2.0
        if hi > 64.0:
            break
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if member_at(mid):
            lo = mid
        else:
            hi = mid
    out = raw.scaled(shrink * lo)
    out.label = f"random(r={shrink * lo:.6f})"
    return out
