"""Polydomain specifications and the associated weight tables.

A :class:`PolydomainSpec` is the tuple ``(k, n, m, {a_{i,alpha}})`` of factor
count, alphabet sizes, positivity orders and nonnegative coefficients.  The
weight ``b_{i,alpha}`` attached to a word is the corresponding coefficient of
``(1 - f_i)^{-m_i}``; it is computed here by a suffix recursion for the order-1
table followed by word convolution, and cross-checked by a literal
factorization-sum oracle.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import IO, Mapping, Sequence

from .errors import NotComparable, SpecError, TruncationError
from .freemonoid import MultiWord, Word, enumerate_words, right_divides

__all__ = [
    "PolydomainSpec",
    "WeightTable",
    "build_weight_table",
    "brute_force_weight",
    "tau",
    "mu",
    "compactness_ratios",
    "univariate_series_weights",
    "spec_from_json",
    "spec_to_json",
]


@dataclass(frozen=True)
class PolydomainSpec:
    """Defining data of a regular polydomain.

    ``coeffs[i]`` maps words over the i-th alphabet to nonnegative reals.
    Every generator must carry a strictly positive coefficient, the empty word
    must be absent, and the support must be finite (it is: a dict).
    """

    k: int
    n: tuple[int, ...]
    m: tuple[int, ...]
    coeffs: tuple[Mapping[Word, float], ...]

    def __post_init__(self) -> None:
        if self.k < 1 or len(self.n) != self.k or len(self.m) != self.k:
            raise SpecError("k, n, m must be consistent and k >= 1")
        if any(ni < 1 for ni in self.n) or any(mi < 1 for mi in self.m):
            raise SpecError("alphabet sizes and orders must be positive")
        if len(self.coeffs) != self.k:
            raise SpecError("one coefficient map per factor is required")
        for i, (ni, cmap) in enumerate(zip(self.n, self.coeffs)):
            for w, a in cmap.items():
                if w.alphabet_size != ni:
                    raise SpecError(f"factor {i + 1}: word over wrong alphabet")
                if len(w) == 0:
                    raise SpecError(f"factor {i + 1}: constant term must be zero")
                if a < 0:
                    raise SpecError(f"factor {i + 1}: negative coefficient {a}")
            for j in range(1, ni + 1):
                g = Word((j,), ni)
                if cmap.get(g, 0.0) <= 0.0:
                    raise SpecError(
                        f"factor {i + 1}: generator g{j} needs a strictly positive coefficient"
                    )

    def degree(self, i: int) -> int:
        """Maximal support degree of the i-th coefficient family."""
        return max(len(w) for w in self.coeffs[i])

    def support(self, i: int) -> list[Word]:
        """Support words of factor ``i`` in graded-lexicographic order."""
        return sorted(self.coeffs[i], key=lambda w: (len(w), w.letters))


@dataclass
class WeightTable:
    """All weights ``b_{i,alpha}`` up to the per-factor truncation degrees."""

    spec: PolydomainSpec
    trunc: tuple[int, ...]
    tables: tuple[dict[Word, float], ...] = field(repr=False)

    def b(self, i: int, w: Word) -> float:
        try:
            return self.tables[i][w]
        except KeyError:
            raise TruncationError(
                f"weight for {w.render()} not tabulated (truncation {self.trunc[i]})"
            ) from None

    def b_multi(self, w: MultiWord) -> float:
        out = 1.0
        for i, part in enumerate(w.parts):
            out *= self.b(i, part)
        return out

    def write_csv(self, fh: IO[str]) -> None:
        """Rows ``factor, word, b`` with words rendered as ``g1.g2``."""
        writer = csv.writer(fh)
        writer.writerow(["factor", "word", "b"])
        for i, table in enumerate(self.tables):
            for w in sorted(table, key=lambda u: (len(u), u.letters)):
                writer.writerow([i + 1, w.render(), repr(table[w])])


def _order_one_table(cmap: Mapping[Word, float], n: int, trunc: int) -> dict[Word, float]:
    # b1[alpha] = sum over proper suffixes gamma in the support of b1[prefix] * a[gamma]
    words = enumerate_words(n, trunc)
    max_deg = max(len(w) for w in cmap)
    out: dict[Word, float] = {}
    for w in words:
        if len(w) == 0:
            out[w] = 1.0
            continue
        acc = 0.0
        for cut in range(max(0, len(w) - max_deg), len(w)):
            gamma = Word(w.letters[cut:], n)
            a = cmap.get(gamma)
            if a:
                acc += out[Word(w.letters[:cut], n)] * a
        out[w] = acc
    return out


def _word_convolve(u: Mapping[Word, float], v: Mapping[Word, float], n: int, trunc: int) -> dict[Word, float]:
    # (u * v)[alpha] = sum over splittings alpha = alpha' alpha''
    out: dict[Word, float] = {}
    for w in enumerate_words(n, trunc):
        acc = 0.0
        for cut in range(len(w) + 1):
            acc += u[Word(w.letters[:cut], n)] * v[Word(w.letters[cut:], n)]
        out[w] = acc
    return out


def build_weight_table(spec: PolydomainSpec, trunc: Sequence[int]) -> WeightTable:
    """Tabulate ``b_{i,alpha}`` for all ``|alpha| <= trunc[i]``.

    The order-1 family satisfies the suffix recursion; higher orders are
    word convolutions of it, matching the coefficients of ``(1-f_i)^{-m_i}``.
    """
    if len(trunc) != spec.k:
        raise SpecError("truncation tuple length differs from factor count")
    if any(L < 0 for L in trunc):
        raise SpecError("truncation degrees must be nonnegative")
    tables = []
    for i in range(spec.k):
        b1 = _order_one_table(spec.coeffs[i], spec.n[i], trunc[i])
        bm = b1
        for _ in range(spec.m[i] - 1):
            bm = _word_convolve(b1, bm, spec.n[i], trunc[i])
        tables.append(bm)
    return WeightTable(spec=spec, trunc=tuple(trunc), tables=tuple(tables))


def brute_force_weight(spec: PolydomainSpec, i: int, alpha: Word) -> float:
    """Oracle value of ``b_{i,alpha}`` by literal factorization enumeration.

    Sums over all ordered factorizations ``alpha = gamma_1 ... gamma_j`` with
    nonempty parts the product of coefficients times the binomial
    ``C(j+m_i-1, m_i-1)``.  Cost 2**(|alpha|-1) compositions; refuse beyond 12.
    """
    d = len(alpha)
    if d > 12:
        raise SpecError("brute-force oracle limited to |alpha| <= 12")
    if d == 0:
        return 1.0
    n, m = spec.n[i], spec.m[i]
    cmap = spec.coeffs[i]
    total = 0.0
    for cuts in itertools.chain.from_iterable(
        itertools.combinations(range(1, d), j) for j in range(d)
    ):
        bounds = (0,) + cuts + (d,)
        prod = 1.0
        for lo, hi in zip(bounds, bounds[1:]):
            a = cmap.get(Word(alpha.letters[lo:hi], n), 0.0)
            if a == 0.0:
                prod = 0.0
                break
            prod *= a
        if prod:
            j = len(bounds) - 1
            total += prod * math.comb(j + m - 1, m - 1)
    return total


def univariate_series_weights(spec: PolydomainSpec, i: int, trunc: int) -> list[float]:
    """Second oracle for ``n_i = 1``: Taylor coefficients of ``(1-f_i)^{-m_i}``.

    Computed by univariate power-series inversion and repeated multiplication,
    independently of the word recursion.
    """
    if spec.n[i] != 1:
        raise SpecError("series oracle only applies to single-generator factors")
    c = [0.0] * (trunc + 1)
    c[0] = 1.0
    for w, a in spec.coeffs[i].items():
        if len(w) <= trunc:
            c[len(w)] -= a
    inv = [0.0] * (trunc + 1)
    inv[0] = 1.0
    for p in range(1, trunc + 1):
        inv[p] = -sum(c[q] * inv[p - q] for q in range(1, p + 1))
    out = inv
    for _ in range(spec.m[i] - 1):
        out = [
            sum(out[q] * inv[p - q] for q in range(p + 1)) for p in range(trunc + 1)
        ]
    return out


def _min_max_b(table: WeightTable, i: int, a: Word, b: Word) -> tuple[float, float]:
    # min/max along right divisibility: the divisor is the smaller word
    if right_divides(b, a) is not None:
        lo, hi = b, a
    elif right_divides(a, b) is not None:
        lo, hi = a, b
    else:
        raise NotComparable(f"words {a.render()}, {b.render()} not comparable")
    return table.b(i, lo), table.b(i, hi)


def tau(table: WeightTable, omega: MultiWord, gamma: MultiWord) -> float:
    """Entry weight of a comparable pair: product over factors of sqrt(b_min/b_max)."""
    out = 1.0
    for i, (a, b) in enumerate(zip(omega.parts, gamma.parts)):
        blo, bhi = _min_max_b(table, i, a, b)
        out *= math.sqrt(blo / bhi)
    return out


def mu(table: WeightTable, omega: MultiWord, gamma: MultiWord) -> float:
    """Weighted-basis variant: product over factors of 1/b_max."""
    out = 1.0
    for i, (a, b) in enumerate(zip(omega.parts, gamma.parts)):
        _, bhi = _min_max_b(table, i, a, b)
        out /= bhi
    return out


def compactness_ratios(table: WeightTable, i: int) -> dict:
    """All ratios ``b_{g_j alpha} / b_alpha`` for ``|alpha| < trunc[i]``.

    Returns the ratio map, the supremum over the truncation, and the
    per-degree maximum so callers can report the tail trend.  No convergence
    is asserted; the trend is informational.
    """
    n = table.spec.n[i]
    L = table.trunc[i]
    ratios: dict[tuple[int, Word], float] = {}
    per_degree: dict[int, float] = {}
    for alpha in enumerate_words(n, L - 1):
        b_alpha = table.b(i, alpha)
        for j in range(1, n + 1):
            extended = Word((j,) + alpha.letters, n)
            r = table.b(i, extended) / b_alpha
            ratios[(j, alpha)] = r
            d = len(alpha)
            per_degree[d] = max(per_degree.get(d, 0.0), r)
    return {
        "ratios": ratios,
        "sup": max(ratios.values()) if ratios else 0.0,
        "max_by_degree": dict(sorted(per_degree.items())),
    }


def spec_from_json(doc: str | dict) -> PolydomainSpec:
    """Parse the interchange form ``{"k":.., "n":[..], "m":[..], "coeffs":[..]}``.

    Each coefficient entry is ``{"i": factor (1-based), "word": [letters], "a": value}``.
    """
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}") from exc
    try:
        k = int(doc["k"])
        n = tuple(int(x) for x in doc["n"])
        m = tuple(int(x) for x in doc["m"])
        entries = doc["coeffs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed spec document: {exc}") from exc
    if len(n) != k or len(m) != k:
        raise SpecError("n and m must each list one entry per factor")
    maps: list[dict[Word, float]] = [dict() for _ in range(k)]
    for entry in entries:
        try:
            i = int(entry["i"]) - 1
            letters = tuple(int(g) for g in entry["word"])
            a = float(entry["a"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"malformed coefficient entry {entry!r}: {exc}") from exc
        if not 0 <= i < k:
            raise SpecError(f"coefficient factor index {i + 1} outside 1..{k}")
        w = Word(letters, n[i])
        if w in maps[i]:
            raise SpecError(f"duplicate coefficient for factor {i + 1}, word {w.render()}")
        maps[i][w] = a
    return PolydomainSpec(k=k, n=n, m=m, coeffs=tuple(maps))


def spec_to_json(spec: PolydomainSpec) -> dict:
    entries = []
    for i in range(spec.k):
        for w in spec.support(i):
            entries.append({"i": i + 1, "word": list(w.letters), "a": spec.coeffs[i][w]})
    return {"k": spec.k, "n": list(spec.n), "m": list(spec.m), "coeffs": entries}
