"""Words over free semigroups and the combinatorics of right divisibility.

A :class:`Word` is a finite sequence of generator indices over one free
semigroup; a :class:`MultiWord` is a tuple of words, one per tensor factor.
Right divisibility (``omega = sigma * gamma``), comparability and the
simplification map onto reduced index pairs drive every structural test in
the rest of the package, so they live here with no numerical dependencies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DimensionMismatch, NotComparable, TruncationError

__all__ = [
    "Word",
    "MultiWord",
    "IndexPair",
    "right_divides",
    "comparable",
    "simplify",
    "enumerate_words",
    "multiword_index",
    "multiword_unindex",
    "reverse",
]


@dataclass(frozen=True)
class Word:
    """A word over the free semigroup on ``alphabet_size`` generators.

    ``letters`` holds 1-based generator indices; the empty tuple is the
    semigroup identity.
    """

    letters: tuple[int, ...]
    alphabet_size: int

    def __post_init__(self) -> None:
        if self.alphabet_size < 1:
            raise DimensionMismatch(f"alphabet_size must be >= 1, got {self.alphabet_size}")
        for g in self.letters:
            if not 1 <= g <= self.alphabet_size:
                raise DimensionMismatch(
                    f"letter {g} outside alphabet [1, {self.alphabet_size}]"
                )

    def __len__(self) -> int:
        return len(self.letters)

    @staticmethod
    def identity(alphabet_size: int) -> "Word":
        return Word((), alphabet_size)

    def concat(self, other: "Word") -> "Word":
        if other.alphabet_size != self.alphabet_size:
            raise DimensionMismatch("cannot concatenate words over different alphabets")
        return Word(self.letters + other.letters, self.alphabet_size)

    def render(self) -> str:
        """Human-readable form: ``g1.g2.g1`` for nonempty words, ``e`` for the identity."""
        if not self.letters:
            return "e"
        return ".".join(f"g{g}" for g in self.letters)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Word({self.render()}, n={self.alphabet_size})"


@dataclass(frozen=True)
class MultiWord:
    """An element of the product of ``k`` free semigroups, one word per factor."""

    parts: tuple[Word, ...]

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def degree_vector(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.parts)

    @property
    def total_degree(self) -> int:
        return sum(len(p) for p in self.parts)

    @staticmethod
    def identity(alphabet_sizes: Sequence[int]) -> "MultiWord":
        return MultiWord(tuple(Word.identity(n) for n in alphabet_sizes))

    def render(self) -> str:
        if self.k == 1:
            return self.parts[0].render()
        return "(" + ", ".join(p.render() for p in self.parts) + ")"

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"MultiWord({self.render()})"


@dataclass(frozen=True)
class IndexPair:
    """A reduced pair of multi-words, the index set of Fourier coefficients.

    Membership requires that in each factor at most one of ``left[i]``,
    ``right[i]`` is nonempty; ``degree_vector`` records the signed degrees
    ``s_i = |left_i| - |right_i|``.
    """

    left: MultiWord
    right: MultiWord

    def __post_init__(self) -> None:
        if self.left.k != self.right.k:
            raise DimensionMismatch("left/right multi-words have different factor counts")
        for a, b in zip(self.left.parts, self.right.parts):
            if a.alphabet_size != b.alphabet_size:
                raise DimensionMismatch("left/right factor alphabets disagree")
            if len(a) > 0 and len(b) > 0:
                raise NotComparable(
                    f"({a.render()}, {b.render()}) has both sides nonempty in one factor"
                )

    @property
    def degree_vector(self) -> tuple[int, ...]:
        return tuple(len(a) - len(b) for a, b in zip(self.left.parts, self.right.parts))

    @property
    def total_weight(self) -> int:
        """Sum of |s_i| over factors, i.e. total degree of both sides combined."""
        return self.left.total_degree + self.right.total_degree

    def render(self) -> str:
        return f"({self.left.render()} | {self.right.render()})"


def right_divides(gamma: Word, omega: Word) -> Optional[Word]:
    """Return ``sigma`` with ``omega = sigma * gamma`` if it exists, else ``None``.

    ``omega`` is right-divisible by ``gamma`` exactly when ``omega`` ends with
    ``gamma`` as a suffix.
    """
    if gamma.alphabet_size != omega.alphabet_size:
        raise DimensionMismatch("right_divides requires a common alphabet")
    lg = len(gamma)
    if lg > len(omega):
        return None
    if lg and omega.letters[-lg:] != gamma.letters:
        return None
    return Word(omega.letters[: len(omega) - lg], omega.alphabet_size)


def _comparable_words(omega: Word, gamma: Word) -> bool:
    return right_divides(gamma, omega) is not None or right_divides(omega, gamma) is not None


def comparable(omega: MultiWord, gamma: MultiWord) -> bool:
    """True iff in every factor one word is a right divisor of the other."""
    if omega.k != gamma.k:
        raise DimensionMismatch("multi-words have different factor counts")
    return all(_comparable_words(a, b) for a, b in zip(omega.parts, gamma.parts))


def simplify(omega: MultiWord, gamma: MultiWord) -> IndexPair:
    """Collapse a comparable pair to its reduced representative.

    Per factor: the left component is ``omega_i`` with the suffix ``gamma_i``
    removed when ``omega_i >=_r gamma_i`` (identity otherwise), and
    symmetrically for the right component.  Idempotent on reduced pairs.
    """
    if omega.k != gamma.k:
        raise DimensionMismatch("multi-words have different factor counts")
    lefts: list[Word] = []
    rights: list[Word] = []
    for a, b in zip(omega.parts, gamma.parts):
        sigma = right_divides(b, a)
        beta = right_divides(a, b)
        if sigma is None and beta is None:
            raise NotComparable(
                f"words {a.render()} and {b.render()} are not comparable"
            )
        lefts.append(sigma if sigma is not None else Word.identity(a.alphabet_size))
        rights.append(beta if beta is not None else Word.identity(a.alphabet_size))
    return IndexPair(MultiWord(tuple(lefts)), MultiWord(tuple(rights)))


def enumerate_words(n: int, max_len: int) -> list[Word]:
    """All words of length <= ``max_len`` in graded-lexicographic order.

    The identity comes first, then words by increasing length, lexicographic
    within a length.  Deterministic; total count is sum of n**d, d=0..max_len.
    """
    if n < 1:
        raise DimensionMismatch(f"alphabet size must be >= 1, got {n}")
    if max_len < 0:
        raise TruncationError(f"max_len must be >= 0, got {max_len}")
    out: list[Word] = []
    for d in range(max_len + 1):
        for letters in itertools.product(range(1, n + 1), repeat=d):
            out.append(Word(letters, n))
    return out


def _word_rank(w: Word) -> int:
    """Position of ``w`` in the graded-lexicographic enumeration of its alphabet."""
    n = w.alphabet_size
    d = len(w)
    # all words shorter than d precede it
    rank = (n**d - 1) // (n - 1) if n > 1 else d
    offset = 0
    for g in w.letters:
        offset = offset * n + (g - 1)
    return rank + offset


def _block_count(n: int, max_len: int) -> int:
    return (n ** (max_len + 1) - 1) // (n - 1) if n > 1 else max_len + 1


def multiword_index(w: MultiWord, trunc: Sequence[int]) -> int:
    """Linearize a multi-word into the truncated tensor-basis index.

    Factors are combined in row-major (first factor slowest) order, matching
    Kronecker products of per-factor operators.  The all-identity multi-word
    maps to 0.
    """
    if w.k != len(trunc):
        raise DimensionMismatch("truncation tuple length differs from factor count")
    idx = 0
    for part, L in zip(w.parts, trunc):
        if len(part) > L:
            raise TruncationError(
                f"word {part.render()} of length {len(part)} exceeds truncation {L}"
            )
        idx = idx * _block_count(part.alphabet_size, L) + _word_rank(part)
    return idx


def multiword_unindex(idx: int, alphabet_sizes: Sequence[int], trunc: Sequence[int]) -> MultiWord:
    """Inverse of :func:`multiword_index`."""
    if len(alphabet_sizes) != len(trunc):
        raise DimensionMismatch("alphabet/truncation tuple lengths differ")
    counts = [_block_count(n, L) for n, L in zip(alphabet_sizes, trunc)]
    total = 1
    for c in counts:
        total *= c
    if not 0 <= idx < total:
        raise TruncationError(f"index {idx} outside [0, {total})")
    ranks: list[int] = []
    for c in reversed(counts):
        ranks.append(idx % c)
        idx //= c
    ranks.reverse()
    parts = []
    for rank, n, L in zip(ranks, alphabet_sizes, trunc):
        parts.append(_unrank_word(rank, n))
    return MultiWord(tuple(parts))


def _unrank_word(rank: int, n: int) -> Word:
    d = 0
    block = 1
    while rank >= block:
        rank -= block
        block *= n
        d += 1
    letters = []
    for _ in range(d):
        letters.append(rank % n + 1)
        rank //= n
    letters.reverse()
    return Word(tuple(letters), n)


def reverse(w: Word) -> Word:
    """The word with its letters in reverse order; an involution."""
    return Word(tuple(reversed(w.letters)), w.alphabet_size)
