"""Two-bit symbol algebra for entanglement-swapped links.

A symbol is a pair of bits ``(bt, ph)``: ``bt`` is the bit-flip coordinate,
``ph`` the phase-flip coordinate. Symbols add coordinate-wise modulo 2, so the
four symbols form the Klein group. Distributions over the symbols compose
under XOR-convolution, which is exactly how link noise folds together when a
chain of entangled pairs is swapped end to end.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

# Distributions must sum to 1 within this tolerance; entries must be >= 0.
NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True, order=True)
class BellSymbol:
    """One alphabet letter: bit-flip coordinate ``bt``, phase-flip coordinate ``ph``."""

    bt: int
    ph: int

    def __post_init__(self) -> None:
        if self.bt not in (0, 1) or self.ph not in (0, 1):
            raise ValueError(f"symbol coordinates must be bits, got ({self.bt!r}, {self.ph!r})")

    @property
    def index(self) -> int:
        """Canonical array index, (bt << 1) | ph."""
        return (self.bt << 1) | self.ph

    def __add__(self, other: "BellSymbol") -> "BellSymbol":
        return symbol_add(self, other)


#: All four symbols in canonical index order: (0,0), (0,1), (1,0), (1,1).
SYMBOLS: tuple[BellSymbol, ...] = (
    BellSymbol(0, 0),
    BellSymbol(0, 1),
    BellSymbol(1, 0),
    BellSymbol(1, 1),
)

IDENTITY_SYMBOL = SYMBOLS[0]


def symbol_from_index(index: int) -> BellSymbol:
    """Inverse of :attr:`BellSymbol.index`."""
    if index not in (0, 1, 2, 3):
        raise ValueError(f"symbol index must be in 0..3, got {index!r}")
    return SYMBOLS[index]


def symbol_add(a: BellSymbol, b: BellSymbol) -> BellSymbol:
    """Coordinate-wise XOR of two symbols."""
    return SYMBOLS[a.index ^ b.index]


@dataclass(frozen=True)
class BellWord:
    """A finite sequence of symbols, added position-wise."""

    symbols: tuple[BellSymbol, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.symbols, tuple):
            object.__setattr__(self, "symbols", tuple(self.symbols))
        for s in self.symbols:
            if not isinstance(s, BellSymbol):
                raise TypeError(f"word entries must be BellSymbol, got {type(s).__name__}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "BellWord":
        return cls(tuple(BellSymbol(b, p) for b, p in pairs))

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> "BellWord":
        return cls(tuple(symbol_from_index(int(i)) for i in indices))

    def __len__(self) -> int:
        return len(self.symbols)

    def __getitem__(self, i: int) -> BellSymbol:
        return self.symbols[i]

    def __add__(self, other: "BellWord") -> "BellWord":
        return word_add(self, other)

    def bt_bits(self) -> tuple[int, ...]:
        return tuple(s.bt for s in self.symbols)

    def ph_bits(self) -> tuple[int, ...]:
        return tuple(s.ph for s in self.symbols)

    def subword(self, indices: Sequence[int]) -> "BellWord":
        """Entries at the given positions, in the given order."""
        return BellWord(tuple(self.symbols[i] for i in indices))


def word_add(u: BellWord, v: BellWord) -> BellWord:
    """Position-wise symbol addition; words must have equal length."""
    if len(u) != len(v):
        raise ValueError(f"word lengths differ: {len(u)} vs {len(v)}")
    return BellWord(tuple(symbol_add(a, b) for a, b in zip(u.symbols, v.symbols)))


def _relative_weight(bits: Sequence[int]) -> float:
    if len(bits) == 0:
        raise ValueError("weight of the empty word is undefined")
    return sum(bits) / len(bits)


def bt_weight(word: BellWord) -> float:
    """Fraction of positions with bt = 1."""
    return _relative_weight(word.bt_bits())


def ph_weight(word: BellWord) -> float:
    """Fraction of positions with ph = 1."""
    return _relative_weight(word.ph_bits())


@dataclass(frozen=True)
class BellDiagonal:
    """Probability distribution over the four symbols, in canonical index order."""

    probs: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        if not isinstance(self.probs, tuple):
            object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if len(self.probs) != 4:
            raise ValueError(f"expected 4 probabilities, got {len(self.probs)}")
        for p in self.probs:
            if not (p >= 0.0):  # also rejects NaN
                raise ValueError(f"probabilities must be >= 0, got {p!r}")
        total = sum(self.probs)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities must sum to 1 within {NORMALIZATION_TOL}, got {total!r}")

    @classmethod
    def point(cls, symbol: BellSymbol = IDENTITY_SYMBOL) -> "BellDiagonal":
        """Deterministic distribution on one symbol (the convolution identity at (0,0))."""
        probs = [0.0, 0.0, 0.0, 0.0]
        probs[symbol.index] = 1.0
        return cls(tuple(probs))

    @classmethod
    def uniform(cls) -> "BellDiagonal":
        return cls((0.25, 0.25, 0.25, 0.25))

    def prob(self, symbol: BellSymbol) -> float:
        return self.probs[symbol.index]


def convolve(p: BellDiagonal, q: BellDiagonal) -> BellDiagonal:
    """XOR-convolution: out(s) = sum_a p(a) * q(s + a).

    Models one ideal swap of two noisy links: the end-to-end symbol is the sum
    of the per-link symbols, so its law is the convolution over the group.
    """
    out = [0.0, 0.0, 0.0, 0.0]
    for s in range(4):
        acc = 0.0
        for a in range(4):
            acc += p.probs[a] * q.probs[s ^ a]
        out[s] = acc
    return BellDiagonal(tuple(out))


def fold_convolve(dists: Iterable[BellDiagonal]) -> BellDiagonal:
    """Convolution of any number of distributions; empty input gives the identity."""
    return reduce(convolve, dists, BellDiagonal.point())


def phase_error_prob(p: BellDiagonal) -> float:
    """Probability that the phase coordinate is 1."""
    return p.probs[1] + p.probs[3]


def bit_error_prob(p: BellDiagonal) -> float:
    """Probability that the bit coordinate is 1."""
    return p.probs[2] + p.probs[3]
