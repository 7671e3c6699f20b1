"""Finite-sample estimation bounds and their empirical validation.

The protocol reveals a uniformly random size-``m`` subset of an ``n``-symbol
word and must bound how far the hidden part's relative weight can sit from the
revealed part's. ``sampling_failure_bound`` is the analytic tail bound for
that estimate; ``deviation_for_failure`` inverts it so a target failure
probability picks the deviation tolerance. ``hoeffding_deviation`` is the
standard i.i.d. mean bound used for the honest-noise contribution. The
empirical estimators below exist to check the analytic bounds against direct
simulation and exhaustive enumeration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .bell import BellWord

# Guard for exhaustive subset enumeration.
MAX_EXHAUSTIVE_SUBSETS = 5_000_000


@dataclass(frozen=True)
class SamplingParams:
    """Admissible (total, sample, failure-target) triple for the estimation bounds."""

    n: int
    m: int
    epsilon: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"total word length must be >= 2, got {self.n}")
        if not (1 <= self.m) or 2 * self.m > self.n:
            raise ValueError(f"sample size must satisfy 1 <= m <= n/2, got m={self.m}, n={self.n}")
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError(f"failure target must be in (0, 1), got {self.epsilon!r}")


def sampling_failure_bound(delta: float, m: int, n: int) -> float:
    """Tail bound 2*exp(-delta**2 * m * n / (n + 2)), capped at 1.

    Valid in the regime m strictly below n/2; the sample must also be
    nonempty. ``delta`` above 1 is vacuous but accepted so the bound stays the
    exact inverse of :func:`deviation_for_failure` over its whole range.
    """
    if not (delta > 0.0) or math.isinf(delta):
        raise ValueError(f"deviation tolerance must be positive and finite, got {delta!r}")
    if not (1 <= m) or 2 * m >= n:
        raise ValueError(f"bound requires 1 <= m < n/2, got m={m}, n={n}")
    return min(1.0, 2.0 * math.exp(-(delta**2) * m * n / (n + 2)))


def deviation_for_failure(epsilon: float, m: int, n: int) -> float:
    """Deviation tolerance whose sampling failure bound equals epsilon**2."""
    params = SamplingParams(n, m, epsilon)
    return math.sqrt((params.n + 2) * math.log(2.0 / params.epsilon**2) / (params.m * params.n))


def hoeffding_deviation(epsilon: float, m: int) -> float:
    """Deviation such that an i.i.d. sample mean of m bits exceeds it with probability <= epsilon."""
    if m < 1:
        raise ValueError(f"sample size must be >= 1, got {m}")
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"failure target must be in (0, 1), got {epsilon!r}")
    return math.sqrt(math.log(2.0 / epsilon) / (2.0 * m))


@dataclass(frozen=True)
class EpsilonLedger:
    """Security-parameter bookkeeping derived from the single user-facing epsilon."""

    epsilon: float
    epsilon_pa: float
    epsilon_fail: float
    smoothing: float


def epsilon_ledger(epsilon: float) -> EpsilonLedger:
    """Derived failure terms: all are polynomial in epsilon**(1/3).

    Raises ValueError when epsilon is so large that a derived term reaches 1,
    i.e. the guarantees would be vacuous.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon!r}")
    cube_root = (2.0 * epsilon) ** (1.0 / 3.0)
    ledger = EpsilonLedger(
        epsilon=epsilon,
        epsilon_pa=17.0 * epsilon + 4.0 * cube_root,
        epsilon_fail=2.0 * cube_root,
        smoothing=8.0 * epsilon + 2.0 * cube_root,
    )
    if ledger.epsilon_pa >= 1.0 or ledger.epsilon_fail >= 1.0 or ledger.smoothing >= 1.0:
        raise ValueError(f"epsilon {epsilon!r} gives vacuous derived failure terms")
    return ledger


def _as_bits(word: BellWord | Sequence[int] | Iterable[int]) -> np.ndarray:
    if isinstance(word, BellWord):
        bits = np.array(word.ph_bits(), dtype=np.uint8)
    else:
        bits = np.asarray(list(word), dtype=np.uint8)
    if bits.ndim != 1 or bits.size == 0:
        raise ValueError("expected a nonempty one-dimensional bit sequence")
    if np.any(bits > 1):
        raise ValueError("bits must be 0 or 1")
    return bits


def empirical_failure_bits(
    bits: Sequence[int] | np.ndarray,
    m: int,
    delta: float,
    trials: int,
    seed: int,
) -> float:
    """Monte Carlo frequency of |w(sample) - w(rest)| > delta over uniform subsets.

    Operates on a fixed binary word; subsets are drawn without replacement
    from a generator seeded with ``seed``, so results are reproducible.
    """
    bits = _as_bits(bits)
    n = int(bits.size)
    if not (1 <= m < n):
        raise ValueError(f"sample size must satisfy 1 <= m < n, got m={m}, n={n}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    total_ones = int(bits.sum())
    failures = 0
    for _ in range(trials):
        picked = rng.choice(n, size=m, replace=False)
        ones_in_sample = int(bits[picked].sum())
        w_sample = ones_in_sample / m
        w_rest = (total_ones - ones_in_sample) / (n - m)
        if abs(w_sample - w_rest) > delta:
            failures += 1
    return failures / trials


def empirical_failure(
    word: BellWord | Sequence[int],
    m: int,
    delta: float,
    trials: int,
    seed: int,
) -> float:
    """Failure frequency for the four-letter guessing game on ``word``.

    The guessed statistic is the phase-coordinate weight, so the game reduces
    exactly to the binary one on the word's phase bits: same subsets, same
    weights, identical result for identical seeds.
    """
    return empirical_failure_bits(_as_bits(word), m, delta, trials, seed)


def exhaustive_failure(word: BellWord | Sequence[int], m: int, delta: float) -> float:
    """Exact failure probability by enumerating every size-``m`` subset.

    Only feasible for tiny words; refuses more than MAX_EXHAUSTIVE_SUBSETS subsets.
    """
    bits = _as_bits(word)
    n = int(bits.size)
    if not (1 <= m < n):
        raise ValueError(f"sample size must satisfy 1 <= m < n, got m={m}, n={n}")
    n_subsets = math.comb(n, m)
    if n_subsets > MAX_EXHAUSTIVE_SUBSETS:
        raise ValueError(f"{n_subsets} subsets exceed the enumeration guard")
    bit_list = [int(b) for b in bits]
    total_ones = sum(bit_list)
    failures = 0
    for subset in itertools.combinations(range(n), m):
        ones_in_sample = sum(bit_list[i] for i in subset)
        w_sample = ones_in_sample / m
        w_rest = (total_ones - ones_in_sample) / (n - m)
        if abs(w_sample - w_rest) > delta:
            failures += 1
    return failures / n_subsets
