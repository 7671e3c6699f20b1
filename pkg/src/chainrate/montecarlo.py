"""Round-level Monte Carlo of the entanglement-based protocol.

Rounds are simulated at the symbol level: one symbol per link is drawn from
its distribution and the chain's honest swaps fold them by XOR. Measurement
statistics follow from the exact two-qubit picture (certified against the
density-matrix reference in the test suite): on a round carrying symbol
``(bt, ph)``, Z-basis outcomes disagree iff bt = 1 and X-basis outcomes
disagree iff ph = 1, so disagreement frequencies are bit means.

Words are held as numpy arrays of symbol indices; at the default sizes a
Python-object word per round would dominate the runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bell import BellDiagonal, BellSymbol, symbol_from_index
from .keyrate import RateParams, RateReport, finite_rate
from .noise import ChainSpec, noise_report
from .sampling import deviation_for_failure, hoeffding_deviation

MAX_ROUNDS = 10**7


@dataclass(frozen=True)
class TrialConfig:
    """One simulation setting: chain, round budget, test-sample size, seeding."""

    spec: ChainSpec
    rounds: int
    sample_size: int
    seed: int
    trials: int = 1
    epsilon: float = 1e-36
    ec_factor: float = 1.2
    strict_leak: bool = False
    p_star_override: float | None = None

    def __post_init__(self) -> None:
        if not (2 <= self.rounds <= MAX_ROUNDS):
            raise ValueError(f"rounds must be in 2..{MAX_ROUNDS}, got {self.rounds}")
        if not (1 <= self.sample_size) or 2 * self.sample_size > self.rounds:
            raise ValueError(
                f"test sample must satisfy 1 <= m <= rounds/2, got m={self.sample_size}, rounds={self.rounds}"
            )
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.p_star_override is not None and not (0.0 <= self.p_star_override < 0.5):
            raise ValueError(f"p_star_override must be in [0, 0.5), got {self.p_star_override!r}")


@dataclass(frozen=True)
class MCReport:
    """Observed statistics of one simulated run plus the rate they imply."""

    rounds: int
    sample_size: int
    seed: int
    qx_hat: float
    qz_hat: float
    qx_analytic: float
    qz_analytic: float
    p_star: float
    sampling_violations: int
    rate_from_observation: RateReport


def _cumulative(dist: BellDiagonal) -> np.ndarray:
    cdf = np.cumsum(np.asarray(dist.probs, dtype=float))
    cdf[-1] = 1.0  # guard against cumulative rounding at the top
    return cdf


def sample_rounds(spec: ChainSpec, rounds: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``rounds`` end-to-end symbol indices: one draw per link, XOR-folded."""
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")
    folded = np.zeros(rounds, dtype=np.uint8)
    for link in spec.links:
        draws = np.searchsorted(_cumulative(link), rng.random(rounds), side="right")
        folded ^= draws.astype(np.uint8)
    return folded


def sample_round(spec: ChainSpec, rng: np.random.Generator) -> BellSymbol:
    """Draw a single end-to-end symbol."""
    return symbol_from_index(int(sample_rounds(spec, 1, rng)[0]))


def simulate_e91(cfg: TrialConfig) -> MCReport:
    """Simulate one run: sample rounds, reveal a random test subset, rate the rest.

    Identical configs (including the seed) reproduce the report bit for bit.
    """
    rng = np.random.default_rng(cfg.seed)
    symbols = sample_rounds(cfg.spec, cfg.rounds, rng)
    ph_bits = symbols & 1
    bt_bits = symbols >> 1
    test_mask = np.zeros(cfg.rounds, dtype=bool)
    test_mask[rng.choice(cfg.rounds, size=cfg.sample_size, replace=False)] = True

    qx_hat = float(ph_bits[test_mask].mean())
    qz_hat = float(bt_bits[~test_mask].mean())
    report = noise_report(cfg.spec)
    p_star = report.p_star if cfg.p_star_override is None else cfg.p_star_override

    delta = deviation_for_failure(cfg.epsilon, cfg.sample_size, cfg.rounds)
    hidden_qx = float(ph_bits[~test_mask].mean())
    violations = int(abs(qx_hat - hidden_qx) > delta)

    params = RateParams(
        n=cfg.rounds,
        m=cfg.sample_size,
        epsilon=cfg.epsilon,
        p_star=p_star,
        ec_factor=cfg.ec_factor,
        strict_leak=cfg.strict_leak,
    )
    return MCReport(
        rounds=cfg.rounds,
        sample_size=cfg.sample_size,
        seed=cfg.seed,
        qx_hat=qx_hat,
        qz_hat=qz_hat,
        qx_analytic=report.observed_qx,
        qz_analytic=report.observed_qz,
        p_star=p_star,
        sampling_violations=violations,
        rate_from_observation=finite_rate(qx_hat, params),
    )


@dataclass(frozen=True)
class ConcentrationSummary:
    """Violation counts for the two estimation bounds over many seeded trials."""

    trials: int
    rounds: int
    sample_size: int
    epsilon: float
    p_star: float
    delta: float
    delta_prime: float
    sampling_violations: int
    sampling_bound: float
    sampling_limit: float
    hoeffding_violations: int
    hoeffding_bound: float
    hoeffding_limit: float
    sampling_ok: bool
    hoeffding_ok: bool

    @property
    def ok(self) -> bool:
        return self.sampling_ok and self.hoeffding_ok


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    # Per-trial generators depend only on (seed, trial index), so any split of
    # trials across workers reproduces the same totals.
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))


def verify_concentration(
    cfg: TrialConfig,
    epsilon: float,
    injected_ph: Sequence[int] | None = None,
) -> ConcentrationSummary:
    """Measure how often the deviation bounds at ``epsilon`` are violated.

    Per trial: a word's phase bits are drawn i.i.d. from the chain's
    end-to-end phase marginal (rounds are independent, and both checked
    statistics depend on phase bits only), or taken verbatim from
    ``injected_ph`` to model an adversarially fixed word. The subset check
    compares revealed and hidden weights against the subset-sampling
    tolerance; the mean check redraws an independent honest-noise sample
    against the i.i.d. tolerance. Frequencies must stay within bound plus
    three binomial standard deviations.
    """
    report = noise_report(cfg.spec)
    p_star = report.p_star if cfg.p_star_override is None else cfg.p_star_override
    n, m = cfg.rounds, cfg.sample_size
    delta = deviation_for_failure(epsilon, m, n)
    delta_prime = hoeffding_deviation(epsilon, m)

    fixed_word = None
    if injected_ph is not None:
        fixed_word = np.asarray(list(injected_ph), dtype=np.uint8)
        if fixed_word.shape != (n,) or np.any(fixed_word > 1):
            raise ValueError(f"injected word must be {n} bits")

    sampling_violations = 0
    hoeffding_violations = 0
    for trial in range(cfg.trials):
        rng = _trial_rng(cfg.seed, trial)
        if fixed_word is None:
            ph_bits = (rng.random(n) < report.observed_qx).astype(np.uint8)
        else:
            ph_bits = fixed_word
        picked = rng.choice(n, size=m, replace=False)
        ones_in_sample = int(ph_bits[picked].sum())
        w_sample = ones_in_sample / m
        w_rest = (int(ph_bits.sum()) - ones_in_sample) / (n - m)
        if abs(w_sample - w_rest) > delta:
            sampling_violations += 1

        honest = rng.random(m) < p_star
        flipped_mean = float((honest ^ ph_bits[picked].astype(bool)).mean())
        expected = w_sample * (1.0 - p_star) + (1.0 - w_sample) * p_star
        if abs(flipped_mean - expected) > delta_prime:
            hoeffding_violations += 1

    def limit(bound: float) -> float:
        return bound + 3.0 * math.sqrt(bound * (1.0 - bound) / cfg.trials)

    sampling_bound = min(1.0, epsilon**2)
    hoeffding_bound = min(1.0, epsilon)
    sampling_limit = limit(sampling_bound)
    hoeffding_limit = limit(hoeffding_bound)
    return ConcentrationSummary(
        trials=cfg.trials,
        rounds=n,
        sample_size=m,
        epsilon=epsilon,
        p_star=p_star,
        delta=delta,
        delta_prime=delta_prime,
        sampling_violations=sampling_violations,
        sampling_bound=sampling_bound,
        sampling_limit=sampling_limit,
        hoeffding_violations=hoeffding_violations,
        hoeffding_bound=hoeffding_bound,
        hoeffding_limit=hoeffding_limit,
        sampling_ok=sampling_violations / cfg.trials <= sampling_limit,
        hoeffding_ok=hoeffding_violations / cfg.trials <= hoeffding_limit,
    )
