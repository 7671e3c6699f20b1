"""Chain noise model: per-link distributions, end-to-end noise, honest-zone parameter.

A chain has ``repeaters`` middle stations and ``repeaters + 1`` links. The
first ``honest_left`` stations (next to the left end) and the last
``honest_right`` stations (next to the right end) behave honestly; everything
between them is treated as controlled by the adversary. The honest-zone noise
parameter is the probability that the phase coordinates contributed by the two
honest segments disagree; links touching the corrupted zone are excluded from
both segments because their noise is attributed to the adversary.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bell import (
    SYMBOLS,
    BellDiagonal,
    bit_error_prob,
    fold_convolve,
    phase_error_prob,
)


def depolarizing_dist(q: float) -> BellDiagonal:
    """Symbol distribution of a pair sent through a depolarizing channel of strength ``q``."""
    if not (0.0 <= q <= 1.0):
        raise ValueError(f"depolarizing strength must be in [0, 1], got {q!r}")
    return BellDiagonal((1.0 - 0.75 * q, 0.25 * q, 0.25 * q, 0.25 * q))


@dataclass(frozen=True)
class ChainSpec:
    """A repeater chain with an honest prefix and suffix of stations.

    ``links`` has one distribution per link, left to right, length
    ``repeaters + 1``. ``honest_left + honest_right <= repeaters``.
    """

    repeaters: int
    honest_left: int
    honest_right: int
    links: tuple[BellDiagonal, ...]

    def __post_init__(self) -> None:
        if self.repeaters < 1:
            raise ValueError(f"need at least one station, got {self.repeaters}")
        if self.honest_left < 0 or self.honest_right < 0:
            raise ValueError("honest station counts must be >= 0")
        if self.honest_left + self.honest_right > self.repeaters:
            raise ValueError(
                f"honest counts {self.honest_left}+{self.honest_right} exceed {self.repeaters} stations"
            )
        if not isinstance(self.links, tuple):
            object.__setattr__(self, "links", tuple(self.links))
        if len(self.links) != self.repeaters + 1:
            raise ValueError(f"expected {self.repeaters + 1} links, got {len(self.links)}")
        for link in self.links:
            if not isinstance(link, BellDiagonal):
                raise TypeError(f"links must be BellDiagonal, got {type(link).__name__}")


def uniform_chain(repeaters: int, q: float, honest_left: int, honest_right: int) -> ChainSpec:
    """Chain with identical depolarizing links of strength ``q``."""
    return ChainSpec(repeaters, honest_left, honest_right, (depolarizing_dist(q),) * (repeaters + 1))


def balanced_honest_chain(repeaters: int, q: float, honest_total: int) -> ChainSpec:
    """Identical-link chain with ``honest_total`` honest stations split evenly.

    For identical links the honest-zone parameter depends only on the total
    honest count, so the split is a presentation choice; the left end gets the
    extra station when the count is odd.
    """
    left = (honest_total + 1) // 2
    return uniform_chain(repeaters, q, left, honest_total - left)


def end_to_end_dist(spec: ChainSpec) -> BellDiagonal:
    """Symbol distribution between the two ends after all stations swap honestly."""
    return fold_convolve(spec.links)


def observed_qx(spec: ChainSpec) -> float:
    """Phase-disagreement probability between the ends (the X-basis error rate)."""
    return phase_error_prob(end_to_end_dist(spec))


def observed_qz(spec: ChainSpec) -> float:
    """Bit-disagreement probability between the ends (the Z-basis error rate)."""
    return bit_error_prob(end_to_end_dist(spec))


def honest_marginals(spec: ChainSpec) -> tuple[BellDiagonal, BellDiagonal]:
    """Symbol distributions contributed by the honest left and right segments.

    The left segment folds the first ``honest_left`` links, the right segment
    the last ``honest_right``; the links adjacent to the corrupted zone belong
    to neither. An empty segment contributes the deterministic (0,0) symbol.
    """
    left = fold_convolve(spec.links[: spec.honest_left])
    right = fold_convolve(spec.links[len(spec.links) - spec.honest_right :] if spec.honest_right else ())
    return left, right


def noise_parameter(spec: ChainSpec) -> float:
    """Probability that the honest segments' phase contributions disagree.

    Computed as the literal double sum over both honest marginals, restricted
    to symbol pairs whose phase coordinates differ.
    """
    left, right = honest_marginals(spec)
    total = 0.0
    for x in SYMBOLS:
        for y in SYMBOLS:
            if x.ph ^ y.ph:
                total += left.prob(x) * right.prob(y)
    return total


@dataclass(frozen=True)
class NoiseReport:
    """End-to-end noise figures of a chain plus its honest-zone parameter."""

    end_to_end: BellDiagonal
    observed_qx: float
    observed_qz: float
    p_star: float
    p_left: float
    p_right: float


def noise_report(spec: ChainSpec) -> NoiseReport:
    dist = end_to_end_dist(spec)
    left, right = honest_marginals(spec)
    return NoiseReport(
        end_to_end=dist,
        observed_qx=phase_error_prob(dist),
        observed_qz=bit_error_prob(dist),
        p_star=noise_parameter(spec),
        p_left=phase_error_prob(left),
        p_right=phase_error_prob(right),
    )


def strength_for_observed_qx(qx: float, n_links: int) -> float:
    """Invert the identical-link chain: the per-link strength giving end-to-end ``qx``.

    Only defined for qx < 1/2 (an identical-link chain can never reach 1/2).
    """
    if n_links < 1:
        raise ValueError("need at least one link")
    if not (0.0 <= qx < 0.5):
        raise ValueError(f"end-to-end phase noise must be in [0, 0.5), got {qx!r}")
    return 1.0 - (1.0 - 2.0 * qx) ** (1.0 / n_links)
