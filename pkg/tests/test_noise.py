"""Chain noise model: closed forms, honest marginals, the disagreement parameter."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainrate.bell import BellDiagonal, phase_error_prob
from chainrate.noise import (
    ChainSpec,
    balanced_honest_chain,
    depolarizing_dist,
    end_to_end_dist,
    honest_marginals,
    noise_parameter,
    noise_report,
    observed_qx,
    observed_qz,
    strength_for_observed_qx,
    uniform_chain,
)


def enum_phase_parity(dists):
    """Odd-phase-parity probability by brute force over all symbol tuples."""
    total = 0.0
    for combo in itertools.product(range(4), repeat=len(dists)):
        parity = 0
        weight = 1.0
        for dist, index in zip(dists, combo):
            parity ^= index & 1
            weight *= dist.probs[index]
        if parity:
            total += weight
    return total


def random_chain(rng, max_repeaters=6):
    repeaters = int(rng.integers(1, max_repeaters + 1))
    links = []
    for _ in range(repeaters + 1):
        raw = rng.dirichlet((1.0, 1.0, 1.0, 1.0))
        links.append(BellDiagonal(tuple(float(v) / float(raw.sum()) for v in raw)))
    left = int(rng.integers(0, repeaters + 1))
    right = int(rng.integers(0, repeaters - left + 1))
    return ChainSpec(repeaters, left, right, tuple(links))


def test_depolarizing_dist_layout():
    d = depolarizing_dist(0.04)
    assert d.probs == (1.0 - 0.03, 0.01, 0.01, 0.01)
    assert math.isclose(phase_error_prob(d), 0.02, rel_tol=0, abs_tol=1e-15)


def test_depolarizing_dist_extremes():
    assert depolarizing_dist(0.0) == BellDiagonal.point()
    assert depolarizing_dist(1.0) == BellDiagonal.uniform()


@pytest.mark.parametrize("q", [-0.01, 1.01])
def test_depolarizing_dist_domain(q):
    with pytest.raises(ValueError):
        depolarizing_dist(q)


def test_chain_spec_validation():
    links3 = (depolarizing_dist(0.1),) * 3
    with pytest.raises(ValueError):
        ChainSpec(0, 0, 0, (depolarizing_dist(0.1),))
    with pytest.raises(ValueError):
        ChainSpec(2, -1, 0, links3)
    with pytest.raises(ValueError):
        ChainSpec(2, 2, 1, links3)  # honest counts exceed stations
    with pytest.raises(ValueError):
        ChainSpec(2, 0, 0, links3[:2])  # wrong link count
    with pytest.raises(TypeError):
        ChainSpec(2, 0, 0, ((0.25, 0.25, 0.25, 0.25),) * 3)


def test_balanced_chain_puts_extra_station_on_the_left():
    spec = balanced_honest_chain(5, 0.03, 3)
    assert (spec.honest_left, spec.honest_right) == (2, 1)
    even = balanced_honest_chain(5, 0.03, 4)
    assert (even.honest_left, even.honest_right) == (2, 2)


@pytest.mark.parametrize("q", [0.0, 0.01, 0.03, 0.1, 0.5])
def test_identical_chain_closed_form(q):
    """Six-link identical chain: qx = (1 - (1-q)^6) / 2, checked three ways."""
    spec = uniform_chain(5, q, 0, 0)
    closed = (1.0 - (1.0 - q) ** 6) / 2.0
    fast = observed_qx(spec)
    brute = enum_phase_parity(spec.links)
    assert abs(fast - closed) < 1e-12
    assert abs(brute - closed) < 1e-12


def test_preset_chain_noise_value():
    # Independently derived for q = 0.03 over six links.
    assert abs(observed_qx(uniform_chain(5, 0.03, 2, 2)) - 0.08351399753550184) < 1e-12


def test_depolarizing_chain_is_symmetric_in_bit_and_phase():
    spec = uniform_chain(4, 0.07, 1, 1)
    assert math.isclose(observed_qx(spec), observed_qz(spec), rel_tol=0, abs_tol=1e-15)


def test_end_to_end_matches_enumeration_heterogeneous():
    rng = np.random.default_rng(99)
    spec = random_chain(rng, max_repeaters=4)
    assert abs(phase_error_prob(end_to_end_dist(spec)) - enum_phase_parity(spec.links)) < 1e-12


def test_honest_marginals_use_only_end_links():
    # Distinct links so the selection is visible in the numbers.
    links = tuple(depolarizing_dist(q) for q in (0.02, 0.04, 0.06, 0.08, 0.10))
    spec = ChainSpec(4, 1, 2, links)
    left, right = honest_marginals(spec)
    assert left == links[0]
    expected_right = enum_phase_parity(links[3:])
    assert abs(phase_error_prob(right) - expected_right) < 1e-12


def test_honest_marginals_empty_segments_are_deterministic():
    spec = uniform_chain(3, 0.2, 0, 0)
    left, right = honest_marginals(spec)
    assert left == BellDiagonal.point()
    assert right == BellDiagonal.point()
    assert noise_parameter(spec) == 0.0


def test_noise_parameter_zero_requires_no_honest_stations():
    spec = uniform_chain(3, 0.2, 1, 0)
    assert noise_parameter(spec) > 0.0


@settings(deadline=None, max_examples=40)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_noise_parameter_equals_marginal_combination(seed):
    spec = random_chain(np.random.default_rng(seed))
    left, right = honest_marginals(spec)
    pl, pr = phase_error_prob(left), phase_error_prob(right)
    assert abs(noise_parameter(spec) - (pl * (1 - pr) + pr * (1 - pl))) < 1e-12


@pytest.mark.parametrize("total", [1, 2, 3, 4])
def test_noise_parameter_identical_links_closed_form(total):
    # Depends only on the number of honest links when links are identical.
    q = 0.03
    spec = balanced_honest_chain(5, q, total)
    closed = (1.0 - (1.0 - q) ** total) / 2.0
    assert abs(noise_parameter(spec) - closed) < 1e-12


def test_noise_parameter_split_invariance():
    q = 0.05
    values = {
        split: noise_parameter(uniform_chain(5, q, split, 4 - split))
        for split in (0, 1, 2, 3, 4)
    }
    reference = values[2]
    for v in values.values():
        assert abs(v - reference) < 1e-12


def test_preset_noise_parameter_values():
    assert abs(noise_parameter(uniform_chain(5, 0.03, 2, 2)) - 0.057353595) < 1e-12
    assert abs(noise_parameter(uniform_chain(5, 0.03, 1, 1)) - 0.02955) < 1e-12


def test_noise_report_is_consistent():
    spec = uniform_chain(5, 0.03, 2, 2)
    report = noise_report(spec)
    assert report.observed_qx == observed_qx(spec)
    assert report.observed_qz == observed_qz(spec)
    assert report.p_star == noise_parameter(spec)
    pl, pr = report.p_left, report.p_right
    assert abs(report.p_star - (pl * (1 - pr) + pr * (1 - pl))) < 1e-15
    assert report.end_to_end == end_to_end_dist(spec)


@pytest.mark.parametrize("q", [0.0, 0.01, 0.2, 0.6])
def test_strength_roundtrip(q):
    spec = uniform_chain(3, q, 0, 0)
    qx = observed_qx(spec)
    if qx < 0.5:
        assert abs(strength_for_observed_qx(qx, 4) - q) < 1e-12


def test_strength_domain():
    with pytest.raises(ValueError):
        strength_for_observed_qx(0.5, 4)
    with pytest.raises(ValueError):
        strength_for_observed_qx(-0.01, 4)
    with pytest.raises(ValueError):
        strength_for_observed_qx(0.1, 0)
