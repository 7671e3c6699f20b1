"""Self-verification suite: independent oracles checked against the fast paths.

Each check pits a deliberately literal computation (exhaustive enumeration,
explicit density matrices, direct simulation) against the production formulas
and returns a named pass/fail result. The CLI's ``verify`` subcommand runs the
whole list; the test suite reuses individual checks with heavier parameters.

``run_all`` accepts ``inject_fault='convolve'`` as a negative control: it
swaps a corrupted convolution into the oracle-equivalence check, which must
then fail, proving the oracle actually constrains the implementation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Sequence

import numpy as np

from . import bell, dm_oracle, keyrate, montecarlo, noise, sampling
from .bell import SYMBOLS, BellDiagonal
from .noise import ChainSpec, depolarizing_dist

#: Frozen references, computed once with 50-digit arithmetic.
BB84_ASYMPTOTIC_THRESHOLD = 0.11002786443835955
EPSILON_PA_1E36 = 5.0396841995794927e-12
EPSILON_FAIL_1E36 = 2.5198420997897463e-12

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def enumerate_phase_parity(dists: Sequence[BellDiagonal]) -> float:
    """Probability of odd total phase over independent per-link symbols.

    Exhaustive sum over all 4**L symbol tuples; shares nothing with the
    convolution code path.
    """
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


def random_dist(rng: np.random.Generator) -> BellDiagonal:
    """A random distribution over the four symbols (flat Dirichlet)."""
    raw = rng.dirichlet((1.0, 1.0, 1.0, 1.0))
    return BellDiagonal(tuple(float(v) / float(raw.sum()) for v in raw))


def _named_pool() -> list[BellDiagonal]:
    return [
        BellDiagonal.point(),
        depolarizing_dist(0.01),
        depolarizing_dist(0.05),
        depolarizing_dist(0.3),
    ]


def check_states_orthonormal() -> CheckResult:
    """The four entangled basis vectors are orthonormal."""
    worst = 0.0
    for a in SYMBOLS:
        for b in SYMBOLS:
            overlap = complex(dm_oracle.bell_state_vector(a).conj() @ dm_oracle.bell_state_vector(b))
            expected = 1.0 if a == b else 0.0
            worst = max(worst, abs(overlap - expected))
    return CheckResult("states_orthonormal", worst <= 1e-12, f"max deviation {worst:.3e}")


def check_swap_identity() -> CheckResult:
    """Measuring the middle pair of two pure labelled states: four equal branches,
    each collapsing the outer pair to the label sum plus the outcome."""
    worst_prob = 0.0
    worst_fidelity = 1.0
    for a in SYMBOLS:
        for b in SYMBOLS:
            vec_a = dm_oracle.bell_state_vector(a)
            vec_b = dm_oracle.bell_state_vector(b)
            rho = np.kron(np.outer(vec_a, vec_a.conj()), np.outer(vec_b, vec_b.conj()))
            for branch in dm_oracle.bell_swap(rho, (1, 2)):
                worst_prob = max(worst_prob, abs(branch.probability - 0.25))
                target = dm_oracle.bell_state_vector(bell.symbol_add(bell.symbol_add(a, b), branch.outcome))
                fidelity = float((target.conj() @ branch.post_state @ target).real)
                worst_fidelity = min(worst_fidelity, fidelity)
    ok = worst_prob <= 1e-10 and worst_fidelity >= 1.0 - 1e-10
    return CheckResult(
        "swap_identity",
        ok,
        f"max |prob - 1/4| {worst_prob:.3e}, min fidelity {worst_fidelity:.12f}",
    )


def check_pauli_correction() -> CheckResult:
    """The announced-outcome correction restores the label on either qubit."""
    worst = 0.0
    for s in SYMBOLS:
        for x in SYMBOLS:
            shifted = dm_oracle.bell_state_vector(bell.symbol_add(s, x))
            rho = np.outer(shifted, shifted.conj())
            target_vec = dm_oracle.bell_state_vector(s)
            target = np.outer(target_vec, target_vec.conj())
            for qubit in (0, 1):
                corrected = dm_oracle.pauli_correct(rho, x, qubit)
                worst = max(worst, float(np.max(np.abs(corrected - target))))
    return CheckResult("pauli_correction", worst <= 1e-12, f"max deviation {worst:.3e}")


def check_oracle_equivalence(
    seed: int = 20260817,
    convolve_fn: Callable[[BellDiagonal, BellDiagonal], BellDiagonal] | None = None,
    random_chains: int = 10,
) -> CheckResult:
    """Folded convolution equals the exact multi-qubit simulation, link for link.

    Covers every single link over the whole pool, every ordered pair of the
    named distributions, and seeded random 2-, 3-, and 4-link chains.
    """
    fn = convolve_fn if convolve_fn is not None else bell.convolve
    rng = np.random.default_rng(seed)
    pool = _named_pool() + [random_dist(rng) for _ in range(10)]
    named = _named_pool()
    chains: list[list[BellDiagonal]] = [[d] for d in pool]
    chains += [[a, b] for a in named for b in named]
    for length in (2, 3, 4):
        for _ in range(random_chains):
            chains.append([pool[i] for i in rng.integers(0, len(pool), size=length)])
    worst = 0.0
    for links in chains:
        exact = dm_oracle.simulate_chain_exact(links)
        folded = reduce(fn, links, BellDiagonal.point())
        deviation = max(abs(p - q) for p, q in zip(exact.probs, folded.probs))
        worst = max(worst, deviation)
    return CheckResult(
        "oracle_equivalence",
        worst <= 1e-10,
        f"{len(chains)} chains, max entrywise deviation {worst:.3e}",
    )


def check_swap_order(seed: int = 20260817) -> CheckResult:
    """Station measurement order does not change the end-to-end distribution."""
    rng = np.random.default_rng(seed)
    trios = [
        [depolarizing_dist(0.05)] * 3,
        [depolarizing_dist(0.01), BellDiagonal.point(), depolarizing_dist(0.3)],
    ]
    trios += [[random_dist(rng) for _ in range(3)] for _ in range(4)]
    worst = 0.0
    for links in trios:
        left_first = dm_oracle.simulate_chain_exact(links, order=(1, 2))
        right_first = dm_oracle.simulate_chain_exact(links, order=(2, 1))
        worst = max(worst, max(abs(p - q) for p, q in zip(left_first.probs, right_first.probs)))
    return CheckResult("swap_order", worst <= 1e-10, f"max deviation {worst:.3e}")


def check_depolarizing_decomposition() -> CheckResult:
    """One-sided depolarizing of a perfect pair decomposes to (1-3q/4, q/4, q/4, q/4)."""
    perfect = dm_oracle.bell_state_vector(SYMBOLS[0])
    rho_perfect = np.outer(perfect, perfect.conj())
    worst = 0.0
    for q in (0.0, 0.01, 0.05, 0.3, 0.5, 1.0):
        mixed = (1.0 - q) * rho_perfect + (q / 4.0) * np.eye(4, dtype=complex)
        decomposed = dm_oracle.dm_to_bell_diagonal(mixed)
        expected = depolarizing_dist(q)
        worst = max(worst, max(abs(p - e) for p, e in zip(decomposed.probs, expected.probs)))
    return CheckResult("depolarizing_decomposition", worst <= 1e-12, f"max deviation {worst:.3e}")


def check_chain_noise_closed_form() -> CheckResult:
    """Identical-link chains: enumeration, the folded distribution, and the
    closed form (1 - (1-q)**L)/2 all agree on the end-to-end phase rate."""
    worst = 0.0
    for q in (0.0, 0.01, 0.03, 0.1, 0.5, 1.0):
        links = [depolarizing_dist(q)] * 6
        closed = (1.0 - (1.0 - q) ** 6) / 2.0
        enumerated = enumerate_phase_parity(links)
        folded = bell.phase_error_prob(bell.fold_convolve(links))
        worst = max(worst, abs(enumerated - closed), abs(folded - closed))
    return CheckResult("chain_noise_closed_form", worst <= 1e-12, f"max deviation {worst:.3e}")


def check_noise_parameter_routes(seed: int = 20260817, chains: int = 100) -> CheckResult:
    """The honest-zone double sum equals the two-marginal parity formula, and
    enumeration over honest links confirms both on small chains."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(chains):
        repeaters = int(rng.integers(1, 7))
        links = tuple(random_dist(rng) for _ in range(repeaters + 1))
        honest_left = int(rng.integers(0, repeaters + 1))
        honest_right = int(rng.integers(0, repeaters - honest_left + 1))
        spec = ChainSpec(repeaters, honest_left, honest_right, links)
        double_sum = noise.noise_parameter(spec)
        left, right = noise.honest_marginals(spec)
        p_l = bell.phase_error_prob(left)
        p_r = bell.phase_error_prob(right)
        parity = p_l * (1.0 - p_r) + p_r * (1.0 - p_l)
        worst = max(worst, abs(double_sum - parity))
        honest_links = links[:honest_left] + (links[len(links) - honest_right:] if honest_right else ())
        if honest_links:
            worst = max(worst, abs(double_sum - enumerate_phase_parity(honest_links)))
        else:
            worst = max(worst, abs(double_sum - 0.0))
    return CheckResult("noise_parameter_routes", worst <= 1e-12, f"{chains} chains, max deviation {worst:.3e}")


def check_sampling_roundtrip() -> CheckResult:
    """Bound and tolerance invert each other across the working parameter grid."""
    worst = 0.0
    epsilons = np.logspace(-40, -2, 20)
    for m, n in ((70, 10**3), (700, 10**4), (7 * 10**5, 10**7)):
        for eps in epsilons:
            eps = float(eps)
            delta = sampling.deviation_for_failure(eps, m, n)
            back = sampling.sampling_failure_bound(delta, m, n)
            worst = max(worst, abs(back - eps**2) / eps**2)
            delta_prime = sampling.hoeffding_deviation(eps, m)
            mean_back = 2.0 * math.exp(-2.0 * delta_prime**2 * m)
            worst = max(worst, abs(mean_back - eps) / eps)
    return CheckResult("sampling_roundtrip", worst <= 1e-12, f"max relative error {worst:.3e}")


def _inline_bound(delta: float, m: int, n: int) -> float:
    # Written out on purpose: valid at m = n/2, where the production function
    # keeps its strict precondition.
    return min(1.0, 2.0 * math.exp(-(delta**2) * m * n / (n + 2)))


def check_sampling_exhaustive(seed: int = 20260817) -> CheckResult:
    """Exact subset enumeration honors the analytic bound at n=20, m=10."""
    rng = np.random.default_rng(seed)
    chain = noise.uniform_chain(5, 0.03, 2, 2)
    sampled = (rng.random(20) < noise.observed_qx(chain)).astype(int)
    words = {
        "balanced": [1] * 10 + [0] * 10,
        "chain_sampled": sampled.tolist(),
    }
    details = []
    ok = True
    for label, bits in words.items():
        for delta in (0.15, 0.3, 0.45):
            exact = sampling.exhaustive_failure(bits, 10, delta)
            bound = _inline_bound(delta, 10, 20)
            ok = ok and exact <= bound
            details.append(f"{label} d={delta}: {exact:.5f} <= {bound:.5f}")
    return CheckResult("sampling_exhaustive", ok, "; ".join(details))


def check_sampling_empirical(
    seed: int = 20260817,
    n: int = 1000,
    m: int = 50,
    trials: int = 20000,
    delta: float = 0.2,
) -> CheckResult:
    """Monte Carlo subset failure stays within the bound plus sampling slack."""
    rng = np.random.default_rng(seed)
    chain = noise.uniform_chain(5, 0.03, 2, 2)
    words = {
        "balanced": [1] * (n // 2) + [0] * (n - n // 2),
        "chain_sampled": (rng.random(n) < noise.observed_qx(chain)).astype(int).tolist(),
    }
    details = []
    ok = True
    for label, bits in words.items():
        freq = sampling.empirical_failure_bits(bits, m, delta, trials, seed)
        bound = _inline_bound(delta, m, n)
        limit = bound + 3.0 * math.sqrt(bound * (1.0 - bound) / trials)
        ok = ok and freq <= limit
        details.append(f"{label}: {freq:.3e} <= {limit:.3e}")
    return CheckResult("sampling_empirical", ok, "; ".join(details))


def check_baseline_identity() -> CheckResult:
    """Zero honest stations removes the whole advantage: the asymptotic chain
    rate coincides with the asymptotic baseline, float for float."""
    qs = [round(0.001 * i, 3) for i in range(490)]
    exact = all(keyrate.asymptotic_rate(q, 0.0) == keyrate.bb84_asymptotic(q) for q in qs)
    ours = keyrate.noise_tolerance(lambda q: keyrate.asymptotic_rate(q, 0.0))
    baseline = keyrate.noise_tolerance(keyrate.bb84_asymptotic)
    close = abs(ours - baseline) <= 1e-4 and abs(ours - BB84_ASYMPTOTIC_THRESHOLD) <= 2e-4
    return CheckResult(
        "baseline_identity",
        exact and close,
        f"grid exact: {exact}, thresholds {ours:.6f} vs {baseline:.6f}",
    )


def check_epsilon_ledger() -> CheckResult:
    """Ledger values at the working epsilon match the frozen references and
    stay monotone in epsilon."""
    ledger = sampling.epsilon_ledger(1e-36)
    rel_pa = abs(ledger.epsilon_pa - EPSILON_PA_1E36) / EPSILON_PA_1E36
    rel_fail = abs(ledger.epsilon_fail - EPSILON_FAIL_1E36) / EPSILON_FAIL_1E36
    grid = [sampling.epsilon_ledger(float(e)) for e in np.logspace(-40, -6, 12)]
    monotone = all(
        a.epsilon_pa <= b.epsilon_pa and a.epsilon_fail <= b.epsilon_fail and a.smoothing <= b.smoothing
        for a, b in zip(grid, grid[1:])
    )
    ok = rel_pa <= 1e-12 and rel_fail <= 1e-12 and monotone
    return CheckResult("epsilon_ledger", ok, f"rel errors {rel_pa:.2e}/{rel_fail:.2e}, monotone {monotone}")


def check_measurement_semantics() -> CheckResult:
    """Projector-level disagreement probabilities equal the symbol bits exactly:
    same-basis Z disagreement is bt, X disagreement is ph."""
    worst = 0.0
    basis_change = np.kron(_HADAMARD, _HADAMARD)
    for s in SYMBOLS:
        vec = dm_oracle.bell_state_vector(s)
        z_probs = np.abs(vec) ** 2
        worst = max(worst, abs(float(z_probs[1] + z_probs[2]) - s.bt))
        x_probs = np.abs(basis_change @ vec) ** 2
        worst = max(worst, abs(float(x_probs[1] + x_probs[2]) - s.ph))
    return CheckResult("measurement_semantics", worst <= 1e-12, f"max deviation {worst:.3e}")


def check_round_sampler(seed: int = 20260817, draws: int = 200_000) -> CheckResult:
    """Sampled end-to-end symbols follow the folded distribution (4-sigma gate),
    and a noiseless chain yields only the identity symbol."""
    spec = noise.uniform_chain(5, 0.03, 2, 2)
    rng = np.random.default_rng(seed)
    symbols = montecarlo.sample_rounds(spec, draws, rng)
    expected = noise.end_to_end_dist(spec)
    worst_sigma = 0.0
    for index in range(4):
        p = expected.probs[index]
        freq = float(np.mean(symbols == index))
        sigma = math.sqrt(p * (1.0 - p) / draws)
        worst_sigma = max(worst_sigma, abs(freq - p) / sigma)
    noiseless = noise.uniform_chain(2, 0.0, 1, 1)
    clean = montecarlo.sample_rounds(noiseless, 1000, np.random.default_rng(seed))
    ok = worst_sigma <= 4.0 and not np.any(clean)
    return CheckResult("round_sampler", ok, f"worst cell deviation {worst_sigma:.2f} sigma")


def check_concentration(seed: int = 20260817, trials: int = 1500) -> CheckResult:
    """Quick bound-violation scan of the simulator's sampling machinery."""
    spec = noise.uniform_chain(5, 0.03, 2, 2)
    cfg = montecarlo.TrialConfig(spec=spec, rounds=2000, sample_size=140, seed=seed, trials=trials)
    summary = montecarlo.verify_concentration(cfg, epsilon=0.05)
    detail = (
        f"sampling {summary.sampling_violations}/{trials} (limit {summary.sampling_limit:.3e}), "
        f"mean {summary.hoeffding_violations}/{trials} (limit {summary.hoeffding_limit:.3e})"
    )
    return CheckResult("concentration", summary.ok, detail)


def check_simulation_determinism(seed: int = 20260817) -> CheckResult:
    """Identical configs reproduce identical reports."""
    spec = noise.uniform_chain(5, 0.03, 2, 2)
    cfg = montecarlo.TrialConfig(spec=spec, rounds=20_000, sample_size=1400, seed=seed)
    first = montecarlo.simulate_e91(cfg)
    second = montecarlo.simulate_e91(cfg)
    return CheckResult("simulation_determinism", first == second, f"qx_hat {first.qx_hat:.6f}")


def _corrupted_convolve(p: BellDiagonal, q: BellDiagonal) -> BellDiagonal:
    out = list(bell.convolve(p, q).probs)
    out[0] += 0.002
    total = sum(out)
    return BellDiagonal(tuple(v / total for v in out))


def run_all(seed: int = 20260817, inject_fault: str | None = None) -> list[CheckResult]:
    """Run every check; ``inject_fault='convolve'`` must make the oracle check fail."""
    if inject_fault not in (None, "convolve"):
        raise ValueError(f"unknown fault {inject_fault!r}")
    convolve_fn = _corrupted_convolve if inject_fault == "convolve" else None
    return [
        check_states_orthonormal(),
        check_swap_identity(),
        check_pauli_correction(),
        check_oracle_equivalence(seed, convolve_fn=convolve_fn),
        check_swap_order(seed),
        check_depolarizing_decomposition(),
        check_chain_noise_closed_form(),
        check_noise_parameter_routes(seed),
        check_sampling_roundtrip(),
        check_sampling_exhaustive(seed),
        check_sampling_empirical(seed),
        check_baseline_identity(),
        check_epsilon_ledger(),
        check_measurement_semantics(),
        check_round_sampler(seed),
        check_concentration(seed),
        check_simulation_determinism(seed),
    ]
