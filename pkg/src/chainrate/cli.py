"""Command-line front end.

Subcommands:

* ``noise``            sweep link strength, tabulate end-to-end noise and honest-zone parameters
* ``rate-finite``      sweep round count or observed noise, tabulate finite-size rates vs. the baseline
* ``rate-asymptotic``  sweep observed noise, tabulate asymptotic rates vs. the baseline
* ``bounds``           print the deviation tolerances and failure-term ledger for one setting
* ``simulate``         run one round-level simulation, print its report as JSON
* ``mc-verify``        run the concentration scan, print its summary as JSON
* ``verify``           run the full self-verification suite

Tables are CSV with a header row, ordered by the sweep column, numbers at 12
significant digits; reports are JSON. Exit codes: 0 success, 1 validation
error, 2 verification failure. All randomness flows from ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from typing import Any, Sequence

from . import verify as verify_mod
from .config import ChainConfig, ConfigError, default_chain_config, load_chain_config
from .keyrate import RateParams, asymptotic_rate, bb84_asymptotic, bb84_finite, finite_rate, noise_tolerance
from .montecarlo import TrialConfig, simulate_e91, verify_concentration
from .noise import ChainSpec, noise_parameter, observed_qx, strength_for_observed_qx, uniform_chain
from .sampling import deviation_for_failure, epsilon_ledger, hoeffding_deviation, sampling_failure_bound

DEFAULT_EPSILON = 1e-36
# The concentration scan tests the bound at its own epsilon; the key-rate
# default would put the target frequency at 1e-72.
MC_VERIFY_EPSILON = 0.05


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage problems; the interface contract wants 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _emit_csv(header: Sequence[str], rows: Sequence[Sequence[Any]], out: str | None) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(cell) for cell in row])
    _emit(buffer.getvalue(), out)


def _json_default(value: Any) -> Any:
    if isinstance(value, frozenset):
        return sorted(value)
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _emit_json(payload: Any, out: str | None) -> None:
    if dataclasses.is_dataclass(payload) and not isinstance(payload, type):
        payload = dataclasses.asdict(payload)
    _emit(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n", out)


def _positive_int(text: str) -> int:
    # Accepts scientific notation like 1e7 for convenience.
    value = float(text)
    if value < 1 or value != int(value):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def _honest_list(text: str) -> tuple[int, ...]:
    try:
        counts = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if not counts or any(count < 0 for count in counts):
        raise argparse.ArgumentTypeError(f"honest counts must be >= 0, got {text!r}")
    return counts


def _load_config(args: argparse.Namespace) -> ChainConfig:
    if args.config is None:
        return default_chain_config()
    return load_chain_config(args.config)


def _epsilon(args: argparse.Namespace, fallback: float = DEFAULT_EPSILON) -> float:
    return fallback if args.epsilon is None else args.epsilon


def _sample_size(rounds: int, fraction: float) -> int:
    if not (0.0 < fraction < 1.0):
        raise ConfigError(f"--m-fraction must be in (0, 1), got {fraction}")
    size = max(1, round(fraction * rounds))
    if 2 * size > rounds:
        raise ConfigError(f"--m-fraction {fraction} gives sample {size} > half of {rounds} rounds")
    return size


def _balanced_split(honest_total: int) -> tuple[int, int]:
    left = (honest_total + 1) // 2
    return left, honest_total - left


def _resolve_honest(
    counts: tuple[int, ...] | None,
    repeaters: int,
    fallback: Sequence[int],
) -> tuple[int, ...]:
    """Explicit counts are validated; the default keeps only counts the chain has room for."""
    if counts is None:
        resolved = tuple(count for count in fallback if count <= repeaters)
        if not resolved:
            resolved = (repeaters,)
        return resolved
    for count in counts:
        if count > repeaters:
            raise ConfigError(f"honest count {count} exceeds {repeaters} stations")
    return counts


def _grid(lo: float, hi: float, steps: int) -> list[float]:
    if steps < 2 or hi <= lo:
        raise ConfigError(f"need at least 2 steps and max > min, got [{lo}, {hi}] x {steps}")
    span = hi - lo
    return [lo + span * i / (steps - 1) for i in range(steps)]


def cmd_noise(args: argparse.Namespace) -> int:
    config = _load_config(args)
    repeaters = config.spec.repeaters
    honest = _resolve_honest(args.honest, repeaters, (1, 2, 3, 4))
    header = ["q", "qx_total"] + [f"p_star_h{count}" for count in honest]
    rows = []
    for q in _grid(args.q_min, args.q_max, args.steps):
        chain = uniform_chain(repeaters, q, 0, 0)
        row: list[Any] = [q, observed_qx(chain)]
        for count in honest:
            left, right = _balanced_split(count)
            row.append(noise_parameter(uniform_chain(repeaters, q, left, right)))
        rows.append(row)
    _emit_csv(header, rows, args.out)
    return 0


def _round_grid(n_min: int, n_max: int, per_decade: int) -> list[int]:
    if n_min < 10 or n_max <= n_min:
        raise ConfigError(f"need 10 <= n-min < n-max, got {n_min}, {n_max}")
    values = []
    exponent = math.log10(n_min)
    top = math.log10(n_max)
    step = 1.0 / per_decade
    while exponent <= top + 1e-9:
        values.append(int(round(10**exponent)))
        exponent += step
    return sorted(set(values))


def _rate_columns(honest: Sequence[int]) -> list[str]:
    header = []
    for count in honest:
        header += [f"rate_h{count}", f"rate_h{count}_clamped"]
    return header + ["rate_bb84f", "rate_bb84f_clamped"]


def cmd_rate_finite(args: argparse.Namespace) -> int:
    config = _load_config(args)
    spec = config.spec
    repeaters = spec.repeaters
    n_links = repeaters + 1
    honest = _resolve_honest(args.honest, repeaters, (0, 2, 4))
    epsilon = _epsilon(args)
    rows: list[list[Any]] = []

    if args.sweep == "N":
        if args.config is None and args.q is not None:
            spec = uniform_chain(repeaters, args.q, spec.honest_left, spec.honest_right)
        qx = observed_qx(spec)
        p_stars = []
        for count in honest:
            left, right = _balanced_split(count)
            sub = ChainSpec(repeaters, left, right, spec.links)
            p_stars.append(noise_parameter(sub) if config.p_star_override is None else config.p_star_override)
        for rounds in _round_grid(args.n_min, args.n_max, args.per_decade):
            sample = _sample_size(rounds, args.m_fraction)
            row: list[Any] = [rounds]
            for p_star in p_stars:
                report = finite_rate(
                    qx,
                    RateParams(
                        n=rounds,
                        m=sample,
                        epsilon=epsilon,
                        p_star=p_star,
                        ec_factor=args.ec_factor,
                        strict_leak=args.strict_leak,
                    ),
                )
                row += [report.rate, report.rate_clamped]
            baseline = bb84_finite(qx, rounds, sample, epsilon)
            row += [baseline, max(0.0, baseline)]
            rows.append(row)
        _emit_csv(["N"] + _rate_columns(honest), rows, args.out)
        return 0

    # qx sweep at fixed round count: each grid point is realized by an
    # identical-strength chain of the configured size hitting that end-to-end noise.
    rounds = args.rounds
    sample = _sample_size(rounds, args.m_fraction)
    for qx in _grid(args.qx_min, args.qx_max, args.steps):
        if not (0.0 <= qx < 0.5):
            raise ConfigError(f"observed-noise sweep must stay in [0, 0.5), got {qx}")
        strength = strength_for_observed_qx(qx, n_links)
        row = [qx]
        for count in honest:
            left, right = _balanced_split(count)
            chain = uniform_chain(repeaters, strength, left, right)
            p_star = noise_parameter(chain) if config.p_star_override is None else config.p_star_override
            report = finite_rate(
                qx,
                RateParams(
                    n=rounds,
                    m=sample,
                    epsilon=epsilon,
                    p_star=p_star,
                    ec_factor=args.ec_factor,
                    strict_leak=args.strict_leak,
                ),
            )
            row += [report.rate, report.rate_clamped]
        baseline = bb84_finite(qx, rounds, sample, epsilon)
        row += [baseline, max(0.0, baseline)]
        rows.append(row)
    _emit_csv(["qx"] + _rate_columns(honest), rows, args.out)
    return 0


def cmd_rate_asymptotic(args: argparse.Namespace) -> int:
    config = _load_config(args)
    repeaters = config.spec.repeaters
    n_links = repeaters + 1
    honest = _resolve_honest(args.honest, repeaters, (0, 2, 4))

    def p_star_at(qx: float, count: int) -> float:
        if config.p_star_override is not None:
            return config.p_star_override
        left, right = _balanced_split(count)
        strength = strength_for_observed_qx(qx, n_links)
        return noise_parameter(uniform_chain(repeaters, strength, left, right))

    header = ["qx"] + [f"rate_h{count}" for count in honest] + ["rate_bb84a"]
    rows: list[list[Any]] = []
    for qx in _grid(args.qx_min, args.qx_max, args.steps):
        if not (0.0 <= qx < 0.5):
            raise ConfigError(f"observed-noise sweep must stay in [0, 0.5), got {qx}")
        row: list[Any] = [qx]
        for count in honest:
            row.append(asymptotic_rate(qx, p_star_at(qx, count)))
        row.append(bb84_asymptotic(qx))
        rows.append(row)
    threshold_row: list[Any] = ["threshold"]
    for count in honest:
        threshold_row.append(noise_tolerance(lambda qx: asymptotic_rate(qx, p_star_at(qx, count))))
    threshold_row.append(noise_tolerance(bb84_asymptotic))
    rows.append(threshold_row)
    _emit_csv(header, rows, args.out)
    return 0


def cmd_bounds(args: argparse.Namespace) -> int:
    epsilon = _epsilon(args)
    rounds = args.rounds
    sample = _sample_size(rounds, args.m_fraction)
    delta = deviation_for_failure(epsilon, sample, rounds)
    ledger = epsilon_ledger(epsilon)
    payload = {
        "n": rounds,
        "m": sample,
        "epsilon": epsilon,
        "delta": delta,
        "delta_prime": hoeffding_deviation(epsilon, sample),
        "failure_bound_at_delta": sampling_failure_bound(delta, sample, rounds),
        "epsilon_pa": ledger.epsilon_pa,
        "epsilon_fail": ledger.epsilon_fail,
        "smoothing": ledger.smoothing,
    }
    _emit_json(payload, args.out)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_config(args)
    rounds = args.rounds
    cfg = TrialConfig(
        spec=config.spec,
        rounds=rounds,
        sample_size=_sample_size(rounds, args.m_fraction),
        seed=args.seed,
        epsilon=_epsilon(args),
        ec_factor=args.ec_factor,
        strict_leak=args.strict_leak,
        p_star_override=config.p_star_override,
    )
    _emit_json(simulate_e91(cfg), args.out)
    return 0


def cmd_mc_verify(args: argparse.Namespace) -> int:
    config = _load_config(args)
    rounds = args.rounds
    cfg = TrialConfig(
        spec=config.spec,
        rounds=rounds,
        sample_size=_sample_size(rounds, args.m_fraction),
        seed=args.seed,
        trials=args.trials,
        ec_factor=args.ec_factor,
        strict_leak=args.strict_leak,
        p_star_override=config.p_star_override,
    )
    summary = verify_concentration(cfg, epsilon=_epsilon(args, fallback=MC_VERIFY_EPSILON))
    _emit_json(summary, args.out)
    return 0 if summary.ok else 2


def cmd_verify(args: argparse.Namespace) -> int:
    results = verify_mod.run_all(seed=args.seed, inject_fault=args.inject_fault)
    lines = []
    for result in results:
        status = "PASS" if result.ok else "FAIL"
        lines.append(f"{status} {result.name}: {result.detail}")
    passed = sum(1 for r in results if r.ok)
    lines.append(f"{passed}/{len(results)} checks passed")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if passed == len(results) else 2


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="JSON chain configuration")
    common.add_argument("--out", metavar="FILE", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument(
        "--epsilon",
        type=float,
        default=None,
        help=f"failure target (default {DEFAULT_EPSILON:g}; mc-verify defaults to {MC_VERIFY_EPSILON})",
    )
    common.add_argument("--m-fraction", type=float, default=0.07, help="test-sample fraction of rounds (default 0.07)")
    common.add_argument("--ec-factor", type=float, default=1.2, help="error-correction inefficiency (default 1.2)")
    common.add_argument(
        "--strict-leak",
        action="store_true",
        help="charge error correction on all rounds instead of the kept fraction",
    )

    parser = _Parser(prog="chainrate", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_noise = sub.add_parser("noise", parents=[common], help="sweep link strength")
    p_noise.add_argument("--q-min", type=float, default=0.0)
    p_noise.add_argument("--q-max", type=float, default=0.12)
    p_noise.add_argument("--steps", type=int, default=61)
    p_noise.add_argument("--honest", type=_honest_list, default=None, help="comma-separated honest counts (default 1..4, capped at the chain)")
    p_noise.set_defaults(handler=cmd_noise)

    p_finite = sub.add_parser("rate-finite", parents=[common], help="finite-size rate sweep")
    p_finite.add_argument("--sweep", choices=("N", "qx"), default="N")
    p_finite.add_argument("--n-min", type=_positive_int, default=10**5)
    p_finite.add_argument("--n-max", type=_positive_int, default=10**12)
    p_finite.add_argument("--per-decade", type=int, default=4, help="grid points per decade for the N sweep")
    p_finite.add_argument("--rounds", type=_positive_int, default=10**7, help="round count for the qx sweep")
    p_finite.add_argument("--qx-min", type=float, default=0.0)
    p_finite.add_argument("--qx-max", type=float, default=0.15)
    p_finite.add_argument("--steps", type=int, default=151)
    p_finite.add_argument("--q", type=float, default=None, help="link strength when no config is given (default 0.03)")
    p_finite.add_argument("--honest", type=_honest_list, default=None, help="comma-separated honest counts (default 0,2,4)")
    p_finite.set_defaults(handler=cmd_rate_finite)

    p_asym = sub.add_parser("rate-asymptotic", parents=[common], help="asymptotic rate sweep")
    p_asym.add_argument("--qx-min", type=float, default=0.0)
    p_asym.add_argument("--qx-max", type=float, default=0.25)
    p_asym.add_argument("--steps", type=int, default=126)
    p_asym.add_argument("--honest", type=_honest_list, default=None, help="comma-separated honest counts (default 0,2,4)")
    p_asym.set_defaults(handler=cmd_rate_asymptotic)

    p_bounds = sub.add_parser("bounds", parents=[common], help="deviation tolerances and failure ledger")
    p_bounds.add_argument("--rounds", type=_positive_int, default=10**7)
    p_bounds.set_defaults(handler=cmd_bounds)

    p_sim = sub.add_parser("simulate", parents=[common], help="round-level simulation")
    p_sim.add_argument("--rounds", type=_positive_int, default=10**6)
    p_sim.set_defaults(handler=cmd_simulate)

    p_mc = sub.add_parser("mc-verify", parents=[common], help="concentration-bound scan")
    p_mc.add_argument("--rounds", type=_positive_int, default=2000)
    p_mc.add_argument("--trials", type=_positive_int, default=2000)
    p_mc.set_defaults(handler=cmd_mc_verify)

    p_verify = sub.add_parser("verify", parents=[common], help="self-verification suite")
    p_verify.add_argument("--inject-fault", choices=("convolve",), default=None, help="negative control")
    p_verify.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "rate-finite" and args.config is None and args.q is None:
        args.q = 0.03
    try:
        return args.handler(args)
    except (ConfigError, ValueError) as exc:
        print(f"chainrate: error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entry()
