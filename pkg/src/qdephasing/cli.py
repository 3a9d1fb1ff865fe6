"""Command-line interface: ``qdephasing {evolve,validate,timescales}``.

Exit status: 0 success, 1 configuration error, 2 oracle validation failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import sys
from pathlib import Path

from . import __version__
from .channels import NoiseRates, apply_closed_form, channel_params
from .config import ConfigError, ExperimentConfig, rates_for_channel
from .metrics import (
    ALL_PAIRS,
    concurrence,
    disentanglement_time,
    fidelity_pure,
    partial_trace,
    support_of,
    timescales,
)
from .oracle import Z_THRESHOLD, oracle_report
from .qmat import pure_density

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VALIDATION = 2

SWEEP_HEADER = [
    "t", "gamma_A", "gamma_B", "gamma", "C", "F",
    "abs_sA12", "abs_sB12", "rho14_re", "rho14_im", "rho23_re", "rho23_im",
]
VALIDATE_HEADER = ["t", "max_z", "worst_element", "C_mc", "C_closed", "C_stderr", "pass"]
MIN_VALIDATE_N = 1_000
FLAKY_BELOW_N = 10_000


def fmt(x) -> str:
    """17 significant digits, enough to round-trip any double."""
    if x is None:
        return "undefined"
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_value(x):
    if x is None:
        return "undefined"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_CONFIG, f"error: {message}\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON experiment config; flags override its values")
    p.add_argument("--channel", help="A, B, AB, D or full")
    p.add_argument("--gamma", type=float, dest="Gamma", help="collective dephasing rate")
    p.add_argument("--gamma-a", type=float, dest="Gamma_A", help="local dephasing rate of qubit A")
    p.add_argument("--gamma-b", type=float, dest="Gamma_B", help="local dephasing rate of qubit B")
    p.add_argument("--state", help="preset name, preset:amps, or a1..a4 as re,im pairs")
    p.add_argument("--t-min", type=float, dest="t_min")
    p.add_argument("--t-max", type=float, dest="t_max")
    p.add_argument("--points", type=int)
    p.add_argument("--log", action="store_const", const="log", dest="spacing", help="log-spaced time grid")
    p.add_argument("--epsilon", type=float, help="concurrence threshold for the disentanglement time")
    p.add_argument("--n", type=int, help="Monte Carlo trajectories")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path, help="CSV output path (default stdout)")
    p.add_argument("--summary", type=Path, help="summary JSON path (default stderr)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdephasing", description="Two-qubit dephasing channels, concurrence and decay times.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (
        ("evolve", "closed-form time sweep of concurrence, fidelity and coherences"),
        ("validate", "Monte Carlo oracle check of the closed-form channel"),
        ("timescales", "dephasing and entanglement decay times"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "timescales":
            p.add_argument("--support", help="'all', 'state', or pairs like 12,34,14")
        if name == "validate":
            p.add_argument("--workers", type=int, default=1)
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    return cfg.override(
        channel=args.channel,
        initial=args.state,
        epsilon=args.epsilon,
        Gamma=args.Gamma,
        Gamma_A=args.Gamma_A,
        Gamma_B=args.Gamma_B,
        t_min=args.t_min,
        t_max=args.t_max,
        points=args.points,
        spacing=args.spacing,
        n=args.n,
        seed=args.seed,
    )


@contextlib.contextmanager
def _open_out(path: Path | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit_summary(summary: dict, path: Path | None) -> None:
    text = json.dumps({k: _json_value(v) for k, v in summary.items()}, indent=2)
    if path is None:
        print(text, file=sys.stderr)
    else:
        Path(path).write_text(text + "\n")


def sweep_rows(cfg: ExperimentConfig):
    """Yield one row (list of floats, header order) per grid time."""
    psi = cfg.state
    rho0 = pure_density(psi)
    rates = rates_for_channel(cfg.channel, cfg.rates)
    for t in cfg.grid.times():
        p = channel_params(t, rates)
        rho = apply_closed_form(cfg.channel, p, rho0)
        yield [
            float(t), p.gamma_A, p.gamma_B, p.gamma,
            concurrence(rho).C,
            fidelity_pure(psi, rho),
            abs(partial_trace(rho, "A")[0, 1]),
            abs(partial_trace(rho, "B")[0, 1]),
            rho[0, 3].real, rho[0, 3].imag, rho[1, 2].real, rho[1, 2].imag,
        ]


def _amplitudes_json(psi) -> list[list[float]]:
    return [[float(a.real), float(a.imag)] for a in psi]


def cmd_evolve(cfg: ExperimentConfig, out: Path | None = None, summary: Path | None = None) -> int:
    with _open_out(out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for row in sweep_rows(cfg):
            writer.writerow([fmt(x) for x in row])

    rates = rates_for_channel(cfg.channel, cfg.rates)
    psi = cfg.state
    ts = timescales(rates, support_of(pure_density(psi)))
    try:
        dt = disentanglement_time(cfg.channel, rates, psi, cfg.epsilon)
        crossing = dt.time if dt.crossed else "no crossing"
    except ValueError:
        crossing = "initially below epsilon"
    _emit_summary(
        {
            "command": "evolve",
            "channel": cfg.channel.value,
            "Gamma": rates.Gamma,
            "Gamma_A": rates.Gamma_A,
            "Gamma_B": rates.Gamma_B,
            "state": _amplitudes_json(psi),
            "tau_A": ts.tau_A,
            "tau_B": ts.tau_B,
            "tau_e": ts.tau_e,
            "tau": ts.tau,
            "support": sorted(f"{i}{j}" for i, j in ts.support),
            "epsilon": cfg.epsilon,
            "disentanglement_time": crossing,
        },
        summary,
    )
    return EXIT_OK


def cmd_validate(cfg: ExperimentConfig, out: Path | None = None, summary: Path | None = None, workers: int = 1) -> int:
    n = cfg.oracle.n
    if not cfg.oracle.enabled:
        raise ConfigError("oracle is disabled in the config")
    if n < MIN_VALIDATE_N:
        raise ConfigError(f"validate needs n >= {MIN_VALIDATE_N}, got {n}")
    if n < FLAKY_BELOW_N:
        print(
            f"warning: n={n} is small; with many element comparisons a {Z_THRESHOLD:g}-sigma "
            "verdict may flake, use n >= 10000",
            file=sys.stderr,
        )
    rates = rates_for_channel(cfg.channel, cfg.rates)
    report = oracle_report(cfg.state, rates, cfg.grid.times(), n, cfg.oracle.seed, workers=workers)
    with _open_out(out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(VALIDATE_HEADER)
        for row in report.rows:
            i, j, part = row.worst_element
            writer.writerow([
                fmt(row.t), fmt(row.max_z), f"rho{i}{j}_{part}",
                fmt(row.C_mc), fmt(row.C_closed), fmt(row.C_stderr), int(row.passed),
            ])
    worst = report.worst()
    i, j, part = worst.worst_element
    _emit_summary(
        {
            "command": "validate",
            "channel": cfg.channel.value,
            "Gamma": rates.Gamma,
            "Gamma_A": rates.Gamma_A,
            "Gamma_B": rates.Gamma_B,
            "state": _amplitudes_json(cfg.state),
            "n": n,
            "seed": cfg.oracle.seed,
            "z_threshold": Z_THRESHOLD,
            "max_z": worst.max_z,
            "worst": f"rho{i}{j}_{part} at t={fmt(worst.t)}",
            "passed": report.passed,
        },
        summary,
    )
    if not report.passed:
        print(
            f"validation failed: rho{i}{j}_{part} at t={fmt(worst.t)} deviates by z={worst.max_z:.3g}",
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    return EXIT_OK


def parse_support(text: str | None, psi=None):
    if text is None or text.strip().lower() == "all":
        return None
    if text.strip().lower() == "state":
        return support_of(pure_density(psi))
    pairs = set()
    for item in text.split(","):
        item = item.strip()
        if len(item) != 2 or not item.isdigit():
            raise ConfigError(f"support pairs look like 12 or 34, got {item!r}")
        pair = tuple(sorted((int(item[0]), int(item[1]))))
        if pair not in ALL_PAIRS:
            raise ConfigError(f"invalid support pair {item!r}")
        pairs.add(pair)
    return pairs


def cmd_timescales(rates: NoiseRates, support=None, out: Path | None = None) -> int:
    ts = timescales(rates, support)
    with _open_out(out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["quantity", "value"])
        writer.writerow(["tau_A", fmt(ts.tau_A)])
        writer.writerow(["tau_B", fmt(ts.tau_B)])
        writer.writerow(["tau_e", fmt(ts.tau_e)])
        writer.writerow(["tau", fmt(ts.tau)])
        for (i, j), g in sorted(ts.Gamma_ij.items()):
            writer.writerow([f"Gamma_{i}{j}", fmt(g)])
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "evolve":
            return cmd_evolve(cfg, args.out, args.summary)
        if args.command == "validate":
            return cmd_validate(cfg, args.out, args.summary, workers=args.workers)
        support = parse_support(args.support, cfg.state)
        return cmd_timescales(cfg.rates, support, args.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
