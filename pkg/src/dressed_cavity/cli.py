"""Command-line interface.

Subcommands ``validate``, ``spectrum``, ``evolve``, ``bound`` and ``sweep``
write CSV with one ``#`` provenance line recording the resolved
configuration.  Exit codes: 0 success, 1 configuration error,
2 numerical/solver error, 3 regime violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .config import PRESETS, RunConfig, resolve_config
from .coupling import approx_elements, exact_elements
from .dynamics import (
    default_time_grid,
    free_space_asymptote,
    occupation_evolution,
    occupation_lower_bound,
    stability_bound,
)
from .errors import CavityError, ConfigError, RegimeViolationError
from .spectrum import solve_spectrum, spectrum_residuals, validate_regime

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_REGIME = 0, 1, 2, 3


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return ""
    return f"{value:.16e}"


def _write_csv(out, command: str, cfg: RunConfig, header: list[str], rows) -> None:
    buf = io.StringIO()
    buf.write(f"# dressed_cavity {__version__} {command} {cfg.provenance()}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    out.write(buf.getvalue())


def _matrix(cfg: RunConfig, scenario, spectrum):
    L = min(cfg.L, spectrum.K)
    if cfg.elements == "exact":
        return exact_elements(scenario, spectrum, L=L)
    return approx_elements(scenario, spectrum, L=L)


# -- subcommands -------------------------------------------------------------

def cmd_validate(cfg: RunConfig, out, workers: int = 1) -> int:
    report = validate_regime(cfg.scenario(), margin=cfg.regime_margin)
    out.write(f"# dressed_cavity {__version__} validate {cfg.provenance()}\n")
    for line in report.lines():
        out.write(line + "\n")
    return EXIT_OK if report.small_cavity_ok else EXIT_REGIME


def cmd_spectrum(cfg: RunConfig, out, workers: int = 1, with_couplings: bool = False) -> int:
    scenario = cfg.scenario()
    spectrum = solve_spectrum(scenario, cfg.K, method=cfg.method)
    residual = spectrum_residuals(scenario, spectrum)
    header = ["k", "omega_k", "Omega_k", "epsilon_k", "residual"]
    rows = [[0, None, spectrum.omega0_mode, None, residual[0]]]
    for i in range(spectrum.K):
        rows.append([
            int(spectrum.k[i]),
            spectrum.omega_k[i],
            spectrum.Omega_k[i],
            spectrum.epsilon_k[i],
            residual[i + 1],
        ])
    if with_couplings:
        matrix = _matrix(cfg, scenario, spectrum)
        header += ["t0r", "tk0"]
        rows[0] += [matrix.t00, None]
        for i in range(spectrum.K):
            rows[i + 1] += [matrix.t0k[i], matrix.tk0[i]]
    _write_csv(out, "spectrum", cfg, header, rows)
    return EXIT_OK


def cmd_evolve(cfg: RunConfig, out, workers: int = 1) -> int:
    scenario = cfg.scenario()
    spectrum = solve_spectrum(scenario, cfg.K, method=cfg.method)
    matrix = _matrix(cfg, scenario, spectrum)
    grid = default_time_grid(scenario, cfg.n_points, cfg.t_max_factor)
    series = occupation_evolution(
        scenario, spectrum, matrix, grid, K=cfg.K, L=matrix.L, workers=workers
    )
    rows = zip(series.times, series.n0_values, series.f00_sq, series.thermal_part)
    _write_csv(out, "evolve", cfg, ["tau_s", "n0", "f00_sq", "thermal_part"], rows)
    return EXIT_OK


def cmd_bound(cfg: RunConfig, out, workers: int = 1) -> int:
    base = cfg.scenario()
    spectrum = solve_spectrum(base, cfg.K, method=cfg.method)
    matrix = _matrix(cfg, base, spectrum)

    def row(T):
        s = base.with_changes(T=T)
        return [
            T,
            stability_bound(s),
            occupation_lower_bound(s, spectrum, matrix, K=cfg.K, L=matrix.L),
            free_space_asymptote(s),
        ]

    rows = _ordered_map(row, cfg.temperature_list, workers)
    _write_csv(out, "bound", cfg, ["T_K", "F_delta", "n0_bound", "free_space_asymptote"], rows)
    return EXIT_OK


def _sweep_radius(cfg: RunConfig, R: float) -> list[list]:
    base = cfg.scenario(radius_m=R)
    report = validate_regime(base, margin=cfg.regime_margin)
    rows = []
    if report.small_cavity_ok:
        spectrum = solve_spectrum(base, cfg.K, method=cfg.method)
        matrix = _matrix(cfg, base, spectrum)
    for T in cfg.temperature_list:
        s = base.with_changes(T=T)
        try:
            F = stability_bound(s)
        except RegimeViolationError:
            F = None
        bound = (
            occupation_lower_bound(s, spectrum, matrix, K=cfg.K, L=matrix.L)
            if report.small_cavity_ok
            else None
        )
        rows.append([R, T, s.delta, report.small_cavity_ok, F, bound, free_space_asymptote(s)])
    return rows


def cmd_sweep(cfg: RunConfig, out, workers: int = 1) -> int:
    per_radius = _ordered_map(lambda R: _sweep_radius(cfg, R), cfg.radius_list, workers)
    rows = [row for block in per_radius for row in block]
    header = ["R_m", "T_K", "delta", "small_cavity_ok", "F_delta", "n0_bound", "free_space_asymptote"]
    _write_csv(out, "sweep", cfg, header, rows)
    return EXIT_OK


def _ordered_map(func, items, workers: int):
    items = list(items)
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, items))
    return [func(x) for x in items]


COMMANDS = {
    "validate": cmd_validate,
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "bound": cmd_bound,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--preset", choices=sorted(PRESETS), help="named preset (fig2, fig3, fig4)")
    common.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override one configuration key (repeatable)",
    )
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument(
        "--workers", type=int, default=1,
        help="worker threads; changes run time only, never the output",
    )

    parser = argparse.ArgumentParser(
        prog="dressed-cavity",
        description="Dressed atom in a spherical cavity: spectrum, occupation dynamics, stability bounds.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check the small-cavity regime conditions")
    sp = sub.add_parser("spectrum", parents=[common], help="normal-mode frequencies as CSV")
    sp.add_argument("--with-couplings", action="store_true", help="append t_0^r and t_k^0 columns")
    sub.add_parser("evolve", parents=[common], help="occupation number n0(tau) as CSV")
    sub.add_parser("bound", parents=[common], help="lower bound n0(beta) over a temperature list")
    sub.add_parser("sweep", parents=[common], help="bound over a radius x temperature grid")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args.preset, args.config, args.overrides)
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        extra = {"with_couplings": args.with_couplings} if args.command == "spectrum" else {}
        if args.out:
            buf = io.StringIO()
            code = COMMANDS[args.command](cfg, buf, workers=args.workers, **extra)
            with open(args.out, "w", newline="") as fh:
                fh.write(buf.getvalue())
        else:
            code = COMMANDS[args.command](cfg, sys.stdout, workers=args.workers, **extra)
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RegimeViolationError as exc:
        print(f"regime violation: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except CavityError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
