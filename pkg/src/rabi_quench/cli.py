"""Experiment runner.

Subcommands:

* simulate: one quench, print the final Bogoliubov pair and residual energy
* ensemble: disorder-averaged residual energy over an omega_tau grid -> CSV
* fit:      power-law exponent from an ensemble CSV
* table:    reproduce one of the survey tables (--id 1|2|3) -> CSV + text
* predict:  closed-form values (APT / freeze-out / critical scaling) on a grid
* verify:   fast invariant suite, nonzero exit on any failure

All output is deterministic: identical config and seed give byte-identical
artifacts.  Expensive results are cached under <output_dir>/.cache (override
with the RABI_QUENCH_CACHE environment variable, disable with --no-cache).

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
from scipy.integrate import quad

from . import analytics, disorder, dynamics, scaling
from .config import ExperimentConfig, cache_key, load_config
from .errors import ConfigError, RabiQuenchError

CACHE_ENV_VAR = "RABI_QUENCH_CACHE"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}j"


# ---------------------------------------------------------------------------
# caching
# ---------------------------------------------------------------------------

def _cache_dir(config: ExperimentConfig) -> Path:
    env = os.environ.get(CACHE_ENV_VAR)
    if env:
        return Path(env)
    return Path(config.output_dir) / ".cache"


def _cached_payload(command: str, config: ExperimentConfig, use_cache, compute):
    """Return the artifact payload, from cache when possible."""
    if not use_cache:
        return compute()
    path = _cache_dir(config) / f"{command}-{cache_key(config)}.csv"
    if path.exists():
        return path.read_text(encoding="utf-8")
    payload = compute()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(payload, encoding="utf-8")
    return payload


def _write_artifact(config: ExperimentConfig, name: str, payload: str) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    target = out / name
    target.write_text(payload, encoding="utf-8")
    return target


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_simulate(config: ExperimentConfig, args) -> int:
    spec = config.quench_spec()
    state = dynamics.integrate_quench(spec, config.integrator())
    e_r = dynamics.residual_energy(state, spec.g_final)
    print(f"g_final = {_fmt(spec.g_final)}")
    print(f"omega_tau = {_fmt(spec.omega_tau)}")
    print(f"u = {_fmt_complex(state.u)}")
    print(f"v = {_fmt_complex(state.v)}")
    print(f"normalization_defect = {_fmt(state.constraint_defect())}")
    print(f"E_r = {_fmt(e_r)}")
    return EXIT_OK


def _ensemble_csv(config: ExperimentConfig, jobs: int) -> str:
    grid = scaling.log_grid(*config.grid_bounds(), config.points_per_decade)
    result = disorder.ensemble_curve(
        config.g_final,
        grid,
        config.disorder_model(),
        config.averaging_scheme(),
        config.integrator(),
        jobs=jobs,
    )
    lines = ["omega_tau,mean_Er,stderr_Er,n_realizations"]
    for x, m, s in zip(result.omega_tau_grid, result.mean_Er, result.stderr_Er):
        lines.append(f"{_fmt(x)},{_fmt(m)},{_fmt(s)},{result.n_realizations}")
    return "\n".join(lines) + "\n"


def _cmd_ensemble(config: ExperimentConfig, args) -> int:
    payload = _cached_payload(
        "ensemble", config, args.use_cache, lambda: _ensemble_csv(config, args.jobs)
    )
    target = _write_artifact(config, "ensemble.csv", payload)
    print(f"wrote {target}")
    return EXIT_OK


def _cmd_fit(config: ExperimentConfig, args) -> int:
    if not config.input_csv:
        raise ConfigError("fit needs input_csv in the config")
    try:
        data = np.genfromtxt(config.input_csv, delimiter=",", names=True)
    except OSError as exc:
        raise ConfigError(f"cannot read {config.input_csv}: {exc}") from exc
    if data.dtype.names is None or "omega_tau" not in data.dtype.names:
        raise ConfigError(f"{config.input_csv}: expected an omega_tau CSV header")
    ycol = "mean_Er" if "mean_Er" in data.dtype.names else data.dtype.names[1]
    points = list(zip(np.atleast_1d(data["omega_tau"]),
                      np.atleast_1d(data[ycol])))
    fit = scaling.fit_power_law(points, config.fit_window())
    print(f"window = [{_fmt(fit.window[0])}, {_fmt(fit.window[1])}]")
    print(f"n_points = {fit.n_points}")
    print(f"nu = {_fmt(fit.nu)}")
    print(f"stderr_nu = {_fmt(fit.stderr_nu)}")
    print(f"log_intercept = {_fmt(fit.log_intercept)}")
    print(f"r_squared = {_fmt(fit.r_squared)}")
    return EXIT_OK


def _table_csv(config: ExperimentConfig, jobs: int) -> str:
    spec = config.table_spec()
    rows = scaling.reproduce_table(spec, jobs=jobs)
    with_prime = spec.table_id == 3
    header = "sigma,window_min,window_max,nu"
    if with_prime:
        header += ",nu_prime"
    lines = [header]
    for row in rows:
        line = (f"{_fmt(row.sigma)},{_fmt(row.window[0])},"
                f"{_fmt(row.window[1])},{_fmt(row.nu)}")
        if with_prime:
            line += f",{_fmt(row.nu_prime)}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def _cmd_table(config: ExperimentConfig, args) -> int:
    if args.id is not None:
        config = replace(config, table_id=args.id)
    payload = _cached_payload(
        "table", config, args.use_cache, lambda: _table_csv(config, args.jobs)
    )
    target = _write_artifact(config, f"table{config.table_id}.csv", payload)
    rows = payload.strip().split("\n")
    names = rows[0].split(",")
    print(f"table {config.table_id}")
    widths = [12] * len(names)
    print("  ".join(n.rjust(w) for n, w in zip(names, widths)))
    for row in rows[1:]:
        cells = row.split(",")
        cells = [c if i < 3 else f"{float(c):.3f}" for i, c in enumerate(cells)]
        print("  ".join(c.rjust(w) for c, w in zip(cells, widths)))
    print(f"wrote {target}")
    return EXIT_OK


def _cmd_predict(config: ExperimentConfig, args) -> int:
    grid = scaling.log_grid(*config.grid_bounds(), config.points_per_decade)
    kind = config.predict_kind
    if kind == "apt":
        value = lambda x: analytics.apt_residual_energy(config.g_final, x)
    elif kind == "kzm":
        value = lambda x: analytics.kzm_residual_energy(x, config.delta)
    elif kind == "kzm_average":
        value = lambda x: analytics.kzm_averaged_prediction(x, config.sigma)
    else:
        value = lambda x: analytics.freezeout_g(x).g_hat
    lines = ["omega_tau,value"]
    for x in grid:
        v = value(float(x))
        print(f"{_fmt(x)} {_fmt(v)}")
        lines.append(f"{_fmt(x)},{_fmt(v)}")
    target = _write_artifact(config, "predict.csv", "\n".join(lines) + "\n")
    print(f"wrote {target}")
    return EXIT_OK


def _verify_checks(config: ExperimentConfig):
    """Yield (name, passed, detail) tuples for the fast invariant suite."""
    cfg = config.integrator()

    drift = 0.0
    for g in (0.0, 0.5, 1.0):
        for s in (10.0, 10.0 ** 2.5, 1e3):
            spec = dynamics.QuenchSpec(g_final=g, omega_tau=s)
            drift = max(drift, dynamics.max_constraint_drift(spec, cfg))
    yield ("normalization drift <= 1e-8 (9 quenches)", drift <= 1e-8, f"{drift:.3e}")

    spec = dynamics.QuenchSpec(g_final=0.0, omega_tau=10.0)
    st = dynamics.integrate_quench(spec, cfg)
    e0 = dynamics.residual_energy(st, 0.0)
    ok = abs(st.v) <= 1e-10 and abs(e0) <= 1e-10
    yield ("decoupled limit g_final=0: |v|, E_r <= 1e-10", ok,
           f"|v|={abs(st.v):.2e} E_r={e0:.2e}")

    worst = 0.0
    for sg in (0.01, 0.1, 0.33):
        val, _ = quad(disorder.truncated_gaussian_pdf, -3 * sg, 3 * sg, args=(sg,))
        worst = max(worst, abs(val - 1.0))
    yield ("truncated density normalizes to 1 +- 1e-10", worst <= 1e-10, f"{worst:.2e}")

    worst = 0.0
    for ch in (disorder.DisorderChannel.TIME, disorder.DisorderChannel.PARAM):
        model = disorder.DisorderModel(channel=ch, sigma=0.1)
        _, w = disorder.realizations(model, disorder.Quadrature(33))
        worst = max(worst, abs(w.sum() - 1.0))
    yield ("quadrature weights sum to 1 +- 1e-12", worst <= 1e-12, f"{worst:.2e}")

    worst = 0.0
    for s in (1e2, 1e3, 1e6):
        worst = max(worst, analytics.freezeout_g(s).residual())
    series_gap = abs(analytics.freezeout_g(1e3).g_hat - analytics.freezeout_g_series(1e3))
    ok = worst <= 1e-10 and series_gap <= 1e-4
    yield ("freeze-out root residual <= 1e-10, series within 1e-4", ok,
           f"residual={worst:.2e} series_gap={series_gap:.2e}")

    xs = np.logspace(3, 4, 8)
    fit = scaling.fit_power_law([(x, 2.0 * x ** (-1.0 / 3.0)) for x in xs], (1e3, 1e4))
    ok = abs(fit.nu + 1.0 / 3.0) <= 1e-12 and fit.r_squared >= 1.0 - 1e-12
    yield ("exact power law recovered to 1e-12", ok, f"nu={fit.nu:.15f}")

    model = disorder.DisorderModel(channel=disorder.DisorderChannel.TIME, sigma=0.1)
    spec = dynamics.QuenchSpec(g_final=1.0, omega_tau=100.0)
    mc = disorder.MonteCarlo(n_samples=64, seed=config.seed)
    a = disorder.ensemble_residual_energy(spec, model, mc, cfg)
    b = disorder.ensemble_residual_energy(spec, model, mc, cfg)
    yield ("seeded ensemble average is bit-reproducible", a == b,
           f"mean={a[0]:.9e}")


def _cmd_verify(config: ExperimentConfig, args) -> int:
    failures = 0
    for name, passed, detail in _verify_checks(config):
        tag = "ok  " if passed else "FAIL"
        print(f"{tag}  {name}  [{detail}]")
        if not passed:
            failures += 1
    if failures:
        print(f"{failures} check(s) failed")
        return EXIT_NUMERICAL
    print("all checks passed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "simulate": _cmd_simulate,
    "ensemble": _cmd_ensemble,
    "fit": _cmd_fit,
    "table": _cmd_table,
    "predict": _cmd_predict,
    "verify": _cmd_verify,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rabi-quench",
        description="Quench dynamics of the Rabi normal phase under disorder.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None,
                       help="flat key = value config file")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel grid evaluations")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--no-cache", dest="use_cache", action="store_false",
                       help="always recompute, ignore cached results")
        if name == "table":
            p.add_argument("--id", type=int, choices=(1, 2, 3), default=None)
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        config = load_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            config = replace(config, seed=args.seed)
        if config.cache == "off":
            args.use_cache = False
        if args.jobs < 1:
            raise ConfigError(f"--jobs must be >= 1, got {args.jobs}")
        return _COMMANDS[args.command](config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RabiQuenchError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
