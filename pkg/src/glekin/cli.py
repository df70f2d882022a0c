"""Command-line interface.

Every command writes CSV preceded by ``#`` metadata lines (package version,
command, resolved configuration, conventions, seed). Output goes to
``--output``, else to ``$GLEKIN_OUTPUT_DIR/<command>.csv`` when that variable
is set, else to stdout.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 oracle disagreement in ``simulate --self-check``.
"""

import argparse
import datetime
import io
import itertools
import os
import sys

import numpy as np

from . import __version__
from .config import load_config
from .errors import GLEKinError, NumericalError, ValidationError
from .kinetics import (
    kinetics_curves,
    late_window_mean,
    passing_probability,
    sign_change_rate,
    sign_changes,
)
from .model import correlation_form
from .moments import mean_position, variance_closed
from .resolvent import decompose
from .sim import empirical_kappa, simulate_ensemble

OUTPUT_ENV = "GLEKIN_OUTPUT_DIR"
FIG_KINDS = ("HN", "HVN", "HAN")
CHECK_TIMES = (1.0, 2.0, 4.0)

COLUMNS = {
    "response": "t,H,H_integral",
    "moments": "t,mean,var",
    "chi": "t,mean,var,chi",
    "kappa": "t,H,var,kappa,h_zero",
    "rate": "t,kappa,rate_ratio[,rate_abs]",
    "simulate": "t,mean,mean_hat,se_mean,var,var_hat,se_var,chi,chi_hat,se_chi,kappa,kappa_hat,"
                "se_kappa  (with --flux: t,kappa,kappa_hat,se_kappa)",
    "sweep": "<varied keys>,dominant_pole,kappa_late_mean,chi_late_mean,chi_sign_change_rate,"
             "chi_frequency,status",
    "reproduce-fig1": "t,chi_HN,chi_HVN,chi_HAN",
    "reproduce-fig2": "t,kappa_HN,kappa_HVN,kappa_HAN",
}

# option name -> config key
OPTIONS = [
    ("--kind", "kind"), ("--gamma-big", "gamma_big"), ("--omega2", "omega2"),
    ("--eta", "eta"), ("--mass", "mass"), ("--kT", "kT"),
    ("--gamma-ohmic", "gamma_ohmic"), ("--omega-b", "omega_b"),
    ("--x0", "x0"), ("--v0", "v0"), ("--t-max", "t_max"),
    ("--dt", "dt"), ("--kernel-convention", "kernel_convention"),
    ("--region-convention", "region_convention"), ("--n-traj", "n_traj"),
    ("--seed", "seed"), ("--workers", "workers"),
    ("--partition-Q", "partition_Q"), ("--planck-h", "planck_h"),
    ("--barrier-height", "barrier_height_VB"), ("-o", "output"),
]


class OracleDisagreement(GLEKinError):
    pass


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(x)
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


class Table:
    def __init__(self, command, config, timestamp=True):
        self.meta = [f"glekin {__version__}", f"command: {command}"]
        if timestamp:
            self.meta.append(f"generated: {datetime.datetime.now().isoformat(timespec='seconds')}")
        self.meta.append(
            f"convention: kernel={config.kernel_convention} region={config.region_convention}"
        )
        self.meta.append(f"seed: {config.seed}")
        # worker count does not affect results, so it stays out of the header
        self.meta.extend(f"config: {k} = {v}" for k, v in config.items() if k != "workers")
        self.header = None
        self.rows = []

    def note(self, line):
        self.meta.append(line)

    def render(self):
        out = io.StringIO()
        for line in self.meta:
            out.write(f"# {line}\n")
        out.write(",".join(self.header) + "\n")
        for row in self.rows:
            out.write(",".join(_fmt(v) for v in row) + "\n")
        return out.getvalue()


def _columns(table, header, *cols):
    table.header = header
    table.rows = list(zip(*cols))


def cmd_response(cfg, table):
    c = kinetics_curves(cfg.model, cfg.barrier, cfg.state, cfg.grid.times, cfg.convention)
    _columns(table, ["t", "H", "H_integral"], c.grid, c.H, c.H_integral)


def cmd_moments(cfg, table):
    c = kinetics_curves(cfg.model, cfg.barrier, cfg.state, cfg.grid.times, cfg.convention)
    _columns(table, ["t", "mean", "var"], c.grid, c.mean, c.var)


def cmd_chi(cfg, table):
    c = kinetics_curves(cfg.model, cfg.barrier, cfg.state, cfg.grid.times, cfg.convention)
    _columns(table, ["t", "mean", "var", "chi"], c.grid, c.mean, c.var, c.chi)


def cmd_kappa(cfg, table):
    c = kinetics_curves(cfg.model, cfg.barrier, cfg.state, cfg.grid.times, cfg.convention)
    table.note(f"flagged H(t)=0 samples: {int(np.sum(c.h_zero))}")
    _columns(table, ["t", "H", "var", "kappa", "h_zero"], c.grid, c.H, c.var, c.kappa, c.h_zero)


def cmd_rate(cfg, table):
    c = kinetics_curves(cfg.model, cfg.barrier, cfg.state, cfg.grid.times, cfg.convention,
                        with_flux=True, tst=cfg.tst)
    cols = [c.grid, c.kappa, c.rate_ratio]
    header = ["t", "kappa", "rate_ratio"]
    if c.absolute_rate is not None:
        cols.append(c.absolute_rate)
        header.append("rate_abs")
    _columns(table, header, *cols)


def cmd_simulate(cfg, table, self_check=False, flux=False):
    model, barrier, grid = cfg.model, cfg.barrier, cfg.grid
    decomp = decompose(model, barrier)
    corr = correlation_form(model, cfg.convention)
    t = grid.times
    table.note(f"n_traj: {cfg.n_traj}")
    if flux:
        est = empirical_kappa(model, barrier, grid, cfg.n_traj, cfg.seed, cfg.convention,
                              cfg.workers)
        c = kinetics_curves(model, barrier, cfg.state, t, cfg.convention)
        _columns(table, ["t", "kappa", "kappa_hat", "se_kappa"], t, c.kappa, est.kappa, est.se)
        return 0
    res = simulate_ensemble(model, barrier, cfg.state, grid, cfg.n_traj, cfg.seed,
                            cfg.convention, cfg.workers)
    c = kinetics_curves(model, barrier, cfg.state, t, cfg.convention)
    _columns(
        table,
        ["t", "mean", "mean_hat", "se_mean", "var", "var_hat", "se_var", "chi", "chi_hat",
         "se_chi", "kappa", "kappa_hat", "se_kappa"],
        t, c.mean, res.mean_hat, res.se_mean, c.var, res.var_hat, res.se_var, c.chi, res.chi_hat,
        res.se_chi, c.kappa, res.kappa_hat, res.se_kappa,
    )
    if not self_check:
        return 0
    failures = []
    if cfg.region_convention != "symmetric":
        # sample paths always realise the full double integral
        table.note("self-check uses region=symmetric (half-region has no trajectory counterpart)")
    for tc in CHECK_TIMES:
        if tc > grid.t_max:
            continue
        i = grid.index(tc)
        var = variance_closed(decomp, corr, tc, "symmetric")
        mean = mean_position(decomp, cfg.state, barrier, tc)
        chi = float(passing_probability(mean, np.sqrt(var)))
        se_chi = max(np.sqrt(chi * (1 - chi) / cfg.n_traj), 1e-300)
        checks = {
            "mean": (res.mean_hat[i], mean, res.se_mean[i]),
            "var": (res.var_hat[i], var, res.se_var[i]),
            "chi": (res.chi_hat[i], chi, se_chi),
        }
        for name, (hat, exact, se) in checks.items():
            z = abs(hat - exact) / se if se > 0 else (0.0 if hat == exact else np.inf)
            table.note(f"self-check t={tc:g} {name}: z={z:.3f}")
            if z > 3.0:
                failures.append(f"{name} at t={tc:g} (z={z:.2f})")
    if failures:
        raise OracleDisagreement("oracle disagreement: " + "; ".join(failures))
    return 0


def _parse_vary(items):
    axes = []
    for item in items or []:
        if "=" not in item:
            raise ValidationError("--vary", f"expects KEY=V1,V2,... (got {item!r})")
        key, values = item.split("=", 1)
        axes.append((key.strip(), [v.strip() for v in values.split(",") if v.strip()]))
    if not axes:
        raise ValidationError("--vary", "at least one axis is required")
    return axes


def cmd_sweep(cfg, table, vary=None):
    axes = _parse_vary(vary)
    keys = [k for k, _ in axes]
    table.header = keys + ["dominant_pole", "kappa_late_mean", "chi_late_mean",
                           "chi_sign_change_rate", "chi_frequency", "status"]
    t = cfg.grid.times
    for combo in itertools.product(*(v for _, v in axes)):
        point = cfg.update(**dict(zip(keys, combo)))
        try:
            c = kinetics_curves(point.model, point.barrier, point.state, t, point.convention)
            lam = decompose(point.model, point.barrier).dominant_pole
            rate = sign_change_rate(t, c.chi, 0.5, t_start=t[-1] / 2)
            table.rows.append(list(combo) + [
                lam.real, late_window_mean(t, c.kappa), late_window_mean(t, c.chi), rate, rate / 2,
                "ok"])
        except NumericalError as exc:
            nan = float("nan")
            table.rows.append(list(combo) + [nan] * 5 + [type(exc).__name__])


def _figure(cfg, table, quantity):
    t = cfg.grid.times
    cols = [t]
    for kind in FIG_KINDS:
        point = cfg.update(kind=kind)
        c = kinetics_curves(point.model, point.barrier, point.state, t, point.convention)
        y = getattr(c, quantity)
        cols.append(y)
        window = t >= 5.0
        table.note(
            f"summary {kind}: late_mean_{quantity}={late_window_mean(t, y)!r} "
            f"chi_sign_changes_t5_end={sign_changes(c.chi[window], 0.5)} "
            f"final_{quantity}={y[-1]!r}"
        )
    _columns(table, ["t"] + [f"{quantity}_{k}" for k in FIG_KINDS], *cols)


def cmd_fig1(cfg, table):
    _figure(cfg, table, "chi")


def cmd_fig2(cfg, table):
    _figure(cfg, table, "kappa")


COMMANDS = {
    "response": (cmd_response, "response function H(t) and its integral"),
    "moments": (cmd_moments, "mean position and position variance"),
    "chi": (cmd_chi, "barrier-passing probability"),
    "kappa": (cmd_kappa, "transmission coefficient"),
    "rate": (cmd_rate, "rate ratio k/k_TST by flux quadrature"),
    "simulate": (cmd_simulate, "stochastic trajectory ensemble"),
    "sweep": (cmd_sweep, "Cartesian parameter sweep, one summary row per point"),
    "reproduce-fig1": (cmd_fig1, "passing probability for HN, HVN and HAN"),
    "reproduce-fig2": (cmd_fig2, "transmission coefficient for HN, HVN and HAN"),
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="glekin",
        description="Barrier-crossing kinetics in structured-noise environments.",
    )
    parser.add_argument("--version", action="version", version=f"glekin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text,
                           epilog=f"CSV columns: {COLUMNS[name]}")
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--no-timestamp", action="store_true",
                       help="omit the generation time from the metadata header")
        for flag, key in OPTIONS:
            names = [flag, "--output"] if key == "output" else [flag]
            p.add_argument(*names, dest=key, default=argparse.SUPPRESS, metavar=key.upper())
        if name == "simulate":
            p.add_argument("--self-check", action="store_true",
                           help="exit 4 if the ensemble disagrees with the analytic curves "
                                "beyond 3 standard errors at t = 1, 2, 4")
            p.add_argument("--flux", action="store_true",
                           help="estimate kappa from a flux-weighted ensemble instead")
        if name == "sweep":
            p.add_argument("--vary", action="append", metavar="KEY=V1,V2,...",
                           help="sweep axis; repeat for a Cartesian product")
    return parser


def _destination(cfg, command):
    if cfg.output:
        return cfg.output
    directory = os.environ.get(OUTPUT_ENV)
    if directory:
        return os.path.join(directory, f"{command}.csv")
    return None


def run(argv=None):
    """Parse ``argv``, execute the command, return the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    keys = {key for _, key in OPTIONS}
    overrides = {k: v for k, v in vars(args).items() if k in keys}
    try:
        cfg = load_config(args.config, overrides)
    except (ValidationError, OSError) as exc:
        print(f"glekin: configuration error: {exc}", file=sys.stderr)
        return 2

    table = Table(args.command, cfg, timestamp=not args.no_timestamp)
    fn = COMMANDS[args.command][0]
    extra = {}
    if args.command == "simulate":
        extra = {"self_check": args.self_check, "flux": args.flux}
    elif args.command == "sweep":
        extra = {"vary": args.vary}
    status = 0
    try:
        fn(cfg, table, **extra)
    except OracleDisagreement as exc:
        print(f"glekin: {exc}", file=sys.stderr)
        status = 4
    except ValidationError as exc:
        print(f"glekin: configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"glekin: numerical failure: {exc}", file=sys.stderr)
        return 3

    text = table.render()
    dest = _destination(cfg, args.command)
    if dest is None:
        sys.stdout.write(text)
    else:
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
