"""Command-line front end.

Three subcommands:

* ``tvdlab limiter check <name>|--file F [--alpha A] [--delta D] [--out CSV]``
* ``tvdlab run --problem ... --limiter ... --scheme ... --sigma ... --cells ...
  --tfinal ... [--flux ...] [--cfl warn|strict] [--out CSV] [--snapshots CSV]``
* ``tvdlab convergence --scheme ... --sigma ... --limiters a,b,c
  [--k-min 5 --k-max 9] [--out CSV] [--orders-out CSV]``

Exit codes: 0 success, 1 predicate failure, 2 usage/validation error,
3 CFL refusal under ``--cfl strict``.

Every subcommand accepts ``--config FILE`` with line-oriented ``key=value``
pairs (keys are the long flag names, ``#`` starts a comment); explicit flags
win over config values.  When ``--out`` is omitted the CSV goes to standard
output and the human summary moves to standard error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .experiments import convergence_study, profile_state
from .fluxes import advection_flux, burgers_flux, make_numerical_flux
from .limiters import (
    CATALOG,
    LimiterSpec,
    check_convexity,
    check_monotonicity,
    check_quadratic_exactness,
    check_second_order_extremum,
    check_tvd_region,
    make_catalog_limiter,
    write_report_csv,
)
from .reconstruction import UNO2
from .solver import CflError, SchemeConfig, advance, write_trajectory_csv

_SCHEME_ALIASES = {"five_point": "five_point_advection"}
_RUN_SCHEMES = (
    "euler",
    "heun",
    "predictor_corrector",
    "modified_pc_explicit",
    "five_point",
    "five_point_advection",
)
_CONV_SCHEMES = ("five_point", "five_point_advection", "predictor_corrector", "heun")
_FLUX_KINDS = {
    "upwind": "upwind_advection",
    "godunov": "godunov",
    "engquist_osher": "engquist_osher",
    "lax_wendroff_type": "lax_wendroff_type",
}


class UsageError(Exception):
    """Invalid flags or config values; maps to exit code 2."""


@dataclass
class RunConfig:
    """Validated flag set for one subcommand invocation."""

    command: str
    flags: dict = field(default_factory=dict)
    out: str | None = None


def piecewise_limiter_from_file(path) -> LimiterSpec:
    """Load a piecewise-linear limiter description.

    Each non-comment line reads ``r_break slope intercept``; the segment
    ``slope * r + intercept`` applies from its breakpoint (inclusive) up to
    the next one, the last segment extends to +infinity, and phi(r) = 0 below
    the first breakpoint.  Breakpoints must be strictly increasing.
    """
    rows = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(
                "%s:%d: expected 'r_break slope intercept', got %r" % (path, lineno, raw)
            )
        try:
            rows.append(tuple(float(p) for p in parts))
        except ValueError:
            raise ValueError("%s:%d: non-numeric field in %r" % (path, lineno, raw)) from None
    if not rows:
        raise ValueError("%s: no segments in limiter description" % path)
    breaks = np.array([r[0] for r in rows])
    if np.any(np.diff(breaks) <= 0.0):
        raise ValueError("%s: breakpoints must be strictly increasing" % path)
    slopes = np.array([r[1] for r in rows])
    intercepts = np.array([r[2] for r in rows])

    def phi(r):
        rr = np.asarray(r, dtype=float)
        idx = np.searchsorted(breaks, rr, side="right") - 1
        safe = np.clip(idx, 0, len(rows) - 1)
        vals = np.where(idx < 0, 0.0, slopes[safe] * rr + intercepts[safe])
        if np.ndim(r) == 0:
            return float(vals)
        return vals

    return LimiterSpec(Path(path).stem, phi)


# ----------------------------------------------------------------------------
# config merging
# ----------------------------------------------------------------------------

def _load_config(path) -> dict:
    mapping = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise UsageError("%s:%d: expected key=value, got %r" % (path, lineno, raw))
        mapping[key.strip()] = val.strip()
    return mapping


def _resolver(args, extra_usage=""):
    config = {}
    if getattr(args, "config", None):
        try:
            config = _load_config(args.config)
        except OSError as exc:
            raise UsageError("cannot read config file: %s" % exc) from None

    def resolve(key, cast=str, default=None, required=False):
        cli_val = getattr(args, key.replace("-", "_"), None)
        if cli_val is not None:
            return cli_val
        if key in config:
            try:
                return cast(config[key])
            except ValueError:
                raise UsageError("config value %s=%r is not a valid %s"
                                 % (key, config[key], cast.__name__)) from None
        if required:
            raise UsageError("missing required flag --%s%s" % (key, extra_usage))
        return default

    return resolve


def _resolve_limiter(name, kappa):
    if name == UNO2:
        if kappa is not None:
            raise UsageError("--kappa is not meaningful for uno2")
        return UNO2
    try:
        return make_catalog_limiter(name, kappa=kappa)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ----------------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------------

def cmd_limiter_check(args) -> int:
    resolve = _resolver(args)
    name = args.name
    file_path = resolve("file")
    if (name is None) == (file_path is None):
        raise UsageError("give exactly one of a limiter name or --file")
    alpha = resolve("alpha", float)
    delta = resolve("delta", float)
    kappa = resolve("kappa", float)
    out = resolve("out")
    if name is not None:
        limiter = _resolve_limiter(name, kappa)
        if limiter == UNO2:
            raise UsageError("uno2 has no ratio form; predicates need a phi-limiter")
    else:
        try:
            limiter = piecewise_limiter_from_file(file_path)
        except (OSError, ValueError) as exc:
            raise UsageError(str(exc)) from None

    reports = [
        check_monotonicity(limiter),
        check_convexity(limiter),
        check_second_order_extremum(limiter),
    ]
    if alpha is not None:
        reports.append(check_tvd_region(limiter, alpha))
    if delta is not None:
        reports.append(check_quadratic_exactness(limiter, delta))

    if out is not None:
        write_report_csv(reports, out)
        summary_stream = sys.stdout
    else:
        write_report_csv(reports, sys.stdout)
        summary_stream = sys.stderr
    for rep in reports:
        line = "%s %s: %s" % (rep.limiter, rep.predicate, "pass" if rep.passed else "fail")
        if not rep.passed:
            line += " (witness r=%g: %g vs %g)" % (
                rep.witness.r, rep.witness.lhs, rep.witness.rhs)
        print(line, file=summary_stream)
    return 0 if all(r.passed for r in reports) else 1


def _write_snapshots(dest, snaps) -> None:
    import csv as _csv

    with open(dest, "w", encoding="utf-8", newline="") as fh:
        writer = _csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "x", "u"])
        for t, state in snaps:
            x = np.arange(state.n_cells) * state.h
            for xi, ui in zip(x, state.u):
                writer.writerow(["%.17g" % t, "%.17g" % xi, "%.17g" % ui])


def cmd_run(args) -> int:
    resolve = _resolver(args)
    problem = resolve("problem", required=True)
    if problem not in ("advection", "burgers"):
        raise UsageError("--problem must be advection or burgers")
    a = resolve("a", float, default=1.0)
    flux_kind = resolve("flux", default="upwind" if problem == "advection" else "godunov")
    if flux_kind not in _FLUX_KINDS:
        raise UsageError("--flux must be one of %s" % ", ".join(sorted(_FLUX_KINDS)))
    limiter_name = resolve("limiter", required=True)
    kappa = resolve("kappa", float)
    scheme = resolve("scheme", required=True)
    if scheme not in _RUN_SCHEMES:
        raise UsageError("--scheme must be one of %s" % ", ".join(_RUN_SCHEMES))
    scheme = _SCHEME_ALIASES.get(scheme, scheme)
    sigma = resolve("sigma", float, required=True)
    cells = resolve("cells", int, required=True)
    tfinal = resolve("tfinal", float, required=True)
    cfl = resolve("cfl", default="warn")
    if cfl not in ("warn", "strict"):
        raise UsageError("--cfl must be warn or strict")
    mu = resolve("mu", float)
    out = resolve("out")
    snapshots = resolve("snapshots")
    if cells < 5:
        raise UsageError("--cells must be at least 5")
    if tfinal <= 0.0:
        raise UsageError("--tfinal must be positive")

    limiter = _resolve_limiter(limiter_name, kappa)
    flux = advection_flux(a) if problem == "advection" else burgers_flux()
    try:
        nflux = make_numerical_flux(flux, _FLUX_KINDS[flux_kind], mu=mu)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if scheme == "five_point_advection" and problem != "advection":
        raise UsageError("the five-point scheme is advection-only")
    try:
        config = SchemeConfig(scheme, limiter, nflux=nflux, sigma=sigma, cfl_policy=cfl)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    state0 = profile_state(cells)
    final, reports = advance(state0, config, tfinal, a=a)

    if out is not None:
        write_trajectory_csv(out, reports)
        summary = sys.stdout
    else:
        write_trajectory_csv(sys.stdout, reports)
        summary = sys.stderr
    if snapshots is not None:
        _write_snapshots(snapshots, [(0.0, state0), (final.t, final)])

    tv0 = reports[0].tv_before
    tv_rises = sum(
        1 for r in reports if r.tv_after > r.tv_before + 1e-12 * (1.0 + r.tv_before)
    )
    scale = 1.0 + max(abs(reports[0].min_before), abs(reports[0].max_before))
    maxprin_breaks = sum(
        1
        for r in reports
        if r.min_after < r.min_before - 1e-12 * scale
        or r.max_after > r.max_before + 1e-12 * scale
    )
    mass_drift = reports[-1].mass_after - reports[0].mass_before
    print("steps=%d t_final=%.17g" % (len(reports), final.t), file=summary)
    print("tv_initial=%.17g tv_final=%.17g tv_increases=%d"
          % (tv0, reports[-1].tv_after, tv_rises), file=summary)
    print("max_principle_violations=%d" % maxprin_breaks, file=summary)
    print("mass_drift=%.17g" % mass_drift, file=summary)
    return 0


def cmd_convergence(args) -> int:
    resolve = _resolver(args)
    scheme = resolve("scheme", required=True)
    if scheme not in _CONV_SCHEMES:
        raise UsageError("--scheme must be one of %s" % ", ".join(_CONV_SCHEMES))
    scheme = _SCHEME_ALIASES.get(scheme, scheme)
    sigma = resolve("sigma", float, required=True)
    limiters_raw = resolve("limiters", required=True)
    names = [s.strip() for s in limiters_raw.split(",") if s.strip()]
    if not names:
        raise UsageError("--limiters needs at least one name")
    for name in names:
        if name != UNO2 and name not in CATALOG:
            raise UsageError("unknown limiter %r in --limiters" % name)
        if name == "kappa":
            raise UsageError("the kappa family needs a parameter; not supported here")
    k_min = resolve("k-min", int, default=5)
    k_max = resolve("k-max", int, default=9)
    if not (3 <= k_min < k_max <= 10):
        raise UsageError("need 3 <= k-min < k-max <= 10, got %d..%d" % (k_min, k_max))
    fit_min = resolve("fit-k-min", int)
    fit_max = resolve("fit-k-max", int)
    fit_levels = None
    if (fit_min is None) != (fit_max is None):
        raise UsageError("give both --fit-k-min and --fit-k-max or neither")
    if fit_min is not None:
        if not (k_min <= fit_min < fit_max <= k_max):
            raise UsageError("fit window must lie inside the k range")
        fit_levels = range(fit_min, fit_max + 1)
        if len(fit_levels) < 3:
            raise UsageError("fit window needs at least 3 levels")
    out = resolve("out")
    orders_out = resolve("orders-out")

    cases = [(scheme, name, sigma) for name in names]
    table = convergence_study(cases, range(k_min, k_max + 1), fit_levels=fit_levels)
    if out is not None:
        table.write_csv(out)
        summary = sys.stdout
    else:
        table.write_csv(sys.stdout)
        summary = sys.stderr
    if orders_out is not None:
        table.write_orders_csv(orders_out)
    for key in sorted(table.orders):
        print("order %s %s sigma=%g %s: %.3f"
              % (key[0], key[1], key[2], key[3], table.orders[key]), file=summary)
    return 0


# ----------------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tvdlab",
        description="Flux-limiter admissibility checks and TVD scheme experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_lim = sub.add_parser("limiter", help="limiter algebra commands")
    lim_sub = p_lim.add_subparsers(dest="subcommand", required=True)
    p_check = lim_sub.add_parser("check", help="run admissibility predicates")
    p_check.add_argument("name", nargs="?", help="catalog limiter name")
    p_check.add_argument("--file", help="piecewise-linear limiter description file")
    p_check.add_argument("--alpha", type=float, help="also check the TVD region for this alpha in [1,2]")
    p_check.add_argument("--delta", type=float, help="also check quadratic exactness on [0, delta]")
    p_check.add_argument("--kappa", type=float, help="parameter for the kappa family")
    p_check.add_argument("--out", help="write the report CSV here (default: stdout)")
    p_check.add_argument("--config", help="key=value config file; flags win")

    p_run = sub.add_parser("run", help="advance one problem and dump the trajectory")
    p_run.add_argument("--problem", help="advection or burgers")
    p_run.add_argument("--a", type=float, help="advection speed (default 1.0)")
    p_run.add_argument("--flux", help="upwind, godunov, engquist_osher, or lax_wendroff_type")
    p_run.add_argument("--mu", type=float, help="dissipation weight for lax_wendroff_type")
    p_run.add_argument("--limiter", help="catalog limiter name or uno2")
    p_run.add_argument("--kappa", type=float, help="parameter for the kappa family")
    p_run.add_argument("--scheme", help="euler, heun, predictor_corrector, modified_pc_explicit, or five_point")
    p_run.add_argument("--sigma", type=float, help="Courant number in (0, 1]")
    p_run.add_argument("--cells", type=int, help="number of mesh cells (>= 5)")
    p_run.add_argument("--tfinal", type=float, help="final time (> 0)")
    p_run.add_argument("--cfl", help="warn (default) or strict (refuse, exit 3)")
    p_run.add_argument("--out", help="trajectory CSV path (default: stdout)")
    p_run.add_argument("--snapshots", help="also write initial/final t,x,u rows here")
    p_run.add_argument("--config", help="key=value config file; flags win")

    p_conv = sub.add_parser("convergence", help="grid-refinement error study")
    p_conv.add_argument("--scheme", help="five_point, predictor_corrector, or heun")
    p_conv.add_argument("--sigma", type=float, help="Courant number in (0, 1]")
    p_conv.add_argument("--limiters", help="comma-separated catalog names and/or uno2")
    p_conv.add_argument("--k-min", type=int, dest="k_min", help="coarsest level (default 5)")
    p_conv.add_argument("--k-max", type=int, dest="k_max", help="finest level (default 9)")
    p_conv.add_argument("--fit-k-min", type=int, dest="fit_k_min", help="fit window start")
    p_conv.add_argument("--fit-k-max", type=int, dest="fit_k_max", help="fit window end")
    p_conv.add_argument("--out", help="error table CSV path (default: stdout)")
    p_conv.add_argument("--orders-out", dest="orders_out", help="fitted-orders CSV path")
    p_conv.add_argument("--config", help="key=value config file; flags win")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else int(exc.code)
    try:
        if args.command == "limiter":
            return cmd_limiter_check(args)
        if args.command == "run":
            return cmd_run(args)
        if args.command == "convergence":
            return cmd_convergence(args)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except CflError as exc:
        print("refused: %s" % exc, file=sys.stderr)
        return 3
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    parser.print_usage(sys.stderr)
    return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
