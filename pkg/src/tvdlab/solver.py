"""Conservative TVD solvers for 1D scalar conservation laws.

Semi-discrete form on a periodic mesh:

    du_j/dt = -(F_i - F_{i-1}) / h,     F_i = phi2(minus_i, plus_i)

with limited interface values from :mod:`tvdlab.reconstruction` and a monotone
two-point flux from :mod:`tvdlab.fluxes`.  Five explicit time discretizations
are provided; all of them advance by dt = sigma * h / max |df(u)| unless an
explicit dt is passed.

The incremental (coefficient) form used for stability diagnostics writes one
update as u_j + C_i d_i - D_{i-1} d_{i-1} with per-interface coefficients C, D
obtained from flux differences divided by the interface increment (exact zero
increments give exactly zero coefficients; with the catalog convention
phi(0) = 0 the corresponding numerators vanish identically as well).
"""
from __future__ import annotations

import csv
import math
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .fluxes import NumericalFlux
from .grid import GridState, mass, shift_next, shift_prev, total_variation
from .limiters import LimiterSpec, slope_ratio_bound
from .reconstruction import UNO2, InterfaceValues, interface_values, uno2_interface

HARTEN_TOL = 1e-10
CFL_SLACK = 1e-12

SCHEMES = (
    "euler",
    "heun",
    "predictor_corrector",
    "modified_pc_explicit",
    "five_point_advection",
)

MONITORS = ("tv", "maxprin", "harten")


class CflError(RuntimeError):
    """Raised under the strict CFL policy when a step would exceed the bound."""


@dataclass
class SchemeConfig:
    scheme: str
    limiter: LimiterSpec | str
    nflux: NumericalFlux | None = None
    sigma: float = 0.5
    monitors: tuple = ("tv", "maxprin")
    cfl_policy: str = "warn"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError("unknown scheme %r; known: %s" % (self.scheme, ", ".join(SCHEMES)))
        if isinstance(self.limiter, str):
            if self.limiter != UNO2:
                raise ValueError("string limiter must be %r, got %r" % (UNO2, self.limiter))
        elif not isinstance(self.limiter, LimiterSpec):
            raise ValueError("limiter must be a LimiterSpec or the uno2 sentinel")
        self.sigma = float(self.sigma)
        if not (0.0 < self.sigma <= 1.0):
            raise ValueError("sigma must lie in (0, 1], got %g" % self.sigma)
        if self.cfl_policy not in ("warn", "strict"):
            raise ValueError("cfl_policy must be 'warn' or 'strict'")
        self.monitors = tuple(self.monitors)
        for m in self.monitors:
            if m not in MONITORS:
                raise ValueError("unknown monitor %r; known: %s" % (m, ", ".join(MONITORS)))


@dataclass(frozen=True)
class StepReport:
    dt: float
    tv_before: float
    tv_after: float
    min_before: float
    max_before: float
    min_after: float
    max_after: float
    mass_before: float
    mass_after: float
    harten_ok: bool | None = None


@dataclass(frozen=True)
class HartenReport:
    """Per-interface incremental-coefficient verdict.

    Conditions, each with tolerance 1e-10: C_i >= 0, D_i >= 0, and
    C_i + D_i <= 1 at every interface i.
    """

    passed: bool
    c: np.ndarray
    d: np.ndarray
    n_violations: int


def _interfaces(state: GridState, limiter) -> InterfaceValues:
    if isinstance(limiter, str):
        if limiter == UNO2:
            return uno2_interface(state)
        raise ValueError("unknown limiter sentinel %r" % limiter)
    return interface_values(state, limiter)


def _max_speed(nflux: NumericalFlux, u: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(nflux.flux.df(u), dtype=float))))


def _resolve_dt(state: GridState, config: SchemeConfig, a: float | None = None) -> float:
    if a is not None:
        speed = abs(float(a))
    else:
        if config.nflux is None:
            raise ValueError("scheme %r needs a numerical flux" % config.scheme)
        speed = _max_speed(config.nflux, state.u)
    if speed <= 0.0:
        # nothing moves; any dt works and the update is the identity
        return config.sigma * state.h
    return config.sigma * state.h / speed


def _stability_bound(limiter) -> float:
    """1 / (1 + M/2) with M the positive slope-ratio bound (M = 1 for uno2)."""
    if isinstance(limiter, str) and limiter == UNO2:
        m = 1.0
    else:
        m = slope_ratio_bound(limiter)
    if math.isinf(m):
        return 0.0
    return 1.0 / (1.0 + 0.5 * m)


def max_stable_sigma(limiter) -> float:
    """Largest Courant number the incremental-form stability argument allows."""
    return _stability_bound(limiter)


def _enforce_cfl(state, config, dt, iv):
    """Strict policy: refuse when the sampled coefficient estimate exceeds
    the stability bound."""
    lam = dt / state.h
    p2 = config.nflux.phi2
    e = 1e-6 * max(1.0, float(np.max(np.abs(state.u))))
    du = (p2(iv.minus + e, iv.plus) - p2(iv.minus - e, iv.plus)) / (2.0 * e)
    dv = (p2(iv.minus, iv.plus + e) - p2(iv.minus, iv.plus - e)) / (2.0 * e)
    est = lam * float(np.max(np.abs(du) + np.abs(dv)))
    bound = _stability_bound(config.limiter)
    if est > bound + CFL_SLACK:
        raise CflError(
            "coefficient estimate %.6g exceeds stability bound %.6g "
            "(sigma=%g, limiter=%s)" % (est, bound, config.sigma, _limiter_name(config.limiter))
        )


def _limiter_name(limiter) -> str:
    return limiter if isinstance(limiter, str) else limiter.name


def _report(state_before, u_after, dt, harten_ok=None) -> StepReport:
    u0 = state_before.u
    h = state_before.h
    return StepReport(
        dt=dt,
        tv_before=total_variation(u0),
        tv_after=total_variation(u_after),
        min_before=float(np.min(u0)),
        max_before=float(np.max(u0)),
        min_after=float(np.min(u_after)),
        max_after=float(np.max(u_after)),
        mass_before=h * float(np.sum(u0)),
        mass_after=h * float(np.sum(u_after)),
        harten_ok=harten_ok,
    )


def semi_discrete_rhs(state: GridState, limiter, nflux: NumericalFlux) -> np.ndarray:
    """Conservative right-hand side -(F_i - F_{i-1}) / h."""
    iv = _interfaces(state, limiter)
    F = nflux.phi2(iv.minus, iv.plus)
    return -(F - shift_prev(F)) / state.h


def incremental_coefficients(state: GridState, limiter, nflux: NumericalFlux, lam: float):
    """Per-interface coefficients (C, D) of the incremental update form.

    C_i = -lam * [phi2(m_i, p_i) - phi2(m_i, p_{i-1})] / d_i
    D_i =  lam * [phi2(m_{i+1}, p_i) - phi2(m_i, p_i)] / d_i

    with d_i the increment across interface i.  Where d_i is exactly zero both
    numerators vanish identically (phi(0) = 0 convention) and the coefficients
    are set to zero.
    """
    u = state.u
    iv = _interfaces(state, limiter)
    m, p = iv.minus, iv.plus
    d = shift_next(u) - u
    F = nflux.phi2(m, p)
    F_mixed = nflux.phi2(m, shift_prev(p))
    F_shift = nflux.phi2(shift_next(m), p)
    zeros = np.zeros_like(d)
    C = np.divide(-lam * (F - F_mixed), d, out=zeros.copy(), where=d != 0.0)
    D = np.divide(lam * (F_shift - F), d, out=zeros, where=d != 0.0)
    return C, D


def check_harten_conditions(state: GridState, limiter, nflux: NumericalFlux, sigma: float) -> HartenReport:
    """Evaluate the incremental-form stability conditions at one state.

    The Courant ratio lam = dt/h is derived from sigma the same way the
    steppers derive it (dt = sigma h / max |df|).
    """
    sigma = float(sigma)
    speed = _max_speed(nflux, state.u)
    lam = sigma if speed <= 0.0 else sigma / speed
    C, D = incremental_coefficients(state, limiter, nflux, lam)
    bad = (C < -HARTEN_TOL) | (D < -HARTEN_TOL) | (C + D > 1.0 + HARTEN_TOL)
    return HartenReport(
        passed=not bool(bad.any()), c=C, d=D, n_violations=int(np.count_nonzero(bad))
    )


def _maybe_harten(state, config) -> bool | None:
    if "harten" not in config.monitors:
        return None
    rep = check_harten_conditions(state, config.limiter, config.nflux, config.sigma)
    return rep.passed


# ----------------------------------------------------------------------------
# time steps
# ----------------------------------------------------------------------------

def _rhs_from_iv(state, iv, nflux):
    F = nflux.phi2(iv.minus, iv.plus)
    return -(F - shift_prev(F)) / state.h


def step_euler(state: GridState, config: SchemeConfig, dt: float | None = None):
    """Forward-Euler update of the semi-discrete scheme."""
    if config.nflux is None:
        raise ValueError("euler needs a numerical flux")
    if dt is None:
        dt = _resolve_dt(state, config)
    iv = _interfaces(state, config.limiter)
    if config.cfl_policy == "strict":
        _enforce_cfl(state, config, dt, iv)
    unew = state.u + dt * _rhs_from_iv(state, iv, config.nflux)
    rep = _report(state, unew, dt, _maybe_harten(state, config))
    return GridState(unew, state.h, state.t + dt), rep


def step_heun(state: GridState, config: SchemeConfig, dt: float | None = None):
    """Two-stage trapezoidal update: average of the slopes at u and at the
    Euler predictor."""
    if config.nflux is None:
        raise ValueError("heun needs a numerical flux")
    if dt is None:
        dt = _resolve_dt(state, config)
    iv = _interfaces(state, config.limiter)
    if config.cfl_policy == "strict":
        _enforce_cfl(state, config, dt, iv)
    k1 = _rhs_from_iv(state, iv, config.nflux)
    mid = GridState(state.u + dt * k1, state.h, state.t)
    k2 = semi_discrete_rhs(mid, config.limiter, config.nflux)
    unew = state.u + 0.5 * dt * (k1 + k2)
    rep = _report(state, unew, dt, _maybe_harten(state, config))
    return GridState(unew, state.h, state.t + dt), rep


def step_predictor_corrector(state: GridState, config: SchemeConfig, dt: float | None = None):
    """Midpoint update: half-step predictor, full-step corrector slope."""
    if config.nflux is None:
        raise ValueError("predictor_corrector needs a numerical flux")
    if dt is None:
        dt = _resolve_dt(state, config)
    iv = _interfaces(state, config.limiter)
    if config.cfl_policy == "strict":
        _enforce_cfl(state, config, dt, iv)
    k1 = _rhs_from_iv(state, iv, config.nflux)
    half = GridState(state.u + 0.5 * dt * k1, state.h, state.t)
    k2 = semi_discrete_rhs(half, config.limiter, config.nflux)
    unew = state.u + dt * k2
    rep = _report(state, unew, dt, _maybe_harten(state, config))
    return GridState(unew, state.h, state.t + dt), rep


def step_modified_pc_explicit(state: GridState, config: SchemeConfig, dt: float | None = None):
    """Predictor-corrector in incremental form with coefficients frozen at the
    step's initial state.

    The predictor applies half of the incremental update; the corrector applies
    the frozen coefficients at full weight to the predicted increments.  The
    scheme is NOT conservative; compare mass_before/mass_after in the report.
    """
    if config.nflux is None:
        raise ValueError("modified_pc_explicit needs a numerical flux")
    if dt is None:
        dt = _resolve_dt(state, config)
    if config.cfl_policy == "strict":
        _enforce_cfl(state, config, dt, _interfaces(state, config.limiter))
    lam = dt / state.h
    C, D = incremental_coefficients(state, config.limiter, config.nflux, lam)
    u = state.u
    d = shift_next(u) - u
    half = u + 0.5 * (C * d - shift_prev(D * d))
    dh = shift_next(half) - half
    unew = u + C * dh - shift_prev(D * dh)
    harten_ok = None
    if "harten" in config.monitors:
        bad = (C < -HARTEN_TOL) | (D < -HARTEN_TOL) | (C + D > 1.0 + HARTEN_TOL)
        harten_ok = not bool(bad.any())
    rep = _report(state, unew, dt, harten_ok)
    return GridState(unew, state.h, state.t + dt), rep


def step_five_point_advection(state: GridState, config: SchemeConfig, a: float = 1.0,
                              dt: float | None = None):
    """One-step five-point scheme for constant-speed transport (a > 0).

    u_j^{n+1} = u_j - s [ s (u_j - u_{j-1}) + (1-s)(minus_j - minus_{j-1}) ]

    where s = a dt / h.  At s = 1 the second term carries an exactly-zero
    coefficient and the update reduces to the exact single-cell shift.
    """
    a = float(a)
    if not a > 0.0:
        raise ValueError("five-point scheme needs a positive transport speed")
    if config.nflux is not None and config.nflux.flux.name != "advection":
        raise ValueError("five-point scheme is advection-only")
    if dt is None:
        dt = config.sigma * state.h / a
    s = a * dt / state.h
    bound = _stability_bound(config.limiter)
    if config.cfl_policy == "strict" and s > bound + CFL_SLACK:
        raise CflError(
            "Courant number %.6g exceeds stability bound %.6g (limiter=%s)"
            % (s, bound, _limiter_name(config.limiter))
        )
    u = state.u
    iv = _interfaces(state, config.limiter)
    dm = u - shift_prev(u)
    mdiff = iv.minus - shift_prev(iv.minus)
    unew = u - s * (s * dm + (1.0 - s) * mdiff)
    harten_ok = None
    if "harten" in config.monitors:
        D = np.divide(
            s * (s * dm + (1.0 - s) * mdiff),
            dm,
            out=np.zeros_like(dm),
            where=dm != 0.0,
        )
        harten_ok = not bool(((D < -HARTEN_TOL) | (D > 1.0 + HARTEN_TOL)).any())
    rep = _report(state, unew, dt, harten_ok)
    return GridState(unew, state.h, state.t + dt), rep


_STEPPERS = {
    "euler": step_euler,
    "heun": step_heun,
    "predictor_corrector": step_predictor_corrector,
    "modified_pc_explicit": step_modified_pc_explicit,
}


def step(state: GridState, config: SchemeConfig, a: float = 1.0, dt: float | None = None):
    """Dispatch one step of the configured scheme."""
    if config.scheme == "five_point_advection":
        return step_five_point_advection(state, config, a, dt=dt)
    return _STEPPERS[config.scheme](state, config, dt=dt)


def advance(state: GridState, config: SchemeConfig, tfinal: float, a: float = 1.0):
    """Advance by tfinal with a fixed dt fitted so tfinal/dt is an integer.

    dt starts from the initial state's sigma h / max |df| and is shrunk
    uniformly to divide tfinal.  For the schemes here the maximal transport
    speed never grows, so the fitted dt stays admissible for the whole run.
    Returns (final_state, [StepReport...]).
    """
    tfinal = float(tfinal)
    if tfinal <= 0.0:
        raise ValueError("tfinal must be positive")
    if config.scheme == "five_point_advection":
        dt0 = config.sigma * state.h / abs(float(a))
    else:
        dt0 = _resolve_dt(state, config)
    nsteps = max(1, int(math.ceil(tfinal / dt0 - 1e-12)))
    dt = tfinal / nsteps
    if config.cfl_policy == "warn":
        bound = _stability_bound(config.limiter)
        if config.sigma > bound + CFL_SLACK:
            warnings.warn(
                "sigma=%g exceeds the stability bound %.6g for limiter %s"
                % (config.sigma, bound, _limiter_name(config.limiter)),
                RuntimeWarning,
                stacklevel=2,
            )
    reports = []
    for _ in range(nsteps):
        state, rep = step(state, config, a=a, dt=dt)
        reports.append(rep)
    return state, reports


def write_trajectory_csv(dest, reports, t0: float = 0.0) -> None:
    """Write per-step scalar monitors as CSV (UTF-8, LF).

    Columns: step,t,tv,min,max,mass.  Row 0 is the initial state (from the
    first report's before-fields); row i the state after step i.
    """
    if not reports:
        raise ValueError("no steps to write")
    fmt = lambda x: "%.17g" % x
    own = isinstance(dest, (str, os.PathLike))
    fh = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "t", "tv", "min", "max", "mass"])
        first = reports[0]
        writer.writerow(
            [0, fmt(t0), fmt(first.tv_before), fmt(first.min_before),
             fmt(first.max_before), fmt(first.mass_before)]
        )
        t = t0
        for i, rep in enumerate(reports, start=1):
            t += rep.dt
            writer.writerow(
                [i, fmt(t), fmt(rep.tv_after), fmt(rep.min_after),
                 fmt(rep.max_after), fmt(rep.mass_after)]
            )
    finally:
        if own:
            fh.close()
