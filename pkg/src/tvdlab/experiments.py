"""Advection benchmark: smooth compactly-anchored initial profile, exact
transport solution, error norms, truncation residuals, convergence studies.

Mesh convention for all experiments: N = 2^k cells on the unit periodic
interval, h = 1/N, nodes x_j = (j-1) h for j = 1..N (zero-based: x_i = i h).
The midpoint 0.5 is a node on every mesh with k >= 1.
"""
from __future__ import annotations

import csv
import math
import os
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from .fluxes import advection_flux, make_numerical_flux
from .grid import GridState
from .limiters import LimiterSpec, make_catalog_limiter
from .reconstruction import UNO2
from .solver import SchemeConfig, advance, step

NORMS = ("l1", "l2", "linf")


@dataclass(frozen=True)
class ProfileU0:
    """Piecewise-polynomial initial profile on [0, 1].

    A cubic bump 1 - (x-1/2)^2 + (x-1/2)^3 on [1/4, 3/4], joined twice
    continuously differentiable to quintic tails that vanish to second order
    at both domain ends.  Coefficient arrays are ascending-power; the middle
    piece is expressed in t = x - 1/2.
    """

    left: np.ndarray
    mid: np.ndarray
    right: np.ndarray


def _hermite_rows(x: float) -> list:
    row0 = [x ** p for p in range(6)]
    row1 = [0.0] + [p * x ** (p - 1) for p in range(1, 6)]
    row2 = [0.0, 0.0] + [p * (p - 1) * x ** (p - 2) for p in range(2, 6)]
    return [row0, row1, row2]


@lru_cache(maxsize=1)
def profile() -> ProfileU0:
    """Solve the two quintic matching systems once and cache the result."""
    mid = np.array([1.0, 0.0, -1.0, 1.0])  # in t = x - 1/2
    # value / slope / curvature of the middle piece at the junctions
    left_targets = (59.0 / 64.0, 11.0 / 16.0, -3.5)
    right_targets = (61.0 / 64.0, -5.0 / 16.0, -0.5)
    a_left = np.array(_hermite_rows(0.0) + _hermite_rows(0.25))
    b_left = np.array([0.0, 0.0, 0.0, *left_targets])
    a_right = np.array(_hermite_rows(0.75) + _hermite_rows(1.0))
    b_right = np.array([*right_targets, 0.0, 0.0, 0.0])
    left = np.linalg.solve(a_left, b_left)
    right = np.linalg.solve(a_right, b_right)
    return ProfileU0(left=left, mid=mid, right=right)


def eval_profile(x, deriv: int = 0):
    """Evaluate the initial profile (or one of its first three derivatives).

    Errors on any sample outside [0, 1].
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("profile is defined on [0, 1] only")
    if not 0 <= int(deriv) <= 3:
        raise ValueError("deriv must be between 0 and 3")
    p = profile()
    left_c, mid_c, right_c = p.left, p.mid, p.right
    if deriv:
        left_c = P.polyder(left_c, int(deriv))
        mid_c = P.polyder(mid_c, int(deriv))
        right_c = P.polyder(right_c, int(deriv))
    vals = np.select(
        [arr < 0.25, arr > 0.75],
        [P.polyval(arr, left_c), P.polyval(arr, right_c)],
        default=P.polyval(arr - 0.5, mid_c),
    )
    if np.ndim(x) == 0:
        return float(vals)
    return vals


def exact_advection(x, t: float, a: float = 1.0):
    """Exact constant-speed transport of the profile on the periodic interval."""
    pos = np.mod(np.asarray(x, dtype=float) - float(a) * float(t), 1.0)
    # the wrap can round to exactly 1.0; both endpoints carry the value 0
    pos = np.where(pos >= 1.0, pos - 1.0, pos)
    if np.ndim(x) == 0:
        return eval_profile(float(pos))
    return eval_profile(pos)


def state_for_level(k: int) -> GridState:
    """Profile sampled on the dyadic mesh with 2^k cells."""
    k = int(k)
    if k < 3:
        raise ValueError("need k >= 3 (at least 8 cells)")
    n = 2 ** k
    x = np.arange(n) / n
    return GridState(eval_profile(x), 1.0 / n)


def profile_state(n_cells: int) -> GridState:
    """Profile sampled on an arbitrary mesh with n_cells >= 5 cells."""
    n = int(n_cells)
    if n < 5:
        raise ValueError("need at least 5 cells")
    x = np.arange(n) / n
    return GridState(eval_profile(x), 1.0 / n)


def error_norms(state: GridState, t: float | None = None, a: float = 1.0):
    """(l1, l2, linf) distance of the state to the exact transport solution."""
    if t is None:
        t = state.t
    n = state.n_cells
    x = np.arange(n) * state.h
    err = state.u - exact_advection(x, t, a)
    l1 = state.h * float(np.sum(np.abs(err)))
    l2 = math.sqrt(state.h * float(np.sum(err * err)))
    linf = float(np.max(np.abs(err)))
    return (l1, l2, linf)


def fit_order(errors: dict) -> float:
    """Least-squares convergence order from a map {k: error}, h = 2^-k.

    Needs at least 3 levels.  Nonpositive errors are floored at machine
    epsilon (with a warning) so exact-to-rounding schemes still fit.
    """
    if len(errors) < 3:
        raise ValueError("order fit needs at least 3 refinement levels")
    ks = np.array(sorted(errors), dtype=float)
    es = np.array([errors[int(k)] for k in ks], dtype=float)
    if np.any(es <= 0.0):
        warnings.warn("nonpositive errors floored at machine epsilon", stacklevel=2)
        es = np.maximum(es, np.finfo(float).eps)
    slope = np.polyfit(ks, np.log2(es), 1)[0]
    return float(-slope)


def pairwise_orders(errors: dict) -> dict:
    """Observed order between consecutive levels: {(k, k+1): log2(e_k/e_{k+1})}."""
    ks = sorted(errors)
    eps = np.finfo(float).eps
    out = {}
    for k0, k1 in zip(ks, ks[1:]):
        e0 = max(errors[k0], eps)
        e1 = max(errors[k1], eps)
        out[(k0, k1)] = math.log2(e0 / e1) / (k1 - k0)
    return out


def _resolve_study_limiter(name):
    if isinstance(name, LimiterSpec):
        return name
    if name == UNO2:
        return UNO2
    return make_catalog_limiter(name)


def truncation_residual(scheme: str, limiter, sigma: float, h: float,
                        x0: float = 0.5, a: float = 1.0) -> float:
    """One-step truncation residual at node x0.

    Sample the exact profile on the mesh, take a single step of the scheme
    with dt = sigma h / a, and divide the pointwise defect against the exact
    transport solution by dt.
    """
    h = float(h)
    n = int(round(1.0 / h))
    if n < 5 or abs(n * h - 1.0) > 1e-12:
        raise ValueError("h must split the unit interval into >= 5 cells")
    jf = float(x0) / h
    j0 = int(round(jf))
    if abs(jf - j0) > 1e-9 or not 0 <= j0 < n:
        raise ValueError("x0=%g is not a mesh node" % x0)
    limiter = _resolve_study_limiter(limiter)
    x = np.arange(n) * h
    state = GridState(eval_profile(x), h)
    if scheme == "five_point_advection":
        nflux = None
    else:
        nflux = make_numerical_flux(advection_flux(a), "upwind_advection")
    config = SchemeConfig(scheme, limiter, nflux=nflux, sigma=sigma)
    dt = float(sigma) * h / float(a)
    stepped, _ = step(state, config, a=a, dt=dt)
    defect = exact_advection(float(x0), dt, a) - float(stepped.u[j0])
    return abs(defect) / dt


@dataclass(frozen=True)
class ErrorRow:
    scheme: str
    limiter: str
    sigma: float
    k: int
    h: float
    l1: float
    l2: float
    linf: float
    trunc_at_half: float


@dataclass
class ErrorTable:
    rows: list
    orders: dict  # (scheme, limiter, sigma, norm) -> fitted order

    def write_csv(self, dest) -> None:
        """Columns: scheme,limiter,sigma,k,h,l1,l2,linf,trunc_at_half."""
        _write_csv(
            dest,
            ["scheme", "limiter", "sigma", "k", "h", "l1", "l2", "linf", "trunc_at_half"],
            [
                [r.scheme, r.limiter, _fmt(r.sigma), r.k, _fmt(r.h), _fmt(r.l1),
                 _fmt(r.l2), _fmt(r.linf), _fmt(r.trunc_at_half)]
                for r in self.rows
            ],
        )

    def write_orders_csv(self, dest) -> None:
        """Columns: scheme,limiter,sigma,norm,fitted_order."""
        _write_csv(
            dest,
            ["scheme", "limiter", "sigma", "norm", "fitted_order"],
            [
                [s, l, _fmt(sig), norm, _fmt(self.orders[(s, l, sig, norm)])]
                for (s, l, sig, norm) in sorted(self.orders)
            ],
        )


def _fmt(x) -> str:
    return "%.17g" % float(x)


def _write_csv(dest, header, rows) -> None:
    own = isinstance(dest, (str, os.PathLike))
    fh = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if own:
            fh.close()


def default_fit_levels(k_values) -> list:
    """Default fit window: k in [5, 9] clipped to the available levels, or all
    levels when fewer than 3 survive the clipping."""
    ks = sorted(int(k) for k in k_values)
    window = [k for k in ks if 5 <= k <= 9]
    return window if len(window) >= 3 else ks


def convergence_study(cases, k_values=range(5, 10), fit_levels=None,
                      a: float = 1.0, tfinal: float = 1.0) -> ErrorTable:
    """Grid-refinement study over (scheme, limiter, sigma) cases.

    For each case and each level k: run to tfinal on the 2^k mesh (dt fitted
    so tfinal/dt is an integer), record error norms and the one-step
    truncation residual at x = 1/2; then fit per-norm orders over the fit
    window.  Rows come out sorted by (scheme, limiter, sigma, k).
    """
    ks = sorted({int(k) for k in k_values})
    if not ks:
        raise ValueError("no refinement levels given")
    for k in ks:
        if not 3 <= k <= 10:
            raise ValueError("levels must satisfy 3 <= k <= 10, got %d" % k)
    fit_ks = sorted(int(k) for k in fit_levels) if fit_levels is not None else default_fit_levels(ks)
    if len(fit_ks) < 3:
        raise ValueError("order fit needs at least 3 levels in the fit window")
    case_keys = sorted({(str(s), str(l), float(sig)) for (s, l, sig) in cases})
    rows = []
    orders = {}
    for scheme, lname, sigma in case_keys:
        limiter = _resolve_study_limiter(lname)
        if scheme == "five_point_advection":
            nflux = None
        else:
            nflux = make_numerical_flux(advection_flux(a), "upwind_advection")
        per_norm = {norm: {} for norm in NORMS}
        for k in ks:
            st = state_for_level(k)
            config = SchemeConfig(scheme, limiter, nflux=nflux, sigma=sigma)
            final, _ = advance(st, config, tfinal, a=a)
            l1, l2, linf = error_norms(final, tfinal, a)
            h = 1.0 / 2 ** k
            trunc = truncation_residual(scheme, limiter, sigma, h, 0.5, a)
            rows.append(ErrorRow(scheme, lname, sigma, k, h, l1, l2, linf, trunc))
            for norm, val in zip(NORMS, (l1, l2, linf)):
                per_norm[norm][k] = val
        for norm in NORMS:
            subset = {k: per_norm[norm][k] for k in fit_ks if k in per_norm[norm]}
            orders[(scheme, lname, sigma, norm)] = fit_order(subset)
    return ErrorTable(rows=rows, orders=orders)
