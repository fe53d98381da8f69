"""Physical flux specifications and monotone two-point numerical fluxes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

MONOTONE_TOL = 1e-10
UPWIND_TOL = 1e-8
_SPEED_EPS = 1e-6  # diagonal probes skip near-sonic states below this speed


@dataclass(frozen=True)
class FluxSpec:
    """Physical flux f with derivative df and optional sonic point (argmin of f)."""

    name: str
    f: Callable
    df: Callable
    sonic_point: float | None = None


def advection_flux(a: float = 1.0) -> FluxSpec:
    """Linear transport at constant speed a: f(u) = a u."""
    a = float(a)

    def f(u):
        return a * np.asarray(u, dtype=float)

    def df(u):
        return np.full_like(np.asarray(u, dtype=float), a)

    return FluxSpec("advection", f, df, None)


def burgers_flux() -> FluxSpec:
    """Quadratic flux f(u) = u^2 / 2 with sonic point 0."""

    def f(u):
        u = np.asarray(u, dtype=float)
        return 0.5 * u * u

    def df(u):
        return np.asarray(u, dtype=float)

    return FluxSpec("burgers", f, df, 0.0)


@dataclass(frozen=True)
class NumericalFlux:
    """Two-point interface flux phi2(left_value, right_value), vectorized."""

    name: str
    flux: FluxSpec
    phi2: Callable
    mu: float | None = None


@dataclass(frozen=True)
class FluxProbeReport:
    """Verdict of a sampled flux check; witness is (u, v, clause, value)."""

    name: str
    passed: bool
    witness: tuple | None = None


def _df_values(flux: FluxSpec, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    try:
        vals = np.asarray(flux.df(u), dtype=float)
    except Exception:
        vals = None
    if vals is None or vals.shape != u.shape:
        vals = np.array([float(flux.df(float(x))) for x in np.atleast_1d(u)])
        vals = vals.reshape(u.shape)
    return vals


def _require_convex(flux: FluxSpec) -> np.ndarray:
    """Probe df over [-8, 8]; reject derivatives that decrease anywhere."""
    xs = np.linspace(-8.0, 8.0, 257)
    ds = _df_values(flux, xs)
    if np.any(np.diff(ds) < -1e-9):
        raise ValueError("flux %r is not convex on the probe range" % flux.name)
    return ds


def make_numerical_flux(
    flux: FluxSpec,
    kind: str,
    mu: float | None = None,
    working_range: tuple | None = None,
) -> NumericalFlux:
    """Construct a two-point numerical flux.

    kinds: ``godunov``, ``engquist_osher``, ``upwind_advection``,
    ``lax_wendroff_type`` (the latter requires ``mu``; if a ``working_range``
    is declared, ``mu`` must dominate sup |df| on it).
    """
    if kind == "godunov":
        ds = _require_convex(flux)
        s = flux.sonic_point
        if s is None and ds[0] < -1e-12 < ds[-1]:
            raise ValueError(
                "flux %r changes speed sign but declares no sonic point" % flux.name
            )
        fs = float(flux.f(s)) if s is not None else None

        def phi2(u, v):
            u = np.asarray(u, dtype=float)
            v = np.asarray(v, dtype=float)
            fu = flux.f(u)
            fv = flux.f(v)
            lo = np.minimum(fu, fv)
            if fs is not None:
                inside = (np.minimum(u, v) <= s) & (s <= np.maximum(u, v))
                lo = np.where(inside, np.minimum(lo, fs), lo)
            return np.where(u <= v, lo, np.maximum(fu, fv))

        return NumericalFlux("godunov", flux, phi2)

    if kind == "engquist_osher":
        ds = _require_convex(flux)
        s = flux.sonic_point
        if s is None:
            if np.all(ds >= -1e-12):

                def phi2(u, v):
                    return flux.f(np.asarray(u, dtype=float))

            elif np.all(ds <= 1e-12):

                def phi2(u, v):
                    return flux.f(np.asarray(v, dtype=float))

            else:
                raise ValueError(
                    "flux %r changes speed sign but declares no sonic point"
                    % flux.name
                )
        else:
            fs = float(flux.f(s))

            def phi2(u, v):
                u = np.asarray(u, dtype=float)
                v = np.asarray(v, dtype=float)
                return flux.f(np.maximum(u, s)) + flux.f(np.minimum(v, s)) - fs

        return NumericalFlux("engquist_osher", flux, phi2)

    if kind == "upwind_advection":
        probes = _df_values(flux, np.array([-1.0, 0.37, 2.0]))
        if float(np.max(probes) - np.min(probes)) > 1e-12:
            raise ValueError("upwind_advection needs a constant-speed flux")
        if not float(probes[0]) > 0.0:
            raise ValueError("upwind_advection needs a positive speed")

        def phi2(u, v):
            return flux.f(np.asarray(u, dtype=float))

        return NumericalFlux("upwind_advection", flux, phi2)

    if kind == "lax_wendroff_type":
        if mu is None:
            raise ValueError("lax_wendroff_type needs the dissipation weight mu")
        mu = float(mu)
        if working_range is not None:
            lo, hi = map(float, working_range)
            speeds = np.abs(_df_values(flux, np.linspace(lo, hi, 256)))
            if mu < float(np.max(speeds)) - 1e-12:
                raise ValueError(
                    "mu=%g below sup |df| = %g on the declared range"
                    % (mu, float(np.max(speeds)))
                )

        def phi2(u, v):
            u = np.asarray(u, dtype=float)
            v = np.asarray(v, dtype=float)
            return 0.5 * (flux.f(u) + mu * u) + 0.5 * (flux.f(v) - mu * v)

        return NumericalFlux("lax_wendroff_type", flux, phi2, mu=mu)

    raise ValueError("unknown numerical flux kind %r" % kind)


def check_monotone(nf: NumericalFlux, lo: float, hi: float) -> FluxProbeReport:
    """Sampled monotonicity: nondecreasing in the left argument, nonincreasing
    in the right, probed by central differences on a 64 x 64 grid over
    [lo, hi]^2 with tolerance 1e-10."""
    xs = np.linspace(lo, hi, 64)
    U, V = np.meshgrid(xs, xs, indexing="ij")
    e = 1e-5 * max(1.0, abs(lo), abs(hi))
    du = (nf.phi2(U + e, V) - nf.phi2(U - e, V)) / (2.0 * e)
    dv = (nf.phi2(U, V + e) - nf.phi2(U, V - e)) / (2.0 * e)
    bad_u = du < -MONOTONE_TOL
    bad_v = dv > MONOTONE_TOL
    if bad_u.any():
        i, j = np.argwhere(bad_u)[0]
        return FluxProbeReport(
            nf.name, False, (float(U[i, j]), float(V[i, j]), "left_slope", float(du[i, j]))
        )
    if bad_v.any():
        i, j = np.argwhere(bad_v)[0]
        return FluxProbeReport(
            nf.name, False, (float(U[i, j]), float(V[i, j]), "right_slope", float(dv[i, j]))
        )
    return FluxProbeReport(nf.name, True, None)


def check_upwind_compliance(nf: NumericalFlux, lo: float, hi: float) -> FluxProbeReport:
    """Diagonal probes: where the transport speed is positive the flux must
    ignore the right state, where negative the left state (|partial| <= 1e-8).
    Near-sonic samples (|df| <= 1e-6) are skipped."""
    ws = np.linspace(lo, hi, 64)
    speeds = _df_values(nf.flux, ws)
    e = 1e-5 * max(1.0, abs(lo), abs(hi))
    dv = (nf.phi2(ws, ws + e) - nf.phi2(ws, ws - e)) / (2.0 * e)
    du = (nf.phi2(ws + e, ws) - nf.phi2(ws - e, ws)) / (2.0 * e)
    bad_pos = (speeds > _SPEED_EPS) & (np.abs(dv) > UPWIND_TOL)
    bad_neg = (speeds < -_SPEED_EPS) & (np.abs(du) > UPWIND_TOL)
    if bad_pos.any():
        i = int(np.argmax(bad_pos))
        return FluxProbeReport(
            nf.name, False, (float(ws[i]), float(ws[i]), "right_dependence", float(dv[i]))
        )
    if bad_neg.any():
        i = int(np.argmax(bad_neg))
        return FluxProbeReport(
            nf.name, False, (float(ws[i]), float(ws[i]), "left_dependence", float(du[i]))
        )
    return FluxProbeReport(nf.name, True, None)
