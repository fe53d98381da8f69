"""Flux-limiter algebra: catalog limiters, dual forms, admissibility predicates.

A limiter is kept in slope-ratio form ``phi(r)``; the increment form
``psi(lam) = lam * phi(1/lam)`` is derived on demand (``psi_from_phi``).  All
predicate checks run on one fixed, deterministic sampling grid so verdicts are
reproducible and every failure carries a concrete witness sample.

Conventions used throughout:

* ``phi(0) = 0`` for every catalog limiter (this is what makes all the
  zero-increment degeneracies in the incremental-coefficient machinery vanish
  identically).
* inequalities are checked with an absolute slack of 1e-10, identities with an
  absolute tolerance of 1e-10;
* a ratio ``phi(r)/r`` above 1e6 anywhere on the positive samples is reported
  as an unbounded slope ratio (``inf``).
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

INEQUALITY_SLACK = 1e-10
IDENTITY_TOL = 1e-10
UNBOUNDED_RATIO = 1e6

CATALOG = (
    "upwind",
    "lax_wendroff",
    "minmod",
    "superbee",
    "muscl",
    "kappa",
    "van_albada",
    "lagrange",
    "minmod_abs",
)

# Landmarks every scan must visit: breakpoints of the piecewise catalog
# limiters, the unit ratio, and a positive value right next to zero.
MANDATORY_SAMPLES = (-3.0, -1.0, -0.5, 1e-12, 1.0 / 3.0, 0.5, 1.0, 2.0, 3.0)

_GRID: np.ndarray | None = None


def sampling_grid() -> np.ndarray:
    """Deterministic r-sample grid used by every predicate check.

    512 log-spaced magnitudes per sign spanning [1e-6, 64], plus the mandatory
    landmark samples.  Sorted ascending, duplicates removed.
    """
    global _GRID
    if _GRID is None:
        mags = np.geomspace(1e-6, 64.0, 512)
        _GRID = np.unique(np.concatenate([MANDATORY_SAMPLES, mags, -mags]))
        _GRID.setflags(write=False)
    return _GRID


@dataclass(frozen=True)
class LimiterSpec:
    """A slope limiter in ratio form.

    ``phi`` maps the slope ratio r to the limiting weight; it accepts floats
    and numpy arrays.  ``stencil_width`` is the number of cells the induced
    reconstruction reads (3 for every ratio-form limiter).
    """

    name: str
    phi: Callable
    stencil_width: int = 3


@dataclass(frozen=True)
class Witness:
    """Sample at which a checked inequality fails: required lhs <= rhs."""

    r: float
    lhs: float
    rhs: float
    clause: str = ""


@dataclass(frozen=True)
class AdmissibilityReport:
    limiter: str
    predicate: str
    passed: bool
    witness: Witness | None = None
    params: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)


def phi_values(limiter: LimiterSpec, r) -> np.ndarray:
    """Evaluate limiter.phi on an array, falling back to a scalar loop."""
    r = np.asarray(r, dtype=float)
    try:
        vals = np.asarray(limiter.phi(r), dtype=float)
    except Exception:
        vals = None
    if vals is None or vals.shape != r.shape:
        vals = np.array([float(limiter.phi(float(x))) for x in np.atleast_1d(r)])
        vals = vals.reshape(r.shape)
    return vals


def psi_from_phi(limiter: LimiterSpec, lam: float) -> float:
    """Increment-form value psi(lam) = lam * phi(1/lam), with psi(0) = 0."""
    lam = float(lam)
    if lam == 0.0:
        return 0.0
    return lam * float(limiter.phi(1.0 / lam))


# ----------------------------------------------------------------------------
# catalog
# ----------------------------------------------------------------------------

def _phi_upwind(r):
    return np.zeros_like(r)


def _phi_lax_wendroff(r):
    # constant-one limiter; the value at r == 0 follows the shared phi(0) = 0
    # convention (see module docstring)
    return np.where(r == 0.0, 0.0, 1.0)


def _phi_minmod(r):
    return np.clip(r, 0.0, 1.0)


def _phi_superbee(r):
    return np.maximum(0.0, np.maximum(np.minimum(2.0 * r, 1.0), np.minimum(r, 2.0)))


def _phi_muscl(r):
    return np.maximum(0.0, np.minimum(np.minimum(2.0 * r, 0.5 * (1.0 + r)), 2.0))


def _phi_minmod_abs(r):
    return np.minimum(np.abs(r), 1.0)


def _phi_van_albada(r):
    # r*(r+1)/(r*r+1) as printed loses relative accuracy for tiny r after the
    # rewrite 1 + (r-1)/(r*r+1), and overflows to nan for huge r in the direct
    # form; use each branch where it is accurate
    with np.errstate(over="ignore", invalid="ignore"):
        direct = r * (r + 1.0) / (r * r + 1.0)
        shifted = 1.0 + (r - 1.0) / (r * r + 1.0)
        return np.where(np.abs(r) <= 1.0, direct, shifted)


def _phi_lagrange(r):
    return np.where(
        r <= -3.0,
        0.0,
        np.where(
            r <= -1.0,
            0.25 * (r + 3.0),
            np.where(
                r <= 0.0,
                -0.5 * r,
                np.where(
                    r <= 1.0 / 3.0,
                    2.5 * r,
                    np.where(r <= 3.0, 0.25 * (r + 3.0), 1.5),
                ),
            ),
        ),
    )


def _make_phi_kappa(kappa: float):
    if kappa == 1.0:
        # limiting member of the family: the corner ratio (3-kappa)/(1-kappa)
        # runs off to infinity and the positive branch degenerates to 1
        def phi_kappa(r):
            return np.where(r > 0.0, 1.0, 0.0)

        return phi_kappa

    corner = (3.0 - kappa) / (1.0 - kappa)

    def phi_kappa(r):
        pos = 0.5 * (
            (1.0 - kappa) * np.minimum(r, corner)
            + (1.0 + kappa) * np.minimum(1.0, corner * r)
        )
        return np.where(r > 0.0, pos, 0.0)

    return phi_kappa


_PHI_TABLE = {
    "upwind": _phi_upwind,
    "lax_wendroff": _phi_lax_wendroff,
    "minmod": _phi_minmod,
    "superbee": _phi_superbee,
    "muscl": _phi_muscl,
    "van_albada": _phi_van_albada,
    "lagrange": _phi_lagrange,
    "minmod_abs": _phi_minmod_abs,
}


def _scalarized(fn):
    def phi(r):
        # every catalog form is constant (or has settled to its asymptote)
        # far out on either tail; clamping keeps intermediate products like
        # 2r finite for the extreme ratios a near-flat pair of cells produces
        rr = np.clip(np.asarray(r, dtype=float), -1e30, 1e30)
        out = fn(rr)
        if np.ndim(out) == 0:
            return float(out)
        return out

    return phi


def make_catalog_limiter(name: str, kappa: float | None = None) -> LimiterSpec:
    """Build a catalog limiter by name.

    ``kappa`` is required for (and only valid for) the ``kappa`` family, with
    -1 <= kappa <= 1.
    """
    if name not in CATALOG:
        raise ValueError(
            "unknown limiter %r; catalog: %s" % (name, ", ".join(CATALOG))
        )
    if name == "kappa":
        if kappa is None:
            raise ValueError("the kappa family needs an explicit kappa in [-1, 1]")
        kappa = float(kappa)
        if not (-1.0 <= kappa <= 1.0):
            raise ValueError("kappa=%g outside [-1, 1]" % kappa)
        return LimiterSpec("kappa[%g]" % kappa, _scalarized(_make_phi_kappa(kappa)))
    if kappa is not None:
        raise ValueError("kappa parameter is only meaningful for the kappa family")
    return LimiterSpec(name, _scalarized(_PHI_TABLE[name]))


# ----------------------------------------------------------------------------
# predicate checks
# ----------------------------------------------------------------------------

def _masked(vals: np.ndarray, mask: np.ndarray) -> np.ndarray:
    # inactive samples can never violate: lhs of -inf loses every comparison
    return np.where(mask, vals, -np.inf)


def _scan_report(limiter, predicate, samples, clauses, params=None, notes=None):
    """Find the first (lowest-sample) violation of lhs <= rhs + slack."""
    best = None
    for clause, lhs, rhs in clauses:
        bad = lhs > rhs + INEQUALITY_SLACK
        if bad.any():
            i = int(np.argmax(bad))
            if best is None or i < best[0]:
                best = (i, clause, float(lhs[i]), float(rhs[i]))
    if best is None:
        return AdmissibilityReport(
            limiter.name, predicate, True, None, dict(params or {}), dict(notes or {})
        )
    i, clause, lhs, rhs = best
    wit = Witness(float(samples[i]), lhs, rhs, clause)
    return AdmissibilityReport(
        limiter.name, predicate, False, wit, dict(params or {}), dict(notes or {})
    )


def check_monotonicity(limiter: LimiterSpec) -> AdmissibilityReport:
    """Pass iff 0 <= psi(lam)/lam <= 2 at every grid sample lam.

    The witness sample column is the lam value at which the band is left.
    """
    lam = sampling_grid()
    # psi(lam)/lam == phi(1/lam) for lam != 0 (no grid sample is zero)
    ratio = phi_values(limiter, 1.0 / lam)
    clauses = [
        ("ratio_lower", np.zeros_like(lam), ratio),
        ("ratio_upper", ratio, np.full_like(lam, 2.0)),
    ]
    return _scan_report(limiter, "monotonicity", lam, clauses, params={"grid": "default"})


def check_convexity(limiter: LimiterSpec) -> AdmissibilityReport:
    """Interleaved-convexity admissibility of the induced reconstruction.

    On r <= 1 the limiter must stay inside [max(0, r), 1]; on r >= 1 inside
    [1, min(r, 2)] and below its own dual value r*phi(1/r).  Passing forces
    phi(1) = 1 up to the shared slack.
    """
    r = sampling_grid()
    phi = phi_values(limiter, r)
    phi_inv = phi_values(limiter, 1.0 / r)
    left = r <= 1.0
    right = r >= 1.0
    ones = np.ones_like(r)
    clauses = [
        ("left_lower", _masked(np.maximum(0.0, r), left), phi),
        ("left_upper", _masked(phi, left), ones),
        ("right_lower", _masked(ones, right), phi),
        ("right_upper", _masked(phi, right), np.minimum(r, 2.0)),
        ("dual_upper", _masked(phi, right), r * phi_inv),
    ]
    return _scan_report(limiter, "convexity", r, clauses, params={"grid": "default"})


def check_tvd_region(limiter: LimiterSpec, alpha: float) -> AdmissibilityReport:
    """Total-variation-diminishing region membership for 1 <= alpha <= 2.

    Requires phi(r) <= (alpha - 2) r for r <= 0 and phi(r) <= alpha for r > 0.
    The stricter classical band phi(r) <= 2 r on 0 < r <= 1 is evaluated as an
    informational note (``sweby_region``), never part of the verdict.
    """
    alpha = float(alpha)
    if not (1.0 <= alpha <= 2.0):
        raise ValueError("alpha=%g outside [1, 2]" % alpha)
    r = sampling_grid()
    phi = phi_values(limiter, r)
    neg = r < 0.0
    pos = r > 0.0
    clauses = [
        ("negative_side", _masked(phi, neg), (alpha - 2.0) * r),
        ("positive_side", _masked(phi, pos), np.full_like(r, alpha)),
    ]
    unit = pos & (r <= 1.0)
    sweby = bool(np.all(phi[unit] <= 2.0 * r[unit] + INEQUALITY_SLACK))
    return _scan_report(
        limiter,
        "tvd_region",
        r,
        clauses,
        params={"alpha": alpha},
        notes={"sweby_region": sweby},
    )


def check_second_order_extremum(limiter: LimiterSpec) -> AdmissibilityReport:
    """Second-order behavior through a smooth extremum.

    Three requirements: phi(1) = 1; both one-sided difference quotients of phi
    at r = 1 are stable across steps 1e-4 and 5e-5 (agreement 1e-3 relative,
    with an absolute floor of 1 so exactly-flat sides compare cleanly; the two
    sides need not agree with each other); and phi(-1) + phi(3) = 2.

    Witness encoding for the non-sampled clauses: the sample column holds the
    probe location (1 for the value/slope clauses, -1 for the pair sum), lhs
    the measured value, rhs the target.
    """
    phi1 = float(limiter.phi(1.0))
    if abs(phi1 - 1.0) > IDENTITY_TOL:
        wit = Witness(1.0, phi1, 1.0, "unit_value")
        return AdmissibilityReport(limiter.name, "second_order_extremum", False, wit)
    for side, label in ((1.0, "slope_right"), (-1.0, "slope_left")):
        quotients = []
        for step in (1e-4, 5e-5):
            dq = (float(limiter.phi(1.0 + side * step)) - phi1) / (side * step)
            quotients.append(dq)
        d1, d2 = quotients
        scale = max(1.0, abs(d1), abs(d2))
        if abs(d1 - d2) > 1e-3 * scale:
            wit = Witness(1.0, d1, d2, label)
            return AdmissibilityReport(
                limiter.name, "second_order_extremum", False, wit
            )
    pair = float(limiter.phi(-1.0)) + float(limiter.phi(3.0))
    if abs(pair - 2.0) > IDENTITY_TOL:
        wit = Witness(-1.0, pair, 2.0, "extremum_pair_sum")
        return AdmissibilityReport(limiter.name, "second_order_extremum", False, wit)
    return AdmissibilityReport(limiter.name, "second_order_extremum", True, None)


def check_quadratic_exactness(limiter: LimiterSpec, delta: float) -> AdmissibilityReport:
    """Exact transport of a discrete parabola for every ratio 0 <= sigma <= delta.

    Two clause families, both with tolerance 1e-10:

    * moving extremum: (1-s) phi((1+s)/(s-1)) + (1+s) phi((3+s)/(1+s)) = 2 at
      64 uniform samples s in [0, delta] (at s = 1 the first coefficient is
      exactly zero and the term is dropped);
    * steady parabola: (k+1/2) phi((k-1/2)/(k+1/2)) -
      (k-1/2) phi((k-3/2)/(k-1/2)) = 1 for k in {-2, -1, 0, 1, 2}.

    Witness encoding: the sample column holds the failing s for the moving
    clause and the failing integer k for the steady clause; lhs the measured
    combination, rhs the target.
    """
    delta = float(delta)
    if delta <= 0.0:
        raise ValueError("delta must be positive, got %g" % delta)
    params = {"delta": delta}
    for s in np.linspace(0.0, delta, 64):
        if abs(1.0 - s) < 1e-14:
            first = 0.0
        else:
            first = (1.0 - s) * float(limiter.phi((1.0 + s) / (s - 1.0)))
        second = (1.0 + s) * float(limiter.phi((3.0 + s) / (1.0 + s)))
        total = first + second
        if abs(total - 2.0) > IDENTITY_TOL:
            wit = Witness(float(s), total, 2.0, "moving_extremum")
            return AdmissibilityReport(
                limiter.name, "quadratic_exactness", False, wit, params
            )
    for k in (-2.0, -1.0, 0.0, 1.0, 2.0):
        value = (k + 0.5) * float(limiter.phi((k - 0.5) / (k + 0.5))) - (
            k - 0.5
        ) * float(limiter.phi((k - 1.5) / (k - 0.5)))
        if abs(value - 1.0) > IDENTITY_TOL:
            wit = Witness(k, value, 1.0, "steady_parabola")
            return AdmissibilityReport(
                limiter.name, "quadratic_exactness", False, wit, params
            )
    return AdmissibilityReport(limiter.name, "quadratic_exactness", True, None, params)


@lru_cache(maxsize=None)
def slope_ratio_bound(limiter: LimiterSpec) -> float:
    """sup of phi(r)/r over the positive samples; inf when effectively unbounded.

    The grid's smallest positive sample (1e-12) makes any limiter with
    phi(0+) bounded away from zero report inf.
    """
    r = sampling_grid()
    pos = r[r > 0.0]
    ratio = phi_values(limiter, pos) / pos
    worst = float(np.max(ratio))
    if worst > UNBOUNDED_RATIO:
        return math.inf
    return worst


def estimate_lipschitz(limiter: LimiterSpec) -> float:
    """Largest absolute difference quotient between adjacent grid samples."""
    r = sampling_grid()
    vals = phi_values(limiter, r)
    slopes = np.abs(np.diff(vals) / np.diff(r))
    return float(np.max(slopes))


# ----------------------------------------------------------------------------
# report serialization
# ----------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return "%.17g" % x


def _param_field(report: AdmissibilityReport) -> str:
    parts = []
    for key in sorted(report.params):
        val = report.params[key]
        if isinstance(val, float):
            parts.append("%s=%s" % (key, _fmt(val)))
        else:
            parts.append("%s=%s" % (key, val))
    return ";".join(parts)


def write_report_csv(reports, dest) -> None:
    """Write admissibility reports as CSV (UTF-8, LF line endings).

    Columns: limiter,predicate,param,verdict,witness_r,lhs,rhs.  Witness
    fields are empty on a pass.  ``dest`` is a path or a text file object.
    """
    own = isinstance(dest, (str, os.PathLike))
    fh = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["limiter", "predicate", "param", "verdict", "witness_r", "lhs", "rhs"])
        for rep in reports:
            if rep.passed:
                wr = wl = wrh = ""
            else:
                wr = _fmt(rep.witness.r)
                wl = _fmt(rep.witness.lhs)
                wrh = _fmt(rep.witness.rhs)
            writer.writerow(
                [
                    rep.limiter,
                    rep.predicate,
                    _param_field(rep),
                    "pass" if rep.passed else "fail",
                    wr,
                    wl,
                    wrh,
                ]
            )
    finally:
        if own:
            fh.close()
