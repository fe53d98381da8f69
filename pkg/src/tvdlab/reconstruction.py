"""Interface reconstruction: ratio-form slope limiting and the
second-order non-oscillatory variant (uno2).

Interface indexing: arrays are per interface, entry i living between cells i
and i+1 (periodic).  ``minus`` is the value seen from cell i (left side of the
interface), ``plus`` the value seen from cell i+1 (right side).

Zero-increment conventions (exact, not approximate): whenever the increment
across an interface is exactly zero the limited correction on that interface
vanishes, and a zero numerator increment makes the slope ratio 0 (so phi(0)
applies, which is 0 for every catalog limiter).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridState, shift_next, shift_prev
from .limiters import LimiterSpec, phi_values

#: sentinel accepted wherever a limiter is expected, selecting uno2_interface
UNO2 = "uno2"


@dataclass(frozen=True)
class InterfaceValues:
    minus: np.ndarray
    plus: np.ndarray


def _guarded_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    # a ratio that overflows past the float range is a fine limiting value:
    # the limiter evaluation clamps its argument anyway
    with np.errstate(over="ignore"):
        return np.divide(num, den, out=np.zeros_like(den), where=den != 0.0)


def interface_values(state: GridState, limiter: LimiterSpec) -> InterfaceValues:
    """Limited two-sided interface values.

    minus_i = u_i     + phi(r_i) * (u_{i+1} - u_i) / 2      with r_i the
    upwind/downwind increment ratio of cell i, and
    plus_i  = u_{i+1} - phi(q_i) * (u_{i+1} - u_i) / 2      with q_i the
    mirrored ratio of cell i+1.
    """
    u = state.u
    if u.size < 3:
        raise ValueError("reconstruction needs at least 3 cells")
    d = shift_next(u) - u           # increment across interface i
    dm = shift_prev(d)              # increment across interface i-1
    dnext = shift_next(d)           # increment across interface i+1
    r = _guarded_ratio(dm, d)
    q = _guarded_ratio(dnext, d)
    minus = u + 0.5 * phi_values(limiter, r) * d
    plus = shift_next(u) - 0.5 * phi_values(limiter, q) * d
    return InterfaceValues(minus=minus, plus=plus)


def _minmod_pair(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Zero when signs differ (or either is zero), else the smaller magnitude."""
    return 0.5 * (np.sign(a) + np.sign(b)) * np.minimum(np.abs(a), np.abs(b))


def uno2_interface(state: GridState) -> InterfaceValues:
    """Second-order non-oscillatory interface values (5-cell stencil).

    The interface curvature is the sign-guarded minimum of the two adjacent
    cell curvatures; each one-sided value adds half of the sign-guarded
    minimum of the two curvature-corrected neighbor increments.
    """
    u = state.u
    if u.size < 5:
        raise ValueError("uno2 needs at least 5 cells")
    d = shift_next(u) - u                     # increment across interface i
    cc = d - shift_prev(d)                    # curvature centered on cell i
    dd = _minmod_pair(cc, shift_next(cc))     # curvature at interface i
    minus = u + 0.5 * _minmod_pair(
        shift_prev(d) + 0.5 * shift_prev(dd),
        d - 0.5 * dd,
    )
    plus = shift_next(u) - 0.5 * _minmod_pair(
        shift_next(d) - 0.5 * shift_next(dd),
        d + 0.5 * dd,
    )
    return InterfaceValues(minus=minus, plus=plus)


def reconstructed_tv(state: GridState, limiter: LimiterSpec) -> float:
    """Total variation of the reconstructed (piecewise) profile.

    Sums, periodically, the in-cell excursions |u_j - plus_{j-1}| and
    |minus_j - u_j| plus the interface jumps |plus_i - minus_i|.
    """
    iv = interface_values(state, limiter)
    u = state.u
    in_cell = np.abs(u - shift_prev(iv.plus)) + np.abs(iv.minus - u)
    jumps = np.abs(iv.plus - iv.minus)
    return float(np.sum(in_cell) + np.sum(jumps))
