"""Interface reconstruction: exactness, symmetry, and the interleaved
convexity property that the admissible catalog members must satisfy.
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as npst

from tvdlab.grid import GridState, total_variation
from tvdlab.limiters import make_catalog_limiter
from tvdlab.reconstruction import (
    interface_values,
    reconstructed_tv,
    uno2_interface,
)

CONVEX_MEMBERS = ("minmod", "superbee", "muscl", "lagrange", "lax_wendroff", "minmod_abs")


def lim(name, **kw):
    return make_catalog_limiter(name, **kw)


def cell_data(draw_values, n=None):
    values = np.asarray(draw_values, dtype=float)
    return GridState(values, 1.0 / values.size)


# ----------------------------------------------------------------------------
# exactness and conventions
# ----------------------------------------------------------------------------

class TestExactness:
    def test_constant_data(self):
        st_ = GridState(np.full(9, 2.5), 1.0 / 9)
        for name in CONVEX_MEMBERS:
            iv = interface_values(st_, lim(name))
            np.testing.assert_array_equal(iv.minus, st_.u)
            np.testing.assert_array_equal(iv.plus, st_.u)

    def test_linear_data_interior(self):
        # on u = x the one-sided values must meet at the interface midpoint
        # wherever the stencil does not cross the periodic wrap
        n = 16
        x = np.arange(n) / n
        st_ = GridState(x, 1.0 / n)
        for name in ("minmod", "superbee", "muscl", "lagrange"):
            iv = interface_values(st_, lim(name))
            mid = x + 0.5 / n
            sl = slice(1, n - 2)
            np.testing.assert_allclose(iv.minus[sl], mid[sl], atol=1e-15)
            np.testing.assert_allclose(iv.plus[sl], mid[sl], atol=1e-15)

    def test_upwind_collapses_to_cell_values(self):
        rng = np.random.default_rng(7)
        u = rng.normal(size=11)
        iv = interface_values(GridState(u, 1.0 / 11), lim("upwind"))
        np.testing.assert_array_equal(iv.minus, u)
        np.testing.assert_array_equal(iv.plus, np.roll(u, -1))

    def test_zero_increment_is_exact(self):
        # a flat pair in otherwise varying data: the flat interface carries
        # exactly the cell values on both sides, with no rounding residue
        u = np.array([0.0, 3.0, 3.0, -1.0, 5.0, 2.0])
        iv = interface_values(GridState(u, 1.0 / 6), lim("superbee"))
        assert iv.minus[1] == 3.0
        assert iv.plus[1] == 3.0


class TestInvariances:
    @given(
        npst.arrays(np.float64, st.integers(5, 24),
                    elements=st.floats(-10, 10, allow_nan=False)),
        st.floats(-5, 5, allow_nan=False),
    )
    @settings(max_examples=60, deadline=None)
    def test_translation(self, u, c):
        s1 = GridState(u, 1.0 / u.size)
        s2 = GridState(u + c, 1.0 / u.size)
        f = lim("muscl")
        a, b = interface_values(s1, f), interface_values(s2, f)
        np.testing.assert_allclose(b.minus, a.minus + c, atol=1e-12)
        np.testing.assert_allclose(b.plus, a.plus + c, atol=1e-12)

    @given(
        npst.arrays(np.float64, st.integers(5, 24),
                    elements=st.floats(-10, 10, allow_nan=False)),
        st.floats(min_value=-4.0, max_value=4.0, allow_nan=False).filter(
            lambda s: abs(s) > 1e-3),
    )
    @settings(max_examples=60, deadline=None)
    def test_homogeneity(self, u, scale):
        # the slope ratios are scale-free, so the correction scales linearly
        # (including negative scales, which flip both increments)
        f = lim("lagrange")
        a = interface_values(GridState(u, 1.0 / u.size), f)
        b = interface_values(GridState(scale * u, 1.0 / u.size), f)
        np.testing.assert_allclose(b.minus, scale * a.minus, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(b.plus, scale * a.plus, rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize("name", ["minmod", "superbee", "muscl", "lagrange",
                                      "van_albada", "minmod_abs"])
    def test_mirror_symmetry(self, name):
        """Reflecting the data swaps the two one-sided values exactly.

        Interface i of the reflected data sits at interface N-2-i of the
        original, with minus and plus exchanged.  This holds for every
        ratio-form limiter because reflection swaps the ratio arguments r and
        q, not because of any self-duality.
        """
        rng = np.random.default_rng(42)
        u = rng.normal(size=12)
        f = lim(name)
        n = u.size
        v = u[::-1].copy()
        iv_u = interface_values(GridState(u, 1.0 / n), f)
        iv_v = interface_values(GridState(v, 1.0 / n), f)
        for i in range(n):
            j = (n - 2 - i) % n
            assert iv_v.minus[i] == iv_u.plus[j]
            assert iv_v.plus[i] == iv_u.minus[j]


# ----------------------------------------------------------------------------
# containment and the interleaved convexity property
# ----------------------------------------------------------------------------

@st.composite
def random_state(draw, min_cells=5, max_cells=20):
    n = draw(st.integers(min_cells, max_cells))
    u = draw(npst.arrays(np.float64, n, elements=st.floats(-8, 8, allow_nan=False)))
    return GridState(u, 1.0 / n)


@given(random_state())
@settings(max_examples=80, deadline=None)
def test_interface_values_stay_between_neighbors(state):
    """Monotone catalog members keep both one-sided values inside the closed
    interval spanned by the two adjacent cell values."""
    u = state.u
    un = np.roll(u, -1)
    lo, hi = np.minimum(u, un), np.maximum(u, un)
    for name in ("minmod", "superbee", "muscl", "lagrange", "minmod_abs"):
        iv = interface_values(state, lim(name))
        eps = 1e-12 * (1.0 + np.abs(u).max())
        assert np.all(iv.minus >= lo - eps) and np.all(iv.minus <= hi + eps), name
        assert np.all(iv.plus >= lo - eps) and np.all(iv.plus <= hi + eps), name


@given(random_state(min_cells=6))
@settings(max_examples=80, deadline=None)
def test_interleaved_convexity(state):
    """Where the two cell increments around cell j are ordered, the refined
    sequence u_{j-1}, plus_{j-1/2}, u_j, minus_{j+1/2}, u_{j+1} has ordered
    increments in the same sense.
    """
    u = state.u
    n = u.size
    d = np.roll(u, -1) - u
    eps = 1e-12 * (1.0 + np.abs(u).max())
    for name in CONVEX_MEMBERS:
        iv = interface_values(state, lim(name))
        for j in range(n):
            dm, dp = d[(j - 1) % n], d[j]
            seq = np.array([
                u[(j - 1) % n],
                iv.plus[(j - 1) % n],
                u[j],
                iv.minus[j],
                u[(j + 1) % n],
            ])
            inc = np.diff(seq)
            if dm <= dp:
                assert np.all(np.diff(inc) >= -eps), (name, j, seq)
            if dm >= dp:
                assert np.all(np.diff(inc) <= eps), (name, j, seq)


def test_interleaved_convexity_hand_case():
    # convex window 0, 0, 1, 100 around j=2 with superbee: the wide jump pulls
    # the limited values toward the cell data but never breaks convexity
    u = np.array([0.0, 0.0, 1.0, 100.0, 100.0, 100.0])
    iv = interface_values(GridState(u, 1.0 / 6), lim("superbee"))
    seq = [u[1], iv.plus[1], u[2], iv.minus[2], u[3]]
    inc = np.diff(seq)
    assert np.all(np.diff(inc) >= 0.0)


# ----------------------------------------------------------------------------
# uno2
# ----------------------------------------------------------------------------

class TestUno2:
    def test_needs_five_cells(self):
        with pytest.raises(ValueError):
            GridState(np.zeros(4), 0.25)

    def test_constant(self):
        st_ = GridState(np.full(8, -1.5), 0.125)
        iv = uno2_interface(st_)
        np.testing.assert_array_equal(iv.minus, st_.u)
        np.testing.assert_array_equal(iv.plus, st_.u)

    def test_signed_parabola_nodal_values(self):
        # u_j = (j h)^2: away from the periodic wrap the one-sided value is
        # u_j + j h^2 exactly (the curvature minmod picks 2h^2 everywhere and
        # both candidate increments agree)
        n = 16
        h = 1.0 / n
        x = np.arange(n) * h
        iv = uno2_interface(GridState(x * x, h))
        expect = x * x + np.arange(n) * h * h
        sl = slice(2, n - 2)
        np.testing.assert_allclose(iv.minus[sl], expect[sl], atol=1e-15)

    def test_vee_profile_values(self):
        # hand-computed: d = (-3,-1,0,1,3,0), curvatures (-3,2,1,1,2,-3),
        # interface curvature minmod gives dd_1 = dd_2 = dd_3 = 1, so
        # minus_2 = 0 + mm(-1/2, -1/2)/2 = -1/4 and plus_2 matches by symmetry
        st_ = GridState(np.array([4.0, 1.0, 0.0, 0.0, 1.0, 4.0]), 1.0 / 6)
        iv = uno2_interface(st_)
        assert iv.minus[2] == -0.25
        assert iv.plus[2] == -0.25

    def test_mirror_symmetry(self):
        rng = np.random.default_rng(3)
        u = rng.normal(size=10)
        n = u.size
        iv_u = uno2_interface(GridState(u, 0.1))
        iv_v = uno2_interface(GridState(u[::-1].copy(), 0.1))
        for i in range(n):
            j = (n - 2 - i) % n
            assert iv_v.minus[i] == pytest.approx(iv_u.plus[j], abs=1e-14)
            assert iv_v.plus[i] == pytest.approx(iv_u.minus[j], abs=1e-14)


# ----------------------------------------------------------------------------
# reconstructed total variation
# ----------------------------------------------------------------------------

class TestReconstructedTv:
    def test_constant_is_zero(self):
        assert reconstructed_tv(GridState(np.full(7, 3.0), 1.0 / 7), lim("muscl")) == 0.0

    def test_upwind_matches_cell_tv(self):
        rng = np.random.default_rng(11)
        u = rng.normal(size=13)
        st_ = GridState(u, 1.0 / 13)
        assert reconstructed_tv(st_, lim("upwind")) == pytest.approx(
            total_variation(u), abs=1e-13)

    def test_ramp_excess_is_two_h(self):
        # the step-with-intermediate-values data: reconstruction with the
        # muscl limiter adds exactly 2h of variation on top of the cell TV
        for h in (1.0, 0.1):
            u = h * np.array([-3.0, -3.0, -3.0, 0.0, 1.0, 4.0, 4.0, 4.0])
            st_ = GridState(u, 1.0 / 8)
            excess = reconstructed_tv(st_, lim("muscl")) - total_variation(u)
            assert excess == pytest.approx(2.0 * h, abs=1e-12)

    def test_ramp_excess_padding_invariant(self):
        # widening the flat shelves must not change the excess
        h = 0.1
        core = [-3.0, -3.0, -3.0, 0.0, 1.0, 4.0, 4.0, 4.0]
        for pad in (1, 3):
            u = h * np.array([-3.0] * pad + core + [4.0] * pad)
            st_ = GridState(u, 1.0 / u.size)
            excess = reconstructed_tv(st_, lim("muscl")) - total_variation(u)
            assert excess == pytest.approx(2.0 * h, abs=1e-12)

    @given(random_state())
    @settings(max_examples=60, deadline=None)
    def test_never_below_cell_tv(self, state):
        # the reconstruction refines the cell sequence, so its variation can
        # only grow
        tv = total_variation(state.u)
        for name in ("minmod", "muscl", "lagrange"):
            assert reconstructed_tv(state, lim(name)) >= tv - 1e-10 * (1.0 + tv)
