"""Residual-evaluator tests: exact divergence cancellation, matched and
mismatched aperture pairs, two-component lifts with corruption controls, and
observed orders of the time-coupling detectors."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conelab.ch import CH2State, CHState
from conelab.euler_checks import (
    ch2_lift_residual,
    ch2_tendencies,
    convergence_sweep,
    euler_consistency_residual,
    fd_time_consistency,
    pressure_recover,
    tendencies,
    weighted_divergence,
)
from conelab.grid import (
    Grid1D,
    PeriodicField,
    dealias,
    dealiased_product,
    deriv,
    helmholtz,
    l2_norm,
    random_band_limited,
)

ALPHA = 0.5


def random_state(seed=0, n=256, alpha=ALPHA):
    g = Grid1D(n)
    rng = np.random.default_rng(seed)
    return CHState(random_band_limited(g, rng, max_mode=20), alpha)


def bump_state(n=256, alpha=ALPHA):
    g = Grid1D(n)
    vals = np.zeros(n)
    for j in (-2, -1, 0, 1, 2):
        vals += np.exp(-((g.x - np.pi + j * g.length) ** 2) / (2 * 0.35**2))
    u = dealias(PeriodicField(g, vals))
    return CHState(helmholtz(u, alpha), alpha)


# --- weighted divergence ------------------------------------------------------


def test_divergence_exact_zero_at_dyadic_radii():
    # For power-of-two radii every scaling in the radial and angular terms is
    # exact in floating point, so the cancellation is bitwise.
    g = Grid1D(128)
    rng = np.random.default_rng(5)
    u = random_band_limited(g, rng, max_mode=15)
    rows = weighted_divergence(u, radii=(0.5, 1.0, 2.0))
    assert rows.shape == (3, 128)
    assert np.max(np.abs(rows)) == 0.0


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_divergence_vanishes_for_any_field(seed):
    g = Grid1D(64)
    rng = np.random.default_rng(seed)
    u = random_band_limited(g, rng, max_mode=10)
    rows = weighted_divergence(u, radii=(0.7, 1.3))
    assert np.max(np.abs(rows)) < 1e-13


def test_divergence_rejects_bad_radius():
    g = Grid1D(64)
    u = PeriodicField(g, np.sin(g.x))
    with pytest.raises(ValueError):
        weighted_divergence(u, radii=(1.0, -2.0))


# --- momentum consistency -----------------------------------------------------


def test_consistency_vanishes_on_matched_pair():
    u, ut = tendencies(random_state())
    rep = euler_consistency_residual(u, ut, aperture=1.0)
    assert rep.l2 < 1e-11
    assert rep.resolution == 256


def test_consistency_matched_at_doubled_aperture():
    u, ut = tendencies(random_state(alpha=1.0))
    assert euler_consistency_residual(u, ut, aperture=2.0).l2 < 1e-11


def test_consistency_flags_mismatched_aperture():
    u, ut = tendencies(random_state())
    assert euler_consistency_residual(u, ut, aperture=2.0).l2 > 1e-2


def test_consistency_validates_aperture():
    u, ut = tendencies(random_state())
    with pytest.raises(ValueError):
        euler_consistency_residual(u, ut, aperture=0.0)
    with pytest.raises(ValueError):
        pressure_recover(u, ut, aperture=-1.0)


def test_recovered_pressure_closes_angular_equation():
    # With the residual at rounding, du/dt + 2 u u' + p' must also vanish.
    u, ut = tendencies(random_state())
    prof = pressure_recover(u, ut, aperture=1.0)
    closure = ut + 2.0 * dealiased_product(u, deriv(u)) + deriv(prof.p)
    scale = l2_norm(ut) + l2_norm(u) ** 2
    assert l2_norm(closure) / scale < 1e-11
    assert prof.aperture == 1.0


# --- two-component lift -------------------------------------------------------


def ch2_state(n=256, gravity=1.0):
    g = Grid1D(n)
    rng = np.random.default_rng(9)
    m = random_band_limited(g, rng, max_mode=15)
    rho = dealias(PeriodicField(g, 1.0 + 0.4 * np.cos(2 * g.x)))
    return CH2State(m, rho, ALPHA, gravity=gravity)


def test_ch2_lift_vanishes_on_tendencies():
    s = ch2_state()
    rep = ch2_lift_residual(*ch2_tendencies(s), alpha=ALPHA, gravity=s.gravity)
    assert rep.dx.l2 < 1e-11
    assert rep.dy.l2 < 1e-11
    assert rep.grid2d_gap is not None and rep.grid2d_gap < 1e-10


def test_ch2_lift_skips_2d_when_asked():
    s = ch2_state()
    rep = ch2_lift_residual(
        *ch2_tendencies(s), alpha=ALPHA, gravity=s.gravity, check_2d=False
    )
    assert rep.grid2d_gap is None


def test_ch2_lift_flags_wrong_gravity():
    s = ch2_state(gravity=1.0)
    rep = ch2_lift_residual(
        *ch2_tendencies(s), alpha=ALPHA, gravity=2.0, check_2d=False
    )
    assert rep.dx.l2 > 1e-3


def test_ch2_lift_flags_corrupted_density_tendency():
    s = ch2_state()
    u, rho, ut, rhot = ch2_tendencies(s)
    bad = rhot + 0.01 * PeriodicField(rho.grid, np.sin(rho.grid.x))
    rep = ch2_lift_residual(u, rho, ut, bad, alpha=ALPHA, check_2d=False)
    assert rep.dy.l2 > 1e-4


# --- sweeps and order detectors -----------------------------------------------


def test_tendency_sweep_stays_at_rounding():
    for identity in ("divergence", "consistency", "ch2_lift"):
        result = convergence_sweep(identity, resolutions=(64, 128))
        assert result.identity == identity
        assert len(result.reports) == 2
        assert len(result.orders) == 1
        for rep in result.reports:
            assert rep.l2 < 1e-9


def test_fd_time_consistency_fourth_order():
    result = convergence_sweep(
        "consistency", resolutions=(128,), dts=(4e-3, 2e-3), mode="fd"
    )
    assert result.orders[0] > 3.5


def test_fd_report_carries_discretization():
    rep = fd_time_consistency(128, 4e-3)
    assert rep.resolution == 128
    assert rep.dt == 4e-3
    assert rep.l2 < 1e-4


def test_lagged_tendency_first_order():
    result = convergence_sweep(
        "consistency", resolutions=(128,), dts=(1e-2, 5e-3), mode="lagged"
    )
    assert 0.8 < result.orders[0] < 1.2


def test_sweep_validation():
    with pytest.raises(ValueError, match="unknown identity"):
        convergence_sweep("curlicue")
    with pytest.raises(ValueError, match="dt modes"):
        convergence_sweep("divergence", dts=(1e-3,), mode="fd")
    with pytest.raises(ValueError, match="dt list"):
        convergence_sweep("consistency", mode="fd")
    with pytest.raises(ValueError, match="unknown mode"):
        convergence_sweep("consistency", mode="adjoint")
