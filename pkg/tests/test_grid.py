"""Spectral substrate: differentiation, inversion, interpolation, dealiasing."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conelab.grid import (
    Field2D,
    Grid1D,
    Grid2D,
    PeriodicField,
    dealias,
    dealiased_product,
    deriv,
    deriv2,
    helmholtz,
    helmholtz_inv,
    integrate,
    interp,
    l2_norm,
    random_band_limited,
)


@pytest.fixture
def grid():
    return Grid1D(64)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid1D(0)
    with pytest.raises(ValueError):
        Grid1D(96)  # not a power of two
    with pytest.raises(ValueError):
        Grid1D(64, length=-1.0)


def test_field_rejects_nan(grid):
    vals = np.zeros(grid.n)
    vals[3] = np.nan
    with pytest.raises(ValueError):
        PeriodicField(grid, vals)


def test_field_rejects_wrong_shape(grid):
    with pytest.raises(ValueError):
        PeriodicField(grid, np.zeros(grid.n + 1))


def test_deriv_exact_on_trig(grid):
    # band-limited data differentiates exactly, not just to truncation
    f = grid.from_function(lambda x: np.sin(5 * x) + 0.3 * np.cos(11 * x))
    fx = grid.from_function(lambda x: 5 * np.cos(5 * x) - 3.3 * np.sin(11 * x))
    assert np.allclose(deriv(f).values, fx.values, atol=1e-12)


def test_deriv_orders(grid):
    f = grid.from_function(lambda x: np.cos(4 * x))
    d2 = deriv(f, order=2)
    d3 = deriv(f, order=3)
    assert np.allclose(d2.values, -16.0 * f.values, atol=1e-11)
    assert np.allclose(d3.values, 64.0 * grid.from_function(lambda x: np.sin(4 * x)).values, atol=1e-10)
    with pytest.raises(ValueError):
        deriv(f, order=4)


def test_helmholtz_roundtrip(grid):
    f = grid.from_function(lambda x: np.sin(3 * x) + np.cos(7 * x))
    for alpha in (0.5, 1.0, 0.25):
        back = helmholtz_inv(helmholtz(f, alpha), alpha)
        assert np.allclose(back.values, f.values, atol=1e-13)


def test_helmholtz_matches_definition(grid):
    f = grid.from_function(lambda x: np.sin(6 * x))
    m = helmholtz(f, 0.5)
    expected = f.values - 0.25 * deriv(f, order=2).values
    assert np.allclose(m.values, expected, atol=1e-12)


def test_interp_reproduces_grid_values(grid):
    f = grid.from_function(lambda x: np.sin(2 * x) + 0.1 * np.cos(9 * x))
    assert np.allclose(interp(f, grid.x), f.values, atol=1e-12)


def test_interp_off_grid_closed_form(grid):
    f = grid.from_function(lambda x: np.sin(2 * x))
    pts = np.array([0.123, 1.9, 4.56, 6.0])
    assert np.allclose(interp(f, pts), np.sin(2 * pts), atol=1e-12)


def test_integrate_constant(grid):
    c = grid.constant(3.0)
    assert np.isclose(integrate(c), 3.0 * grid.length)


def test_integrate_kills_derivatives(grid):
    f = grid.from_function(lambda x: np.exp(np.sin(x)))
    assert abs(integrate(deriv(f))) < 1e-12


def test_dealias_removes_high_modes():
    g = Grid1D(32)
    f = g.from_function(lambda x: np.cos(15 * x))  # beyond 32//3 = 10
    assert l2_norm(dealias(f)) < 1e-13


def test_dealiased_product_exact_for_low_modes():
    # when the true product fits under the cutoff the filtered grid product
    # is the true product, which is what makes residual identities cancel
    g = Grid1D(64)
    a = g.from_function(lambda x: np.sin(3 * x))
    b = g.from_function(lambda x: np.cos(5 * x))
    true = g.from_function(lambda x: 0.5 * (np.sin(8 * x) + np.sin(-2 * x)))
    assert np.allclose(dealiased_product(a, b).values, true.values, atol=1e-13)


def test_product_leibniz_under_filter():
    g = Grid1D(128)
    a = g.from_function(lambda x: np.sin(4 * x))
    b = g.from_function(lambda x: np.cos(9 * x))
    left = deriv(dealiased_product(a, b))
    right = dealiased_product(deriv(a), b) + dealiased_product(a, deriv(b))
    assert np.max(np.abs(left.values - dealias(right).values)) < 1e-11


def test_field_scalar_algebra(grid):
    f = grid.from_function(np.sin)
    h = 2.0 * f - f
    assert np.allclose(h.values, f.values)
    with pytest.raises(TypeError):
        f * f  # pointwise products must go through the dealiased path


def test_random_band_limited_spectrum(grid):
    rng = np.random.default_rng(0)
    u = random_band_limited(grid, rng, max_mode=10)
    spec = np.abs(np.fft.rfft(u.values))
    assert spec[11:].max() < 1e-12 * max(spec.max(), 1.0)


@settings(max_examples=30, deadline=None)
@given(k=st.integers(min_value=1, max_value=20), c=st.floats(-3, 3, allow_nan=False))
def test_deriv_linearity(k, c):
    g = Grid1D(64)
    f1 = g.from_function(lambda x: np.sin(k * x))
    f2 = g.from_function(lambda x: np.cos(2 * x))
    left = deriv(f1 * c + f2)
    right = deriv(f1) * c + deriv(f2)
    assert np.allclose(left.values, right.values, atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**31))
def test_parseval_for_random_fields(seed):
    g = Grid1D(128)
    u = random_band_limited(g, np.random.default_rng(seed))
    quad = integrate(dealiased_product(u, u))
    spec = np.fft.rfft(u.values) / g.n
    weights = np.full(spec.size, 2.0)
    weights[0] = 1.0
    if g.n % 2 == 0:
        weights[-1] = 1.0
    assert np.isclose(quad, g.length * float(weights @ (np.abs(spec) ** 2)), rtol=1e-10, atol=1e-12)


def test_2d_grid_derivatives():
    g = Grid2D(32, 16)
    x = g.lx * np.arange(g.nx) / g.nx
    y = g.ly * np.arange(g.ny) / g.ny
    f = Field2D(g, np.sin(3 * x[:, None]) * np.cos(2 * y[None, :]))
    fx = deriv2(f, axis=0)
    fy = deriv2(f, axis=1)
    assert np.allclose(fx.values, 3 * np.cos(3 * x[:, None]) * np.cos(2 * y[None, :]), atol=1e-11)
    assert np.allclose(fy.values, -2 * np.sin(3 * x[:, None]) * np.sin(2 * y[None, :]), atol=1e-11)
