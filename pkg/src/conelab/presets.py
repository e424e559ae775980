"""Named initial conditions.

The registry is closed: every runnable experiment starts from one of these,
so runs are reproducible from the preset name plus its parameters alone.
``sin{k}`` is parametric in the wavenumber; the peakon presets return ODE
ensembles, everything else returns grid states.
"""

from __future__ import annotations

import re

import numpy as np

from .ch import CH2State, CHState
from .grid import Grid1D, PeriodicField, helmholtz
from .peakons import GreenKernel, PeakonEnsemble, collision_scenario, peakon_field

__all__ = [
    "PRESET_NAMES",
    "preset_ic",
    "preset_kind",
    "periodized_gaussian",
    "peakon_grid_state",
]

_SIN = re.compile(r"^sin(\d+)$")

PRESET_NAMES = ("sin{k}", "gaussian-bump", "two-peakon", "antisymmetric-collision", "ch2-stratified")


def preset_kind(name: str) -> str:
    """'grid', 'grid2' or 'peakon', or raise for an unknown name."""
    if _SIN.match(name) or name == "gaussian-bump":
        return "grid"
    if name == "ch2-stratified":
        return "grid2"
    if name in ("two-peakon", "antisymmetric-collision"):
        return "peakon"
    raise ValueError(f"unknown preset {name!r}; registered: {', '.join(PRESET_NAMES)}")


def periodized_gaussian(grid: Grid1D, center: float, width: float, amplitude: float) -> PeriodicField:
    """Gaussian bump wrapped around the circle; 7 images suffice well below
    roundoff for widths up to about a quarter period."""
    x = grid.x
    u = np.zeros(grid.n)
    for shift in range(-3, 4):
        u += np.exp(-0.5 * ((x - center + shift * grid.length) / width) ** 2)
    return PeriodicField(grid, amplitude * u)


def peakon_grid_state(e: PeakonEnsemble, grid: Grid1D) -> CHState:
    """Sample the ensemble velocity on the grid and take its momentum.

    The sampled field is continuous but kinked, so the spectral momentum is
    only an approximation of the delta train; refine the grid to converge.
    """
    if e.kernel.circumference is not None and not np.isclose(
        e.kernel.circumference, grid.length
    ):
        raise ValueError("kernel circumference must match the grid length")
    u = PeriodicField(grid, peakon_field(e, grid.x))
    return CHState(helmholtz(u, e.kernel.alpha), alpha=e.kernel.alpha)


def preset_ic(
    name: str,
    grid: Grid1D | None = None,
    alpha: float = 0.5,
    gravity: float = 1.0,
    **params,
):
    """Build the named initial state.

    Grid presets need ``grid`` and return CHState/CH2State with the given
    ``alpha`` (and ``gravity`` for the two-component one); peakon presets
    return a PeakonEnsemble on the circle of length ``grid.length`` (2*pi
    when no grid is supplied).  Extra keyword parameters specialize a
    preset and unknown ones are rejected.
    """
    kind = preset_kind(name)
    if kind in ("grid", "grid2"):
        if grid is None:
            raise ValueError(f"preset {name!r} needs a grid")
        m = _SIN.match(name)
        if m:
            k = int(m.group(1))
            if k == 0:
                raise ValueError("sin preset needs wavenumber >= 1")
            amplitude = float(params.pop("amplitude", 1.0))
            _reject_extras(name, params)
            u = grid.from_function(lambda x: amplitude * np.sin(k * x))
            return CHState(helmholtz(u, alpha), alpha=alpha)
        if name == "gaussian-bump":
            center = float(params.pop("center", 0.5 * grid.length))
            width = float(params.pop("width", 0.35))
            amplitude = float(params.pop("amplitude", 1.0))
            _reject_extras(name, params)
            if width <= 0:
                raise ValueError("width must be positive")
            u = periodized_gaussian(grid, center, width, amplitude)
            return CHState(helmholtz(u, alpha), alpha=alpha)
        # stratified two-component state; the density stays bounded away
        # from zero so the pressure coupling is everywhere well defined
        _reject_extras(name, params)
        u = grid.from_function(np.sin)
        rho = grid.from_function(lambda x: 1.0 + 0.5 * np.cos(x))
        if np.min(rho.values) <= 0:
            raise ValueError("stratified preset requires positive density")
        return CH2State(helmholtz(u, alpha), rho, alpha=alpha, gravity=gravity)

    length = grid.length if grid is not None else 2.0 * np.pi
    kernel = GreenKernel(alpha=alpha, circumference=length)
    if name == "two-peakon":
        q = np.asarray(params.pop("q", (2.0, 4.5)), dtype=float)
        p = np.asarray(params.pop("p", (1.5, 1.0)), dtype=float)
        _reject_extras(name, params)
        return PeakonEnsemble(q, p, kernel)
    p0 = float(params.pop("p0", 1.0))
    q0 = float(params.pop("q0", 1.0))
    _reject_extras(name, params)
    return collision_scenario(p0, q0, kernel)


def _reject_extras(name: str, params: dict) -> None:
    if params:
        raise ValueError(f"preset {name!r} got unknown parameters {sorted(params)}")
