"""Residual evaluators for the lifted incompressible dynamics.

The lifted field (v_r, v_theta) = (r u'/2, r u) is checked against the
incompressible Euler equations on the cone in three independent ways.

Weighted divergence.  With density weight rho(r) = 1/r^4 the mass flux is
divergence-free for every circle field u:

    (1/r) d_r(r rho v_r) + (1/r) d_theta(rho v_theta) = 0,

an exact cancellation between the analytic radial derivative of the power
law and the spectral theta derivative.

Momentum consistency.  Eliminating the pressure P = r^2 p(theta) from the
two momentum equations of the lifted flow leaves a single scalar residual.
For a cone of aperture parameter a (metric r^2 dtheta^2 + a^2 dr^2):

    R = 1/2 d_theta[ (a^2/2) d_theta(du/dt) + (a^2/4) (u')^2
                     + (a^2/2) u u'' - u^2 ] - (du/dt + 2 u u'),

which vanishes exactly on tendencies of the wave equation with smoothing
scale alpha = a/2.  The default aperture 1 therefore pairs with alpha = 1/2,
and aperture 2 with alpha = 1; mismatched pairs are the negative controls.

Two-component lift.  The pair w = (u, sqrt(g) rho) on the flat 2-torus with
covector n dx + sqrt(g) rho dy satisfies the momentum-density transport law
of the H(div) geometry; its two components reduce to

    dn/dt + u n' + 2 n u' + g rho rho'   and   drho/dt + (rho u)',

and the same expressions re-evaluated with genuine 2D transforms on
y-constant data must agree with the 1D reduction to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import (
    Field2D,
    Grid1D,
    Grid2D,
    PeriodicField,
    dealias,
    dealiased_product,
    dealiased_product2,
    deriv,
    deriv2,
    helmholtz,
    helmholtz_inv,
    l2_norm,
    random_band_limited,
)
from . import ch as chmod
from .ch import CH2State, CHState, ch2_rhs, ch_rhs, evolve
from .cone import lift_components

__all__ = [
    "ResidualReport",
    "PressureProfile",
    "weighted_divergence",
    "pressure_recover",
    "euler_consistency_residual",
    "ch2_lift_residual",
    "CH2LiftReport",
    "tendencies",
    "ch2_tendencies",
    "fd_time_consistency",
    "convergence_sweep",
    "SweepResult",
]

DEFAULT_RADII = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class ResidualReport:
    """Residual norms with the discretization they were measured at."""

    l2: float
    linf: float
    resolution: int
    dt: float | None = None
    label: str = ""


@dataclass(frozen=True)
class PressureProfile:
    """Angular pressure profile p(theta); the cone pressure is r^2 p."""

    p: PeriodicField
    aperture: float


def weighted_divergence(u: PeriodicField, radii=DEFAULT_RADII) -> np.ndarray:
    """Samples of the weighted divergence, one row per radius.

    Row r holds (1/r) d_r(r rho v_r) + (1/r) d_theta(rho v_theta) with
    rho = 1/r^4.  The radial term is computed from the closed form
    r rho v_r = u'/(2 r^2), whose r-derivative is -u'/r^3.
    """
    rows = []
    for r in radii:
        if not r > 0:
            raise ValueError("radii must be positive")
        vr, vt = lift_components(u, r)
        ux = 2.0 * vr / r  # recover u' samples used in the lift
        radial = -ux / r**4
        angular = deriv(PeriodicField(u.grid, vt / r**4)).values / r
        rows.append(radial + angular)
    return np.array(rows)


def _consistency_bracket(
    u: PeriodicField, ut: PeriodicField, aperture: float
) -> PeriodicField:
    """(a^2/2) d_theta ut + (a^2/4) (u')^2 + (a^2/2) u u'' - u^2."""
    a2 = aperture**2
    ux = deriv(u)
    return (
        0.5 * a2 * deriv(ut)
        + 0.25 * a2 * dealiased_product(ux, ux)
        + 0.5 * a2 * dealiased_product(u, deriv(u, 2))
        - dealiased_product(u, u)
    )


def pressure_recover(
    u: PeriodicField, ut: PeriodicField, aperture: float = 1.0
) -> PressureProfile:
    """Angular pressure p = -bracket/2 from the radial momentum equation."""
    if not aperture > 0:
        raise ValueError("aperture must be positive")
    return PressureProfile(-0.5 * _consistency_bracket(u, ut, aperture), aperture)


def euler_consistency_residual(
    u: PeriodicField, ut: PeriodicField, aperture: float = 1.0
) -> ResidualReport:
    """Scalar residual left after eliminating the pressure.

    Relative norms are taken against the scale |ut| + |u|^2 so the report
    stays meaningful near u = 0; the sup norm is reported absolutely.
    """
    if not aperture > 0:
        raise ValueError("aperture must be positive")
    res = 0.5 * deriv(_consistency_bracket(u, ut, aperture)) - (
        ut + 2.0 * dealiased_product(u, deriv(u))
    )
    scale = l2_norm(ut) + l2_norm(u) ** 2 + 1e-300
    return ResidualReport(
        l2=l2_norm(res) / scale,
        linf=float(np.max(np.abs(res.values))),
        resolution=u.grid.n,
        label=f"consistency(aperture={aperture:g})",
    )


def tendencies(s: CHState) -> tuple[PeriodicField, PeriodicField]:
    """(u, du/dt) of a one-component state."""
    u = chmod.velocity(s)
    ut = helmholtz_inv(ch_rhs(s), s.alpha)
    return u, ut


def ch2_tendencies(
    s: CH2State,
) -> tuple[PeriodicField, PeriodicField, PeriodicField, PeriodicField]:
    """(u, rho, du/dt, drho/dt) of a two-component state."""
    u = chmod.velocity(s)
    dm, drho = ch2_rhs(s)
    return u, s.rho, helmholtz_inv(dm, s.alpha), drho


@dataclass(frozen=True)
class CH2LiftReport:
    dx: ResidualReport
    dy: ResidualReport
    grid2d_gap: float | None


def _ch2_residuals_1d(u, rho, ut, rhot, alpha, gravity):
    n = helmholtz(u, alpha)
    nt = helmholtz(ut, alpha)
    res_x = (
        nt
        + dealiased_product(u, deriv(n))
        + 2.0 * dealiased_product(n, deriv(u))
        + gravity * dealiased_product(rho, deriv(rho))
    )
    res_y = rhot + deriv(dealiased_product(rho, u))
    return n, res_x, res_y


def _ch2_residuals_2d(u, rho, ut, rhot, alpha, gravity, ny=8):
    """Same covector transport law, evaluated with genuine 2D transforms.

    Fields are extended constantly in y; w = (u, sqrt(g) rho) and the
    covector is n dx + sqrt(g) rho dy.  Every term of
    d_t + Lie_w + div(w) applied to the covector is computed, including the
    y-derivatives that vanish on this data.
    """
    g1 = u.grid
    g2 = Grid2D(g1.n, ny, g1.length, 2.0 * np.pi)
    rt = np.sqrt(gravity)

    def ext(f: PeriodicField) -> Field2D:
        return Field2D(g2, np.repeat(f.values[:, None], ny, axis=1))

    w1, w2 = ext(u), ext(rt * rho)
    n1 = ext(helmholtz(u, alpha))
    n2 = ext(rt * rho)
    n1t = ext(helmholtz(ut, alpha))
    n2t = ext(rt * rhot)

    def mul(a, b):
        return dealiased_product2(a, b).values

    div_w = deriv2(w1, 0).values + deriv2(w2, 1).values
    div_w = Field2D(g2, div_w)
    res_x = (
        n1t.values
        + mul(w1, deriv2(n1, 0))
        + mul(w2, deriv2(n1, 1))
        + mul(n1, deriv2(w1, 0))
        + mul(n2, deriv2(w2, 0))
        + mul(div_w, n1)
    )
    res_y = (
        n2t.values
        + mul(w1, deriv2(n2, 0))
        + mul(w2, deriv2(n2, 1))
        + mul(n1, deriv2(w1, 1))
        + mul(n2, deriv2(w2, 1))
        + mul(div_w, n2)
    )
    return res_x, res_y, rt


def ch2_lift_residual(
    u: PeriodicField,
    rho: PeriodicField,
    ut: PeriodicField,
    rhot: PeriodicField,
    alpha: float = 0.5,
    gravity: float = 1.0,
    check_2d: bool = True,
) -> CH2LiftReport:
    """Both components of the lifted two-component transport law.

    Vanishes to rounding on tendencies of the two-component system with the
    same alpha and gravity.  With ``check_2d`` the dx/dy expressions are also
    evaluated on a 2D grid with y-constant data and the worst gap against
    the 1D reduction is reported.
    """
    n, res_x, res_y = _ch2_residuals_1d(u, rho, ut, rhot, alpha, gravity)
    nt = helmholtz(ut, alpha)
    scale_x = l2_norm(nt) + l2_norm(u) * l2_norm(n) + gravity * l2_norm(rho) ** 2 + 1e-300
    scale_y = l2_norm(rhot) + l2_norm(u) * l2_norm(rho) + 1e-300
    rep_x = ResidualReport(
        l2=l2_norm(res_x) / scale_x,
        linf=float(np.max(np.abs(res_x.values))),
        resolution=u.grid.n,
        label="lift-dx",
    )
    rep_y = ResidualReport(
        l2=l2_norm(res_y) / scale_y,
        linf=float(np.max(np.abs(res_y.values))),
        resolution=u.grid.n,
        label="lift-dy",
    )
    gap = None
    if check_2d:
        rx2, ry2, rt = _ch2_residuals_2d(u, rho, ut, rhot, alpha, gravity)
        gx = float(np.max(np.abs(rx2 - res_x.values[:, None])))
        gy = float(np.max(np.abs(ry2 - rt * res_y.values[:, None])))
        gap = max(gx, gy)
    return CH2LiftReport(rep_x, rep_y, gap)


# --- sweeps -----------------------------------------------------------------


def _bump_state(n: int, alpha: float) -> CHState:
    """Periodized Gaussian bump; rich spectrum for truncation-decay sweeps."""
    grid = Grid1D(n)
    x = grid.x
    vals = np.zeros(n)
    for j in (-2, -1, 0, 1, 2):
        vals += np.exp(-((x - np.pi + j * grid.length) ** 2) / (2 * 0.35**2))
    u = dealias(PeriodicField(grid, vals))
    return CHState(helmholtz(u, alpha), alpha=alpha)


def fd_time_consistency(
    n: int, dt: float, T: float = 1.0, alpha: float = 0.5, aperture: float = 1.0
) -> ResidualReport:
    """End-to-end consistency with du/dt from finite differences in time.

    Runs the wave equation from the three-mode sine start, reconstructs the
    tendency at an interior time with the five-point fourth-order stencil,
    and reports the consistency residual.  Everything in the chain (solver
    trajectory and stencil) carries O(dt^4) error, so halving dt must shrink
    the residual sixteenfold until rounding noise takes over.
    """
    grid = Grid1D(n)
    u0 = grid.from_function(lambda x: np.sin(3 * x))
    s = CHState(dealias(helmholtz(u0, alpha)), alpha=alpha)
    _, hist = evolve(s, T, dt)
    mid = len(hist.u) // 2
    h = hist.dt
    stencil = (
        -hist.u[mid + 2] + 8.0 * hist.u[mid + 1] - 8.0 * hist.u[mid - 1] + hist.u[mid - 2]
    ) / (12.0 * h)
    u = PeriodicField(grid, hist.u[mid])
    ut_fd = PeriodicField(grid, stencil)
    rep = euler_consistency_residual(u, ut_fd, aperture)
    return ResidualReport(rep.l2, rep.linf, n, dt, "consistency-fd")


IDENTITIES = ("divergence", "consistency", "ch2_lift", "curl", "vorticity_advect")


@dataclass(frozen=True)
class SweepResult:
    identity: str
    reports: list[ResidualReport]
    orders: list[float]


def _tendency_residual(identity: str, n: int, alpha: float) -> ResidualReport:
    from .cone import advected_vorticity_check, curl_identity_residual

    grid = Grid1D(n)
    if identity == "divergence":
        rng = np.random.default_rng(108)
        u = random_band_limited(grid, rng, max_mode=min(10, n // 4))
        rows = weighted_divergence(u)
        return ResidualReport(
            l2=float(np.sqrt(np.mean(rows**2))),
            linf=float(np.max(np.abs(rows))),
            resolution=n,
            label="divergence",
        )
    if identity == "curl":
        u = grid.from_function(lambda x: np.sin(3 * x))
        r = curl_identity_residual(u)
        return ResidualReport(r, r, n, label="curl")
    if identity == "consistency":
        u, ut = tendencies(_bump_state(n, alpha))
        return euler_consistency_residual(u, ut, aperture=2.0 * alpha)
    if identity == "vorticity_advect":
        u, ut = tendencies(_bump_state(n, alpha))
        r = advected_vorticity_check(u, ut, alpha)
        return ResidualReport(r, r, n, label="vorticity_advect")
    if identity == "ch2_lift":
        grid = Grid1D(n)
        u0 = _bump_state(n, alpha)
        rho0 = dealias(grid.from_function(lambda x: 1.0 + 0.5 * np.cos(x)))
        s = CH2State(u0.m, rho0, alpha=alpha, gravity=1.0)
        rep = ch2_lift_residual(*ch2_tendencies(s), alpha=alpha, check_2d=False)
        return ResidualReport(
            max(rep.dx.l2, rep.dy.l2),
            max(rep.dx.linf, rep.dy.linf),
            n,
            label="ch2_lift",
        )
    raise ValueError(f"unknown identity {identity!r}; choose from {IDENTITIES}")


def _lagged_residual(n: int, dt: float, alpha: float) -> ResidualReport:
    """Consistency with the tendency lagged by one step: an O(dt) detector."""
    from .ch import step

    s0 = _bump_state(n, alpha)
    s1 = step(s0, dt)
    u1 = chmod.velocity(s1)
    ut0 = helmholtz_inv(ch_rhs(s0), alpha)
    rep = euler_consistency_residual(u1, ut0, aperture=2.0 * alpha)
    return ResidualReport(rep.l2, rep.linf, n, dt, "consistency-lagged")


def convergence_sweep(
    identity: str,
    resolutions=(64, 128, 256),
    dts=None,
    alpha: float = 0.5,
    mode: str = "tendency",
) -> SweepResult:
    """Residual tables over resolution or step size, with observed orders.

    ``mode`` selects what varies: "tendency" sweeps n with exact tendencies,
    "fd" and "lagged" sweep dt at fixed n (the first should show fourth
    order, the second first order; both are order detectors for the time
    coupling).  Orders are log2 ratios of successive residuals and are only
    meaningful for the dt modes and halved steps.
    """
    if identity not in IDENTITIES:
        raise ValueError(f"unknown identity {identity!r}; choose from {IDENTITIES}")
    reports: list[ResidualReport] = []
    if mode == "tendency":
        for n in resolutions:
            reports.append(_tendency_residual(identity, n, alpha))
    elif mode in ("fd", "lagged"):
        if identity != "consistency":
            raise ValueError("dt modes apply to the consistency identity")
        if not dts:
            raise ValueError("dt list required for dt modes")
        n = resolutions[-1] if np.iterable(resolutions) else int(resolutions)
        for dt in dts:
            if mode == "fd":
                reports.append(fd_time_consistency(n, dt, alpha=alpha))
            else:
                reports.append(_lagged_residual(n, dt, alpha))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    orders = []
    for a, b in zip(reports, reports[1:]):
        if a.l2 > 0 and b.l2 > 0:
            orders.append(float(np.log2(a.l2 / b.l2)))
        else:
            orders.append(np.inf)
    return SweepResult(identity, reports, orders)
