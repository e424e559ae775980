"""Peaked shallow-water dynamics in momentum form, plus Lagrangian flow maps.

The one-component equation evolves the momentum density m = u - alpha^2 u_xx:

    dm/dt = -(u m_x + 2 m u_x),

and the two-component extension couples a transported density rho:

    dm/dt   = -(u m_x + 2 m u_x) - g rho rho_x,
    drho/dt = -(rho u)_x.

Both conserve E = 1/2 int u^2 + alpha^2 u_x^2 (+ g rho^2) dx along with the
means of m and rho; the conservation tests lean on the fact that every
nonlinear term goes through the shared dealiased product, under which the
discrete integration-by-parts identities hold exactly.

Time stepping is classical fixed-step RK4 with a CFL guard.  Flow maps are
integrated against a time-indexed velocity (grid history with cubic Hermite
reconstruction, or any object with the same two-method interface), carrying
the label-wise Jacobian d_theta(phi) alongside the displacement:

    d/dt phi = u(t, phi),      d/dt d_theta(phi) = u_x(t, phi) d_theta(phi).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .grid import (
    Grid1D,
    PeriodicField,
    dealiased_product,
    deriv,
    helmholtz_inv,
    integrate,
    interp,
)

__all__ = [
    "CHState",
    "CH2State",
    "FlowMap",
    "BlowUpError",
    "velocity",
    "ch_rhs",
    "ch2_rhs",
    "cfl_limit",
    "step",
    "energy",
    "casimirs",
    "evolve",
    "VelocityHistory",
    "flow_identity",
    "flow_advance",
    "blowup_monitor",
]


class BlowUpError(RuntimeError):
    """Raised when a run leaves the resolvable regime.

    Carries the last valid state (or flow map) so callers can inspect how far
    the integration got.
    """

    def __init__(self, message: str, last=None, t: float | None = None):
        super().__init__(message)
        self.last = last
        self.t = t


@dataclass(frozen=True)
class CHState:
    """Momentum density m with its smoothing scale alpha and clock t."""

    m: PeriodicField
    alpha: float = 0.5
    t: float = 0.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class CH2State:
    """Two-component state (m, rho) with coupling strength ``gravity``."""

    m: PeriodicField
    rho: PeriodicField
    alpha: float = 0.5
    gravity: float = 1.0
    t: float = 0.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not np.isfinite(self.gravity) or self.gravity < 0:
            raise ValueError(f"gravity must be nonnegative, got {self.gravity}")
        self.m._same_grid(self.rho)


def velocity(s: CHState | CH2State) -> PeriodicField:
    """Recover u from the momentum density."""
    return helmholtz_inv(s.m, s.alpha)


def ch_rhs(s: CHState) -> PeriodicField:
    u = velocity(s)
    return -(dealiased_product(u, deriv(s.m)) + 2.0 * dealiased_product(s.m, deriv(u)))


def ch2_rhs(s: CH2State) -> tuple[PeriodicField, PeriodicField]:
    u = velocity(s)
    dm = -(
        dealiased_product(u, deriv(s.m))
        + 2.0 * dealiased_product(s.m, deriv(u))
        + s.gravity * dealiased_product(s.rho, deriv(s.rho))
    )
    drho = -deriv(dealiased_product(s.rho, u))
    return dm, drho


def cfl_limit(s: CHState | CH2State) -> float:
    """Largest admissible step, 0.5 dx / max|u|."""
    umax = float(np.max(np.abs(velocity(s).values)))
    if umax == 0.0:
        return np.inf
    return 0.5 * s.m.grid.dx / umax


def _check_dt(s, dt: float) -> None:
    if not (np.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be positive, got {dt}")
    limit = cfl_limit(s)
    if dt > limit:
        raise ValueError(f"dt={dt:g} exceeds the CFL bound {limit:g}")


def step(s: CHState | CH2State, dt: float):
    """One RK4 step; raises BlowUpError if the state leaves the finite range."""
    _check_dt(s, dt)
    try:
        if isinstance(s, CH2State):
            return _step_ch2(s, dt)
        return _step_ch(s, dt)
    except ValueError as err:
        # non-finite values surface as construction errors inside the stages
        raise BlowUpError(f"integration blew up at t={s.t:g}: {err}", last=s, t=s.t) from err


def _step_ch(s: CHState, dt: float) -> CHState:
    k1 = ch_rhs(s)
    k2 = ch_rhs(replace(s, m=s.m + 0.5 * dt * k1))
    k3 = ch_rhs(replace(s, m=s.m + 0.5 * dt * k2))
    k4 = ch_rhs(replace(s, m=s.m + dt * k3))
    m = s.m + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return replace(s, m=m, t=s.t + dt)


def _step_ch2(s: CH2State, dt: float) -> CH2State:
    def shifted(dm, drho, w):
        return replace(s, m=s.m + w * dm, rho=s.rho + w * drho)

    k1m, k1r = ch2_rhs(s)
    k2m, k2r = ch2_rhs(shifted(k1m, k1r, 0.5 * dt))
    k3m, k3r = ch2_rhs(shifted(k2m, k2r, 0.5 * dt))
    k4m, k4r = ch2_rhs(shifted(k3m, k3r, dt))
    m = s.m + (dt / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
    rho = s.rho + (dt / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
    return replace(s, m=m, rho=rho, t=s.t + dt)


def energy(s: CHState | CH2State) -> float:
    """E = 1/2 int u^2 + alpha^2 u_x^2 (+ gravity rho^2) dx."""
    u = velocity(s)
    ux = deriv(u)
    total = integrate(dealiased_product(u, u)) + s.alpha**2 * integrate(
        dealiased_product(ux, ux)
    )
    if isinstance(s, CH2State):
        total += s.gravity * integrate(dealiased_product(s.rho, s.rho))
    return 0.5 * total


def casimirs(s: CHState | CH2State) -> dict[str, float]:
    """Linear conserved quantities: the means of m (and rho)."""
    out = {"int_m": integrate(s.m)}
    if isinstance(s, CH2State):
        out["int_rho"] = integrate(s.rho)
    return out


# --- velocity histories and flow maps ---------------------------------------


@dataclass
class VelocityHistory:
    """Velocity snapshots (u, du/dt) on a uniform time ladder.

    Between snapshots the field is reconstructed by cubic Hermite
    interpolation, which keeps the time accuracy at the integrator's order;
    spatial off-grid evaluation goes through the trigonometric interpolant.
    """

    grid: Grid1D
    t0: float
    dt: float
    u: list[np.ndarray]
    ut: list[np.ndarray]

    @property
    def t1(self) -> float:
        return self.t0 + (len(self.u) - 1) * self.dt

    def _blend(self, t: float) -> np.ndarray:
        if not self.u:
            raise ValueError("empty velocity history")
        s = (t - self.t0) / self.dt
        i = int(np.clip(np.floor(s), 0, len(self.u) - 2))
        tau = s - i
        h00 = (1.0 + 2.0 * tau) * (1.0 - tau) ** 2
        h10 = tau * (1.0 - tau) ** 2
        h01 = tau**2 * (3.0 - 2.0 * tau)
        h11 = tau**2 * (tau - 1.0)
        return (
            h00 * self.u[i]
            + h01 * self.u[i + 1]
            + self.dt * (h10 * self.ut[i] + h11 * self.ut[i + 1])
        )

    def field(self, t: float) -> PeriodicField:
        return PeriodicField(self.grid, self._blend(t))

    def velocity(self, t: float, x: np.ndarray) -> np.ndarray:
        return interp(self.field(t), x)

    def velocity_x(self, t: float, x: np.ndarray) -> np.ndarray:
        return interp(deriv(self.field(t)), x)


def evolve(
    s: CHState | CH2State,
    T: float,
    dt: float,
    sample_every: int = 1,
    observer=None,
) -> tuple[CHState | CH2State, VelocityHistory]:
    """Integrate to time t + T, recording the velocity history every step.

    ``observer(state)`` runs on the initial state and then after every
    ``sample_every`` steps; it is how runners collect time series without the
    integrator growing a reporting vocabulary.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    nsteps = max(1, round(T / dt))
    h = T / nsteps
    us, uts = [], []

    def record(state):
        us.append(velocity(state).values)
        rhs = ch2_rhs(state)[0] if isinstance(state, CH2State) else ch_rhs(state)
        uts.append(helmholtz_inv(rhs, state.alpha).values)

    record(s)
    if observer is not None:
        observer(s)
    cur = s
    for i in range(nsteps):
        cur = step(cur, h)
        record(cur)
        if observer is not None and (i + 1) % sample_every == 0:
            observer(cur)
    history = VelocityHistory(s.m.grid, s.t, h, us, uts)
    return cur, history


@dataclass(frozen=True)
class FlowMap:
    """Lagrangian map of the circle, stored as displacement and Jacobian.

    ``disp`` holds phi - id at the label points (periodic by construction, so
    phi itself satisfies phi(x + L) = phi(x) + L), and ``dphi`` holds the
    label-wise Jacobian d_theta(phi).
    """

    disp: PeriodicField
    dphi: PeriodicField

    def __post_init__(self) -> None:
        self.disp._same_grid(self.dphi)
        if np.any(self.dphi.values <= 0):
            raise ValueError("flow Jacobian must stay positive")

    @property
    def grid(self) -> Grid1D:
        return self.disp.grid

    def positions(self) -> np.ndarray:
        return self.grid.x + self.disp.values


def flow_identity(grid: Grid1D) -> FlowMap:
    return FlowMap(grid.constant(0.0), grid.constant(1.0))


def blowup_monitor(f: FlowMap) -> float:
    """min d_theta(phi): positive while the map is a diffeomorphism."""
    return float(np.min(f.dphi.values))


def flow_advance(
    f: FlowMap,
    vel,
    t0: float,
    t1: float,
    dt: float | None = None,
    jac_floor: float = 1e-3,
) -> FlowMap:
    """Advance a flow map with RK4 against a time-indexed velocity.

    ``vel`` needs ``velocity(t, x)`` and ``velocity_x(t, x)``.  If the
    Jacobian drops to ``jac_floor`` the advance stops with a BlowUpError that
    carries the last valid map, since past that point the map is no longer a
    usable change of variables.
    """
    if t1 <= t0:
        raise ValueError("t1 must exceed t0")
    if dt is None:
        dt = getattr(vel, "dt", None)
        if dt is None:
            raise ValueError("no step size given and the velocity has no native one")
    nsteps = max(1, round((t1 - t0) / dt))
    h = (t1 - t0) / nsteps
    labels = f.grid.x
    disp = f.disp.values.copy()
    jac = f.dphi.values.copy()

    def rates(t, d, j):
        pos = labels + d
        return vel.velocity(t, pos), vel.velocity_x(t, pos) * j

    t = t0
    for k in range(nsteps):
        d1, j1 = rates(t, disp, jac)
        d2, j2 = rates(t + 0.5 * h, disp + 0.5 * h * d1, jac + 0.5 * h * j1)
        d3, j3 = rates(t + 0.5 * h, disp + 0.5 * h * d2, jac + 0.5 * h * j2)
        d4, j4 = rates(t + h, disp + h * d3, jac + h * j3)
        disp = disp + (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4)
        jac = jac + (h / 6.0) * (j1 + 2.0 * j2 + 2.0 * j3 + j4)
        t = t0 + (k + 1) * h
        if not (np.all(np.isfinite(disp)) and np.all(np.isfinite(jac))):
            raise BlowUpError(f"flow advance lost finiteness at t={t:g}", last=f, t=t)
        if np.min(jac) <= jac_floor:
            raise BlowUpError(
                f"flow Jacobian reached {np.min(jac):.3e} at t={t:g}",
                last=FlowMap(
                    PeriodicField(f.grid, disp),
                    PeriodicField(f.grid, np.maximum(jac, np.finfo(float).tiny)),
                ),
                t=t,
            )
    return FlowMap(PeriodicField(f.grid, disp), PeriodicField(f.grid, jac))
