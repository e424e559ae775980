"""Warped-product geodesics, the fiber lift of potential dynamics, and
curvature cross-checks.

Throughout, a warped product carries the metric g_base + w(x) g_fiber with a
positive warp coefficient w on the base; base and fiber are flat (Euclidean
coordinates), which covers every metric shipped here.  Geodesics satisfy

    x'' = 1/2 |y'|^2 grad w(x) + F(t, x),        (F an optional extra force)
    y'' = -y' d/dt log w(x(t)),

and c = |y'|^2 w(x)^2 is a first integral.  Choosing w = 1/V and launching
the fiber with c = 2 turns the base projection into Newtonian dynamics
x'' = -grad V + F, which is the lift of potential systems exercised by
:func:`eisenhart_verify`.

For curvature the classical warped-product formula (O'Neill, Semi-Riemannian
Geometry, ch. 7) is expressed through the warping *function* f with metric
g_base + f^2 g_fiber; with our coefficient convention f = sqrt(w).  For
X = (u1, v1), Y = (u2, v2) the unnormalized pairing <R(X,Y)Y,X> is

      K_base (|u1|^2 |u2|^2 - <u1,u2>^2)
    - f [ |v1|^2 Hess f(u2,u2) + |v2|^2 Hess f(u1,u1) - 2 <v1,v2> Hess f(u1,u2) ]
    + f^2 (K_fiber - |grad f|^2)(|v1|^2 |v2|^2 - <v1,v2>^2),

with fiber norms taken in g_fiber.  Writing the same expression directly in
the coefficient w (that is, reading the formula with w in place of f) does
NOT reproduce the Riemann tensor of g_base + w g_fiber; the finite-difference
oracle below settles the convention empirically, which is why
:func:`sectional_numerator` converts to f internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

__all__ = [
    "WarpedConfig",
    "GeodesicState",
    "MetricDescriptor",
    "fiber_exponent",
    "warped_rhs",
    "step_geodesic",
    "conserved_c",
    "evolve_geodesic",
    "lifted_config",
    "eisenhart_verify",
    "EisenhartReport",
    "build_lift_metric",
    "warped_presentation",
    "sectional_numerator",
    "riemann_fd_oracle",
    "sectional_fd",
    "curvature_sign_scan",
    "ScanReport",
]


@dataclass(frozen=True)
class WarpedConfig:
    """Flat base and fiber with a positive warp coefficient w(x).

    ``warp``, ``warp_grad`` and ``warp_hess`` evaluate w, its gradient and
    its Hessian at a base point (arrays in base coordinates).  ``force`` is
    an optional extra base acceleration F(t, x).  ``base_curvature`` and
    ``fiber_curvature`` are the constant sectional curvatures entering the
    curvature formula; the shipped configurations are all flat-by-flat, and
    the geodesic integrator supports exactly that case.
    """

    dim_base: int
    dim_fiber: int
    warp: Callable[[np.ndarray], float]
    warp_grad: Callable[[np.ndarray], np.ndarray]
    warp_hess: Callable[[np.ndarray], np.ndarray]
    force: Callable[[float, np.ndarray], np.ndarray] | None = None
    base_curvature: float = 0.0
    fiber_curvature: float = 0.0

    def __post_init__(self) -> None:
        if self.dim_base < 1 or self.dim_fiber < 1:
            raise ValueError("base and fiber must have positive dimension")


@dataclass(frozen=True)
class GeodesicState:
    x: np.ndarray
    xdot: np.ndarray
    y: np.ndarray
    ydot: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        for name in ("x", "xdot", "y", "ydot"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, arr)


def warped_rhs(s: GeodesicState, c: WarpedConfig):
    """Accelerations (x'', y'') of the warped geodesic flow."""
    w = c.warp(s.x)
    if not w > 0:
        raise ValueError(f"warp coefficient must stay positive, got {w:g}")
    gw = c.warp_grad(s.x)
    xdd = 0.5 * float(s.ydot @ s.ydot) * gw
    if c.force is not None:
        xdd = xdd + c.force(s.t, s.x)
    ydd = -s.ydot * float(gw @ s.xdot) / w
    return xdd, ydd


def step_geodesic(s: GeodesicState, c: WarpedConfig, dt: float) -> GeodesicState:
    if not (np.isfinite(dt) and dt > 0):
        raise ValueError("dt must be positive")

    def rhs(st):
        xdd, ydd = warped_rhs(st, c)
        return st.xdot, xdd, st.ydot, ydd

    def shift(k, h):
        return replace(
            s,
            x=s.x + h * k[0],
            xdot=s.xdot + h * k[1],
            y=s.y + h * k[2],
            ydot=s.ydot + h * k[3],
            t=s.t + h,
        )

    k1 = rhs(s)
    k2 = rhs(shift(k1, 0.5 * dt))
    k3 = rhs(shift(k2, 0.5 * dt))
    k4 = rhs(shift(k3, dt))
    combo = [
        (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0) for i in range(4)
    ]
    return replace(
        s,
        x=s.x + combo[0],
        xdot=s.xdot + combo[1],
        y=s.y + combo[2],
        ydot=s.ydot + combo[3],
        t=s.t + dt,
    )


def conserved_c(s: GeodesicState, c: WarpedConfig) -> float:
    """First integral |y'|^2 w(x)^2 of the fiber motion."""
    return float(s.ydot @ s.ydot) * c.warp(s.x) ** 2


def evolve_geodesic(
    s: GeodesicState, c: WarpedConfig, T: float, dt: float, observer=None
) -> GeodesicState:
    nsteps = max(1, round(T / dt))
    h = T / nsteps
    if observer is not None:
        observer(s)
    cur = s
    for _ in range(nsteps):
        cur = step_geodesic(cur, c, h)
        if observer is not None:
            observer(cur)
    return cur


# --- lift of potential dynamics ---------------------------------------------


@dataclass(frozen=True)
class EisenhartReport:
    max_deviation: float
    c_drift: float
    c_value: float


def lifted_config(
    V: Callable[[np.ndarray], float],
    Vgrad: Callable[[np.ndarray], np.ndarray],
    dim: int = 1,
    force: Callable[[float, np.ndarray], np.ndarray] | None = None,
) -> WarpedConfig:
    """Warped configuration with w = 1/V and a one-dimensional fiber."""

    def w(x):
        v = V(x)
        if not v > 0:
            raise ValueError("potential must stay positive for the lift")
        return 1.0 / v

    def wg(x):
        return -Vgrad(x) / V(x) ** 2

    def wh(x):  # only used by curvature checks on closed-form potentials
        raise NotImplementedError("lifted configs supply warp and gradient only")

    return WarpedConfig(dim, 1, w, wg, wh, force=force)


def eisenhart_verify(
    V: Callable[[np.ndarray], float],
    Vgrad: Callable[[np.ndarray], np.ndarray],
    x0,
    v0,
    T: float,
    dt: float,
    force: Callable[[float, np.ndarray], np.ndarray] | None = None,
    sample_every: int = 10,
) -> EisenhartReport:
    """Integrate x'' = -grad V + F directly and as a warped geodesic.

    The geodesic runs on w = 1/V with the fiber speed chosen so that the
    first integral c equals 2, which is exactly the value making the base
    projection Newtonian.  Reports the max trajectory deviation at sample
    times and the relative drift of c.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    v0 = np.atleast_1d(np.asarray(v0, dtype=float))
    cfg = lifted_config(V, Vgrad, dim=x0.size, force=force)
    ydot0 = np.sqrt(2.0) * V(x0)  # |y'| w = sqrt(c) with w = 1/V
    geo = GeodesicState(x0, v0, np.zeros(1), np.array([ydot0]))

    nsteps = max(1, round(T / dt))
    h = T / nsteps
    direct_x, direct_v = x0.copy(), v0.copy()

    def newton_rhs(t, x, v):
        acc = -Vgrad(x)
        if force is not None:
            acc = acc + force(t, x)
        return v, acc

    c0 = conserved_c(geo, cfg)
    max_dev = 0.0
    c_worst = c0
    t = 0.0
    for k in range(nsteps):
        # direct Newtonian RK4
        d1 = newton_rhs(t, direct_x, direct_v)
        d2 = newton_rhs(t + 0.5 * h, direct_x + 0.5 * h * d1[0], direct_v + 0.5 * h * d1[1])
        d3 = newton_rhs(t + 0.5 * h, direct_x + 0.5 * h * d2[0], direct_v + 0.5 * h * d2[1])
        d4 = newton_rhs(t + h, direct_x + h * d3[0], direct_v + h * d3[1])
        direct_x = direct_x + (h / 6.0) * (d1[0] + 2 * d2[0] + 2 * d3[0] + d4[0])
        direct_v = direct_v + (h / 6.0) * (d1[1] + 2 * d2[1] + 2 * d3[1] + d4[1])
        geo = step_geodesic(geo, cfg, h)
        t += h
        if (k + 1) % sample_every == 0 or k == nsteps - 1:
            max_dev = max(max_dev, float(np.max(np.abs(geo.x - direct_x))))
            ck = conserved_c(geo, cfg)
            if abs(ck - c0) > abs(c_worst - c0):
                c_worst = ck
    return EisenhartReport(max_dev, abs(c_worst - c0) / abs(c0), c0)


# --- metric descriptors and curvature ----------------------------------------


@dataclass(frozen=True)
class MetricDescriptor:
    """Diagonal metric: coordinate names, coefficient callables, a sampler.

    Each coefficient maps the full coordinate point (1D array) to a positive
    number.  ``sampler(rng)`` draws a generic point of the region the metric
    is meant to be probed on.
    """

    names: tuple[str, ...]
    coefficients: tuple[Callable[[np.ndarray], float], ...]
    sampler: Callable[[np.random.Generator], np.ndarray]
    label: str = ""

    def __post_init__(self) -> None:
        if len(self.names) != len(self.coefficients):
            raise ValueError("one coefficient per coordinate required")

    @property
    def dim(self) -> int:
        return len(self.names)

    def matrix(self, point: np.ndarray) -> np.ndarray:
        return np.diag([c(point) for c in self.coefficients])


def fiber_exponent(d: int) -> int:
    """Radial exponent of the lifted fiber coefficient for a d-dimensional
    factor: r^(-2(3+d)).  d = 1 gives the circle case r^-8; the
    two-component extension uses d = 2, hence r^-10."""
    if d < 1:
        raise ValueError("factor dimension d must be at least 1")
    return -2 * (3 + d)


def _cone_sampler(rng: np.random.Generator) -> np.ndarray:
    r = rng.uniform(0.2, 5.0)
    th = rng.uniform(0.0, 2.0 * np.pi)
    return np.array([r * np.cos(th), r * np.sin(th), rng.uniform(0.0, 2.0 * np.pi)])


def build_lift_metric(kind: str, d: int = 1, potential=None) -> MetricDescriptor:
    """Shipped diagonal metrics.

    * ``cone-polar``: (theta, r, y) with diag(r^2, 1, r^(-2(3+d))); the
      fiber exponent -2(3+d) is the general-dimension law, giving r^-8 for
      the circle case d = 1.
    * ``cone-cartesian``: same geometry in flat coordinates (x, y, z) with
      diag(1, 1, (x^2+y^2)^(-(3+d))).
    * ``two-component-cone``: (theta, r, y, z) with diag(r^2, 1, r^2, r^-10),
      the d = 2 instance extended by the transported-density direction.
    * ``potential-lift``: (x, z, y) with diag(1, 1/V, V), the double fiber
      carrying a potential V (callable, defaults to 1 + x^2/2).
    * ``sphere``: round 2-sphere (phi, theta), the positive-curvature
      control.
    * ``euclidean3``: flat control.
    """
    if kind in ("cone-polar", "cone-cartesian", "two-component-cone"):
        expo = float(fiber_exponent(d))
    if kind == "cone-polar":

        def sampler(rng):
            return np.array(
                [rng.uniform(0, 2 * np.pi), rng.uniform(0.2, 5.0), rng.uniform(0, 2 * np.pi)]
            )

        return MetricDescriptor(
            ("theta", "r", "y"),
            (
                lambda p: p[1] ** 2,
                lambda p: 1.0,
                lambda p: p[1] ** expo,
            ),
            sampler,
            label=f"cone-polar(d={d})",
        )
    if kind == "cone-cartesian":
        return MetricDescriptor(
            ("x", "y", "z"),
            (
                lambda p: 1.0,
                lambda p: 1.0,
                lambda p: (p[0] ** 2 + p[1] ** 2) ** (expo / 2.0),
            ),
            _cone_sampler,
            label=f"cone-cartesian(d={d})",
        )
    if kind == "two-component-cone":

        def sampler(rng):
            return np.array(
                [
                    rng.uniform(0, 2 * np.pi),
                    rng.uniform(0.2, 5.0),
                    rng.uniform(0, 2 * np.pi),
                    rng.uniform(0, 2 * np.pi),
                ]
            )

        return MetricDescriptor(
            ("theta", "r", "y", "z"),
            (
                lambda p: p[1] ** 2,
                lambda p: 1.0,
                lambda p: p[1] ** 2,
                lambda p: p[1] ** float(fiber_exponent(2)),
            ),
            sampler,
            label="two-component-cone",
        )
    if kind == "potential-lift":
        V = potential if potential is not None else (lambda x: 1.0 + 0.5 * x**2)

        def sampler(rng):
            return np.array(
                [rng.uniform(-2.0, 2.0), rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi)]
            )

        return MetricDescriptor(
            ("x", "z", "y"),
            (
                lambda p: 1.0,
                lambda p: 1.0 / V(p[0]),
                lambda p: V(p[0]),
            ),
            sampler,
            label="potential-lift",
        )
    if kind == "sphere":

        def sampler(rng):
            return np.array([rng.uniform(0.4, np.pi - 0.4), rng.uniform(0, 2 * np.pi)])

        return MetricDescriptor(
            ("phi", "theta"),
            (lambda p: 1.0, lambda p: np.sin(p[0]) ** 2),
            sampler,
            label="sphere",
        )
    if kind == "euclidean3":
        return MetricDescriptor(
            ("x", "y", "z"),
            (lambda p: 1.0, lambda p: 1.0, lambda p: 1.0),
            lambda rng: rng.uniform(-1.0, 1.0, size=3),
            label="euclidean3",
        )
    raise ValueError(f"unknown metric kind {kind!r}")


def warped_presentation(kind: str, d: int = 1, potential=None) -> WarpedConfig:
    """Warped-product data matching :func:`build_lift_metric` geometries.

    Only metrics with a single warped fiber have one: the cone family (flat
    plane base, coefficient (x^2+y^2)^-(3+d)), the sphere (arc-length base,
    coefficient sin^2) and the single-fiber half of the potential lift
    (coefficient 1/V).
    """
    if kind == "cone-cartesian":
        p = float(3 + d)

        def w(x):
            return float((x @ x) ** (-p))

        def wg(x):
            return -2.0 * p * x * (x @ x) ** (-p - 1.0)

        def wh(x):
            r2 = float(x @ x)
            return (-2.0 * p * r2 ** (-p - 1.0)) * np.eye(2) + (
                4.0 * p * (p + 1.0) * r2 ** (-p - 2.0)
            ) * np.outer(x, x)

        return WarpedConfig(2, 1, w, wg, wh)
    if kind == "sphere":
        return WarpedConfig(
            1,
            1,
            lambda x: float(np.sin(x[0]) ** 2),
            lambda x: np.array([np.sin(2.0 * x[0])]),
            lambda x: np.array([[2.0 * np.cos(2.0 * x[0])]]),
        )
    if kind == "potential-lift":
        V = potential if potential is not None else (lambda x: 1.0 + 0.5 * x**2)
        # derivatives by small central differences; adequate for cross-checks
        h = 1e-5

        def w(x):
            return 1.0 / V(float(x[0]))

        def wg(x):
            x0 = float(x[0])
            return np.array([(w([x0 + h]) - w([x0 - h])) / (2 * h)])

        def wh(x):
            x0 = float(x[0])
            return np.array([[(w([x0 + h]) - 2 * w([x0]) + w([x0 - h])) / h**2]])

        return WarpedConfig(1, 1, w, wg, wh)
    raise ValueError(f"no single-fiber warped presentation for {kind!r}")


def sectional_numerator(
    cfg: WarpedConfig,
    point: np.ndarray,
    X: tuple[np.ndarray, np.ndarray],
    Y: tuple[np.ndarray, np.ndarray],
) -> float:
    """Unnormalized curvature pairing <R(X,Y)Y,X> of the warped metric.

    X and Y are (base, fiber) component pairs at ``point``.  Evaluated via
    the warping function f = sqrt(w); see the module docstring for why the
    conversion is load-bearing.
    """
    point = np.atleast_1d(np.asarray(point, dtype=float))
    u1, v1 = (np.atleast_1d(np.asarray(a, dtype=float)) for a in X)
    u2, v2 = (np.atleast_1d(np.asarray(a, dtype=float)) for a in Y)
    w = cfg.warp(point)
    if not w > 0:
        raise ValueError("warp coefficient must be positive")
    gw = np.atleast_1d(cfg.warp_grad(point))
    hw = np.atleast_2d(cfg.warp_hess(point))
    f = np.sqrt(w)
    gf = gw / (2.0 * f)
    hf = hw / (2.0 * f) - np.outer(gw, gw) / (4.0 * w * f)

    def hess_f(a, b):
        return float(a @ hf @ b)

    base_area = float((u1 @ u1) * (u2 @ u2) - (u1 @ u2) ** 2)
    fiber_area = float((v1 @ v1) * (v2 @ v2) - (v1 @ v2) ** 2)
    mixed = (
        float(v1 @ v1) * hess_f(u2, u2)
        + float(v2 @ v2) * hess_f(u1, u1)
        - 2.0 * float(v1 @ v2) * hess_f(u1, u2)
    )
    return (
        cfg.base_curvature * base_area
        - f * mixed
        + f**2 * (cfg.fiber_curvature - float(gf @ gf)) * fiber_area
    )


def _d1(fn, x, i, h):
    """Fourth-order central first derivative in coordinate i."""
    e = np.zeros_like(x)
    e[i] = 1.0
    return (
        -fn(x + 2 * h * e) + 8.0 * fn(x + h * e) - 8.0 * fn(x - h * e) + fn(x - 2 * h * e)
    ) / (12.0 * h)


def _christoffel(m: MetricDescriptor, point: np.ndarray, steps: np.ndarray) -> np.ndarray:
    dim = m.dim
    g = m.matrix(point)
    ginv = np.diag(1.0 / np.diag(g))
    dg = np.empty((dim, dim, dim))
    for k in range(dim):
        dg[k] = _d1(m.matrix, point, k, steps[k])
    gamma = np.empty((dim, dim, dim))
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                s = 0.0
                for l in range(dim):
                    s += ginv[i, l] * (dg[j][k, l] + dg[k][j, l] - dg[l][j, k])
                gamma[i, j, k] = 0.5 * s
    return gamma


def riemann_fd_oracle(
    m: MetricDescriptor,
    point: np.ndarray,
    X: np.ndarray,
    Y: np.ndarray,
    step: float = 1e-4,
) -> float:
    """<R(X,Y)Y,X> from finite differences of the metric alone.

    Christoffel symbols come from fourth-order central differences of the
    coefficient functions, their derivatives from the same stencil applied
    to the Christoffel evaluation; nothing is shared with the closed-form
    curvature path, which is the point.  Steps scale as step*(1+|coord|).
    """
    point = np.asarray(point, dtype=float)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    dim = m.dim
    steps = step * (1.0 + np.abs(point))
    gamma = _christoffel(m, point, steps)
    dgamma = np.empty((dim, dim, dim, dim))
    for k in range(dim):
        dgamma[k] = _d1(lambda p: _christoffel(m, p, steps), point, k, steps[k])
    # R^i_{j k l} acting as R(e_k, e_l) e_j
    riem = np.empty((dim, dim, dim, dim))
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                for l in range(dim):
                    val = dgamma[k][i, l, j] - dgamma[l][i, k, j]
                    for p in range(dim):
                        val += gamma[i, k, p] * gamma[p, l, j] - gamma[i, l, p] * gamma[p, k, j]
                    riem[i, j, k, l] = val
    vec = np.einsum("ijkl,j,k,l->i", riem, Y, X, Y)
    return float(vec @ m.matrix(point) @ X)


def sectional_fd(
    m: MetricDescriptor, point: np.ndarray, X: np.ndarray, Y: np.ndarray, step: float = 1e-4
) -> float:
    """Normalized sectional curvature from the finite-difference pairing."""
    g = m.matrix(point)
    area = float((X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2)
    if area <= 1e-12 * float((X @ g @ X) * (Y @ g @ Y) + 1e-300):
        raise ValueError("degenerate plane")
    return riemann_fd_oracle(m, point, X, Y, step) / area


@dataclass(frozen=True)
class ScanReport:
    label: str
    samples: int
    max_curvature: float
    min_curvature: float
    argmax_point: np.ndarray


def curvature_sign_scan(
    m: MetricDescriptor, samples: int = 1000, seed: int = 0, step: float = 1e-4
) -> ScanReport:
    """Max and min normalized sectional curvature over random point-planes.

    Planes are spanned by independent Gaussian vectors orthonormalized in
    the metric; near-degenerate draws are rejected and redrawn.
    """
    rng = np.random.default_rng(seed)
    kmax, kmin = -np.inf, np.inf
    argmax = None
    done = 0
    while done < samples:
        pt = m.sampler(rng)
        g = m.matrix(pt)
        A = rng.standard_normal(m.dim)
        B = rng.standard_normal(m.dim)
        na = float(A @ g @ A)
        if na < 1e-12:
            continue
        A = A / np.sqrt(na)
        B = B - A * float(A @ g @ B)
        nb = float(B @ g @ B)
        if nb < 1e-8:
            continue
        B = B / np.sqrt(nb)
        k = riemann_fd_oracle(m, pt, A, B, step)  # orthonormal: already normalized
        if k > kmax:
            kmax, argmax = k, pt
        kmin = min(kmin, k)
        done += 1
    return ScanReport(m.label, samples, kmax, kmin, argmax)
