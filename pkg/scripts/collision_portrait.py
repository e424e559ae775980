#!/usr/bin/env python3
"""Collision portrait: pinch time and flow-map collapse across launch momenta.

For a family of antisymmetric pairs this prints when the peak separation
closes, when the flow Jacobian drops through successive decades, and the
midpoint speed (which should stay at rounding level throughout; its failure
to do so would break the symmetry argument behind the blow-up).
"""

import argparse

import numpy as np

from conelab.ch import BlowUpError, blowup_monitor, flow_advance, flow_identity
from conelab.grid import Grid1D
from conelab.peakons import collision_scenario, evolve_peakons, GreenKernel


def portrait(p0: float, q0: float, alpha: float, n: int, dt: float) -> dict:
    kernel = GreenKernel(alpha=alpha, circumference=2.0 * np.pi)
    e0 = collision_scenario(p0, q0, kernel)
    final, vel, reason = evolve_peakons(e0, 20.0, dt, gap_stop=1e-4)
    mid = np.array([0.5 * float(e0.q[0] + e0.q[1])])
    midspeed = max(abs(float(vel.velocity(t, mid)[0])) for t in vel.times)

    fmap = flow_identity(Grid1D(n))
    try:
        fmap = flow_advance(fmap, vel, 0.0, vel.t1, jac_floor=1e-3)
        pinch_t = None
    except BlowUpError as err:
        fmap, pinch_t = err.last, err.t
    return {
        "p0": p0,
        "ode_stop": vel.t1,
        "reason": reason,
        "pinch_t": pinch_t,
        "min_jac": blowup_monitor(fmap),
        "midspeed": midspeed,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p0", type=str, default="0.5,1,2,4")
    ap.add_argument("--q0", type=float, default=1.0)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--dt", type=float, default=1e-3)
    args = ap.parse_args()

    print(f"{'p0':>6} {'ode stop':>9} {'reason':>8} {'pinch t':>9} {'min dphi':>10} {'|u(mid)|':>10}")
    for p0 in (float(v) for v in args.p0.split(",")):
        row = portrait(p0, args.q0, args.alpha, args.n, args.dt)
        pinch = f"{row['pinch_t']:.4f}" if row["pinch_t"] is not None else "-"
        print(
            f"{row['p0']:6.2f} {row['ode_stop']:9.4f} {row['reason']:>8} {pinch:>9} "
            f"{row['min_jac']:10.3e} {row['midspeed']:10.3e}"
        )


if __name__ == "__main__":
    main()
