"""conelab: a periodic pseudo-spectral laboratory.

The package solves peaked shallow-water wave equations (one- and
two-component) on the circle, lifts their solutions to incompressible flows
on a two-dimensional cone, verifies the lift identities to discretization
accuracy, integrates exact multi-peakon dynamics including the symmetric
blow-up scenario, and cross-checks geodesic and curvature statements for the
associated warped-product metrics.
"""

__version__ = "0.1.0"

from .grid import (  # noqa: F401
    Grid1D,
    PeriodicField,
    deriv,
    helmholtz,
    helmholtz_inv,
    interp,
    integrate,
    dealias,
    dealiased_product,
    l2_norm,
)
from .ch import (  # noqa: F401
    BlowUpError,
    CHState,
    CH2State,
    energy,
    evolve,
    step,
    velocity,
)
from .peakons import (  # noqa: F401
    GreenKernel,
    PeakonEnsemble,
    collision_scenario,
    evolve_peakons,
    hamiltonian,
)
from .presets import preset_ic  # noqa: F401
