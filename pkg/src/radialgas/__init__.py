"""radialgas: a desk-scale numerical laboratory for viscous approximations
of spherically symmetric isentropic gas flow.

The package builds small viscous runs on exterior domains and on scaled
coordinates near the origin, monitors the invariant-region bounds that make
those runs meaningful, and measures entropy production, dissipation and
mesh/viscosity convergence on the results.
"""

from .gas import (
    EosParams,
    GasState,
    RiemannPair,
    EntropyPair,
    VacuumError,
    pressure,
    velocity,
    riemann_invariants,
    state_from_invariants,
    eigenvalues,
    mechanical_entropy,
    mechanical_entropy_gradient,
    weak_entropy,
    weak_entropy_gradient,
    jacobi_rule,
)
from .grid import Grid1D

__version__ = "0.1.0"
