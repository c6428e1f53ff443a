"""Uniform 1-d grids, node fields and centered finite differences.

Everything downstream (steppers, monitors, diagnostics, the heat-equation
oracle) works on a Grid1D plus per-node data, so the difference operators
live here in one place.  A Field1D bundles grid, data pair and current time;
steppers consume and produce Field1D values without mutating their inputs.
"""

from dataclasses import dataclass, field, replace as _dc_replace

import numpy as np

__all__ = ["Grid1D", "Field1D", "ddx_central", "d2dx2_central", "ddx_one_sided"]


@dataclass(frozen=True)
class Grid1D:
    """nx equally spaced nodes on [a, b], endpoints included."""

    a: float
    b: float
    nx: int
    x: np.ndarray = field(init=False, repr=False, compare=False)
    dx: float = field(init=False)

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"empty interval [{self.a}, {self.b}]")
        if self.nx < 3:
            raise ValueError("need at least 3 nodes")
        x = np.linspace(self.a, self.b, self.nx)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "dx", float(x[1] - x[0]))

    def interior(self):
        return slice(1, -1)

    def refine(self, factor=2):
        """Same interval, (nx - 1) * factor + 1 nodes; shared node locations."""
        return Grid1D(self.a, self.b, (self.nx - 1) * int(factor) + 1)


@dataclass(frozen=True)
class Field1D:
    """Per-node data pair on a grid at a moment in time.

    data is any 2-tuple of node arrays: a GasState (rho, mom) for the gas
    steppers, a (p, q) pair for the generic one.
    """

    grid: Grid1D
    data: object
    time: float = 0.0

    def __post_init__(self):
        a, b = self.data
        if np.shape(a) != (self.grid.nx,) or np.shape(b) != (self.grid.nx,):
            raise ValueError("data arrays must match the grid node count")

    @property
    def x(self):
        return self.grid.x

    @property
    def dx(self):
        return self.grid.dx

    @property
    def nx(self):
        return self.grid.nx

    @property
    def x_lo(self):
        return self.grid.a

    @property
    def x_hi(self):
        return self.grid.b

    def replace(self, **kw):
        return _dc_replace(self, **kw)


def ddx_central(f, dx):
    """Second-order first derivative; one-sided second-order at the ends."""
    f = np.asarray(f, dtype=float)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * dx)
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx)
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * dx)
    return out


def d2dx2_central(f, dx):
    """Second-order second derivative on interior nodes; ends copy neighbours.

    The boundary values are never used by the steppers (Dirichlet rows are
    overwritten), they are filled only so the array shape is uniform.
    """
    f = np.asarray(f, dtype=float)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / (dx * dx)
    out[0] = out[1]
    out[-1] = out[-2]
    return out


def ddx_one_sided(f, dx):
    """First-order one-sided differences at both ends, returned as a pair.

    Used by the conservation audit, where the boundary diffusive flux
    epsilon * f_x enters through the ends of the domain.
    """
    f = np.asarray(f, dtype=float)
    return (f[1] - f[0]) / dx, (f[-1] - f[-2]) / dx
