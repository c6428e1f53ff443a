"""Equation of state, characteristic speeds, Riemann invariants and entropy
pairs for one-dimensional isentropic gas dynamics with p(rho) = p0*rho**gamma.

All state operations accept scalars or numpy arrays for the (rho, mom) pair
and broadcast in the usual numpy way.  A state argument may be a GasState or
any (rho, mom) tuple.
"""

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.special import roots_jacobi

__all__ = [
    "EosParams",
    "GasState",
    "RiemannPair",
    "EntropyPair",
    "VacuumError",
    "pressure",
    "velocity",
    "riemann_invariants",
    "state_from_invariants",
    "eigenvalues",
    "mechanical_entropy",
    "mechanical_entropy_gradient",
    "weak_entropy",
    "weak_entropy_gradient",
    "jacobi_rule",
]

# densities at or below this count as vacuum for velocity-type quantities
RHO_VACUUM = 1e-300


class VacuumError(ValueError):
    """A velocity-dependent quantity was requested at (numerical) vacuum."""


@dataclass(frozen=True)
class EosParams:
    """Adiabatic exponent gamma and the constants derived from it.

    theta    = (gamma - 1) / 2, the exponent in the sound-speed-like
               quantity rho**theta,
    p0       = theta**2 / gamma, the pressure prefactor,
    lambda_w = (3 - gamma) / (2 (gamma - 1)), the exponent of the weight
               (1 - s**2)**lambda_w in the weak entropy family.
    """

    gamma: float
    theta: float = field(init=False)
    p0: float = field(init=False)
    lambda_w: float = field(init=False)

    def __post_init__(self):
        g = float(self.gamma)
        if not g > 1.0:
            raise ValueError(f"gamma must exceed 1, got {g}")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "theta", 0.5 * (g - 1.0))
        object.__setattr__(self, "p0", (0.5 * (g - 1.0)) ** 2 / g)
        object.__setattr__(self, "lambda_w", (3.0 - g) / (2.0 * (g - 1.0)))


class GasState(NamedTuple):
    """Conserved pair: density and radial momentum at a point (or on a grid)."""

    rho: object
    mom: object


class RiemannPair(NamedTuple):
    w: object
    z: object


class EntropyPair(NamedTuple):
    eta: object
    q: object


def _unpack(state):
    rho, mom = state
    return np.asarray(rho, dtype=float), np.asarray(mom, dtype=float)


def pressure(rho, eos):
    """p(rho) = p0 * rho**gamma; rejects negative density."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0.0):
        raise ValueError("negative density passed to pressure")
    return eos.p0 * rho ** eos.gamma


def velocity(state, eos=None, u_vacuum=None):
    """m / rho with an explicit vacuum rule.

    Where rho is at numerical vacuum the velocity is u_vacuum if given
    (the usual choice is 0 for data that vanish with the density),
    otherwise a VacuumError is raised.
    """
    rho, mom = _unpack(state)
    vac = rho <= RHO_VACUUM
    if np.any(vac):
        if u_vacuum is None:
            raise VacuumError("velocity undefined at vacuum; pass u_vacuum")
        safe = np.where(vac, 1.0, rho)
        return np.where(vac, u_vacuum, mom / safe)
    return mom / rho


def riemann_invariants(state, eos, u_vacuum=None):
    """Riemann invariants w = u + rho**theta, z = u - rho**theta."""
    rho, mom = _unpack(state)
    u = velocity((rho, mom), eos, u_vacuum=u_vacuum)
    rt = rho ** eos.theta
    return RiemannPair(u + rt, u - rt)


def state_from_invariants(w, z, eos):
    """Inverse map: rho = ((w - z)/2)**(1/theta), m = rho (w + z)/2.

    w >= z is required; w == z is vacuum.
    """
    w = np.asarray(w, dtype=float)
    z = np.asarray(z, dtype=float)
    half = 0.5 * (w - z)
    if np.any(half < 0.0):
        raise ValueError("invariant ordering w >= z violated")
    rho = half ** (1.0 / eos.theta)
    return GasState(rho, rho * 0.5 * (w + z))


def eigenvalues(state, eos, u_vacuum=None):
    """Characteristic speeds u -+ theta * rho**theta (returned as (lam1, lam2))."""
    rho, mom = _unpack(state)
    u = velocity((rho, mom), eos, u_vacuum=u_vacuum)
    c = eos.theta * rho ** eos.theta
    return u - c, u + c


def mechanical_entropy(state, eos):
    """The mechanical energy pair.

    eta* = m**2 / (2 rho) + p0 rho**gamma / (gamma - 1)
    q*   = m**3 / (2 rho**2) + gamma p0 rho**(gamma-1) m / (gamma - 1)
    """
    rho, mom = _unpack(state)
    if np.any(rho <= RHO_VACUUM):
        raise VacuumError("mechanical entropy undefined at vacuum")
    g = eos.gamma
    eta = 0.5 * mom ** 2 / rho + eos.p0 * rho ** g / (g - 1.0)
    q = 0.5 * mom ** 3 / rho ** 2 + g * eos.p0 * rho ** (g - 1.0) * mom / (g - 1.0)
    return EntropyPair(eta, q)


def mechanical_entropy_gradient(state, eos):
    """(d eta*/d rho, d eta*/d m) in the conserved variables."""
    rho, mom = _unpack(state)
    if np.any(rho <= RHO_VACUUM):
        raise VacuumError("mechanical entropy gradient undefined at vacuum")
    g = eos.gamma
    u = mom / rho
    eta_rho = -0.5 * u ** 2 + g * eos.p0 * rho ** (g - 1.0) / (g - 1.0)
    return eta_rho, u


def jacobi_rule(eos, n=32):
    """Gauss-Jacobi nodes and weights for the weight (1 - s**2)**lambda_w.

    Only gamma < 3 (lambda_w > 0) is supported; at gamma >= 3 the weak
    entropy weight degenerates and the family is out of scope here.
    """
    if eos.lambda_w <= 0.0:
        raise ValueError(
            f"weak entropy weight unsupported for gamma={eos.gamma} (needs gamma < 3)"
        )
    n = int(n)
    if n < 2:
        raise ValueError("need at least 2 quadrature nodes")
    return roots_jacobi(n, eos.lambda_w, eos.lambda_w)


def weak_entropy(state, eos, g: Callable, nodes=32):
    """A weak entropy pair generated by a test function g.

    eta = rho * int_{-1}^{1} g(u + rho**theta s) (1-s**2)**lambda ds
    q   = rho * int_{-1}^{1} (u + theta rho**theta s) g(u + rho**theta s)
          (1-s**2)**lambda ds

    evaluated by Gauss-Jacobi quadrature in s.  `nodes` is either a node
    count or a precomputed (s, weights) pair from jacobi_rule.  At vacuum the
    pair is (0, 0) without evaluating g.
    """
    rho, mom = _unpack(state)
    s, wts = nodes if isinstance(nodes, tuple) else jacobi_rule(eos, nodes)

    vac = rho <= RHO_VACUUM
    safe = np.where(vac, 1.0, rho)
    u = np.where(vac, 0.0, mom / safe)
    rt = rho ** eos.theta

    xi = u[..., None] + rt[..., None] * s
    gv = np.asarray(g(xi), dtype=float)
    if not np.all(np.isfinite(gv)):
        raise ValueError("entropy generator returned non-finite values")
    eta = rho * (gv @ wts)
    q = rho * (((u[..., None] + eos.theta * rt[..., None] * s) * gv) @ wts)
    if np.any(vac):
        eta = np.where(vac, 0.0, eta)
        q = np.where(vac, 0.0, q)
    return EntropyPair(eta, q)


def weak_entropy_gradient(state, eos, g: Callable, gprime: Callable, nodes=32):
    """(d eta/d rho, d eta/d m) for the weak pair generated by g.

    eta_rho = int [ g(xi) + g'(xi) (theta rho**theta s - u) ] (1-s**2)**lambda ds
    eta_m   = int g'(xi) (1-s**2)**lambda ds,  xi = u + rho**theta s.
    """
    rho, mom = _unpack(state)
    s, wts = nodes if isinstance(nodes, tuple) else jacobi_rule(eos, nodes)

    vac = rho <= RHO_VACUUM
    safe = np.where(vac, 1.0, rho)
    u = np.where(vac, 0.0, mom / safe)
    rt = rho ** eos.theta

    xi = u[..., None] + rt[..., None] * s
    gv = np.asarray(g(xi), dtype=float)
    gpv = np.asarray(gprime(xi), dtype=float)
    if not (np.all(np.isfinite(gv)) and np.all(np.isfinite(gpv))):
        raise ValueError("entropy generator returned non-finite values")
    eta_m = gpv @ wts
    eta_rho = (gv + gpv * (eos.theta * rt[..., None] * s - u[..., None])) @ wts
    return eta_rho, eta_m
