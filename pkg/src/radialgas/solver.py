"""Explicit finite-difference steppers for the three parabolic systems:
the exterior viscous gas system, its rescaled origin-including variant
(in physical x or in the stretched coordinate xi), and the generic
advection-reaction-diffusion 2x2 system used to study the discrete
maximum principle on its own.

All steppers share the same skeleton: second-order central differences in
space, an explicit two-stage midpoint step in time, Dirichlet boundary
enforcement by node assignment after each stage, and a hard positivity
failure if a gas density reaches zero.  They consume and return Field1D
values and never mutate their input.
"""

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .gas import GasState, eigenvalues, pressure
from .grid import Field1D, d2dx2_central, ddx_central

__all__ = [
    "SolverConfig",
    "GenericCoeffs",
    "PairState",
    "PositivityError",
    "CflError",
    "CoefficientError",
    "cfl_dt",
    "step_exterior",
    "step_scaled_origin",
    "step_origin_xi",
    "step_generic",
    "advance",
    "xi_of_x",
    "x_of_xi",
    "exterior_rhs",
    "scaled_origin_rhs",
]


class PositivityError(RuntimeError):
    """A gas density reached zero or below during a step."""


class CflError(ValueError):
    """The requested dt exceeds the stability limit for the current state."""


class CoefficientError(RuntimeError):
    """A generic-system callback returned non-finite values."""


class PairState(NamedTuple):
    """Node data of the generic 2x2 system."""

    p: object
    q: object


@dataclass(frozen=True)
class SolverConfig:
    """Run-level solver settings.

    boundary fixes the Dirichlet pairs ((lo), (hi)); it may be a callable of
    time for manufactured solutions, or None to freeze whatever values the
    field currently carries at its end nodes.  extra_visc_term switches on
    the momentum coupling -2 eps alpha M2 x**(-alpha-1) rho_x that the
    exterior system carries alongside the plain viscosity.
    """

    eps: float
    cfl: float = 0.4
    ndim: int = 3
    t_end: float = 1.0
    boundary: object = None
    extra_visc_term: bool = False

    def __post_init__(self):
        if self.eps <= 0.0:
            raise ValueError("viscosity eps must be positive")
        if not 0.0 < self.cfl <= 0.9:
            raise ValueError("cfl must lie in (0, 0.9]")
        if self.ndim < 2:
            raise ValueError("radial geometry needs dimension >= 2")


@dataclass(frozen=True)
class GenericCoeffs:
    """Coefficient callbacks of the generic system, each taking
    (x, t, p, q, p_x, q_x) arrays and returning an array (or scalar)."""

    mu1: Callable
    mu2: Callable
    a11: Callable
    a12: Callable
    a21: Callable
    a22: Callable
    r1: Callable
    r2: Callable


def _bc_at(boundary, f, t):
    if boundary is None:
        a, b = f.data
        return (a[0], b[0]), (a[-1], b[-1])
    if callable(boundary):
        return boundary(t)
    return boundary


def _assign_bc(a, b, bc):
    (a_lo, b_lo), (a_hi, b_hi) = bc
    a[0], b[0] = a_lo, b_lo
    a[-1], b[-1] = a_hi, b_hi


def _check_positive(rho, x, t, where):
    if np.all(rho > 0.0):
        return
    i = int(np.argmin(rho))
    raise PositivityError(
        f"density {rho[i]:.3e} at x={x[i]:.6g}, t={t:.6g} ({where}); "
        "the run left the positive regime"
    )


def cfl_dt(f, eos, cfg, weight_pow=0.0):
    """Stability-limited time step for the current field.

    min over nodes of cfl * min(dx / max|lambda|, dx**2 / (2 eps_eff)) with
    eps_eff = eps * x**weight_pow; weight_pow is 2(d - c) for the scaled
    origin system and 0 otherwise.
    """
    rho, mom = f.data
    l1, l2 = eigenvalues((rho, mom), eos, u_vacuum=0.0)
    lam = max(float(np.max(np.abs(l1))), float(np.max(np.abs(l2))))
    hyp = f.dx / lam if lam > 0.0 else math.inf
    eps_eff = cfg.eps * float(np.max(f.x**weight_pow)) if weight_pow != 0.0 else cfg.eps
    visc = f.dx**2 / (2.0 * eps_eff)
    return cfg.cfl * min(hyp, visc)


def exterior_rhs(x, dx, rho, mom, eos, cfg, ctrl=None):
    """Semi-discrete right side of the exterior viscous system."""
    nd1 = cfg.ndim - 1
    p = pressure(rho, eos)
    drho = (
        -ddx_central(mom, dx) - nd1 * mom / x + cfg.eps * d2dx2_central(rho, dx)
    )
    dmom = (
        -ddx_central(mom * mom / rho + p, dx)
        - nd1 * mom * mom / (rho * x)
        + cfg.eps * d2dx2_central(mom, dx)
    )
    if cfg.extra_visc_term:
        if ctrl is None:
            raise ValueError("extra_visc_term needs control parameters")
        dmom = dmom - 2.0 * cfg.eps * ctrl.alpha * ctrl.m2 * x ** (
            -ctrl.alpha - 1.0
        ) * ddx_central(rho, dx)
    return drho, dmom


def scaled_origin_rhs(x, dx, rho, mom, eos, cfg, ctrl):
    """Semi-discrete right side of the origin system in physical variables.

    The viscous operator carries the x**(2(d-c)) weight family; with c = 0
    every weight is 1 and the c, d proportional terms vanish, recovering the
    exterior system without its extra momentum term.
    """
    c, d = ctrl.c, ctrl.d
    nd1 = cfg.ndim - 1
    pw = 2.0 * (d - c)
    w2 = x**pw
    w1 = x ** (pw - 1.0)
    w0 = x ** (pw - 2.0)
    p = pressure(rho, eos)
    rho_x = ddx_central(rho, dx)
    mom_x = ddx_central(mom, dx)
    drho = (
        -mom_x
        - nd1 * mom / x
        + cfg.eps
        * (d2dx2_central(rho, dx) * w2 + (d - 3.0 * c) * rho_x * w1 + c * (2.0 * c + 1.0 - d) * rho * w0)
    )
    dmom = (
        -ddx_central(mom * mom / rho + p, dx)
        - nd1 * mom * mom / (rho * x)
        + cfg.eps
        * (d2dx2_central(mom, dx) * w2 - (c + d) * mom_x * w1 + d * (c + 1.0) * mom * w0)
    )
    return drho, dmom


def _origin_xi_rhs(x, dxi, rho, mom, eos, cfg, ctrl):
    """Semi-discrete right side of the scaled system in the xi coordinate.

    The field arrays live on a uniform xi grid; x holds the corresponding
    physical positions.
    """
    c, d = ctrl.c, ctrl.d
    nd1 = cfg.ndim - 1
    fac = x ** (d - c - 1.0)
    p = pressure(rho, eos)
    drho = (
        -ddx_central(mom, dxi)
        - (nd1 + d) * fac * mom
        + cfg.eps * d2dx2_central(rho, dxi)
    )
    dmom = (
        -ddx_central(mom * mom / rho + p, dxi)
        + (-(2.0 * d - c + nd1) * mom * mom / rho - (2.0 * d - c) * p) * fac
        + cfg.eps * d2dx2_central(mom, dxi)
    )
    return drho, dmom


def _midpoint_gas(f, eos, cfg, dt, rhs, forcing, weight_pow):
    limit = cfl_dt(f, eos, cfg, weight_pow)
    if dt > limit * (1.0 + 1e-9):
        raise CflError(f"dt={dt:.3e} exceeds stability limit {limit:.3e}")
    x, dx, t = f.x, f.dx, f.time
    rho, mom = (np.asarray(a, dtype=float) for a in f.data)

    k1r, k1m = rhs(x, dx, rho, mom)
    if forcing is not None:
        fr, fm = forcing(x, t)
        k1r, k1m = k1r + fr, k1m + fm
    rho_h = rho + 0.5 * dt * k1r
    mom_h = mom + 0.5 * dt * k1m
    _assign_bc(rho_h, mom_h, _bc_at(cfg.boundary, f, t + 0.5 * dt))
    _check_positive(rho_h, x, t + 0.5 * dt, "half step")

    k2r, k2m = rhs(x, dx, rho_h, mom_h)
    if forcing is not None:
        fr, fm = forcing(x, t + 0.5 * dt)
        k2r, k2m = k2r + fr, k2m + fm
    rho_n = rho + dt * k2r
    mom_n = mom + dt * k2m
    _assign_bc(rho_n, mom_n, _bc_at(cfg.boundary, f, t + dt))
    _check_positive(rho_n, x, t + dt, "full step")
    return f.replace(data=GasState(rho_n, mom_n), time=t + dt)


def step_exterior(f, eos, cfg, ctrl=None, dt=None, forcing=None):
    """One midpoint step of the exterior viscous system."""
    if dt is None:
        dt = cfl_dt(f, eos, cfg)
    return _midpoint_gas(
        f, eos, cfg, dt,
        lambda x, dx, r, m: exterior_rhs(x, dx, r, m, eos, cfg, ctrl),
        forcing, 0.0,
    )


def step_scaled_origin(f, eos, cfg, ctrl, dt=None, forcing=None):
    """One midpoint step of the origin system in physical variables."""
    pw = 2.0 * (ctrl.d - ctrl.c)
    if dt is None:
        dt = cfl_dt(f, eos, cfg, pw)
    return _midpoint_gas(
        f, eos, cfg, dt,
        lambda x, dx, r, m: scaled_origin_rhs(x, dx, r, m, eos, cfg, ctrl),
        forcing, pw,
    )


def xi_of_x(x, c, d):
    """The stretched coordinate: x**(c-d+1)/(c-d+1), or ln x when c-d+1 = 0."""
    k = c - d + 1.0
    x = np.asarray(x, dtype=float)
    return np.log(x) if k == 0.0 else x**k / k


def x_of_xi(xi, c, d):
    k = c - d + 1.0
    xi = np.asarray(xi, dtype=float)
    return np.exp(xi) if k == 0.0 else (k * xi) ** (1.0 / k)


def step_origin_xi(f, eos, cfg, ctrl, dt=None, forcing=None):
    """One midpoint step of the scaled system on a uniform xi grid.

    f.x holds xi nodes; the physical positions are recovered through
    x_of_xi.  The scaled fields diffuse with plain eps here, so the CFL
    weight is 1.
    """
    x_phys = x_of_xi(f.x, ctrl.c, ctrl.d)
    if dt is None:
        dt = cfl_dt(f, eos, cfg)
    return _midpoint_gas(
        f, eos, cfg, dt,
        lambda xi, dxi, r, m: _origin_xi_rhs(x_phys, dxi, r, m, eos, cfg, ctrl),
        forcing, 0.0,
    )


def step_generic(f, coeffs, diffusion=1.0, dt=None, boundary=None):
    """One midpoint step of the generic 2x2 system.

    p_t + mu1 p_x = diffusion p_xx + a11 p + a12 q + R1 (and likewise for q);
    the maximum-principle statement holds for diffusion exactly 1, which is
    the default.  p_x, q_x handed to the callbacks are the same central
    differences the step uses.
    """
    if dt is None:
        raise ValueError("step_generic needs an explicit dt")
    x, dx, t = f.x, f.dx, f.time
    p, q = (np.asarray(a, dtype=float) for a in f.data)

    def rhs(p, q, t):
        p_x = ddx_central(p, dx)
        q_x = ddx_central(q, dx)
        args = (x, t, p, q, p_x, q_x)
        out = (
            -coeffs.mu1(*args) * p_x
            + diffusion * d2dx2_central(p, dx)
            + coeffs.a11(*args) * p
            + coeffs.a12(*args) * q
            + coeffs.r1(*args),
            -coeffs.mu2(*args) * q_x
            + diffusion * d2dx2_central(q, dx)
            + coeffs.a21(*args) * p
            + coeffs.a22(*args) * q
            + coeffs.r2(*args),
        )
        for arr in out:
            if not np.all(np.isfinite(arr)):
                raise CoefficientError("generic-system callback produced non-finite values")
        return out

    k1p, k1q = rhs(p, q, t)
    p_h, q_h = p + 0.5 * dt * k1p, q + 0.5 * dt * k1q
    _assign_bc(p_h, q_h, _bc_at(boundary, f, t + 0.5 * dt))
    k2p, k2q = rhs(p_h, q_h, t + 0.5 * dt)
    p_n, q_n = p + dt * k2p, q + dt * k2q
    _assign_bc(p_n, q_n, _bc_at(boundary, f, t + dt))
    return f.replace(data=PairState(p_n, q_n), time=t + dt)


def advance(f, t_end, step_fn, dt_fn, on_step=None, max_steps=5_000_000):
    """March a field to t_end with per-step dt from dt_fn(f).

    step_fn(f, dt) produces the next field; on_step(f) observes each result.
    """
    for _ in range(max_steps):
        remaining = t_end - f.time
        if remaining <= 1e-14:
            return f
        dt = min(dt_fn(f), remaining)
        if dt <= 0.0:
            raise ValueError("nonpositive time step")
        f = step_fn(f, dt)
        if on_step is not None:
            on_step(f)
    raise RuntimeError(f"advance hit the step cap before t={t_end}")
