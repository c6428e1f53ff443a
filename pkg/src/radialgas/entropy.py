"""Weak-form and entropy diagnostics over recorded trajectories.

A Trajectory is a time-ordered stack of solver snapshots on one grid.  The
diagnostics evaluate, by trapezoid quadrature in x and t against smooth
compactly supported bumps: the weak-form residual of the inviscid system,
the distributional entropy production of a chosen entropy pair, the local
viscous dissipation integral, and Cauchy differences across a viscosity
sweep.  All of them are read-only and deterministic.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .gas import (
    mechanical_entropy,
    mechanical_entropy_gradient,
    pressure,
    velocity,
    weak_entropy,
    weak_entropy_gradient,
)
from .grid import ddx_central
from .util import bump, bump_prime

__all__ = [
    "Trajectory",
    "TestFunction",
    "GeneratorEntry",
    "ConvergenceTable",
    "default_test_functions",
    "g_family",
    "weak_residual",
    "entropy_production",
    "dissipation_integral",
    "convergence_study",
]


@dataclass(frozen=True)
class Trajectory:
    """Snapshots of one run plus the metadata the diagnostics need.

    weight_pow is the x-power weighting the dissipation density (zero on
    exterior domains, 2(d-c) for the scaled origin system).
    """

    snapshots: tuple
    eps: float
    eos: object
    ndim: int = 3
    weight_pow: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "snapshots", tuple(self.snapshots))
        if len(self.snapshots) < 2:
            raise ValueError("a trajectory needs at least two snapshots")
        g0 = self.snapshots[0].grid
        if any(s.grid != g0 for s in self.snapshots):
            raise ValueError("snapshots must share one grid")
        t = self.times
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("snapshot times must increase strictly")
        if self.eps <= 0.0:
            raise ValueError("viscosity eps must be positive")

    @property
    def grid(self):
        return self.snapshots[0].grid

    @property
    def times(self):
        return np.array([s.time for s in self.snapshots])

    def rho_tx(self):
        return np.stack([np.asarray(s.data[0], dtype=float) for s in self.snapshots])

    def mom_tx(self):
        return np.stack([np.asarray(s.data[1], dtype=float) for s in self.snapshots])


@dataclass(frozen=True)
class TestFunction:
    """Tensor bump exp(1/(y**2 - 1)) in each of x and t, supported on
    |x - x0| < rx, |t - t0| < rt.  Nonnegative by construction."""

    x0: float
    t0: float
    rx: float
    rt: float
    nonneg: bool = True

    def __post_init__(self):
        if self.rx <= 0.0 or self.rt <= 0.0:
            raise ValueError("bump radii must be positive")

    def value(self, x, t):
        return bump((np.asarray(x) - self.x0) / self.rx) * bump(
            (np.asarray(t) - self.t0) / self.rt
        )

    def dx(self, x, t):
        return (
            bump_prime((np.asarray(x) - self.x0) / self.rx)
            / self.rx
            * bump((np.asarray(t) - self.t0) / self.rt)
        )

    def dt(self, x, t):
        return bump((np.asarray(x) - self.x0) / self.rx) * (
            bump_prime((np.asarray(t) - self.t0) / self.rt) / self.rt
        )

    @property
    def x_support(self):
        return self.x0 - self.rx, self.x0 + self.rx

    @property
    def t_support(self):
        return self.t0 - self.rt, self.t0 + self.rt


def default_test_functions(x_lo, x_hi, t_end):
    """The fixed family of twelve bump placements used by the reports:
    a 3x3 bulk lattice, two near-boundary columns, one late-time bump."""
    span = x_hi - x_lo
    out = []
    for fx in (0.18, 0.5, 0.82):
        for ft in (0.3, 0.55, 0.8):
            out.append(
                TestFunction(x_lo + fx * span, ft * t_end, 0.12 * span, 0.1 * t_end)
            )
    out.append(TestFunction(x_lo + 0.07 * span, 0.45 * t_end, 0.05 * span, 0.1 * t_end))
    out.append(TestFunction(x_lo + 0.93 * span, 0.45 * t_end, 0.05 * span, 0.1 * t_end))
    out.append(TestFunction(x_lo + 0.5 * span, 0.92 * t_end, 0.12 * span, 0.06 * t_end))
    return tuple(out)


class GeneratorEntry(NamedTuple):
    """A generator for the weak entropy family, with its derivative and a
    convexity marker (non-convex entries are informational only)."""

    name: str
    g: Callable
    gprime: Callable
    convex: bool


def _exp_clipped(sign):
    def g(xi):
        return np.exp(np.clip(sign * xi, -40.0, 40.0))

    def gp(xi):
        s = np.clip(sign * xi, -40.0, 40.0)
        return sign * np.exp(s) * (np.abs(sign * xi) <= 40.0)

    return g, gp


def _softabs(k, delta2=0.04):
    def g(xi):
        return np.sqrt((xi - k) ** 2 + delta2)

    def gp(xi):
        return (xi - k) / np.sqrt((xi - k) ** 2 + delta2)

    return g, gp


def g_family():
    """The fixed generator family: identity, square, clipped exponentials of
    both signs, and smoothed kinks at a few offsets.  All convex."""
    entries = [
        GeneratorEntry("linear", lambda xi: xi, lambda xi: np.ones_like(np.asarray(xi, dtype=float)), True),
        GeneratorEntry("square", lambda xi: xi**2, lambda xi: 2.0 * xi, True),
    ]
    for name, sign in (("exp+", 1.0), ("exp-", -1.0)):
        g, gp = _exp_clipped(sign)
        entries.append(GeneratorEntry(name, g, gp, True))
    for k in (-0.5, 0.25, 1.0):
        g, gp = _softabs(k)
        entries.append(GeneratorEntry(f"softabs@{k}", g, gp, True))
    return tuple(entries)


def _check_x_support(phi, grid):
    lo, hi = phi.x_support
    if not (grid.a < lo and hi < grid.b):
        raise ValueError(
            f"test-function x-support [{lo:.4g}, {hi:.4g}] is not strictly "
            f"inside ({grid.a:.4g}, {grid.b:.4g})"
        )


def _integrate_tx(values_tx, times, dx):
    """Trapezoid in x then in t over a (nt, nx) sample array."""
    per_time = np.trapezoid(values_tx, dx=dx, axis=1)
    return float(np.trapezoid(per_time, x=times))


def _geometric_source(traj, rho, mom):
    x = traj.grid.x
    nd1 = traj.ndim - 1
    return -nd1 * mom / x, -nd1 * mom * mom / (rho * x)


def weak_residual(traj, phi, check_support=True):
    """Discrete weak-form residual of the inviscid system for one test
    function: integrals of v phi_t + F(v) phi_x + G(x, v) phi over the
    recorded span plus the initial trace.

    Returns the (density-row, momentum-row) pair.  The time support may dip
    below t = 0 (the trace term accounts for it) but must end before the
    last snapshot; the x-support must be strictly interior.
    """
    times = traj.times
    if check_support:
        _check_x_support(phi, traj.grid)
        if phi.t_support[1] >= times[-1]:
            raise ValueError("test-function support must end before the run does")
    x = traj.grid.x
    rho, mom = traj.rho_tx(), traj.mom_tx()
    tcol = times[:, None]
    phi_v = phi.value(x[None, :], tcol)
    phi_t = phi.dt(x[None, :], tcol)
    phi_x = phi.dx(x[None, :], tcol)
    g_rho, g_mom = _geometric_source(traj, rho, mom)
    flux_mom = mom * mom / rho + pressure(rho, traj.eos)
    dx = traj.grid.dx
    res_rho = _integrate_tx(rho * phi_t + mom * phi_x + g_rho * phi_v, times, dx)
    res_mom = _integrate_tx(mom * phi_t + flux_mom * phi_x + g_mom * phi_v, times, dx)
    if times[0] == 0.0:
        phi0 = phi.value(x, 0.0)
        res_rho += float(np.trapezoid(rho[0] * phi0, dx=dx))
        res_mom += float(np.trapezoid(mom[0] * phi0, dx=dx))
    return np.array([res_rho, res_mom])


def _pair_arrays(traj, pair, nodes):
    """Entropy, flux, and gradient samples of the selected pair over the
    whole trajectory, as (nt, nx) arrays."""
    rho, mom = traj.rho_tx(), traj.mom_tx()
    state = (rho, mom)
    if isinstance(pair, str):
        if pair != "mechanical":
            raise ValueError(f"unknown entropy pair {pair!r}")
        eta, q = mechanical_entropy(state, traj.eos)
        eta_rho, eta_m = mechanical_entropy_gradient(state, traj.eos)
    else:
        if isinstance(pair, GeneratorEntry):
            g, gp = pair.g, pair.gprime
        else:
            g, gp = pair
        eta, q = weak_entropy(state, traj.eos, g, nodes=nodes)
        eta_rho, eta_m = weak_entropy_gradient(state, traj.eos, g, gp, nodes=nodes)
    return rho, mom, eta, q, eta_rho, eta_m


def entropy_production(traj, pair, phi, nodes=32, check_support=True):
    """Distributional entropy production D(phi) = integral of
    eta phi_t + q phi_x + grad(eta).G phi against a nonnegative bump
    supported away from t = 0 and the spatial boundary.

    An entropy solution has D(phi) >= 0 for convex pairs; viscous runs are
    held to D(phi) >= -(K_visc eps + K_dx dx**2).
    """
    times = traj.times
    if check_support:
        if not getattr(phi, "nonneg", False):
            raise ValueError("entropy production needs a nonnegative test function")
        _check_x_support(phi, traj.grid)
        t_lo, t_hi = phi.t_support
        if not (times[0] < t_lo and 0.0 < t_lo and t_hi < times[-1]):
            raise ValueError(
                "test-function t-support must sit strictly inside the run"
            )
    x = traj.grid.x
    rho, mom, eta, q, eta_rho, eta_m = _pair_arrays(traj, pair, nodes)
    g_rho, g_mom = _geometric_source(traj, rho, mom)
    tcol = times[:, None]
    phi_v = phi.value(x[None, :], tcol)
    phi_t = phi.dt(x[None, :], tcol)
    phi_x = phi.dx(x[None, :], tcol)
    grad_dot_g = eta_rho * g_rho + eta_m * g_mom
    return _integrate_tx(
        eta * phi_t + q * phi_x + grad_dot_g * phi_v, times, traj.grid.dx
    )


def _window_indices(traj, window, strict):
    wx_lo, wx_hi, wt_lo, wt_hi = window
    if not (wx_lo < wx_hi and wt_lo < wt_hi):
        raise ValueError("window must have positive extent")
    g = traj.grid
    times = traj.times
    if strict and not (g.a < wx_lo and wx_hi < g.b):
        raise ValueError("window must be compactly inside the spatial domain")
    if not (wx_lo >= g.a and wx_hi <= g.b and wt_lo >= times[0] and wt_hi <= times[-1]):
        raise ValueError("window exceeds the recorded span")
    i0 = int(np.searchsorted(g.x, wx_lo, "left"))
    i1 = int(np.searchsorted(g.x, wx_hi, "right"))
    k0 = int(np.searchsorted(times, wt_lo, "left"))
    k1 = int(np.searchsorted(times, wt_hi, "right"))
    if i1 - i0 < 2 or k1 - k0 < 2:
        raise ValueError("window spans fewer than two nodes or snapshots")
    return i0, i1, k0, k1


def dissipation_integral(traj, window):
    """Viscous dissipation eps (rho**(gamma-2) rho_x**2 + rho u_x**2) times
    the trajectory's x-weight, integrated over a space-time window given as
    (x_lo, x_hi, t_lo, t_hi)."""
    i0, i1, k0, k1 = _window_indices(traj, window, strict=True)
    g = traj.grid
    rho, mom = traj.rho_tx(), traj.mom_tx()
    u = velocity((rho, mom), traj.eos)
    gamma = traj.eos.gamma
    density = np.empty((k1 - k0, i1 - i0))
    for row, k in enumerate(range(k0, k1)):
        rho_x = ddx_central(rho[k], g.dx)
        u_x = ddx_central(u[k], g.dx)
        full = traj.eps * (rho[k] ** (gamma - 2.0) * rho_x**2 + rho[k] * u_x**2)
        if traj.weight_pow != 0.0:
            full = full * g.x**traj.weight_pow
        density[row] = full[i0:i1]
    per_time = np.trapezoid(density, dx=g.dx, axis=1)
    return float(np.trapezoid(per_time, x=traj.times[k0:k1]))


@dataclass(frozen=True)
class ConvergenceTable:
    """Cauchy differences of consecutive runs in a viscosity sweep."""

    eps: tuple
    diffs: tuple
    p: float
    window: tuple
    decreasing: bool

    def __str__(self):
        rows = [
            f"  eps {a:.3e} -> {b:.3e}: |diff|_p = {d:.6e}"
            for (a, b), d in zip(zip(self.eps[:-1], self.eps[1:]), self.diffs)
        ]
        tail = "strictly decreasing" if self.decreasing else "NOT decreasing"
        return "\n".join([f"L^{self.p} Cauchy table on {self.window}:"] + rows + [f"  {tail}"])


def convergence_study(runs, window, p=1.0):
    """Cauchy table of consecutive-run differences in L^p over a window.

    Runs must share snapshot times; fields are interpolated in x onto the
    finest grid before differencing.  The verdict flags a strictly
    decreasing sequence, the computable shadow of strong convergence.
    """
    if len(runs) < 3:
        raise ValueError("a convergence study needs at least three runs")
    if p < 1.0:
        raise ValueError("need p >= 1")
    times = runs[0].times
    for r in runs[1:]:
        if len(r.times) != len(times) or not np.allclose(r.times, times, rtol=1e-12, atol=1e-12):
            raise ValueError("runs must share snapshot times")
    finest = min(runs, key=lambda r: r.grid.dx)
    i0, i1, k0, k1 = _window_indices(finest, window, strict=False)
    xw = finest.grid.x[i0:i1]
    tw = times[k0:k1]

    def resample(run):
        rho, mom = run.rho_tx(), run.mom_tx()
        if run.grid == finest.grid:
            return rho[k0:k1, i0:i1], mom[k0:k1, i0:i1]
        xs = run.grid.x
        if xw[0] < xs[0] or xw[-1] > xs[-1]:
            raise ValueError("window exceeds a run's spatial domain")
        r = np.stack([np.interp(xw, xs, rho[k]) for k in range(k0, k1)])
        m = np.stack([np.interp(xw, xs, mom[k]) for k in range(k0, k1)])
        return r, m

    fields = [resample(r) for r in runs]
    dxw = float(xw[1] - xw[0])
    diffs = []
    for (ra, ma), (rb, mb) in zip(fields[:-1], fields[1:]):
        dens = np.abs(ra - rb) ** p + np.abs(ma - mb) ** p
        per_time = np.trapezoid(dens, dx=dxw, axis=1)
        diffs.append(float(np.trapezoid(per_time, x=tw) ** (1.0 / p)))
    dec = all(b < a for a, b in zip(diffs[:-1], diffs[1:]))
    return ConvergenceTable(
        eps=tuple(r.eps for r in runs),
        diffs=tuple(diffs),
        p=float(p),
        window=tuple(window),
        decreasing=dec,
    )
