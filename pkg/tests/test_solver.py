"""Stepper tests: stationary states, stability guards, the scaled-system
equivalences, the generic maximum-principle solver, and the mass budget."""

import numpy as np
import pytest

from radialgas.controls import OriginParams, choose_constants
from radialgas.gas import EosParams, GasState, riemann_invariants
from radialgas.grid import Field1D, Grid1D, ddx_one_sided
from radialgas.initial import InitialProfile, mollify_exterior
from radialgas.solver import (
    CflError,
    CoefficientError,
    GenericCoeffs,
    PairState,
    PositivityError,
    SolverConfig,
    advance,
    cfl_dt,
    step_exterior,
    step_generic,
    step_origin_xi,
    step_scaled_origin,
    x_of_xi,
    xi_of_x,
)

GAMMA2 = EosParams(2.0)


def _field(grid, rho, mom, time=0.0):
    return Field1D(grid, GasState(np.asarray(rho, float), np.asarray(mom, float)), time)


def _rest(grid, rho_c=1.0):
    return _field(grid, np.full(grid.nx, rho_c), np.zeros(grid.nx))


def _blast_profile(eos, ctrl, center=2.5, width=0.5):
    """Outward-moving pulse on a decaying background, strictly inside the
    invariant region of ctrl."""

    def rho_theta(x):
        g = np.exp(-(((x - center) / width) ** 2))
        return ctrl.m2 * x ** (-ctrl.alpha) / 4.0 * (1.0 + 2.0 * g)

    def rho(x):
        return rho_theta(x) ** (1.0 / eos.theta)

    def mom(x):
        g = np.exp(-(((x - center) / width) ** 2))
        return rho(x) * ctrl.m2 * x ** (-ctrl.alpha) / 2.0 * g

    return InitialProfile(rho, mom, "blast")


# ---------------------------------------------------------------- stationary


def test_rest_state_is_bitwise_stationary():
    grid = Grid1D(1.0, 2.0, 51)
    cfg = SolverConfig(eps=1e-2, t_end=1.0, extra_visc_term=True)
    ctrl = choose_constants(1.0, GAMMA2, 3, 1.0, eps=1e-2)
    f = _rest(grid, rho_c=0.7)
    dt = cfl_dt(f, GAMMA2, cfg)
    g = f
    for _ in range(5):
        g = step_exterior(g, GAMMA2, cfg, ctrl, dt)
    assert np.array_equal(g.data.rho, f.data.rho)
    assert np.array_equal(g.data.mom, f.data.mom)
    assert g.time == pytest.approx(5 * dt)


def test_vacuum_floor_scaled_density_stays_constant():
    # xi-form of the origin system: with mom = 0 both source terms of the
    # density equation vanish, so a constant scaled density is frozen; the
    # momentum picks up only the (tiny) pressure source.
    eos = GAMMA2
    ctrl = OriginParams(eos, 3, c=1.0, m3=2.8, eps=1e-2)
    xi = xi_of_x(np.array([0.1, 1.0]), ctrl.c, ctrl.d)
    grid = Grid1D(float(xi[0]), float(xi[1]), 101)
    floor = (1e-2) ** (2.0 / eos.theta)
    f = _field(grid, np.full(grid.nx, floor), np.zeros(grid.nx))
    cfg = SolverConfig(eps=1e-2, t_end=1.0)
    for _ in range(3):
        f = step_origin_xi(f, eos, cfg, ctrl, dt=1e-3)
    # the only drift channel is the momentum picked up from the pressure
    # source, itself of order p(floor) ~ 1e-17
    assert np.allclose(f.data.rho, floor, rtol=1e-10, atol=0.0)
    assert np.max(np.abs(f.data.mom)) < 1e-15


# ------------------------------------------------------------------- cfl_dt


def test_cfl_dt_worked_example():
    grid = Grid1D(1.0, 2.0, 101)  # dx = 0.01
    f = _rest(grid, rho_c=1.0)
    cfg = SolverConfig(eps=1e-3, cfl=0.4, t_end=1.0)
    # sound speed theta*rho**theta = 0.5, so min(0.4*0.01/0.5, 0.4*1e-4/2e-3)
    assert cfl_dt(f, GAMMA2, cfg) == pytest.approx(0.008, rel=1e-12)


def test_cfl_dt_hyperbolic_limit_for_small_eps():
    grid = Grid1D(1.0, 2.0, 101)
    f = _rest(grid, rho_c=4.0)  # sound speed 0.5*2 = 1
    cfg = SolverConfig(eps=1e-12, cfl=0.4, t_end=1.0)
    assert cfl_dt(f, GAMMA2, cfg) == pytest.approx(0.4 * 0.01 / 1.0, rel=1e-12)


def test_cfl_dt_viscous_scaling_and_weight():
    cfg = SolverConfig(eps=1.0, cfl=0.4, t_end=1.0)
    coarse = _rest(Grid1D(1.0, 2.0, 101))
    fine = _rest(Grid1D(1.0, 2.0, 201))
    assert cfl_dt(coarse, GAMMA2, cfg) == pytest.approx(
        4.0 * cfl_dt(fine, GAMMA2, cfg), rel=1e-12
    )
    # an x**2 viscous weight on [1,2] raises the effective viscosity 4x
    assert cfl_dt(coarse, GAMMA2, cfg, weight_pow=2.0) == pytest.approx(
        cfl_dt(coarse, GAMMA2, cfg) / 4.0, rel=1e-12
    )


def test_step_rejects_oversized_dt():
    grid = Grid1D(1.0, 2.0, 101)
    f = _rest(grid)
    cfg = SolverConfig(eps=1e-2, t_end=1.0)
    with pytest.raises(CflError):
        step_exterior(f, GAMMA2, cfg, None, dt=10.0 * cfl_dt(f, GAMMA2, cfg))


# ------------------------------------------------------- guards and plumbing


def test_positivity_abort_reports_location():
    grid = Grid1D(1.0, 2.0, 51)
    f = _rest(grid, rho_c=1e-3)

    def draining(t):
        return (1e-3 - 0.5 * t, 0.0), (1e-3, 0.0)

    cfg = SolverConfig(eps=1e-3, t_end=1.0, boundary=draining)
    with pytest.raises(PositivityError, match="x=1"):
        g = f
        for _ in range(50):
            g = step_exterior(g, GAMMA2, cfg, None, dt=2e-3)


def test_boundary_callable_values_are_assigned_exactly():
    grid = Grid1D(1.0, 2.0, 51)

    def bc(t):
        return (1.0 + 0.1 * t, 0.05 * t), (2.0, -0.01 * t)

    cfg = SolverConfig(eps=1e-3, t_end=1.0, boundary=bc)
    f = _rest(grid)
    dt = 1e-3
    g = step_exterior(f, GAMMA2, cfg, None, dt=dt)
    assert g.data.rho[0] == 1.0 + 0.1 * dt
    assert g.data.mom[0] == 0.05 * dt
    assert g.data.rho[-1] == 2.0
    assert g.data.mom[-1] == -0.01 * dt


def test_steppers_are_deterministic():
    eps = 1e-2
    ctrl = choose_constants(1.0, GAMMA2, 3, 1.0, eps=eps)
    grid = Grid1D(1.0, 3.0, 201)
    prof = _blast_profile(GAMMA2, ctrl)
    rho, mom = mollify_exterior(prof, GAMMA2, eps, grid.x)
    cfg = SolverConfig(eps=eps, t_end=1.0, extra_visc_term=True)

    def run():
        f = _field(grid, rho, mom)
        for _ in range(10):
            f = step_exterior(f, GAMMA2, cfg, ctrl, cfl_dt(f, GAMMA2, cfg))
        return f

    a, b = run(), run()
    assert np.array_equal(a.data.rho, b.data.rho)
    assert np.array_equal(a.data.mom, b.data.mom)
    assert a.time == b.time


def test_single_step_keeps_positive_sound_speed():
    eps = 1e-2
    ctrl = choose_constants(1.0, GAMMA2, 3, 1.0, eps=eps)
    grid = Grid1D(1.0, 11.0, 1001)  # dx = 1e-2
    rho, mom = mollify_exterior(_blast_profile(GAMMA2, ctrl), GAMMA2, eps, grid.x)
    cfg = SolverConfig(eps=eps, t_end=1.0, extra_visc_term=True)
    f = _field(grid, rho, mom)
    g = step_exterior(f, GAMMA2, cfg, ctrl, cfl_dt(f, GAMMA2, cfg))
    w, z = riemann_invariants(g.data, GAMMA2)
    assert np.all(g.data.rho > 0.0)
    assert np.all(w - z > 0.0)


def test_advance_reaches_t_end_and_reports_steps():
    grid = Grid1D(1.0, 2.0, 21)
    cfg = SolverConfig(eps=1e-3, t_end=1.0)
    seen = []
    # near-vacuum rest state: stability limit 0.5, so dt = 0.3 is admissible
    f = advance(
        _rest(grid, rho_c=1e-6),
        1.0,
        lambda f, dt: step_exterior(f, GAMMA2, cfg, None, dt),
        lambda f: 0.3,
        on_step=seen.append,
    )
    assert f.time == pytest.approx(1.0, abs=1e-13)
    assert len(seen) == 4
    assert seen[-1] is f


# ------------------------------------------------- scaled-origin equivalences


def test_c_zero_reduces_to_exterior_system():
    eos = GAMMA2
    grid = Grid1D(1.0, 2.0, 101)
    rho = 1.0 + 0.3 * np.sin(np.pi * (grid.x - 1.0))
    mom = 0.1 * np.cos(np.pi * grid.x) * rho
    cfg = SolverConfig(eps=1e-2, t_end=1.0, extra_visc_term=False)
    ctrl0 = OriginParams(eos, 3, c=0.0, m3=2.8, eps=1e-2)
    f = _field(grid, rho, mom)
    dt = cfl_dt(f, eos, cfg)
    a = step_scaled_origin(f, eos, cfg, ctrl0, dt)
    b = step_exterior(f, eos, cfg, None, dt)
    assert np.allclose(a.data.rho, b.data.rho, rtol=0.0, atol=1e-12)
    assert np.allclose(a.data.mom, b.data.mom, rtol=0.0, atol=1e-12)


def _xi_vs_x_mismatch(nx, dt, eos, ctrl, cfg):
    """Sup mismatch of the two origin steppers after one step, compared on
    common physical points."""
    c, d = ctrl.c, ctrl.d
    x_lo, x_hi = 0.25, 1.0

    def rho_phys(x):
        return 0.2 + 0.1 * x**2 + 0.05 * np.sin(3.0 * x)

    def mom_phys(x):
        return 0.05 * x**3 * (1.0 + 0.5 * np.cos(2.0 * x))

    gx = Grid1D(x_lo, x_hi, nx)
    fx = _field(gx, rho_phys(gx.x), mom_phys(gx.x))
    ax = step_scaled_origin(fx, eos, cfg, ctrl, dt)

    xi0, xi1 = (float(v) for v in xi_of_x(np.array([x_lo, x_hi]), c, d))
    gxi = Grid1D(xi0, xi1, nx)
    xp = x_of_xi(gxi.x, c, d)
    fxi = _field(gxi, rho_phys(xp) * xp ** (-c), mom_phys(xp) * xp ** (-d))
    axi = step_origin_xi(fxi, eos, cfg, ctrl, dt)

    probe = np.linspace(0.35, 0.9, 50)
    rho_a = np.interp(probe, gx.x, ax.data.rho)
    rho_b = np.interp(probe, xp, axi.data.rho * xp**c)
    mom_a = np.interp(probe, gx.x, ax.data.mom)
    mom_b = np.interp(probe, xp, axi.data.mom * xp**d)
    return max(np.max(np.abs(rho_a - rho_b)), np.max(np.abs(mom_a - mom_b)))


def test_xi_and_x_forms_agree_to_second_order():
    eos = GAMMA2
    ctrl = OriginParams(eos, 3, c=1.0, m3=2.8, eps=5e-3)
    cfg = SolverConfig(eps=5e-3, t_end=1.0)
    coarse = _xi_vs_x_mismatch(81, 2e-4, eos, ctrl, cfg)
    fine = _xi_vs_x_mismatch(161, 2e-4, eos, ctrl, cfg)
    assert coarse > 0.0
    assert coarse / fine > 3.0


def test_xi_map_round_trip_and_log_branch():
    x = np.linspace(0.2, 3.0, 37)
    assert np.allclose(x_of_xi(xi_of_x(x, 1.0, 1.5), 1.0, 1.5), x, rtol=1e-14)
    # gamma = 3 gives theta = 1, so c = 1 makes c - d + 1 = 0: log stretch
    assert np.allclose(x_of_xi(xi_of_x(x, 1.0, 2.0), 1.0, 2.0), x, rtol=1e-14)
    assert xi_of_x(1.0, 1.0, 2.0) == 0.0


# ------------------------------------------------------------- mass budget


def test_mass_budget_closes_over_unit_time():
    eos = GAMMA2
    grid = Grid1D(1.0, 11.0, 800)
    x = grid.x
    rho = 1.0 + 0.5 * np.exp(-((x - 5.0) ** 2))
    mom = 0.3 * np.exp(-((x - 5.0) ** 2))
    cfg = SolverConfig(eps=1e-2, cfl=0.4, ndim=3, t_end=1.0)
    f = _field(grid, rho, mom)

    def rate(g):
        r, m = g.data
        gr_lo, gr_hi = ddx_one_sided(r, g.dx)
        return (
            -(m[-1] - m[0])
            - (cfg.ndim - 1) * np.trapezoid(m / g.x, dx=g.dx)
            + cfg.eps * (gr_hi - gr_lo)
        )

    def mass(g):
        return np.trapezoid(g.data.rho, dx=g.dx)

    predicted = 0.0
    prev = f
    states = [f]

    def on_step(g):
        states.append(g)

    cur = advance(
        f,
        1.0,
        lambda g, dt: step_exterior(g, eos, cfg, None, dt),
        lambda g: cfl_dt(g, eos, cfg),
        on_step=on_step,
    )
    for a, b in zip(states[:-1], states[1:]):
        predicted += (b.time - a.time) * 0.5 * (rate(a) + rate(b))
    drift = abs(mass(cur) - mass(f) - predicted) / mass(f)
    assert drift < 1e-3


# ------------------------------------------------------------ generic system


def _zeros(*_args):
    return 0.0


def _const(v):
    return lambda *args: v


def _pq(grid, p, q, time=0.0):
    return Field1D(grid, PairState(np.asarray(p, float), np.asarray(q, float)), time)


def test_generic_pure_heat_keeps_sign():
    grid = Grid1D(0.0, 1.0, 101)
    coeffs = GenericCoeffs(*([_zeros] * 8))
    f = _pq(grid, -np.sin(np.pi * grid.x) ** 2, np.zeros(grid.nx))
    dt = 0.25 * grid.dx**2
    lo = f.data.p.min()
    bc = ((0.0, 0.0), (0.0, 0.0))
    for _ in range(2000):
        f = step_generic(f, coeffs, 1.0, dt, boundary=bc)
        assert f.data.p.max() <= 1e-12
        assert f.data.p.min() >= lo - 1e-12
    assert f.data.p.max() <= 1e-12


def test_generic_damped_heat_matches_exact_solution():
    grid = Grid1D(0.0, 1.0, 64)
    coeffs = GenericCoeffs(
        _zeros, _zeros, _const(-1.0), _zeros, _zeros, _const(-1.0), _zeros, _zeros
    )
    p0 = np.sin(np.pi * grid.x)
    q0 = -0.5 * np.sin(np.pi * grid.x)
    f = _pq(grid, p0, q0)
    dt = 0.3 * grid.dx**2
    bc = ((0.0, 0.0), (0.0, 0.0))
    t_end = 0.05
    sup_prev = np.abs(f.data.p).max()
    while f.time < t_end - 1e-12:
        f = step_generic(f, coeffs, 1.0, min(dt, t_end - f.time), boundary=bc)
        sup = np.abs(f.data.p).max()
        assert sup <= sup_prev + 1e-15
        sup_prev = sup
    decay = np.exp(-(np.pi**2 + 1.0) * f.time)
    assert np.max(np.abs(f.data.p - decay * p0)) < 1e-3
    assert np.max(np.abs(f.data.q - decay * q0)) < 1e-3


def test_generic_sign_structure_run():
    # coefficients honoring the sign hypotheses: a12, a21 <= 0, R1 <= 0,
    # R2 >= 0, so p <= 0 and q >= 0 survive the run up to O(dx**2) slack
    grid = Grid1D(0.0, 1.0, 101)
    coeffs = GenericCoeffs(
        mu1=lambda x, t, p, q, px, qx: 0.3 * qx,
        mu2=lambda x, t, p, q, px, qx: -0.2 * np.sin(x + t),
        a11=_const(-1.0),
        a12=lambda x, t, p, q, px, qx: -0.8 * (1.0 + np.sin(x) ** 2),
        a21=_const(-0.5),
        a22=lambda x, t, p, q, px, qx: -2.0 + np.sin(x + t),
        r1=lambda x, t, p, q, px, qx: -0.2 / (1.0 + x**2),
        r2=lambda x, t, p, q, px, qx: 0.15 * (1.0 + np.cos(t) ** 2),
    )
    p0 = -np.sin(np.pi * grid.x) ** 2
    q0 = 0.3 + 0.5 * np.sin(2.0 * np.pi * grid.x) ** 2
    f = _pq(grid, p0, q0)
    bc = lambda t: ((0.0, q0[0]), (0.0, q0[-1]))
    dt = 0.25 * grid.dx**2
    tol = 1e-8 + 10.0 * grid.dx**2
    worst_p, worst_q = 0.0, 0.0
    while f.time < 0.2:
        f = step_generic(f, coeffs, 1.0, dt, boundary=bc)
        worst_p = max(worst_p, float(f.data.p.max()))
        worst_q = min(worst_q, float(f.data.q.min()))
    assert worst_p <= tol
    assert worst_q >= -tol


def test_generic_rejects_nonfinite_coefficients():
    grid = Grid1D(0.0, 1.0, 11)
    coeffs = GenericCoeffs(
        _zeros, _zeros,
        lambda x, t, p, q, px, qx: np.where(x == 0.5, np.inf, 0.0),
        _zeros, _zeros, _zeros, _zeros, _zeros,
    )
    f = _pq(grid, -np.ones(grid.nx), np.ones(grid.nx))
    with pytest.raises(CoefficientError):
        step_generic(f, coeffs, 1.0, 1e-4)


def test_generic_requires_dt():
    grid = Grid1D(0.0, 1.0, 11)
    f = _pq(grid, np.zeros(grid.nx), np.zeros(grid.nx))
    with pytest.raises(ValueError):
        step_generic(f, GenericCoeffs(*([_zeros] * 8)))
