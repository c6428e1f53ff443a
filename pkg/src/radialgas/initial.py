"""Initial data for the viscous runs.

A profile is a pair of callables (rho, mom) on the spatial domain.  The
viscous runs never use a raw profile directly: the density is lifted by the
floor eps**(2/theta) and the pair is smoothed with a compactly supported
mollifier of width eps, with constant extension beyond the domain ends.  On
the scaled origin domain the velocity is additionally shifted by +eps and
the momentum is cut off below twice the inner radius, which is what keeps
the lower Riemann invariant nonnegative for inward-closed data.

The floor interacts with the invariant bounds through the elementary
inequality (r + eps**(2/theta))**theta <= r**theta + eps, equivalent to
positivity of f(r) = (eps + r**theta)**(1/theta) - r - eps**(2/theta);
floor_monotonicity_certificate samples f and its derivative so the data
checks can rely on it as a verified fact rather than folklore.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .gas import GasState, riemann_invariants
from .util import bump

__all__ = [
    "InitialProfile",
    "profile_constant",
    "profile_step",
    "profile_powerlaw",
    "profile_gaussian",
    "profile_table",
    "mollifier_weights",
    "mollify_pair",
    "mollify_exterior",
    "mollify_origin",
    "AdmissibilityReport",
    "check_admissible_exterior",
    "check_admissible_origin",
    "scale_transform",
    "floor_monotonicity_certificate",
]


@dataclass(frozen=True)
class InitialProfile:
    """Raw initial data as callables of position."""

    rho: Callable
    mom: Callable
    name: str = "custom"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return GasState(
            np.broadcast_to(np.asarray(self.rho(x), dtype=float), x.shape).copy(),
            np.broadcast_to(np.asarray(self.mom(x), dtype=float), x.shape).copy(),
        )


def profile_constant(rho0, u0=0.0):
    return InitialProfile(
        rho=lambda x: np.full_like(np.asarray(x, dtype=float), rho0),
        mom=lambda x: np.full_like(np.asarray(x, dtype=float), rho0 * u0),
        name="constant",
    )


def profile_step(x0, left, right, width=0.0):
    """Jump at x0 between (rho, u) pairs; width > 0 smooths with a cubic ramp."""
    rl, ul = left
    rr, ur = right

    def ramp(x):
        x = np.asarray(x, dtype=float)
        if width <= 0.0:
            return (x >= x0).astype(float)
        t = np.clip((x - x0) / width + 0.5, 0.0, 1.0)
        return t * t * (3.0 - 2.0 * t)

    def rho(x):
        s = ramp(x)
        return rl + (rr - rl) * s

    def mom(x):
        s = ramp(x)
        return (rl + (rr - rl) * s) * (ul + (ur - ul) * s)

    return InitialProfile(rho=rho, mom=mom, name="step")


def profile_powerlaw(eos, amp, expo, u_scale=0.0, cap=None):
    """rho**theta = min(amp * x**expo, cap), u = u_scale * rho**theta.

    Negative exponents give far-field decay on exterior domains; positive
    exponents with a cap give the quasi-cavity profiles used near the origin.
    """

    def base(x):
        s = amp * np.asarray(x, dtype=float) ** expo
        if cap is not None:
            s = np.minimum(s, cap)
        return s

    def rho(x):
        return base(x) ** (1.0 / eos.theta)

    def mom(x):
        s = base(x)
        return s ** (1.0 / eos.theta) * (u_scale * s)

    return InitialProfile(rho=rho, mom=mom, name="powerlaw")


def profile_gaussian(eos, rho_theta_base, amp, center, width, u_amp=0.0):
    """rho**theta = base + amp * G, u = u_amp * G, G a unit Gaussian bump."""

    def g(x):
        x = np.asarray(x, dtype=float)
        return np.exp(-(((x - center) / width) ** 2))

    def rho(x):
        return (rho_theta_base + amp * g(x)) ** (1.0 / eos.theta)

    def mom(x):
        gv = g(x)
        return (rho_theta_base + amp * gv) ** (1.0 / eos.theta) * (u_amp * gv)

    return InitialProfile(rho=rho, mom=mom, name="gaussian")


def profile_table(x_pts, rho_pts, mom_pts):
    """Piecewise-linear data through tabulated points, constant outside."""
    x_pts = np.asarray(x_pts, dtype=float)
    rho_pts = np.asarray(rho_pts, dtype=float)
    mom_pts = np.asarray(mom_pts, dtype=float)
    return InitialProfile(
        rho=lambda x: np.interp(x, x_pts, rho_pts),
        mom=lambda x: np.interp(x, x_pts, mom_pts),
        name="table",
    )


def mollifier_weights(eps, n=17):
    """Offsets and weights of the discrete mollifier of width eps.

    Simpson weights on n equispaced nodes over [-eps, eps] times the standard
    bump, renormalised to unit sum, so constants are reproduced exactly and
    the weights form a partition of unity to machine precision.
    """
    n = int(n)
    if n < 5 or n % 2 == 0:
        raise ValueError("need an odd node count >= 5")
    y = np.linspace(-eps, eps, n)
    h = y[1] - y[0]
    sw = np.ones(n)
    sw[1:-1:2] = 4.0
    sw[2:-1:2] = 2.0
    sw *= h / 3.0
    kappa = sw * bump(y / eps)
    return y, kappa / kappa.sum()


def mollify_pair(rho_fn, mom_fn, x, dom, eps, n=17):
    """Convolve a data pair with the discrete mollifier, clip-extending
    both functions beyond dom = (lo, hi) by their boundary values."""
    x = np.asarray(x, dtype=float)
    y, wts = mollifier_weights(eps, n)
    args = np.clip(x[:, None] - y[None, :], dom[0], dom[1])
    rho = np.asarray(rho_fn(args), dtype=float) @ wts
    mom = np.asarray(mom_fn(args), dtype=float) @ wts
    return GasState(rho, mom)


def _floored_pair(profile, eos, eps, u_shift=0.0):
    shift = eps ** (2.0 / eos.theta)

    def rho_fn(y):
        return np.asarray(profile.rho(y), dtype=float) + shift

    def mom_fn(y):
        r = np.asarray(profile.rho(y), dtype=float)
        m = np.asarray(profile.mom(y), dtype=float)
        u = np.where(r > 0.0, m / np.where(r > 0.0, r, 1.0), 0.0)
        return (u + u_shift) * (r + shift)

    return rho_fn, mom_fn


def mollify_exterior(profile, eos, eps, x, n=17):
    """Viscous initial data on an exterior domain: density floored by
    eps**(2/theta), velocity kept, pair mollified at width eps."""
    x = np.asarray(x, dtype=float)
    rho_fn, mom_fn = _floored_pair(profile, eos, eps)
    return mollify_pair(rho_fn, mom_fn, x, (x[0], x[-1]), eps, n)


def mollify_origin(profile, eos, eps, x, chi_lo=None, n=17):
    """Viscous initial data on the scaled origin domain.

    The velocity is shifted by +eps (compensating the floor's effect on
    rho**theta) and the momentum is cut off below chi_lo, by default twice
    the inner radius, so it vanishes identically near the inner boundary.
    """
    x = np.asarray(x, dtype=float)
    if chi_lo is None:
        chi_lo = 2.0 * x[0]
    rho_fn, mom_raw = _floored_pair(profile, eos, eps, u_shift=eps)

    def mom_fn(y):
        return np.where(y >= chi_lo, mom_raw(y), 0.0)

    return mollify_pair(rho_fn, mom_fn, x, (x[0], x[-1]), eps, n)


@dataclass(frozen=True)
class AdmissibilityReport:
    ok: bool
    failures: tuple
    margins: dict


def _verdict(margins, tol):
    fails = tuple(k for k, v in margins.items() if v > tol)
    return AdmissibilityReport(ok=not fails, failures=fails, margins=margins)


def check_admissible_exterior(params, x, rho, mom, tol=0.0):
    """Data-side hypotheses of the exterior invariant bound.

    Margins are oriented so positive means violation: the density floor,
    the interior w/z envelopes (with + eps slack), and the boundary rows,
    of which the inner one carries no slack.
    """
    x = np.asarray(x, dtype=float)
    eos, eps = params.eos, params.eps
    w, z = riemann_invariants((rho, mom), eos, u_vacuum=0.0)
    decay = params.m2 * x ** (-params.alpha)
    shift = eps ** (2.0 / eos.theta)
    margins = {
        "density_floor": float(np.max(shift - np.asarray(rho, dtype=float))),
        "w_interior": float(np.max(w - (params.m1 - decay + eps))),
        "z_interior": float(np.max(-decay - eps - z)),
        "w_inner_boundary": float(w[0] - (params.m1 - params.m2)),
        "z_inner_boundary": float(-params.m2 - z[0]),
        "w_outer_boundary": float(w[-1] - (params.m1 - decay[-1] + eps)),
        "z_outer_boundary": float(-decay[-1] - eps - z[-1]),
    }
    return _verdict(margins, tol)


def check_admissible_origin(eos, m3, eps, x, rho_s, mom_s, tol=None):
    """Data-side hypotheses of the scaled origin bound.

    The density floor forces z_s = -rho_s**theta < 0 wherever the momentum
    cutoff has zeroed the flow; with the raw density itself of floor size
    near the cutoff that deficit approaches eps**2 from above, so the check
    is held at twice the floor raised to theta rather than at zero.
    """
    if tol is None:
        tol = 2.0 * (eps ** (2.0 / eos.theta)) ** eos.theta
    x = np.asarray(x, dtype=float)
    w, z = riemann_invariants((rho_s, mom_s), eos, u_vacuum=0.0)
    shift = eps ** (2.0 / eos.theta)
    margins = {
        "density_floor": float(np.max(shift - np.asarray(rho_s, dtype=float))),
        "w_interior": float(np.max(w - (m3 + 2.0 * eps))),
        "z_interior": float(np.max(-z)),
        "mom_inner_boundary": float(abs(np.asarray(mom_s, dtype=float)[0])),
    }
    return _verdict(margins, tol)


def scale_transform(c, eos, x, rho, mom, to_scaled=True):
    """Map between physical and scaled origin fields.

    scaled rho = rho * x**(-c), scaled mom = mom * x**(-d) with
    d = (theta + 1) c; to_scaled=False applies the inverse.
    """
    x = np.asarray(x, dtype=float)
    d = (eos.theta + 1.0) * c
    sgn = -1.0 if to_scaled else 1.0
    return GasState(
        np.asarray(rho, dtype=float) * x ** (sgn * c),
        np.asarray(mom, dtype=float) * x ** (sgn * d),
    )


def floor_monotonicity_certificate(eos, eps, r_max=10.0, n=2000):
    """Sample f(r) = (eps + r**theta)**(1/theta) - r - eps**(2/theta) and f'.

    Returns (min f, min f') over (0, r_max]; both nonnegative (f strictly
    positive) certifies that flooring the density moves rho**theta up by at
    most eps, which is what the data checks assume.
    """
    th = eos.theta
    r = np.linspace(0.0, r_max, n + 1)[1:]
    f = (eps + r**th) ** (1.0 / th) - r - eps ** (2.0 / th)
    fp = (eps + r**th) ** ((1.0 - th) / th) * r ** (th - 1.0) - 1.0
    f0 = eps ** (1.0 / th) - eps ** (2.0 / th)
    return float(min(np.min(f), f0)), float(np.min(fp))
