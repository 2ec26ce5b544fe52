"""Boundary kernel regimes: s = d-2 with d >= 3, and the planar log case.

At s = d-2 the balayage measures acquire a component uniformly distributed
on the cap boundary ring: writing beta_t for the unit ring measure at
height t,

    nubar_t  = sigma_d|_cap + W_{d-2} (1-t)/2 (1-t^2)^{d/2-1} beta_t,
    epsbar_t = (R^2-1)^2 / (W_{d-2} (R^2-2Ru+1)^{d/2+1}) sigma_d|_cap
               + (1-t)/2 (R+1)^2/r^d (1-t^2)^{d/2-1} beta_t,

and the signed equilibrium etabar_t carries a ring charge that vanishes
exactly at the optimal height t0, where the density also stays strictly
positive at the edge (unlike the d-2 < s < d regime).  The planar
logarithmic case d = 2 has mass-preserving balayage and fully closed
forms, including t0 = min{1, (R^2 - 2Rq + 1)/(2R(1+q))}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from rieszcap.cap_riesz import CapSolution, SignedCapMeasure, eps_density, nu_density
from rieszcap.point_field import PointCharge, field_potential_on_axis, \
    full_support_margin, normalized_charge, sphere_signed_density
from rieszcap.sphere import Params, axis_dist2, integrate_radial, omega_ratio, sphere_energy

__all__ = [
    "BoundaryMeasureCap",
    "nubar",
    "epsbar",
    "nubar_norm",
    "epsbar_norm",
    "phibar",
    "etabar",
    "solve_t0_exceptional",
    "nubar_potential",
    "epsbar_potential",
    "weakstar_gap",
    "gamma_s_norm",
    "log_cap_measures",
    "log_etabar",
    "log_cap_energy",
    "log_f0_functional",
    "log_solve_t0",
    "log_weighted_potential",
]


@dataclass(frozen=True)
class BoundaryMeasureCap:
    """Measure on the cap u <= t with an atom on the boundary ring.

    ``interior_density`` is against sigma_d; ``boundary_coeff`` multiplies
    the unit uniform ring measure at u = t, so the total mass is the
    interior sigma_d integral plus boundary_coeff.
    """

    t: float
    interior_density: Callable[[np.ndarray], np.ndarray]
    boundary_coeff: float
    mass: float


def _require_exceptional(params: Params) -> None:
    if not params.is_exceptional:
        raise ValueError(f"this operation needs s = d-2 with d >= 3, "
                         f"got d={params.d}, s={params.s}")


def _require_log2(params_or_none: Params | None = None) -> None:
    if params_or_none is not None and not (params_or_none.is_log and params_or_none.d == 2):
        raise ValueError("logarithmic cap results need d = 2 with the log kernel")


# ---------------------------------------------------------------------------
# s = d-2


def nubar(t: float, params: Params) -> BoundaryMeasureCap:
    """Balayage of the uniform measure at s = d-2: interior density 1 plus
    a ring atom of weight W_{d-2} (1-t)/2 (1-t^2)^{d/2-1}."""
    _require_exceptional(params)
    d = params.d
    W = sphere_energy(params)
    bcoef = W * (1.0 - t) / 2.0 * (1.0 - t * t) ** (d / 2.0 - 1.0) if t < 1.0 else 0.0
    interior = integrate_radial(lambda u: np.ones_like(u), t, params, tol=1e-12)
    return BoundaryMeasureCap(t=t, interior_density=lambda u: np.ones_like(np.asarray(u, float)),
                              boundary_coeff=bcoef, mass=interior + bcoef)


def epsbar(t: float, charge: PointCharge, params: Params) -> BoundaryMeasureCap:
    """Balayage of the unit point charge at s = d-2 (per unit charge)."""
    _require_exceptional(params)
    charge = normalized_charge(charge, params)
    d, R = params.d, charge.R
    W = sphere_energy(params)
    r2 = axis_dist2(t, R)

    def interior(u):
        u_arr = np.asarray(u, dtype=float)
        out = (R * R - 1.0) ** 2 / (W * axis_dist2(u_arr, R) ** (d / 2.0 + 1.0))
        return float(out) if out.ndim == 0 else out

    bcoef = ((1.0 - t) / 2.0 * (R + 1.0) ** 2 / r2 ** (d / 2.0)
             * (1.0 - t * t) ** (d / 2.0 - 1.0)) if t < 1.0 else 0.0
    mass = integrate_radial(interior, t, params, tol=1e-12) + bcoef
    return BoundaryMeasureCap(t=t, interior_density=interior, boundary_coeff=bcoef, mass=mass)


def _jacobi_cap_integral(f, t: float, params: Params) -> float:
    # int_{-1}^t f(u) (1+u)^{d/2-2} (1-u)^{d/2} du via the cap quadrature
    d = params.d
    if t == 1.0:
        g = f
        se = 1.0
    else:
        g = lambda u: f(u) * (1.0 - u)
        se = 0.0
    val = integrate_radial(g, t, params, singular_exponent=se,
                           left_exponent=d / 2.0 - 2.0, tol=1e-12)
    return omega_ratio(params) * val


def nubar_norm(t: float, params: Params) -> float:
    """||nubar_t|| = (d-2)/4 W_{d-2} int_{-1}^t (1+u)^{d/2-2} (1-u)^{d/2} du."""
    _require_exceptional(params)
    if t <= -1.0:
        return 0.0
    W = sphere_energy(params)
    return (params.d - 2) / 4.0 * W * _jacobi_cap_integral(lambda u: np.ones_like(u), t, params)


def epsbar_norm(t: float, charge: PointCharge, params: Params) -> float:
    """||epsbar_t|| = (d-2)/4 (R+1)^2 int_{-1}^t (1+u)^{d/2-2} (1-u)^{d/2}
    (R^2-2Ru+1)^{-d/2} du (per unit charge)."""
    _require_exceptional(params)
    charge = normalized_charge(charge, params)
    if t <= -1.0:
        return 0.0
    d, R = params.d, charge.R
    val = _jacobi_cap_integral(lambda u: axis_dist2(u, R) ** (-d / 2.0), t, params)
    return (d - 2) / 4.0 * (R + 1.0) ** 2 * val


def phibar(t: float, charge: PointCharge, params: Params) -> float:
    """Cap functional at s = d-2: W_{d-2} (1 + q ||epsbar_t||) / ||nubar_t||."""
    _require_exceptional(params)
    charge = normalized_charge(charge, params)
    W = sphere_energy(params)
    return W * (1.0 + charge.q * epsbar_norm(t, charge, params)) / nubar_norm(t, params)


def etabar(t: float, charge: PointCharge, params: Params) -> BoundaryMeasureCap:
    """Signed cap equilibrium at s = d-2: interior density
    (1/W)[Phibar - q(R^2-1)^2/(R^2-2Ru+1)^{d/2+1}], ring charge
    (1-t)/2 (1-t^2)^{d/2-1} [Phibar - q(R+1)^2/r^d] (sign flips at t0)."""
    _require_exceptional(params)
    charge = normalized_charge(charge, params)
    d, R, q = params.d, charge.R, charge.q
    W = sphere_energy(params)
    pv = phibar(t, charge, params)
    r2 = axis_dist2(t, R)

    def interior(u):
        u_arr = np.asarray(u, dtype=float)
        out = (pv - q * (R * R - 1.0) ** 2 / axis_dist2(u_arr, R) ** (d / 2.0 + 1.0)) / W
        return float(out) if out.ndim == 0 else out

    bcoef = ((1.0 - t) / 2.0 * (1.0 - t * t) ** (d / 2.0 - 1.0)
             * (pv - q * (R + 1.0) ** 2 / r2 ** (d / 2.0))) if t < 1.0 else 0.0
    mass = integrate_radial(interior, t, params, tol=1e-12) + bcoef
    return BoundaryMeasureCap(t=t, interior_density=interior, boundary_coeff=bcoef, mass=mass)


def solve_t0_exceptional(charge: PointCharge, params: Params) -> CapSolution:
    """Optimal cap at s = d-2: the root of
    Phibar(t) = q (R+1)^2 / (R^2-2Rt+1)^{d/2}, or t0 = 1 without one.

    The extremal measure has no ring charge; its interior density is
    (Phibar(t0)/W)[1 - (R-1)^2 (R^2-2Rt0+1)^{d/2} / (R^2-2Ru+1)^{d/2+1}],
    strictly positive up to the edge.
    """
    _require_exceptional(params)
    charge = normalized_charge(charge, params)
    d, R, q = params.d, charge.R, charge.q

    if full_support_margin(charge, params) >= 0.0:
        W = sphere_energy(params)
        phi_1 = W + q * field_potential_on_axis(charge, params)
        density = lambda u: sphere_signed_density(u, charge, params)
        mass = integrate_radial(density, 1.0, params, tol=1e-12)
        measure = SignedCapMeasure(t=1.0, radial_density=density, boundary_coeff=0.0,
                                   mass=mass, phi=phi_1, singular_exponent=0.0,
                                   regular_part=density)
        return CapSolution(t0=1.0, phi_at_t0=phi_1, equilibrium=measure,
                           solved_by="boundary_t_equals_1", charge=charge, params=params)

    def delta(t: float) -> float:
        return phibar(t, charge, params) - q * (R + 1.0) ** 2 / axis_dist2(t, R) ** (d / 2.0)

    grid = np.linspace(-1.0 + 2.0 / 65.0, 1.0, 64)
    lo = -1.0 + 1e-9
    hi = None
    prev = lo
    for tk in grid:
        if delta(float(tk)) <= 0.0:
            lo, hi = prev, float(tk)
            break
        prev = float(tk)
    if hi is None:
        raise RuntimeError("Delta did not change sign despite a negative margin")
    t0 = float(optimize.brentq(delta, lo, hi, xtol=1e-14, rtol=8.9e-16))
    pv = phibar(t0, charge, params)
    W = sphere_energy(params)
    r2 = axis_dist2(t0, R)

    def density(u):
        u_arr = np.asarray(u, dtype=float)
        out = (pv / W) * (1.0 - (R - 1.0) ** 2 * r2 ** (d / 2.0)
                          / axis_dist2(u_arr, R) ** (d / 2.0 + 1.0))
        return float(out) if out.ndim == 0 else out

    mass = integrate_radial(density, t0, params, tol=1e-12)
    measure = SignedCapMeasure(t=t0, radial_density=density, boundary_coeff=0.0,
                               mass=mass, phi=pv, singular_exponent=0.0,
                               regular_part=density)
    return CapSolution(t0=t0, phi_at_t0=pv, equilibrium=measure,
                       solved_by="interior_root", charge=charge, params=params)


def nubar_potential(xi: float, t: float, params: Params) -> float:
    """U^{nubar_t}: W_{d-2} on the cap, W_{d-2}(1+t)^{d/2-1}(1+xi)^{1-d/2}
    above it (strictly smaller there)."""
    _require_exceptional(params)
    W = sphere_energy(params)
    if xi <= t:
        return W
    e = params.d / 2.0 - 1.0
    return W * (1.0 + t) ** e * (1.0 + xi) ** (-e)


def epsbar_potential(xi: float, t: float, charge: PointCharge, params: Params) -> float:
    """U^{epsbar_t} (per unit charge): |z-a|^{2-d} on the cap,
    r^{2-d}(1+t)^{d/2-1}(1+xi)^{1-d/2} above it."""
    _require_exceptional(params)
    charge = normalized_charge(charge, params)
    d, R = params.d, charge.R
    if xi <= t:
        return axis_dist2(xi, R) ** ((2.0 - d) / 2.0)
    e = d / 2.0 - 1.0
    return axis_dist2(t, R) ** ((2.0 - d) / 2.0) * (1.0 + t) ** e * (1.0 + xi) ** (-e)


def gamma_s_norm(t: float, s: float, d: int) -> float:
    """Mass of the edge-concentrating kernel gamma_s as s decreases to d-2:

        sin(pi(1-(d-s)/2)) / (pi(1-(d-s)/2)) * (1+t)^{1-(d-s)/2},

    bounded by 2 and tending to 1.
    """
    e = 1.0 - (d - s) / 2.0
    return math.sin(math.pi * e) / (math.pi * e) * (1.0 + t) ** e


def weakstar_gap(t: float, s_values, charge: PointCharge, params: Params):
    """Moment gaps quantifying the weak* convergence nu_{t,s} -> nubar_t and
    eps_{t,s} -> epsbar_t as s decreases to d-2.

    For each s, computes |int u^k d nu_{t,s} - int u^k d nubar_t| and the
    eps analogue for k = 0..3; returns a list of dicts with keys
    's', 'nu', 'eps'.  Decay along s -> (d-2)+ is the caller's assertion.
    """
    _require_exceptional(params)
    charge = normalized_charge(charge, params)
    d = params.d
    nb = nubar(t, params)
    eb = epsbar(t, charge, params)

    def bar_moment(measure: BoundaryMeasureCap, k: int) -> float:
        interior = integrate_radial(lambda u: measure.interior_density(u) * u ** k,
                                    t, params, tol=1e-12)
        return interior + measure.boundary_coeff * t ** k

    out = []
    for s in s_values:
        if not (d - 2 < s < d):
            raise ValueError(f"weak* path requires d-2 < s < d, got s={s}")
        ps = Params(d=d, s=float(s))
        rec = {"s": float(s), "nu": np.empty(4), "eps": np.empty(4)}
        for k in range(4):
            # the Jacobi rule loses digits as its exponent approaches -1
            # (s -> d-2), so ask only for what the gap comparison needs
            mom_nu = integrate_radial(
                lambda u: u ** k * nu_density(u, t, ps) * (t - u) ** ((d - s) / 2.0),
                t, ps, singular_exponent=(s - d) / 2.0, tol=2e-9)
            rec["nu"][k] = abs(mom_nu - bar_moment(nb, k))
            mom_eps = integrate_radial(
                lambda u: u ** k * eps_density(u, t, charge, ps) * (t - u) ** ((d - s) / 2.0),
                t, ps, singular_exponent=(s - d) / 2.0, tol=2e-9)
            rec["eps"][k] = abs(mom_eps - bar_moment(eb, k))
        out.append(rec)
    return out


# ---------------------------------------------------------------------------
# logarithmic case, d = 2


def log_cap_energy(t: float) -> float:
    """Logarithmic energy of the cap: W_0(Sigma_t) = (1+t)/4 - log(2)/2
    - log(1+t)/2 (the cap's equilibrium measure is nubar_{t,0})."""
    if not -1.0 < t <= 1.0:
        raise ValueError("cap height must lie in (-1, 1]")
    return (1.0 + t) / 4.0 - 0.5 * math.log(2.0) - 0.5 * math.log1p(t)


def log_cap_measures(t: float, charge: PointCharge) -> tuple[BoundaryMeasureCap,
                                                             BoundaryMeasureCap]:
    """The pair (nubar_{t,0}, epsbar_{t,0}) of logarithmic balayages onto the
    cap; both have total mass exactly 1 (log balayage preserves mass)."""
    if charge.R <= 1.0:
        raise ValueError("logarithmic balayage needs R > 1")
    R = charge.R
    r2 = axis_dist2(t, R)
    nu = BoundaryMeasureCap(
        t=t,
        interior_density=lambda u: np.ones_like(np.asarray(u, float)),
        boundary_coeff=(1.0 - t) / 2.0,
        mass=1.0,
    )

    def eps_interior(u):
        u_arr = np.asarray(u, dtype=float)
        out = (R * R - 1.0) ** 2 / axis_dist2(u_arr, R) ** 2
        return float(out) if out.ndim == 0 else out

    eps = BoundaryMeasureCap(
        t=t,
        interior_density=eps_interior,
        boundary_coeff=(1.0 - t) / 2.0 * (R + 1.0) ** 2 / r2,
        mass=1.0,
    )
    return nu, eps


def log_etabar(t: float, charge: PointCharge) -> BoundaryMeasureCap:
    """Signed logarithmic cap equilibrium (1+q) nubar_{t,0} - q epsbar_{t,0};
    the ring charge (1-t)/2 [1+q - q(R+1)^2/r^2] vanishes exactly at t0."""
    if charge.R <= 1.0:
        raise ValueError("logarithmic cap equilibrium needs R > 1")
    q, R = charge.q, charge.R
    r2 = axis_dist2(t, R)

    def interior(u):
        u_arr = np.asarray(u, dtype=float)
        out = 1.0 + q - q * (R * R - 1.0) ** 2 / axis_dist2(u_arr, R) ** 2
        return float(out) if out.ndim == 0 else out

    bcoef = (1.0 - t) / 2.0 * (1.0 + q - q * (R + 1.0) ** 2 / r2) if t < 1.0 else 0.0
    return BoundaryMeasureCap(t=t, interior_density=interior, boundary_coeff=bcoef, mass=1.0)


def log_f0_functional(t: float, charge: PointCharge) -> float:
    """Closed form of the cap functional F_0(Sigma_t) = W_0(Sigma_t)
    + int Q d mu_cap for the logarithmic point-charge field:

        (1+q)(1+t)/4 + q (R-1)^2 log(R^2-2Rt+1)/(8R)
        - log(1+t)/2 - log(2)/2 - q (R+1)^2 log((R+1)^2)/(8R).
    """
    if charge.R <= 1.0:
        raise ValueError("logarithmic functional needs R > 1")
    q, R = charge.q, charge.R
    return ((1.0 + q) * (1.0 + t) / 4.0
            + q * (R - 1.0) ** 2 * math.log(axis_dist2(t, R)) / (8.0 * R)
            - 0.5 * math.log1p(t) - 0.5 * math.log(2.0)
            - q * (R + 1.0) ** 2 * math.log((R + 1.0) ** 2) / (8.0 * R))


def log_solve_t0(charge: PointCharge) -> CapSolution:
    """Planar logarithmic support cap in closed form:

        t0 = min{ 1, (R^2 - 2 R q + 1) / (2 R (1 + q)) },

    with extremal density 1 + q - q (R^2-1)^2/(R^2-2Ru+1)^2, which stays
    strictly positive at the edge for t0 < 1.
    """
    if charge.R <= 1.0:
        raise ValueError("logarithmic support solve needs R > 1")
    q, R = charge.q, charge.R
    params = Params(d=2, log=True)
    t_int = (R * R - 2.0 * R * q + 1.0) / (2.0 * R * (1.0 + q))
    t0 = min(1.0, t_int)
    solved_by = "interior_root" if t0 < 1.0 else "boundary_t_equals_1"

    def density(u):
        u_arr = np.asarray(u, dtype=float)
        out = 1.0 + q - q * (R * R - 1.0) ** 2 / axis_dist2(u_arr, R) ** 2
        return float(out) if out.ndim == 0 else out

    mass = integrate_radial(density, t0, params, tol=1e-12)
    f0 = log_f0_functional(t0, charge)
    measure = SignedCapMeasure(t=t0, radial_density=density, boundary_coeff=0.0,
                               mass=mass, phi=f0, singular_exponent=0.0,
                               regular_part=density)
    return CapSolution(t0=t0, phi_at_t0=f0, equilibrium=measure,
                       solved_by=solved_by, charge=charge, params=params)


def log_weighted_potential(xi: float, t: float, charge: PointCharge) -> float:
    """Weighted logarithmic potential of the signed cap equilibrium:
    F_0(Sigma_t) on the cap, and off it

        F_0(Sigma_t) + log((1+t)/(1+xi))/2 + (q/2) log(r^2/rho^2).
    """
    f0 = log_f0_functional(t, charge)
    if xi <= t:
        return f0
    q, R = charge.q, charge.R
    return (f0 + 0.5 * math.log((1.0 + t) / (1.0 + xi))
            + 0.5 * q * math.log(axis_dist2(t, R) / axis_dist2(xi, R)))
