"""Whole-sphere results for a single point charge on the positive polar axis.

The external field is q |x - a|^{-s} with a = R*p, R > 1.  The signed
equilibrium on the full sphere is an explicit density against sigma_d, the
field potential on the axis is a Gauss hypergeometric value, and the
"support is the whole sphere" question reduces to the sign of a scalar
margin.  The distance question for the Newtonian kernel s = d-1 comes down
to one polynomial root (the golden ratio when d = 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from rieszcap.specfun import hyp2f1_1mz
from rieszcap.sphere import Params, axis_dist2, sphere_energy

__all__ = [
    "PointCharge",
    "SphereSignedDensity",
    "normalized_charge",
    "field_potential_on_axis",
    "sphere_signed_density",
    "sphere_signed_equilibrium",
    "full_support_margin",
    "gonchar_polynomial",
    "gonchar_root",
]


@dataclass(frozen=True)
class PointCharge:
    """Positive charge q at the axis point a = R*p, R > 0, R != 1.

    R < 1 is accepted for Riesz kernels and silently mapped to the
    equivalent exterior problem by inversion: the field of (q, R) with
    R < 1 equals the field of (q R'^s, R') with R' = 1/R exactly, since
    |x - (1/R')p| = |x - R'p| / R' on the sphere.  The logarithmic kernel
    rejects R < 1 (the same map shifts the field by a constant, which
    changes the functional values).
    """

    q: float
    R: float

    def __post_init__(self) -> None:
        if not self.q > 0.0:
            raise ValueError(f"charge must be positive, got q={self.q}")
        if not self.R > 0.0 or self.R == 1.0:
            raise ValueError(f"axis height must satisfy R > 0, R != 1, got R={self.R}")


def normalized_charge(charge: PointCharge, params: Params) -> PointCharge:
    """Map R < 1 onto the equivalent R > 1 charge (Riesz kernels only)."""
    if charge.R > 1.0:
        return charge
    if params.is_log:
        raise ValueError("logarithmic fields require R > 1 (inversion shifts the field "
                         "by a constant; supply the exterior charge directly)")
    Rp = 1.0 / charge.R
    return PointCharge(q=charge.q * Rp ** params.s, R=Rp)


@dataclass(frozen=True)
class SphereSignedDensity:
    """Signed equilibrium on the whole sphere: density F-form plus metadata.

    ``F`` is the constant weighted potential (the functional value of the
    whole sphere); ``support_margin`` is >= 0 exactly when the density is
    nonnegative, i.e. when the extremal support is all of the sphere.
    """

    params: Params
    charge: object  # PointCharge or an axis measure with the same density role
    F: float
    support_margin: float
    density: Callable[[np.ndarray], np.ndarray]


def field_potential_on_axis(charge: PointCharge, params: Params) -> float:
    """Potential of the uniform measure at the axis point a = R*p:

        U_s^sigma(a) = (R+1)^{-s} 2F1(s/2, d/2; d; 4R/(R+1)^2).
    """
    if params.is_log:
        raise ValueError("field_potential_on_axis covers 0 < s < d Riesz kernels")
    charge = normalized_charge(charge, params)
    d, s, R = params.d, params.s, charge.R
    # 1 - z = ((R-1)/(R+1))^2 computed directly: z itself rounds to 1 as R -> 1
    w = ((R - 1.0) / (R + 1.0)) ** 2
    return (R + 1.0) ** (-s) * hyp2f1_1mz(s / 2.0, d / 2.0, float(d), w)


def sphere_signed_density(u, charge: PointCharge, params: Params):
    """Density of the signed equilibrium on the full sphere at height u:

        1 + q U_s^sigma(a)/W_s - q (R^2-1)^{d-s} / (W_s |x-a|^{2d-s}),

    with |x-a|^2 = R^2 - 2Ru + 1.  Uniform when q -> 0; minimal at the
    North Pole.  Vectorized over u.
    """
    if params.is_log:
        raise ValueError("sphere_signed_density covers Riesz kernels; the logarithmic "
                         "variant lives in axis_field.axis_sphere_equilibrium")
    charge = normalized_charge(charge, params)
    d, s = params.d, params.s
    q, R = charge.q, charge.R
    W = sphere_energy(params)
    U = field_potential_on_axis(charge, params)
    u = np.asarray(u, dtype=float)
    dens = (1.0 + q * U / W
            - q * (R * R - 1.0) ** (d - s) / (W * axis_dist2(u, R) ** (d - s / 2.0)))
    return float(dens) if dens.ndim == 0 else dens


def full_support_margin(charge: PointCharge, params: Params) -> float:
    """Signed margin of the whole-sphere support criterion:

        W_s/q - [ (R+1)^{d-s}/(R-1)^d - U_s^sigma(a) ],

    nonnegative exactly when the extremal measure covers the sphere (and
    zero at the critical R_q).  Equivalent to (W_s/q) * density(1).
    """
    charge = normalized_charge(charge, params)
    d, s = params.d, params.s
    W = sphere_energy(params)
    U = field_potential_on_axis(charge, params)
    R = charge.R
    return W / charge.q - ((R + 1.0) ** (d - s) / (R - 1.0) ** d - U)


def sphere_signed_equilibrium(charge: PointCharge, params: Params) -> SphereSignedDensity:
    """Bundle the full-sphere signed equilibrium with its functional value."""
    charge = normalized_charge(charge, params)
    W = sphere_energy(params)
    U = field_potential_on_axis(charge, params)
    return SphereSignedDensity(
        params=params,
        charge=charge,
        F=W + charge.q * U,
        support_margin=full_support_margin(charge, params),
        density=lambda u: sphere_signed_density(u, charge, params),
    )


def gonchar_polynomial(d: int, rho: float) -> float:
    """P(d; rho) = (rho^d - 2 - rho)(rho+1)^{d-1} + rho^d.

    Its unique positive root is the critical sphere-to-charge distance for
    the Newtonian kernel s = d-1 with q = 1.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    return (rho ** d - 2.0 - rho) * (rho + 1.0) ** (d - 1) + rho ** d


def gonchar_root(d: int) -> float:
    """The unique positive root of P(d; .), bracketed in (1, 2].

    P(d;1) = 1 - 2^d < 0 and P(d;2) > 0, so plain Brent iteration on [1, 2]
    converges; refined to ~1e-15 in rho.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    return float(optimize.brentq(lambda r: gonchar_polynomial(d, r), 1.0, 2.0,
                                 xtol=1e-15, rtol=8.9e-16))
