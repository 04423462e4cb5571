"""Closed-form pulse profiles and their parameter derivatives.

Everything here is analytic in (x, nu):

    R(x)  = (3/4)(1-nu) / (1 + sqrt(nu) cosh 2x),      r = sqrt(R),
    sigma = dr/dL,  sigma2 = d^2 r/dL^2   (L-derivatives at fixed x,
                                           nu = 4 e^{-4L}),
    V = m - 3R + 5R^2   (potential of the shrink operator A),
    W = m - R + R^2     (potential of the phase operator B),
    rho  = (4 nu/(1-nu)) (r^5 - r^3)            with  A sigma = rho exactly,
    rho2 = d rho/dL + (3 nu/4)(sigma'' - sigma) so that
           A sigma2 + (20 r^3 - 6 r) sigma^2 = rho2 exactly.

No finite differences are used: sigma/sigma2 come from differentiating the
closed form through D = 1 + sqrt(nu) cosh 2x (dD/dL = -2(D-1)), arranged so
that every term keeps one sign and no cancellation occurs as nu -> 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ModelParams


@dataclass(frozen=True)
class ProfileSet:
    """Pulse profile and derived fields sampled on an x-array."""

    x: np.ndarray
    R: np.ndarray
    r: np.ndarray
    rp: np.ndarray       # r'
    rpp: np.ndarray      # r''
    S: np.ndarray        # dR/dL
    sigma: np.ndarray    # dr/dL
    sigma2: np.ndarray   # d^2 r/dL^2
    V: np.ndarray
    W: np.ndarray
    rho: np.ndarray
    rho2: np.ndarray


def eval_profile(params: ModelParams, x: np.ndarray) -> ProfileSet:
    x = np.asarray(x, dtype=float)
    nu = params.nu
    m = params.m
    sq = np.sqrt(nu)

    E = sq * np.cosh(2.0 * x)          # = D - 1
    F = sq * np.sinh(2.0 * x)          # F^2 = E^2 - nu
    D = 1.0 + E

    R = 0.75 * (1.0 - nu) / D
    r = np.sqrt(R)
    rp = -r * F / D
    rpp = r * (3.0 * F * F - 2.0 * E * D) / (D * D)

    # dR/dL and d^2R/dL^2 through dD/dL = -2(D-1):
    S = 3.0 * (nu * D + 0.5 * (1.0 - nu) * (D - 1.0)) / (D * D)
    SL = -12.0 * (nu * D + 0.25 * (1.0 - nu) * (D - 1.0) * (2.0 - D)) / (D**3)

    sigma = S / (2.0 * r)
    sigma2 = SL / (2.0 * r) - sigma * sigma / r

    V = m - 3.0 * R + 5.0 * R * R
    W = m - R + R * R

    fac = 4.0 * nu / (1.0 - nu)
    r3 = r * R                          # r^3
    r5 = r3 * R                         # r^5
    rho = fac * (r5 - r3)
    rho2 = (
        -16.0 * nu * (1.0 + nu) / (1.0 - nu) ** 2 * (r5 - r3)
        + 2.0 * fac * (5.0 * R * R - 3.0 * R) * sigma
    )

    return ProfileSet(
        x=x, R=R, r=r, rp=rp, rpp=rpp, S=S, sigma=sigma, sigma2=sigma2,
        V=V, W=W, rho=rho, rho2=rho2,
    )


def front_R(x: np.ndarray) -> np.ndarray:
    """Limiting front profile Rtilde(x) = (3/4) / (1 + e^{2x})."""
    x = np.asarray(x, dtype=float)
    return 0.75 / (1.0 + np.exp(2.0 * x))


def shifted_R(params: ModelParams, x: np.ndarray) -> np.ndarray:
    """R(x + L) in a form stable for large x:

    R(x+L) = (3/4)(1-nu) / (1 + e^{2x} + (nu/4) e^{-2x}).
    """
    x = np.asarray(x, dtype=float)
    nu = params.nu
    return 0.75 * (1.0 - nu) / (1.0 + np.exp(2.0 * x) + 0.25 * nu * np.exp(-2.0 * x))


def energy_identity_residual(params: ModelParams, x: np.ndarray) -> np.ndarray:
    """m r'^2 - (m R - R^2/2 + R^3/3), identically 0 for the exact pulse."""
    p = eval_profile(params, x)
    m = params.m
    Phi = m * p.R - 0.5 * p.R**2 + p.R**3 / 3.0
    return m * p.rp**2 - Phi


def ode_residual(params: ModelParams, x: np.ndarray) -> np.ndarray:
    """-m r'' + m r - r^3 + r^5 with the analytic r''."""
    p = eval_profile(params, x)
    m = params.m
    return -m * p.rpp + p.r * (m - p.R + p.R * p.R)
