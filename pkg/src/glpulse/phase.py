"""Phase equation around the real pulse.

For general imaginary parts mu = (0, mu1, mu2, mu3) the O(alpha) phase
corrector q solves

    B q = -theta r - mu1 r + mu2 r^3 - mu3 r^5,     (q, r) = 0,

with theta fixed by solvability against the kernel r of B:

    theta = -mu1 + (mu2 int R^2 - mu3 int R^3) / int R .

The phase shape phi = q/r obeys the first-order reduction

    m phi'(x) = (1/R(x)) int_x^inf (-theta R - mu1 R + mu2 R^2 - mu3 R^3) dy,

which is the quadrature route used for cross-checking; phi is only meaningful
where the pulse has mass, so it is reported on the mask |x| <= L + 10.

The L-derivatives (theta1, q1) = d/dL (theta, q) solve the differentiated
system; differentiating (q, r) = 0 forces the constraint (q1, r) = -(q, sigma).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg

from .errors import NumericError
from .grids import Grid
from .operators import build_B
from .params import ModelParams
from .profiles import ProfileSet, eval_profile


def theta_asymptotic(params: ModelParams) -> float:
    """-mu1 + (3/4)mu2 - (9/16)mu3 - 3mu2/(8L) + 27mu3/(64L)."""
    _, mu1, mu2, mu3 = params.mu
    L = params.L
    return (-mu1 + 0.75 * mu2 - 0.5625 * mu3
            - 3.0 * mu2 / (8.0 * L) + 27.0 * mu3 / (64.0 * L))


def theta1_asymptotic(params: ModelParams) -> float:
    """d theta/dL to leading order: 3mu2/(8L^2) - 27mu3/(64L^2)."""
    _, _, mu2, mu3 = params.mu
    L = params.L
    return 3.0 * mu2 / (8.0 * L * L) - 27.0 * mu3 / (64.0 * L * L)


def solve_theta(params: ModelParams, grid: Grid,
                prof: ProfileSet | None = None) -> float:
    if prof is None:
        prof = eval_profile(params, grid.x)
    _, mu1, mu2, mu3 = params.mu
    R = prof.R
    i1 = grid.integrate(R)
    i2 = grid.integrate(R * R)
    i3 = grid.integrate(R * R * R)
    return -mu1 + (mu2 * i2 - mu3 * i3) / i1


def _bordered_even_solve(grid: Grid, sec_dense: np.ndarray,
                         rhs_full: np.ndarray, constraint_full: np.ndarray,
                         constraint_value_w: float = 0.0) -> np.ndarray:
    """Solve M u = rhs on the even sector with (u, c)_w = value."""
    rhs_e = grid.restrict(rhs_full, "even")
    c_e = grid.restrict(constraint_full, "even")
    n1 = sec_dense.shape[0] + 1
    M = np.zeros((n1, n1))
    M[:-1, :-1] = sec_dense
    M[:-1, -1] = c_e
    M[-1, :-1] = c_e
    b = np.concatenate([rhs_e, [constraint_value_w / grid.h]])
    sol = scipy.linalg.solve(M, b)
    return grid.extend(sol[:-1], "even")


def solve_q(params: ModelParams, grid: Grid,
            prof: ProfileSet | None = None,
            theta: float | None = None) -> tuple[np.ndarray, float]:
    """Phase corrector q (even, (q,r)_w = 0) and the theta used."""
    if prof is None:
        prof = eval_profile(params, grid.x)
    if theta is None:
        theta = solve_theta(params, grid, prof)
    _, mu1, mu2, mu3 = params.mu
    r = prof.r
    r3 = r * prof.R
    r5 = r3 * prof.R
    rhs = -theta * r - mu1 * r + mu2 * r3 - mu3 * r5
    comp = grid.inner(rhs, r)
    scale = grid.norm(rhs) * grid.norm(r)
    if scale > 0 and abs(comp) > 1e-10 * scale:
        raise NumericError(
            f"phase equation inconsistent: (rhs, r) = {comp:.3e} "
            f"relative {abs(comp)/scale:.3e}"
        )
    B = build_B(params, grid, prof)
    q = _bordered_even_solve(grid, B.sector("even").dense(), rhs, r)
    res = grid.norm(B.apply(q) - rhs)
    if not np.isfinite(res) or res > 1e-7 * max(1.0, grid.norm(q)):
        raise NumericError(f"phase solve residual {res:.3e}")
    return q, float(theta)


def phi_mask(params: ModelParams, grid: Grid) -> np.ndarray:
    return np.abs(grid.x) <= params.L + 10.0


def phi_prime_quadrature(params: ModelParams, grid: Grid, theta: float,
                         prof: ProfileSet | None = None) -> np.ndarray:
    """m phi' = R^{-1} int_x^inf (-theta R - mu1 R + mu2 R^2 - mu3 R^3).

    Returned on the full grid with NaN outside the mask |x| <= L+10.
    """
    if prof is None:
        prof = eval_profile(params, grid.x)
    _, mu1, mu2, mu3 = params.mu
    R = prof.R
    g = -theta * R - mu1 * R + mu2 * R * R - mu3 * R**3
    # tail integral from the right; beyond X the integrand is ~e^{-50}
    tail = scipy.integrate.cumulative_trapezoid(g[::-1], dx=grid.h, initial=0.0)
    T = tail[::-1]
    out = np.full(grid.n, np.nan)
    mask = phi_mask(params, grid)
    out[mask] = T[mask] / (params.m * R[mask])
    return out


@dataclass
class PhaseSolution:
    """theta, q, their L-derivatives, and the masked phase shape."""

    params: ModelParams
    grid: Grid
    theta: float
    q: np.ndarray
    theta1: float
    q1: np.ndarray
    phi: np.ndarray          # q/r, NaN off the mask
    phi_prime: np.ndarray    # quadrature route, NaN off the mask
    mask: np.ndarray


def rho_hat(params: ModelParams, prof: ProfileSet, q: np.ndarray,
            theta: float) -> np.ndarray:
    """(4nu/(1-nu)) (r^4 q - r^2 q + theta r + mu1 r - mu2 r^3 + mu3 r^5).

    Obtained by differentiating B q = rhs in L; reduces to the simplified
    printed form at mu = (0,0,1,0).
    """
    _, mu1, mu2, mu3 = params.mu
    nu = params.nu
    r, R = prof.r, prof.R
    r3 = r * R
    r5 = r3 * R
    return (4.0 * nu / (1.0 - nu)) * (
        R * R * q - R * q + theta * r + mu1 * r - mu2 * r3 + mu3 * r5
    )


def solve_theta1_q1(params: ModelParams, grid: Grid,
                    prof: ProfileSet | None = None,
                    q: np.ndarray | None = None,
                    theta: float | None = None):
    """L-derivatives (theta1, q1) from the differentiated phase system:

    B q1 + (4r^3 - 2r) q sigma = rho_hat
        + (3 mu2 r^2 - 5 mu3 r^4 - theta - mu1) sigma - theta1 r,
    (q1, r) = -(q, sigma).
    """
    if prof is None:
        prof = eval_profile(params, grid.x)
    if q is None or theta is None:
        q, theta = solve_q(params, grid, prof, theta)
    _, mu1, mu2, mu3 = params.mu
    r, R, sigma = prof.r, prof.R, prof.sigma
    r3 = r * R
    rhs0 = (
        -(4.0 * r3 - 2.0 * r) * q * sigma
        + rho_hat(params, prof, q, theta)
        + (3.0 * mu2 * R - 5.0 * mu3 * R * R - theta - mu1) * sigma
    )
    rr = grid.inner(r, r)
    theta1 = grid.inner(rhs0, r) / rr
    rhs = rhs0 - theta1 * r
    B = build_B(params, grid, prof)
    q1 = _bordered_even_solve(
        grid, B.sector("even").dense(), rhs, r,
        constraint_value_w=-grid.inner(q, sigma),
    )
    return float(theta1), q1


def solve_phase(params: ModelParams, grid: Grid,
                prof: ProfileSet | None = None,
                derivatives: bool = True) -> PhaseSolution:
    if prof is None:
        prof = eval_profile(params, grid.x)
    q, theta = solve_q(params, grid, prof)
    if derivatives:
        theta1, q1 = solve_theta1_q1(params, grid, prof, q, theta)
    else:
        theta1, q1 = float("nan"), np.full(grid.n, np.nan)
    mask = phi_mask(params, grid)
    phi = np.full(grid.n, np.nan)
    phi[mask] = q[mask] / prof.r[mask]
    phip = phi_prime_quadrature(params, grid, theta, prof)
    return PhaseSolution(params=params, grid=grid, theta=theta, q=q,
                         theta1=theta1, q1=q1, phi=phi, phi_prime=phip,
                         mask=mask)
