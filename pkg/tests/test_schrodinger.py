import math

import numpy as np
import pytest

from glpulse.errors import NumericError
from glpulse.grids import Grid
from glpulse.operators import (build_A, build_B, dlambda_dL, low_spectrum,
                               projection_Pi, rayleigh_sigma, shrink_mode,
                               sigma_hat)
from glpulse.params import ModelParams
from glpulse.profiles import eval_profile


def setup(nu, h=0.02, order=8):
    p = ModelParams.from_nu(nu)
    g = Grid.make(p.L + 25.0, h_max=h, order=order)
    prof = eval_profile(p, g.x)
    return p, g, prof


NU_GRID = [1e-3, 1e-4, 1e-5]


@pytest.mark.parametrize("nu", NU_GRID)
def test_kernel_modes(nu):
    # translation kernel of A and gauge kernel of B
    p, g, prof = setup(nu, h=0.04)
    A = build_A(p, g, prof)
    B = build_B(p, g, prof)
    rp = prof.rp
    assert g.norm(A.apply(rp)) <= 1e-8 * g.norm(rp)
    assert g.norm(B.apply(prof.r)) <= 1e-8 * g.norm(prof.r)


@pytest.mark.parametrize("nu", NU_GRID)
def test_shrink_eigenvalue_scaling(nu):
    p, g, prof = setup(nu, h=0.04)
    lam, s = shrink_mode(p, g, prof=prof)
    assert abs(lam / nu + 1.5) <= 5.0 * math.sqrt(nu)
    assert g.inner(s, prof.sigma) > 0.0


def test_low_spectrum_structure():
    p, g, prof = setup(1e-4, h=0.04)
    spec = low_spectrum(build_A(p, g, prof), k=6)
    ev = spec.eigenvalues
    assert np.all(np.diff(ev) >= -1e-14)
    # one negative even mode, near-zero odd translation mode, then bulk
    assert spec.parities[0] == "even" and ev[0] < 0.0
    assert spec.parities[1] == "odd" and abs(ev[1]) < 1e-10
    assert ev[2] > 0.01
    # eigenvectors are quadrature-normalized with small residuals
    for i in range(4):
        assert g.norm(spec.mode(i)) == pytest.approx(1.0, rel=1e-12)
    assert np.max(spec.residuals[:4]) < 1e-9


def test_B_second_eigenvalue_scaling():
    p, g, prof = setup(1e-4, h=0.04)
    spec = low_spectrum(build_B(p, g, prof), k=3)
    mu2 = spec.eigenvalues[1]
    L = p.L
    target = p.m * math.pi ** 2 / (4.0 * L * L)
    assert (1.0 - 1.5 / math.sqrt(L)) <= mu2 / target <= (
        1.0 + 1.5 / math.sqrt(L))


def test_projection_properties():
    p, g, prof = setup(1e-4, h=0.04)
    spec = low_spectrum(build_A(p, g, prof), k=4)
    Pi = projection_Pi(spec)
    v = np.cos(g.x) * np.exp(-g.x ** 2 / 9.0)
    Pv = Pi.apply(v)
    assert np.allclose(Pi.apply(Pv), Pv, atol=1e-12)
    assert np.allclose(Pi.complement(v), v - Pv, atol=1e-14)
    with pytest.raises(NumericError):
        projection_Pi(spec, gap_min=10.0)


def test_shrink_mode_norm_limit():
    # |s|^2 -> 3/8 as the pulse widens
    p, g, prof = setup(4.0 * math.exp(-24.0), h=0.04)   # L = 6
    _, s = shrink_mode(p, g, prof=prof)
    assert g.norm(s) ** 2 == pytest.approx(0.375, abs=0.02)


def test_rayleigh_matches_eigenvalue():
    p, g, prof = setup(1e-4, h=0.04)
    lam, _ = shrink_mode(p, g, prof=prof)
    ray = rayleigh_sigma(p, g)["rayleigh"]
    assert abs(ray - lam) <= 0.1 * abs(lam)


def test_dlambda_dL_scaling():
    # lambda ~ -(3/2)nu and nu = 4 e^{-4L}, so dlambda/dL ~ 6 nu
    p, g, _ = setup(1e-4, h=0.04)
    d = dlambda_dL(p, g)
    assert 0.8 <= d / (6.0 * p.nu) <= 1.2


def test_sigma_hat_solves_bordered_system():
    p, g, prof = setup(1e-3, h=0.04)
    out = sigma_hat(p, g)
    shat = out["shat"]
    A = build_A(p, g, prof)
    spec = low_spectrum(A, k=4)
    Pi = projection_Pi(spec)
    lam, _ = shrink_mode(p, g, spec=spec, prof=prof)
    rhs = Pi.complement(lam * prof.sigma - prof.rho)
    resid = g.norm(A.apply(shat) - rhs)
    assert resid <= 1e-7 * max(1.0, g.norm(rhs))
    assert g.norm(Pi.apply(shat)) <= 1e-9
