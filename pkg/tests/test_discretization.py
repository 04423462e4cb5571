import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glpulse.errors import ConfigError
from glpulse.grids import Grid, OperatorMatrix, build_laplacian
from glpulse.params import ModelParams


def gaussian_grid(X=12.0, h=0.05, order=8):
    g = Grid.make(X, h_max=h, order=order)
    f = np.exp(-g.x ** 2 / 2.0)
    return g, f


def test_make_geometry():
    g = Grid.make(10.0, h_max=0.02)
    assert g.n % 2 == 1
    assert g.h <= 0.02
    assert g.x[g.mid] == 0.0
    assert np.allclose(g.x, -g.x[::-1], atol=0)


def test_for_params_covers_pulse():
    p = ModelParams.from_L(5.0, y=1.0)
    g = Grid.for_params(p)
    assert g.X >= p.L + 20.0


@pytest.mark.parametrize("order", [4, 6, 8])
def test_d2_accuracy(order):
    g, f = gaussian_grid(order=order)
    exact = (g.x ** 2 - 1.0) * f
    err = np.max(np.abs(g.apply_d2(f) - exact))
    assert err < {4: 1e-5, 6: 1e-7, 8: 1e-9}[order]


def test_d1_accuracy():
    g, f = gaussian_grid()
    err = np.max(np.abs(g.apply_d1(f) + g.x * f))
    assert err < 1e-9


def test_integrate_gaussian():
    g, f = gaussian_grid()
    assert g.integrate(f) == pytest.approx(np.sqrt(2.0 * np.pi), rel=1e-13)
    assert g.norm(f) ** 2 == pytest.approx(g.inner(f, f), rel=1e-14)
    assert g.norm(f) == pytest.approx(np.pi ** 0.25, rel=1e-13)


def test_h1_h2_norms():
    g, f = gaussian_grid()
    # ||f||_H1^2 = ||f||^2 + ||f'||^2 for the gaussian: sqrt(pi)(1 + 1/2)
    assert g.norm_h1(f) ** 2 == pytest.approx(1.5 * np.sqrt(np.pi),
                                              rel=1e-10)


@given(st.integers(0, 2 ** 31 - 1))
@settings(max_examples=25, deadline=None)
def test_parity_roundtrip(seed):
    g = Grid.make(3.0, h_max=0.1, order=4)
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(g.n)
    even = 0.5 * (u + u[::-1])
    odd = 0.5 * (u - u[::-1])
    assert np.allclose(g.extend(g.restrict(even, "even"), "even"), even,
                       atol=1e-14)
    assert np.allclose(g.extend(g.restrict(odd, "odd"), "odd"), odd,
                       atol=1e-14)
    # restriction is an isometry on each parity class
    assert np.linalg.norm(g.restrict(even, "even")) == pytest.approx(
        np.linalg.norm(even), abs=1e-12)


def test_parity_validation():
    g = Grid.make(2.0, h_max=0.5, order=4)
    with pytest.raises(ConfigError):
        g.restrict(np.zeros(g.n), "sideways")


def test_operator_dense_matches_apply():
    g = Grid.make(4.0, h_max=0.1, order=6)
    rng = np.random.default_rng(7)
    op = OperatorMatrix(g, scale=0.3, potential=rng.standard_normal(g.n))
    v = rng.standard_normal(g.n)
    assert np.allclose(op.dense() @ v, op.apply(v), atol=1e-12)


def test_sector_dense_matches_projected_operator():
    g = Grid.make(4.0, h_max=0.1, order=8)
    rng = np.random.default_rng(3)
    pot = rng.standard_normal(g.n)
    pot = 0.5 * (pot + pot[::-1])          # parity-symmetric potential
    op = OperatorMatrix(g, scale=1.0, potential=pot)
    for parity in ("even", "odd"):
        sec = op.sector(parity)
        m = sec.m
        P = np.zeros((g.n, m))
        for j in range(m):
            e = np.zeros(m)
            e[j] = 1.0
            P[:, j] = g.extend(e, parity)
        assert np.allclose(sec.dense(), P.T @ op.dense() @ P, atol=1e-12)


HO_EVEN = [1.0, 5.0, 9.0, 13.0]
HO_ODD = [3.0, 7.0, 11.0, 15.0]


def test_harmonic_oscillator_spectrum():
    # independent oracle for the banded eigensolver: -u'' + x^2 u
    g = Grid.make(14.0, h_max=0.05, order=8)
    op = OperatorMatrix(g, scale=1.0, potential=g.x ** 2)
    ev_even, _ = op.sector("even").eigh(4)
    ev_odd, _ = op.sector("odd").eigh(4)
    assert np.allclose(ev_even, HO_EVEN, atol=1e-8)
    assert np.allclose(ev_odd, HO_ODD, atol=1e-8)


def test_laplacian_positive():
    g = Grid.make(6.0, h_max=0.1, order=8)
    lap = build_laplacian(g)
    f = np.exp(-g.x ** 2)
    assert lap.grid.inner(f, lap.apply(f)) > 0.0
