import math

import numpy as np
import pytest

from glpulse.errors import NumericError
from glpulse.newton import (CertifiedProblem, certify_and_solve,
                            sampled_curvature_bound)


def scalar_problem(x0, rho):
    # f(x) = x^2 - 2; A = 2 x0; A^{-1} f'' = 2/(2 x0) = 1/x0 everywhere
    f = lambda x: x * x - 2.0
    solve_A = lambda z: z / (2.0 * x0)
    return CertifiedProblem(f=f, solve_A=solve_A, M=abs(1.0 / x0), rho=rho,
                            norm=abs)


def test_scalar_certified_root():
    x0 = 1.5
    x, cert = certify_and_solve(scalar_problem(x0, rho=0.5), x0)
    assert cert.hypothesis_ok and cert.converged
    assert x == pytest.approx(math.sqrt(2.0), rel=1e-14)
    assert abs(x - x0) <= cert.bound1
    assert abs(x - x0 + (x0 * x0 - 2.0) / (2.0 * x0)) <= cert.bound2
    # the frozen-Jacobian map is linearly convergent with small ratio,
    # never expanding
    assert all(r < 0.55 for r in cert.step_ratios if r > 0)


def test_hypothesis_rejects_bad_start():
    # from x0 = 10 the first step (~4.9) exceeds K = (3/4) a rho
    x, cert = certify_and_solve(scalar_problem(10.0, rho=1.0), 10.0)
    assert x is None
    assert not cert.hypothesis_ok
    assert cert.d0 > cert.K


def test_vector_problem_with_exact_bounds():
    # coupled system: f(u, v) = (u + v^2 - 1, v + u^2 - 1)
    def f(x):
        u, v = x
        return np.array([u + v * v - 1.0, v + u * u - 1.0])

    x0 = np.array([0.65, 0.65])
    A = np.array([[1.0, 2 * x0[1]], [2 * x0[0], 1.0]])
    Ainv = np.linalg.inv(A)
    norm = lambda x: float(np.linalg.norm(x, 2))
    # |A^{-1} D^2 f| <= 2 |A^{-1}| in the Euclidean norm, any radius
    M = 2.0 * np.linalg.norm(Ainv, 2)
    prob = CertifiedProblem(f=f, solve_A=lambda z: Ainv @ z, M=M, rho=0.2,
                            norm=norm)
    x, cert = certify_and_solve(prob, x0)
    assert cert.converged
    # the symmetric root u = v solves u + u^2 = 1
    gold = 0.5 * (math.sqrt(5.0) - 1.0)
    assert np.allclose(x, gold, rtol=1e-13)
    assert norm(x - x0) <= cert.bound1


def test_underestimated_curvature_is_caught():
    # claim M = 0 (a linear problem) for a genuinely quadratic one far
    # from the root: the contraction check must notice
    f = lambda x: x * x - 2.0
    prob = CertifiedProblem(f=f, solve_A=lambda z: z / (2.0 * 8.0), M=0.0,
                            rho=50.0, norm=abs)
    with pytest.raises(NumericError):
        certify_and_solve(prob, 8.0)


def test_sampled_curvature_bound_linear_map():
    # linear residual: curvature samples must be ~0
    A = np.array([[2.0, 1.0], [0.0, 3.0]])
    f = lambda x: A @ x - np.array([1.0, 1.0])
    Ainv = np.linalg.inv(A)
    M = sampled_curvature_bound(
        f, lambda z: Ainv @ z, np.zeros(2), rho=1.0,
        norm=lambda x: float(np.linalg.norm(x)),
        directions=[np.array([1.0, 0.0]), np.array([0.0, 1.0]),
                    np.array([0.7, -0.7])])
    assert M < 1e-6


def test_sampled_curvature_bound_quadratic():
    # f(x) = x^2/2 with A = 1: A^{-1} f'' = 1, the sampler should land
    # near 1 (inflated, never far below)
    M = sampled_curvature_bound(
        lambda x: 0.5 * x * x, lambda z: z, 1.0, rho=0.5, norm=abs,
        directions=[1.0, -1.0])
    assert 0.9 <= M <= 3.0


def test_invalid_constants_rejected():
    with pytest.raises(ValueError):
        CertifiedProblem(f=abs, solve_A=abs, M=-1.0, rho=1.0, norm=abs)
    with pytest.raises(ValueError):
        CertifiedProblem(f=abs, solve_A=abs, M=1.0, rho=0.0, norm=abs)
