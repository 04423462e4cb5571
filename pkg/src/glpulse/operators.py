"""The two self-adjoint linearization operators of the real pulse,

    A = -m d^2/dx^2 + (m - 3 r^2 + 5 r^4)   (shrink/amplitude operator),
    B = -m d^2/dx^2 + (m - r^2 + r^4)       (phase operator),

their low spectra, the rank-two spectral projection Pi of A, and the
quantities that the asymptotic analysis pins down:

    A r' = 0 exactly,          B r = 0 exactly,
    A sigma = rho exactly,     lambda(A) = -3 nu/2 + O(nu^{3/2}),
    mu_2(B) = m pi^2 / (4 L^2) + O(L^{-5/2}),
    d lambda / dL = 6 nu + O(nu^{3/2}).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigError, NumericError
from .grids import Grid, OperatorMatrix
from .params import ModelParams
from .profiles import ProfileSet, eval_profile


def build_A(params: ModelParams, grid: Grid,
            prof: ProfileSet | None = None) -> OperatorMatrix:
    if prof is None:
        prof = eval_profile(params, grid.x)
    return OperatorMatrix(grid, scale=params.m, potential=prof.V, name="A")


def build_B(params: ModelParams, grid: Grid,
            prof: ProfileSet | None = None) -> OperatorMatrix:
    if prof is None:
        prof = eval_profile(params, grid.x)
    return OperatorMatrix(grid, scale=params.m, potential=prof.W, name="B")


@dataclass
class SpectralData:
    """k lowest eigenpairs of a parity-symmetric operator.

    Eigenvectors are full-grid samples, quadrature-normalized to 1 and
    sign-fixed so the largest-magnitude sample is positive; parities[i] is
    'even' or 'odd'.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray          # (n, k)
    parities: list
    residuals: np.ndarray
    grid: Grid
    name: str

    def mode(self, i: int) -> np.ndarray:
        return self.vectors[:, i]


def low_spectrum(op: OperatorMatrix, k: int = 6,
                 residual_tol: float = 1e-9) -> SpectralData:
    """Merge the k lowest eigenpairs from the even and odd sectors."""
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    grid = op.grid
    found = []
    per = min(k, grid.n_half - 1)
    for parity in ("even", "odd"):
        sec = op.sector(parity)
        vals, vecs = sec.eigh(per)
        for i, lam in enumerate(vals):
            found.append((float(lam), parity, vecs[:, i]))
    found.sort(key=lambda t: t[0])
    found = found[:k]

    w = grid.weights
    evals = np.empty(k)
    vects = np.empty((grid.n, k))
    pars = []
    resid = np.empty(k)
    for i, (lam, parity, v_half) in enumerate(found):
        v = grid.extend(v_half, parity)
        nrm = grid.norm(v)
        if nrm == 0.0:
            raise NumericError("zero eigenvector returned")
        v = v / nrm
        if v[int(np.argmax(np.abs(v)))] < 0:
            v = -v
        evals[i] = lam
        vects[:, i] = v
        pars.append(parity)
        resid[i] = grid.norm(op.apply(v) - lam * v)
    if np.any(resid > residual_tol):
        raise NumericError(
            f"eigen residual {resid.max():.3e} above {residual_tol:.1e} "
            f"for operator {op.name!r}"
        )
    return SpectralData(eigenvalues=evals, vectors=vects, parities=pars,
                        residuals=resid, grid=grid, name=op.name)


class Projection:
    """Quadrature-orthogonal projection onto selected eigenvectors."""

    def __init__(self, grid: Grid, vectors: np.ndarray):
        self.grid = grid
        self.vectors = vectors

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros_like(np.asarray(v, dtype=float))
        for i in range(self.vectors.shape[1]):
            phi = self.vectors[:, i]
            out += phi * self.grid.inner(phi, v)
        return out

    def complement(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v, dtype=float) - self.apply(v)


def projection_Pi(spec: SpectralData, gap_min: float = 0.01) -> Projection:
    """Rank-two projection onto the two lowest modes of A.

    Requires the spectral gap eigenvalue[2] - eigenvalue[1] >= gap_min so the
    pair is well separated from the rest.
    """
    if len(spec.eigenvalues) < 3:
        raise ConfigError("need at least 3 eigenvalues to certify the gap")
    gap = spec.eigenvalues[2] - spec.eigenvalues[1]
    if gap < gap_min:
        raise NumericError(
            f"spectral gap {gap:.3e} below {gap_min}; Pi ill-defined"
        )
    return Projection(spec.grid, spec.vectors[:, :2])


def shrink_mode(params: ModelParams, grid: Grid,
                spec: SpectralData | None = None,
                prof: ProfileSet | None = None):
    """(lambda, s) with s = Pi sigma = (phi1, sigma) phi1.

    The asymptotic coefficients a0, a1, a2 and |s|^{-2} in the stability
    expansion all assume this scale, not a unit-normalized eigenvector.
    """
    if prof is None:
        prof = eval_profile(params, grid.x)
    if spec is None:
        A = build_A(params, grid, prof)
        spec = low_spectrum(A, k=4)
    i_even = next(i for i, p in enumerate(spec.parities) if p == "even")
    lam = float(spec.eigenvalues[i_even])
    phi = spec.vectors[:, i_even]
    c = grid.inner(phi, prof.sigma)
    if c < 0:
        phi, c = -phi, -c
    return lam, c * phi


def rayleigh_sigma(params: ModelParams, grid: Grid,
                   A: OperatorMatrix | None = None) -> dict:
    """(sigma, sigma), (A sigma, sigma) and their Rayleigh quotient."""
    prof = eval_profile(params, grid.x)
    if A is None:
        A = build_A(params, grid, prof)
    s = prof.sigma
    ss = grid.inner(s, s)
    As_s = grid.inner(A.apply(s), s)
    return {"sigma_norm2": ss, "A_sigma_sigma": As_s, "rayleigh": As_s / ss}


def dlambda_dL(params: ModelParams, grid: Grid, dL: float = 0.01) -> float:
    """Centered difference of lambda(L) across dL (same grid both sides)."""
    L = params.L
    lams = []
    for Lq in (L + 0.5 * dL, L - 0.5 * dL):
        q = ModelParams.from_L(Lq, mu=params.mu)
        lam, _ = shrink_mode(q, grid)
        lams.append(lam)
    return (lams[0] - lams[1]) / dL


def sigma_hat(params: ModelParams, grid: Grid) -> dict:
    """Solve A shat = (1 - Pi)(lambda sigma - rho) with Pi shat = 0.

    shat is even, so the odd constraint (r' direction) is automatic and the
    bordered system lives in the even sector with the single constraint
    (phi1, shat) = 0.
    """
    prof = eval_profile(params, grid.x)
    A = build_A(params, grid, prof)
    spec = low_spectrum(A, k=4)
    Pi = projection_Pi(spec)
    lam, s = shrink_mode(params, grid, spec=spec, prof=prof)
    rhs = Pi.complement(lam * prof.sigma - prof.rho)

    i_even = next(i for i, p in enumerate(spec.parities) if p == "even")
    phi = spec.vectors[:, i_even]
    sec = A.sector("even")
    Ae = sec.dense()
    b_half = grid.restrict(phi, "even") * grid.h  # quadrature in parity coords
    rhs_half = grid.restrict(rhs, "even")
    n1 = sec.m + 1
    Mb = np.zeros((n1, n1))
    Mb[:-1, :-1] = Ae
    Mb[:-1, -1] = b_half
    Mb[-1, :-1] = b_half
    sol = scipy.linalg.solve(Mb, np.concatenate([rhs_half, [0.0]]))
    shat = grid.extend(sol[:-1], "even")
    res = grid.norm(A.apply(shat) - rhs)
    return {
        "shat": shat,
        "lambda": lam,
        "s": s,
        "residual": res,
        "pi_component": grid.norm(Pi.apply(shat)),
    }
