"""Model parameters for the quintic complex Ginzburg-Landau equation

    u_t = m0 u_xx + m1 u + m2 |u|^2 u + m3 |u|^4 u .

Two standard coefficient frames are used:

* the *pulse frame*  m0 = m,  m1 = -(m + i*alpha*mu1),  m2 = 1 + i*alpha*mu2,
  m3 = -(1 + i*alpha*mu3), in which the stationary real pulse r(x) exists for
  alpha = 0 and all pulse/stability analysis is carried out, and
* the *unit-diffusion frame*  m0 = 1 (same m1..m3, simplified coefficients),
  in which the traveling-kink reduction and the speed formula of
  :func:`kink_quantities` are exact.

Throughout, m = 3(1-nu)/16 with nu in (0,1), and L = (1/4) log(4/nu) is the
half-width parameter of the pulse plateau (nu = 4 exp(-4L)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError, RegimeError

NU_MIN = 1e-12
SIMPLIFIED_MU = (0.0, 0.0, 1.0, 0.0)


def L_to_nu(L: float) -> float:
    """Plateau half-width L -> nu = 4 exp(-4L)."""
    nu = 4.0 * math.exp(-4.0 * float(L))
    if not nu < 1.0:
        raise ConfigError(f"L = {L} gives nu = {nu} >= 1; need L > ln(4)/4")
    if nu < NU_MIN:
        raise ConfigError(f"L = {L} gives nu = {nu} < {NU_MIN}")
    return nu


def nu_to_L(nu: float) -> float:
    """nu -> L = (1/4) log(4/nu)."""
    _check_nu(nu)
    return 0.25 * math.log(4.0 / float(nu))


def m_of_nu(nu: float) -> float:
    return 3.0 * (1.0 - float(nu)) / 16.0


def _check_nu(nu: float) -> None:
    if not (0.0 < nu < 1.0):
        raise ConfigError(f"nu must lie in (0,1), got {nu}")
    if nu < NU_MIN:
        raise ConfigError(f"nu = {nu} below supported floor {NU_MIN}")


@dataclass(frozen=True)
class ModelParams:
    """Immutable parameter bundle.

    nu   -- plateau parameter, 4*exp(-4L); kept >= 1e-12 so double-precision
            profile formulas stay meaningful
    y    -- shelf offset >= 0; the "flat" parameters live at nu_flat = nu e^{-4y}
    eps  -- alpha**2 >= 0 of the scaled system (0 for the real pulse)
    mu   -- (mu0, mu1, mu2, mu3); mu0 must be 0 (real diffusion); the
            simplified equation is mu = (0, 0, 1, 0)
    """

    nu: float
    y: float = 0.0
    eps: float = 0.0
    mu: tuple[float, float, float, float] = field(default=SIMPLIFIED_MU)

    def __post_init__(self):
        _check_nu(self.nu)
        if self.y < 0.0:
            raise ConfigError(f"y must be >= 0, got {self.y}")
        if self.eps < 0.0:
            raise ConfigError(f"eps must be >= 0, got {self.eps}")
        mu = tuple(float(c) for c in self.mu)
        if len(mu) != 4:
            raise ConfigError(f"mu must have 4 components, got {self.mu!r}")
        if mu[0] != 0.0:
            raise ConfigError("mu0 != 0 (complex diffusion) is not modeled")
        object.__setattr__(self, "mu", mu)
        if self.nu_flat < NU_MIN:
            raise ConfigError(
                f"nu*exp(-4y) = {self.nu_flat} below {NU_MIN}; reduce y"
            )

    # -- derived scalars ----------------------------------------------------

    @property
    def L(self) -> float:
        return 0.25 * math.log(4.0 / self.nu)

    @property
    def m(self) -> float:
        return m_of_nu(self.nu)

    @property
    def nu_flat(self) -> float:
        return self.nu * math.exp(-4.0 * self.y)

    @property
    def kappa(self) -> float:
        nf = self.nu_flat
        return (self.nu - nf) / (1.0 - nf)

    @property
    def L_flat(self) -> float:
        return self.L + self.y

    @property
    def m_flat(self) -> float:
        return m_of_nu(self.nu_flat)

    @property
    def alpha(self) -> float:
        return math.sqrt(self.eps)

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_nu(cls, nu, y=0.0, eps=0.0, mu=SIMPLIFIED_MU) -> "ModelParams":
        return cls(nu=float(nu), y=float(y), eps=float(eps), mu=tuple(mu))

    @classmethod
    def from_L(cls, L, y=0.0, eps=0.0, mu=SIMPLIFIED_MU) -> "ModelParams":
        return cls(nu=L_to_nu(L), y=float(y), eps=float(eps), mu=tuple(mu))

    def flat(self) -> "ModelParams":
        """Parameters at nu_flat with y reset to 0 (eps, mu carried over)."""
        return ModelParams(nu=self.nu_flat, y=0.0, eps=self.eps, mu=self.mu)

    def with_eps(self, eps: float) -> "ModelParams":
        return ModelParams(nu=self.nu, y=self.y, eps=float(eps), mu=self.mu)

    def with_y(self, y: float) -> "ModelParams":
        return ModelParams(nu=self.nu, y=float(y), eps=self.eps, mu=self.mu)

    # -- PDE coefficients ---------------------------------------------------

    def coefficients(self, frame: str = "pulse"):
        """(m0, m1, m2, m3) for the evolution equation.

        frame="pulse": diffusion m (pulse r(x) is steady for alpha = 0).
        frame="unit":  diffusion 1 (traveling-kink frame; simplified mu only).
        """
        a = self.alpha
        _, mu1, mu2, mu3 = self.mu
        m1 = -(self.m + 1j * a * mu1)
        m2 = 1.0 + 1j * a * mu2
        m3 = -(1.0 + 1j * a * mu3)
        if frame == "pulse":
            return (complex(self.m), m1, m2, m3)
        if frame == "unit":
            return (1.0 + 0.0j, m1, m2, m3)
        raise ConfigError(f"unknown frame {frame!r}")


@dataclass(frozen=True)
class KinkQuantities:
    """Traveling-kink data in the unit-diffusion frame.

    The kink u = e^{i w t} K(x - c t), K = r(xi) e^{i k xi}, joins 0 (left) to
    the plane wave rbar e^{i k x} (right); omega_plus = w - k c is the
    frequency of that plane wave, selected for zero-wavenumber stability.
    """

    nu: float
    alpha: float
    k: float
    omega_plus: float
    omega_minus: float
    rbar: float
    c: float
    discriminant: float


def kink_quantities(nu: float, alpha: float) -> KinkQuantities:
    """Exact kink wavenumber, frequencies, amplitude and speed.

    Valid while 1 + 3(nu - 4 alpha^2) > 0; the sign of c separates outflow
    (4 alpha^2 < nu, the finite state invades, c < 0) from inflow (c > 0).
    """
    _check_nu(nu)
    m = m_of_nu(nu)
    a = float(alpha)
    disc = 1.0 + 3.0 * (nu - 4.0 * a * a)
    if disc <= 0.0:
        raise RegimeError(
            f"no kink: 1 + 3(nu - 4 alpha^2) = {disc} <= 0 "
            f"(nu={nu}, alpha={alpha})"
        )
    sq = math.sqrt(disc)
    k = math.sqrt(3.0) * a / 2.0
    omega_plus = 0.25 * a * (2.0 + sq)
    omega_minus = 0.25 * a * (2.0 - sq)
    # rbar^2 = omega_plus/alpha, continuous at alpha = 0
    rbar2 = 0.25 * (2.0 + sq)
    c = math.sqrt(3.0) * (4.0 * a * a - nu) / (1.0 + sq)
    # consistency of the quadratic omega^2 - a*omega + a^2 (m + 3a^2/4) = 0
    res = omega_plus**2 - a * omega_plus + a * a * (m + 0.75 * a * a)
    if abs(res) > 1e-12 * max(1.0, omega_plus**2):
        raise RegimeError(f"kink frequency quadratic violated: residual {res}")
    return KinkQuantities(
        nu=float(nu),
        alpha=a,
        k=k,
        omega_plus=omega_plus,
        omega_minus=omega_minus,
        rbar=math.sqrt(rbar2),
        c=c,
        discriminant=disc,
    )
