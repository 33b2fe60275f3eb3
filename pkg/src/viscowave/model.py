"""Physical parameters and the explicit sine spectral basis.

The medium is described by a wave speed and a two-term exponential
relaxation kernel K(t) = b1*exp(-r1*t) + b2*exp(-r2*t) whose coefficients
satisfy the structural conditions b1/r1 + b2/r2 = 1 and
r1 + r2 - b1 - b2 > 0. On the interval (0, pi) the underlying operator
-gamma^2 d^2/dx^2 with Dirichlet conditions has eigenvalues gamma^2 n^2
and sine eigenfunctions, which every other module builds on.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolation, GridTooCoarse, ZeroData

# Absolute tolerance on the unit-mass identity b1/r1 + b2/r2 = 1.
MASS_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Validated wave speed and kernel coefficients.

    Use :func:`validate_params` to construct; the constructor itself does
    not check the structural conditions.
    """

    gamma: float
    b1: float
    b2: float
    r1: float
    r2: float

    @property
    def alpha(self) -> float:
        """Net decay margin r1 + r2 - b1 - b2 (positive by validation)."""
        return self.r1 + self.r2 - self.b1 - self.b2

    @property
    def strong_condition(self) -> bool:
        """Whether the stronger margin (3/2)(b1+b2) < r1+r2 also holds."""
        return 1.5 * (self.b1 + self.b2) < self.r1 + self.r2

    def kernel(self, t):
        """Relaxation kernel K(t) = b1 e^{-r1 t} + b2 e^{-r2 t}."""
        t = np.asarray(t, dtype=float)
        return self.b1 * np.exp(-self.r1 * t) + self.b2 * np.exp(-self.r2 * t)

    def kernel_integral(self, t):
        """Running mass of the kernel, b1/r1 (1-e^{-r1 t}) + b2/r2 (1-e^{-r2 t})."""
        t = np.asarray(t, dtype=float)
        return self.b1 / self.r1 * (1.0 - np.exp(-self.r1 * t)) + self.b2 / self.r2 * (
            1.0 - np.exp(-self.r2 * t)
        )

    @property
    def kernel_mass(self) -> float:
        """Total kernel mass b1/r1 + b2/r2 (equal to 1 by validation)."""
        return self.b1 / self.r1 + self.b2 / self.r2


def validate_params(gamma: float, b1: float, b2: float, r1: float, r2: float) -> ModelParams:
    """Check the structural conditions and return the validated parameters.

    Raises ConstraintViolation naming the first failing condition:
    positivity of all five inputs, unit kernel mass b1/r1 + b2/r2 = 1
    (within 1e-12), and positive decay margin r1 + r2 > b1 + b2.
    """
    values = {"gamma": gamma, "b1": b1, "b2": b2, "r1": r1, "r2": r2}
    for name, value in values.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value)):
            raise ConstraintViolation(f"{name} = {value!r} is not a finite number")
        if value <= 0:
            raise ConstraintViolation(f"{name} = {value} must be positive")
    mass = b1 / r1 + b2 / r2
    if abs(mass - 1.0) > MASS_TOL:
        raise ConstraintViolation(
            f"b1/r1 + b2/r2 = {mass!r} differs from 1 by more than {MASS_TOL}"
        )
    if r1 + r2 - b1 - b2 <= 0:
        raise ConstraintViolation(
            f"r1 + r2 - b1 - b2 = {r1 + r2 - b1 - b2!r} must be positive"
        )
    return ModelParams(float(gamma), float(b1), float(b2), float(r1), float(r2))


def canonical_params() -> ModelParams:
    """The reference parameter set used throughout the test suite."""
    return validate_params(1.0, 0.05, 0.15, 0.1, 0.3)


class Normalization(enum.Enum):
    """Eigenfunction scaling: bare sin(nx) or the orthonormal multiple."""

    PAPER = "paper"
    ORTHONORMAL = "orthonormal"


@dataclass(frozen=True)
class SpectralBasis:
    """Sine eigenbasis of -gamma^2 d^2/dx^2 on (0, pi) with Dirichlet ends."""

    params: ModelParams
    normalization: Normalization = Normalization.ORTHONORMAL

    @property
    def scale(self) -> float:
        """Multiplier in e_n(x) = scale * sin(nx)."""
        if self.normalization is Normalization.ORTHONORMAL:
            return math.sqrt(2.0 / math.pi)
        return 1.0

    def eigenvalue(self, n) -> float:
        """lambda_n = gamma^2 n^2."""
        n = np.asarray(n)
        if np.any(n < 1):
            raise ConstraintViolation("mode index must be >= 1")
        out = self.params.gamma**2 * np.asarray(n, dtype=float) ** 2
        return float(out) if out.ndim == 0 else out

    def eigenvalues(self, nmax: int):
        """Array (lambda_1, ..., lambda_nmax)."""
        return self.eigenvalue(np.arange(1, nmax + 1))

    def eigenfunction(self, n: int, x):
        """e_n(x) = scale * sin(nx)."""
        return self.scale * np.sin(n * np.asarray(x, dtype=float))

    def end_derivative(self, n, left: bool = False):
        """e_n'(pi) = scale*n*(-1)^n, or e_n'(0) = scale*n when left=True."""
        n = np.asarray(n)
        value = self.scale * np.asarray(n, dtype=float)
        if not left:
            value = value * np.where(n % 2 == 0, 1.0, -1.0)
        return float(value) if value.ndim == 0 else value

    def synthesize(self, coeffs, x):
        """Evaluate sum_n coeffs[n-1] * e_n(x) on the sample points x."""
        x = np.asarray(x, dtype=float)
        coeffs = np.asarray(coeffs, dtype=float)
        n = np.arange(1, coeffs.size + 1)
        return self.scale * (np.sin(np.outer(x, n)) @ coeffs)


def project(basis: SpectralBasis, x, values, nmax: int):
    """Modal coefficients <u, e_n>, n = 1..nmax, from uniform samples of u.

    The samples must cover [0, pi] on a uniform grid with at least eight
    points per wavelength of the highest retained mode (spacing <=
    pi/(4*nmax)); the trapezoid rule is then exact for band-limited
    integrands up to the aliasing limit.
    """
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size < 2 or x.shape != values.shape:
        raise GridTooCoarse("need matching 1-D sample arrays with >= 2 points")
    spacing = np.diff(x)
    h = spacing[0]
    if abs(x[0]) > 1e-12 or abs(x[-1] - math.pi) > 1e-12:
        raise GridTooCoarse("sample grid must span [0, pi]")
    if np.any(np.abs(spacing - h) > 1e-12 * math.pi):
        raise GridTooCoarse("sample grid must be uniform")
    if h > math.pi / (4 * nmax) + 1e-12:
        raise GridTooCoarse(
            f"grid spacing {h:.3e} exceeds pi/(4*{nmax}) = {math.pi / (4 * nmax):.3e}"
        )
    n = np.arange(1, nmax + 1)
    # <u, sin(n.)> by trapezoid; endpoint terms vanish with sin.
    inner = np.trapezoid(values[:, None] * np.sin(np.outer(x, n)), x, axis=0)
    if basis.normalization is Normalization.ORTHONORMAL:
        return math.sqrt(2.0 / math.pi) * inner
    return (2.0 / math.pi) * inner


@dataclass(frozen=True)
class InitialData:
    """Modal coefficients of a data pair (u0, u1) in the chosen basis."""

    u0: np.ndarray
    u1: np.ndarray

    def __post_init__(self):
        u0 = np.asarray(self.u0, dtype=float)
        u1 = np.asarray(self.u1, dtype=float)
        if u0.ndim != 1 or u0.shape != u1.shape:
            raise ConstraintViolation("u0 and u1 must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(u0)) and np.all(np.isfinite(u1))):
            raise ConstraintViolation("data coefficients must be finite")
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "u1", u1)

    @property
    def nmodes(self) -> int:
        return self.u0.size


def strong_state_norms(basis: SpectralBasis, data: InitialData) -> tuple[float, float]:
    """Squared norms (sum lambda_n u0n^2, sum u1n^2) of the data pair."""
    lams = basis.eigenvalues(data.nmodes)
    return float(np.sum(lams * data.u0**2)), float(np.sum(data.u1**2))


def weak_state_norms(basis: SpectralBasis, u0, u1) -> tuple[float, float]:
    """Squared norms (sum u0n^2, sum u1n^2/lambda_n) of a weak-state pair."""
    u0 = np.asarray(u0, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    lams = basis.eigenvalues(u0.size)
    return float(np.sum(u0**2)), float(np.sum(u1**2 / lams))


def require_nonzero(*norm_parts: float) -> float:
    """Sum the given squared norms, raising ZeroData when the total vanishes."""
    total = float(sum(norm_parts))
    if total <= 0.0:
        raise ZeroData("data pair has zero norm")
    return total
