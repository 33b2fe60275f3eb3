"""Per-mode characteristic polynomial, exact roots, and gap statistics.

Each Fourier mode of the memory equation evolves by exponentials exp(s*t)
whose exponents are roots of the quartic

    p(s) = (s^2 + lam)(s + r1)(s + r2) - lam*b1*(s + r2) - lam*b2*(s + r1).

The unit-mass condition b1/r1 + b2/r2 = 1 forces p(0) = 0, so after
deflating the zero root a real cubic remains; under the validated
parameter conditions it has one negative real root rho and a complex
conjugate pair +-. We store the pair as i*omega with Re omega > 0 and
Im omega > 0, so the mode oscillates at Re omega and decays at Im omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GapDegenerate, NoThreshold, RootClassificationFailure
from .model import ModelParams

# Imaginary parts below IMAG_TOL*(1+|s|) are treated as zero when the
# cubic roots are split into the real root and the conjugate pair.
IMAG_TOL = 1e-10


@dataclass(frozen=True)
class ModalRoots:
    """Classified roots of the mode-n characteristic quartic."""

    n: int
    lam: float
    omega: complex
    rho: float
    residual: float


@dataclass(frozen=True)
class SpectralLimits:
    """Empirical tail statistics of the exponent sequences.

    gap is the measured limit of Re omega_{n+1} - Re omega_n (estimated
    from the tail of the retained range), alpha_omega the tail value of
    Im omega_n, alpha_rho the tail value of rho_n. n0_table maps each
    requested margin epsilon to the smallest index from which the
    separation inequalities

        |Re omega_n - Re omega_m| >= gap*sqrt(1-eps)*|n-m|
        Re omega_n >= gap*sqrt(1-eps)*n

    hold for all retained n, m >= n0.
    """

    gap: float
    min_gap: float
    alpha_omega: float
    alpha_rho: float
    n0_table: dict[float, int]
    nmax: int


def characteristic_poly(params: ModelParams, lam: float, s):
    """Evaluate the mode quartic p(s); vectorized over s."""
    s = np.asarray(s, dtype=complex)
    value = (s * s + lam) * (s + params.r1) * (s + params.r2)
    value = value - lam * params.b1 * (s + params.r2) - lam * params.b2 * (s + params.r1)
    return complex(value) if value.ndim == 0 else value


def _poly_derivative(params: ModelParams, lam: float, s):
    # p(s) = s^4 + a3 s^3 + a2 s^2 + a1 s with a3 = r1+r2,
    # a2 = r1 r2 + lam, a1 = lam*(r1+r2-b1-b2); constant term is zero.
    a3 = params.r1 + params.r2
    a2 = params.r1 * params.r2 + lam
    a1 = lam * params.alpha
    return ((4.0 * s + 3.0 * a3) * s + 2.0 * a2) * s + a1


def _poly_scale(params: ModelParams, lam: float, s):
    # Magnitude sum of the quartic's terms at s, for relative residuals.
    a3 = params.r1 + params.r2
    a2 = params.r1 * params.r2 + lam
    a1 = lam * params.alpha
    m = np.abs(s)
    return ((m + a3) * m + a2) * m * m + a1 * m + lam * params.r1 * params.r2


def cubic_coefficients(params: ModelParams, lam: float) -> np.ndarray:
    """Monic coefficients [1, c2, c1, c0] of p(s)/s."""
    return np.array(
        [
            1.0,
            params.r1 + params.r2,
            params.r1 * params.r2 + lam,
            lam * params.alpha,
        ]
    )


def _classify(n: int, lam: float, params: ModelParams, roots: np.ndarray) -> ModalRoots:
    imag = np.abs(roots.imag)
    is_real = imag <= IMAG_TOL * (1.0 + np.abs(roots))
    if int(np.sum(is_real)) != 1:
        raise RootClassificationFailure(
            f"mode {n}: expected one real cubic root and a conjugate pair, "
            f"got roots {roots.tolist()}"
        )
    rho = float(roots[is_real][0].real)
    pair = roots[~is_real]
    s_plus = pair[np.argmax(pair.imag)]
    omega = complex(-1j * s_plus)
    if rho >= 0.0 or omega.real <= 0.0 or omega.imag <= 0.0:
        raise RootClassificationFailure(
            f"mode {n}: roots violate the decay pattern (rho = {rho}, omega = {omega})"
        )
    all_roots = np.array([0.0, 1j * omega, (1j * omega).conjugate(), rho], dtype=complex)
    res = np.abs(characteristic_poly(params, lam, all_roots))
    rel = float(np.max(res / _poly_scale(params, lam, all_roots)))
    return ModalRoots(n=n, lam=lam, omega=omega, rho=rho, residual=rel)


def exact_roots(params: ModelParams, lam: float, n: int = 0) -> ModalRoots:
    """Roots of the mode quartic: deflate s = 0, solve the cubic, polish.

    The cubic is solved by companion-matrix eigenvalues, then each root is
    polished with one Newton step on the quartic. Raises
    RootClassificationFailure when the cubic has three real roots.
    """
    roots = np.roots(cubic_coefficients(params, lam)).astype(complex)
    p = characteristic_poly(params, lam, roots)
    dp = _poly_derivative(params, lam, roots)
    safe = np.abs(dp) > 0
    roots[safe] = roots[safe] - p[safe] / dp[safe]
    return _classify(n, lam, params, roots)


def root_table(params: ModelParams, nmax: int) -> list[ModalRoots]:
    """Exact roots for modes 1..nmax (lambda_n = gamma^2 n^2), batched."""
    ns = np.arange(1, nmax + 1)
    lams = params.gamma**2 * ns.astype(float) ** 2
    # Stacked companion matrices of the deflated cubics.
    comp = np.zeros((nmax, 3, 3))
    comp[:, 1, 0] = 1.0
    comp[:, 2, 1] = 1.0
    comp[:, 0, 0] = -(params.r1 + params.r2)
    comp[:, 0, 1] = -(params.r1 * params.r2 + lams)
    comp[:, 0, 2] = -lams * params.alpha
    roots = np.linalg.eigvals(comp)
    p = characteristic_poly(params, lams[:, None], roots)
    dp = _poly_derivative(params, lams[:, None], roots)
    safe = np.abs(dp) > 0
    roots[safe] = roots[safe] - p[safe] / dp[safe]
    return [_classify(int(ns[i]), float(lams[i]), params, roots[i]) for i in range(nmax)]


def asymptotic_roots(params: ModelParams, lam: float) -> tuple[complex, float]:
    """Leading terms of the exponent expansions for large lambda.

    omega ~ sqrt(lam) + i(b1+b2)/2 and rho ~ b1+b2-r1-r2; the dropped
    remainders are O(1/sqrt(lam)) and O(1/lam).
    """
    omega = complex(math.sqrt(lam), 0.5 * (params.b1 + params.b2))
    rho = params.b1 + params.b2 - params.r1 - params.r2
    return omega, rho


def spectral_limits(
    params: ModelParams,
    nmax: int,
    epsilons: tuple[float, ...] = (0.01,),
    roots: list[ModalRoots] | None = None,
) -> SpectralLimits:
    """Gap and tail statistics from the exact roots of modes 1..nmax.

    The gap constant is estimated as the minimum Re-gap over the upper
    half of the range (the sequence converges monotonically, so this is
    a stable limit estimate); min_gap over the whole range is also kept.
    """
    if nmax < 10:
        raise GapDegenerate("need at least 10 modes for tail statistics")
    if roots is None:
        roots = root_table(params, nmax)
    re = np.array([r.omega.real for r in roots])
    gaps = np.diff(re)
    if np.any(gaps <= 0.0):
        raise GapDegenerate("Re omega_n is not strictly increasing")
    gap = float(np.min(gaps[gaps.size // 2 :]))
    min_gap = float(np.min(gaps))
    if gap <= 0.0:
        raise GapDegenerate("measured frequency gap is not positive")
    n0_table: dict[float, int] = {}
    ns = np.arange(1, nmax + 1)
    for eps in epsilons:
        if not 0.0 < eps < 1.0:
            raise GapDegenerate(f"epsilon = {eps} must lie in (0, 1)")
        floor = gap * math.sqrt(1.0 - eps)
        # Smallest start index such that both separation inequalities hold
        # for every retained pair above it.
        diff = np.abs(re[:, None] - re[None, :])
        sep = diff - floor * np.abs(ns[:, None] - ns[None, :])
        n0 = 0
        for start in range(nmax):
            if np.all(sep[start:, start:] >= -1e-12) and np.all(
                re[start:] >= floor * ns[start:] - 1e-12
            ):
                n0 = start + 1
                break
        else:
            raise GapDegenerate(f"no valid start index for epsilon = {eps}")
        n0_table[float(eps)] = n0
    return SpectralLimits(
        gap=gap,
        min_gap=min_gap,
        alpha_omega=float(roots[-1].omega.imag),
        alpha_rho=float(roots[-1].rho),
        n0_table=n0_table,
        nmax=nmax,
    )


def control_time_threshold(params: ModelParams, limits: SpectralLimits) -> float:
    """Shortest horizon 2*pi/sqrt(gap^2 - 16 alpha_omega^2) with a positive
    observability constant in the zero-margin limit.

    Raises NoThreshold when gap <= 4*alpha_omega, reporting the violated
    inequality.
    """
    gap = limits.gap
    aw = limits.alpha_omega
    if gap <= 4.0 * aw:
        raise NoThreshold(
            f"gap {gap!r} <= 4*alpha_omega = {4.0 * aw!r}; no horizon makes the "
            "observability constant positive"
        )
    return 2.0 * math.pi / math.sqrt(gap * gap - 16.0 * aw * aw)
