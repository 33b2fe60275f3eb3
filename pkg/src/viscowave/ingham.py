"""Weighted-transform machinery and observability inequality checks.

The lower (inverse) bound machinery rests on the weight g(t) = sin(pi t/T)
on [0, T]: its one-sided Fourier transform against e^{iwt} is
(1 + e^{iwT}) G(w) with G(w) = -T pi/(T^2 w^2 - pi^2), and |G| decays
quadratically away from the poles. Combining the transform identity with
the frequency gap yields an explicit positive constant bounding the time
integral of a modal sum from below by the weighted amplitude norm; the
upper (direct) bound is estimated empirically from boundary traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AllAmplitudesZero,
    HypothesisViolated,
    NearPole,
    NotFoundWithinRange,
    QuadratureNotConverged,
)
from .modal import data_from_amplitudes, exact_coefficients_batch
from .model import ModelParams, Normalization, SpectralBasis
from .series import values_on_grid
from .spectrum import ModalRoots, SpectralLimits, root_table, spectral_limits

GAUSS_NODES = 16

QUAD_TOL = 1e-9

# |w -+ pi/T| below this uses the series branch of the transform.
POLE_GUARD = 1e-8
TRANSFORM_SERIES_WINDOW = 1e-4


@dataclass(frozen=True)
class WeightSetup:
    """Horizon and margin data instantiating the weighted bounds."""

    T: float
    epsilon: float
    n0: int
    nu: float
    M: float


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of an inequality sweep; scalar fields describe the worst trial."""

    lhs: float
    rhs_constant: float
    rhs_sum: float
    ratio: float
    theorem_constant_positive: bool
    ratios: np.ndarray


def sine_weight(t, T: float):
    """g(t) = sin(pi t / T) on [0, T], zero outside."""
    t = np.asarray(t, dtype=float)
    inside = (t >= 0.0) & (t <= T)
    out = np.where(inside, np.sin(np.pi * np.clip(t, 0.0, T) / T), 0.0)
    return float(out) if out.ndim == 0 else out


def sine_weight_kernel(w, T: float):
    """G(w) = -T pi / (T^2 w^2 - pi^2); poles at w = +-pi/T are guarded."""
    w = np.asarray(w, dtype=complex)
    pole = math.pi / T
    if np.any(np.abs(w - pole) < POLE_GUARD) or np.any(np.abs(w + pole) < POLE_GUARD):
        raise NearPole(
            f"w within {POLE_GUARD} of a pole +-pi/T = +-{pole!r}; "
            "use sine_weight_transform, which extends continuously"
        )
    out = -T * math.pi / (T * T * w * w - math.pi * math.pi)
    return complex(out) if out.ndim == 0 else out


def sine_weight_transform(w, T: float):
    """int_0^inf g(t) e^{iwt} dt = (1 + e^{iwT}) G(w), poles removable.

    Near w = +-pi/T the product is evaluated by the series of
    (1 - e^{x})/(-x), keeping the continuous extension (value +-iT/2 at
    the poles) to full accuracy.
    """
    w_in = np.asarray(w, dtype=complex)
    w = np.atleast_1d(w_in)
    out = np.empty_like(w)
    pole = math.pi / T
    near_plus = np.abs(w - pole) * T < TRANSFORM_SERIES_WINDOW
    near_minus = np.abs(w + pole) * T < TRANSFORM_SERIES_WINDOW
    plain = ~(near_plus | near_minus)
    if np.any(plain):
        wp = w[plain]
        out[plain] = (1.0 + np.exp(1j * wp * T)) * (
            -T * math.pi / (T * T * wp * wp - math.pi * math.pi)
        )
    for mask, sign in ((near_plus, 1.0), (near_minus, -1.0)):
        if np.any(mask):
            delta = w[mask] - sign * pole
            x = 1j * delta * T
            series = 1.0 + x / 2.0 + x**2 / 6.0 + x**3 / 24.0
            out[mask] = 1j * math.pi * T * series / (T * delta + sign * 2.0 * math.pi)
    return complex(out[0]) if w_in.ndim == 0 else out


def kernel_decay_bound(sigma: float, n: int, T: float) -> float:
    """Bound 4 pi / (T sigma^2 (4n^2 - 1)) on |G(w)| for |w| >= sigma n.

    Requires T > 2 pi / sigma; raises HypothesisViolated otherwise.
    """
    if T <= 2.0 * math.pi / sigma:
        raise HypothesisViolated(
            f"need T > 2*pi/sigma = {2.0 * math.pi / sigma!r}, got T = {T!r}"
        )
    return 4.0 * math.pi / (T * sigma * sigma * (4.0 * n * n - 1.0))


def tail_start_index(
    setup: WeightSetup, a: float, omegas: np.ndarray, gap: float
) -> int:
    """Smallest retained index from which both tail bounds hold.

    Both a*|G(omega_n)| for every n >= n0 and a*sum_{n>=n0} |G(omega_n)|
    must stay below pi*eps/(T gap^2 (1-eps)). The sum runs over retained
    modes only. Raises NotFoundWithinRange when no retained index works.
    """
    T, eps = setup.T, setup.epsilon
    if T <= 2.0 * math.pi / (gap * math.sqrt(1.0 - eps)):
        raise HypothesisViolated(
            f"need T > 2*pi/(gap*sqrt(1-eps)) = {2.0 * math.pi / (gap * math.sqrt(1.0 - eps))!r}"
        )
    omegas = np.asarray(omegas, dtype=complex)
    bound = math.pi * eps / (T * gap * gap * (1.0 - eps))
    gvals = a * np.abs(sine_weight_kernel(omegas, T))
    suffix_max = np.maximum.accumulate(gvals[::-1])[::-1]
    suffix_sum = np.cumsum(gvals[::-1])[::-1]
    ok = (suffix_max <= bound) & (suffix_sum <= bound)
    hits = np.nonzero(ok)[0]
    if hits.size == 0:
        raise NotFoundWithinRange(
            f"no retained index satisfies the tail bounds (need {bound:.3e}, "
            f"best {float(np.min(np.maximum(suffix_max, suffix_sum))):.3e})"
        )
    return int(hits[0] + 1)


def ingham_constant(T: float, epsilon: float, gap: float, alpha_omega: float) -> float:
    """Explicit lower-bound constant of the observability inequality.

    2 pi T (1/(pi^2 + 4 T^2 a^2 (1+eps)) - 4/(T^2 g^2 (1-eps))); positive
    exactly when T^2 (g^2 (1-eps) - 16 a^2 (1+eps)) > 4 pi^2.
    """
    first = 1.0 / (math.pi**2 + 4.0 * T * T * alpha_omega * alpha_omega * (1.0 + epsilon))
    second = 4.0 / (T * T * gap * gap * (1.0 - epsilon))
    return 2.0 * math.pi * T * (first - second)


def positivity_threshold(epsilon: float, gap: float, alpha_omega: float) -> float:
    """Horizon at which the explicit constant changes sign."""
    margin = gap * gap * (1.0 - epsilon) - 16.0 * alpha_omega * alpha_omega * (1.0 + epsilon)
    if margin <= 0.0:
        raise HypothesisViolated(
            f"gap^2(1-eps) - 16 alpha_omega^2 (1+eps) = {margin!r} is not positive"
        )
    return 2.0 * math.pi / math.sqrt(margin)


def gauss_panel_points(T: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of panels x GAUSS_NODES composite quadrature on [0, T]."""
    xi, wi = np.polynomial.legendre.leggauss(GAUSS_NODES)
    edges = np.linspace(0.0, T, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = (mid[:, None] + half[:, None] * xi[None, :]).ravel()
    wts = (half[:, None] * wi[None, :]).ravel()
    return pts, wts


def initial_panels(T: float, omega_max: float) -> int:
    """Panel count with length at most a quarter period of the fastest mode."""
    return max(int(math.ceil(T / (math.pi / (2.0 * max(omega_max, 1e-12))))), 4)


def refine_integrals(sample_fn, T: float, panels: int, tol: float = QUAD_TOL) -> np.ndarray:
    """Composite Gauss integrals with panel-doubling acceptance.

    sample_fn(points) returns integrand samples (..., len(points)); the
    integrals are accepted when doubling the panel count changes each one
    by at most tol relative. Raises QuadratureNotConverged otherwise.
    """
    pts, wts = gauss_panel_points(T, panels)
    current = sample_fn(pts) @ wts
    for _ in range(12):
        panels *= 2
        pts, wts = gauss_panel_points(T, panels)
        refined = sample_fn(pts) @ wts
        scale = np.maximum(np.abs(refined), 1e-300)
        if float(np.max(np.abs(refined - current) / scale)) <= tol:
            return refined
        current = refined
    raise QuadratureNotConverged(
        f"panel doubling did not stabilize the integrals at {panels} panels"
    )


def _inverse_amplitude_stack(roots: list[ModalRoots], C, R1, R2):
    # Stacked exponent list [i w_n | conj | rho_n | 0] and matching
    # amplitude rows for whole-sum evaluation of many trials at once.
    z = np.array([1j * r.omega for r in roots])
    rho = np.array([r.rho for r in roots])
    exps = np.concatenate([z, np.conjugate(z), rho, [0.0]])
    amps = np.concatenate(
        [C, np.conjugate(C), R2.astype(complex), np.sum(R1, axis=-1, keepdims=True)], axis=-1
    )
    return amps, exps


def draw_amplitudes(
    N: int, trials: int, rng: np.random.Generator, decay: float = 1.5
) -> np.ndarray:
    """Random complex amplitudes with |C_n| <= n^{-decay}."""
    ns = np.arange(1, N + 1, dtype=float)
    mag = rng.uniform(0.0, 1.0, size=(trials, N)) * ns ** (-decay)
    phase = rng.uniform(0.0, 2.0 * math.pi, size=(trials, N))
    return mag * np.exp(1j * phase)


def verify_inverse(
    params: ModelParams,
    T: float,
    N: int,
    trials: int,
    rng: np.random.Generator,
    epsilon: float = 0.01,
    decay: float = 1.5,
) -> InequalityReport:
    """Empirical check of the full-range lower observability bound.

    Each trial draws amplitudes C_n, recovers the (unique) generating data
    pair so that R1, R2 carry their structural values, integrates the
    squared modal sum over [0, T] by quadrature, and compares with
    sum (1 + e^{-2 Im omega_n T}) |C_n|^2. The report's scalar fields
    describe the minimizing trial.
    """
    roots = root_table(params, N)
    limits = spectral_limits(params, N, (epsilon,), roots=roots)
    constant = ingham_constant(T, epsilon, limits.gap, limits.alpha_omega)

    C = draw_amplitudes(N, trials, rng, decay)
    u0, u1 = data_from_amplitudes(params, roots, C)
    C_full, R1, R2 = exact_coefficients_batch(params, roots, u0, u1)
    amps, exps = _inverse_amplitude_stack(roots, C_full, R1, R2)

    omega_max = roots[-1].omega.real

    def sample(points):
        return values_on_grid(amps, exps, points) ** 2

    lhs = refine_integrals(sample, T, initial_panels(T, omega_max))
    im = np.array([r.omega.imag for r in roots])
    weights = 1.0 + np.exp(-2.0 * im * T)
    rhs = np.abs(C_full) ** 2 @ weights
    if np.all(rhs <= 0.0):
        raise AllAmplitudesZero("every trial drew zero amplitudes")
    keep = rhs > 0.0
    ratios = np.full(trials, np.inf)
    ratios[keep] = lhs[keep] / rhs[keep]
    worst = int(np.argmin(ratios))
    return InequalityReport(
        lhs=float(lhs[worst]),
        rhs_constant=float(constant),
        rhs_sum=float(rhs[worst]),
        ratio=float(ratios[worst]),
        theorem_constant_positive=bool(constant > 0.0),
        ratios=ratios,
    )


def verify_weighted_lower_bound(
    params: ModelParams,
    T: float,
    epsilon: float,
    N: int,
    trials: int,
    rng: np.random.Generator,
    decay: float = 1.5,
) -> dict:
    """Check the weighted tail bound trial by trial.

    The left side integrates g(t) times the squared pure-oscillatory sum
    over modes n >= n0 (n0 from the gap statistics); the right side is the
    displayed per-mode sum with the measured Im omega_n. Returns per-trial
    arrays and the worst slack lhs - rhs.
    """
    roots = root_table(params, N)
    limits = spectral_limits(params, N, (epsilon,), roots=roots)
    gap = limits.gap
    if T <= 2.0 * math.pi / (gap * math.sqrt(1.0 - epsilon)):
        raise HypothesisViolated(
            f"need T > 2*pi/(gap*sqrt(1-eps)) = "
            f"{2.0 * math.pi / (gap * math.sqrt(1.0 - epsilon))!r}, got T = {T!r}"
        )
    n0 = limits.n0_table[float(epsilon)]
    tail_roots = roots[n0 - 1 :]
    z = np.array([1j * r.omega for r in tail_roots])
    C = draw_amplitudes(N, trials, rng, decay)[:, n0 - 1 :]
    amps = np.concatenate([C, np.conjugate(C)], axis=-1)
    exps = np.concatenate([z, np.conjugate(z)])
    omega_max = roots[-1].omega.real

    def sample(points):
        return sine_weight(points, T) * values_on_grid(amps, exps, points) ** 2

    lhs = refine_integrals(sample, T, initial_panels(T, omega_max))
    im = np.array([r.omega.imag for r in tail_roots])
    per_mode = (
        1.0 / (math.pi**2 + 4.0 * T * T * im * im)
        - 4.0 / (T * T * gap * gap * (1.0 - epsilon))
    ) * (1.0 + np.exp(-2.0 * im * T))
    rhs = 2.0 * math.pi * T * (np.abs(C) ** 2 @ per_mode)
    slack = lhs - rhs
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    return {
        "n0": n0,
        "lhs": lhs,
        "rhs": rhs,
        "slack": slack,
        "worst_relative_slack": float(np.min(slack / np.maximum(scale, 1e-300))),
    }


def draw_direct_data(
    N: int, trials: int, rng: np.random.Generator, decay: float = 1.6
) -> tuple[np.ndarray, np.ndarray]:
    """Random strong-norm data with coefficients scaled by n^{-decay}."""
    ns = np.arange(1, N + 1, dtype=float)
    u0 = rng.uniform(-1.0, 1.0, size=(trials, N)) * ns ** (-decay)
    u1 = rng.uniform(-1.0, 1.0, size=(trials, N)) * ns ** (-decay)
    return u0, u1


def direct_constant(params: ModelParams, T: float, u0: np.ndarray, u1: np.ndarray) -> dict:
    """Empirical upper-bound constant from both boundary traces.

    For each data row, integrates |u_x(t,0)|^2 + |u_x(t,pi)|^2 over [0, T]
    and divides by the squared strong data norm; returns the per-trial
    ratios and their maximum (the empirical constant).
    """
    u0 = np.atleast_2d(np.asarray(u0, dtype=float))
    u1 = np.atleast_2d(np.asarray(u1, dtype=float))
    N = u0.shape[1]
    basis = SpectralBasis(params, Normalization.ORTHONORMAL)
    roots = root_table(params, N)
    C, R1, R2 = exact_coefficients_batch(params, roots, u0, u1)
    ns = np.arange(1, N + 1)
    d_right = basis.end_derivative(ns)
    d_left = basis.end_derivative(ns, left=True)
    amps_r, exps = _inverse_amplitude_stack(
        roots, C * d_right, R1 * d_right, R2 * d_right
    )
    amps_l, _ = _inverse_amplitude_stack(roots, C * d_left, R1 * d_left, R2 * d_left)
    omega_max = roots[-1].omega.real

    def sample(points):
        vr = values_on_grid(amps_r, exps, points)
        vl = values_on_grid(amps_l, exps, points)
        return vr**2 + vl**2

    lhs = refine_integrals(sample, T, initial_panels(T, omega_max))
    lams = np.array([r.lam for r in roots])
    denom = np.sum(lams * u0**2, axis=1) + np.sum(u1**2, axis=1)
    if np.any(denom <= 0.0):
        raise AllAmplitudesZero("a trial drew zero-norm data")
    ratios = lhs / denom
    return {"constant": float(np.max(ratios)), "ratios": ratios, "lhs": lhs, "denom": denom}


def verify_direct(
    params: ModelParams,
    T: float,
    N: int,
    trials: int,
    rng: np.random.Generator,
    decay: float = 1.6,
) -> dict:
    """Empirical direct-inequality constant with a refinement stability check.

    Draws data once with 2N retained modes, evaluates the empirical
    constant at truncations N and 2N of the same draws, and reports the
    relative change (small change indicates the boundary integral has
    converged in the truncation).
    """
    u0, u1 = draw_direct_data(2 * N, trials, rng, decay)
    full = direct_constant(params, T, u0, u1)
    half = direct_constant(params, T, u0[:, :N], u1[:, :N])
    change = abs(full["constant"] - half["constant"]) / max(half["constant"], 1e-300)
    return {
        "constant": half["constant"],
        "constant_refined": full["constant"],
        "relative_change": change,
        "ratios": half["ratios"],
        "ratios_refined": full["ratios"],
    }


def make_setup(
    params: ModelParams,
    T: float,
    epsilon: float,
    limits: SpectralLimits,
    nu: float,
    M: float,
) -> WeightSetup:
    """Bundle the weighted-bound inputs, checking the horizon hypothesis."""
    if T <= 2.0 * math.pi / (limits.gap * math.sqrt(1.0 - epsilon)):
        raise HypothesisViolated(
            "horizon too short for the weighted bounds: need T > "
            f"{2.0 * math.pi / (limits.gap * math.sqrt(1.0 - epsilon))!r}"
        )
    return WeightSetup(
        T=T, epsilon=epsilon, n0=limits.n0_table[float(epsilon)], nu=nu, M=M
    )


def theorem_constant(setup: WeightSetup, limits: SpectralLimits) -> float:
    """Explicit lower-bound constant for a bundled setup and spectrum."""
    return ingham_constant(setup.T, setup.epsilon, limits.gap, limits.alpha_omega)


# short operation names kept alongside the descriptive ones
weight_g = sine_weight
kernel_G = sine_weight_kernel
kernel_bound = kernel_decay_bound
tail_index = tail_start_index
