"""Exact and asymptotic modal amplitudes.

Each mode evolves as v(t) = C e^{i omega t} + conj(C) e^{-i conj(omega) t}
+ R1 + R2 e^{rho t}. The four real unknowns (Re C, Im C, R1, R2) are pinned
by matching v and its first three derivatives at t = 0: v(0) = u0n and
v'(0) = u1n are the data, while differentiating the evolution equation and
using that both memory integrals vanish at t = 0 gives v''(0) = -lam*u0n
and v'''(0) = -lam*u1n + lam*(b1+b2)*u0n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllAmplitudesZero, SingularSystem, ZeroData
from .model import ModelParams
from .spectrum import ModalRoots

# Modes with |C| below this are excluded from amplitude-ratio statistics.
AMPLITUDE_FLOOR = 1e-14

COND_LIMIT = 1e12


@dataclass(frozen=True)
class ModalCoefficients:
    """Amplitudes of one mode's four exponential components."""

    n: int
    C: complex
    R1: float
    R2: float


@dataclass(frozen=True)
class RemainderReport:
    """Empirical constant in |R1|+|R2| <= M/sqrt(lam) * |C| over a mode range."""

    M_hat: float
    nu: float
    worst_n: int
    ratios: np.ndarray


def _system_matrices(roots: list[ModalRoots]) -> np.ndarray:
    # Row k matches v^{(k)}(0) = 2 Re(z^k C) + R1*[k=0] + R2*rho^k, z = i*omega.
    z = np.array([1j * r.omega for r in roots])
    rho = np.array([r.rho for r in roots])
    powers = np.arange(4)
    zk = z[:, None] ** powers
    mat = np.zeros((len(roots), 4, 4))
    mat[:, :, 0] = 2.0 * zk.real
    mat[:, :, 1] = -2.0 * zk.imag
    mat[:, 0, 2] = 1.0
    mat[:, :, 3] = rho[:, None] ** powers
    return mat


def coefficient_maps(params: ModelParams, roots: list[ModalRoots]) -> tuple[np.ndarray, np.ndarray]:
    """Per-mode solution vectors for unit data.

    Returns arrays (xa, xb) of shape (N, 4) such that the amplitude vector
    (Re C, Im C, R1, R2) for data (u0n, u1n) is u0n*xa[n] + u1n*xb[n].
    Raises SingularSystem when a mode's matching system is rank-deficient,
    which happens only at root confluences.
    """
    mats = _system_matrices(roots)
    conds = np.linalg.cond(mats)
    bad = np.nonzero(~(conds < COND_LIMIT))[0]
    if bad.size:
        i = int(bad[0])
        raise SingularSystem(
            f"mode {roots[i].n}: amplitude system condition {conds[i]:.3e} "
            f"(roots i*omega = {1j * roots[i].omega}, rho = {roots[i].rho}, 0)"
        )
    lams = np.array([r.lam for r in roots])
    bsum = params.b1 + params.b2
    rhs = np.zeros((len(roots), 4, 2))
    rhs[:, 0, 0] = 1.0
    rhs[:, 2, 0] = -lams
    rhs[:, 3, 0] = lams * bsum
    rhs[:, 1, 1] = 1.0
    rhs[:, 3, 1] = -lams
    sol = np.linalg.solve(mats, rhs)
    return sol[:, :, 0], sol[:, :, 1]


def exact_coefficients(
    params: ModelParams, roots: ModalRoots, u0n: float, u1n: float
) -> ModalCoefficients:
    """Solve the 4x4 matching system for one mode's amplitudes."""
    xa, xb = coefficient_maps(params, [roots])
    x = u0n * xa[0] + u1n * xb[0]
    return ModalCoefficients(n=roots.n, C=complex(x[0], x[1]), R1=float(x[2]), R2=float(x[3]))


def exact_coefficients_batch(
    params: ModelParams, roots: list[ModalRoots], u0, u1
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Amplitudes for stacked data arrays.

    u0 and u1 have shape (..., N) with N = len(roots); returns (C, R1, R2)
    of the same shape, C complex.
    """
    xa, xb = coefficient_maps(params, roots)
    u0 = np.asarray(u0, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    x = u0[..., None] * xa + u1[..., None] * xb
    return x[..., 0] + 1j * x[..., 1], x[..., 2], x[..., 3]


def data_from_amplitudes(
    params: ModelParams, roots: list[ModalRoots], C
) -> tuple[np.ndarray, np.ndarray]:
    """Invert the data -> C map: find (u0, u1) whose amplitude is the given C.

    C has shape (..., N); returns real arrays (u0, u1) of the same shape.
    The corresponding R1, R2 follow from exact_coefficients_batch on the
    returned data, so drawn amplitudes always come with consistent
    companion terms.
    """
    xa, xb = coefficient_maps(params, roots)
    C = np.asarray(C, dtype=complex)
    det = xa[:, 0] * xb[:, 1] - xb[:, 0] * xa[:, 1]
    if np.any(np.abs(det) < 1e-300):
        raise SingularSystem("data -> amplitude map is singular for some mode")
    u0 = (xb[:, 1] * C.real - xb[:, 0] * C.imag) / det
    u1 = (-xa[:, 1] * C.real + xa[:, 0] * C.imag) / det
    return u0, u1


def asymptotic_coefficients(
    params: ModelParams, lam: float, u0n: float, u1n: float, n: int = 0
) -> ModalCoefficients:
    """Leading displayed terms of the amplitude expansions for large lambda."""
    bsum = params.b1 + params.b2
    alpha = params.alpha
    C = 0.5 * u0n - 0.25j * (bsum * u0n + 2.0 * u1n) / np.sqrt(lam)
    R1 = params.r1 * params.r2 * u1n / (alpha * lam)
    R2 = (bsum - params.r1) * (bsum - params.r2) * (u0n * (bsum - params.r1 - params.r2) + u1n) / (
        (bsum - params.r1 - params.r2) * lam
    )
    return ModalCoefficients(n=n, C=complex(C), R1=float(R1), R2=float(R2))


def reconstruction_residuals(
    roots: ModalRoots, coeffs: ModalCoefficients, u0n: float, u1n: float
) -> tuple[float, float]:
    """Mismatch of value and velocity at t = 0 against the generating data."""
    z = 1j * roots.omega
    v0 = 2.0 * (coeffs.C).real + coeffs.R1 + coeffs.R2
    v1 = 2.0 * (z * coeffs.C).real + roots.rho * coeffs.R2
    return abs(v0 - u0n), abs(v1 - u1n)


def remainder_report(C, R1, R2, lams, ns=None) -> RemainderReport:
    """Empirical constant M_hat = max_n (|R1|+|R2|) sqrt(lam_n) / |C_n|.

    Modes with |C_n| below the amplitude floor are skipped (their ratio is
    reported as NaN); raises AllAmplitudesZero when nothing remains.
    """
    C = np.asarray(C, dtype=complex)
    R1 = np.asarray(R1, dtype=float)
    R2 = np.asarray(R2, dtype=float)
    lams = np.asarray(lams, dtype=float)
    if ns is None:
        ns = np.arange(1, C.size + 1)
    keep = np.abs(C) >= AMPLITUDE_FLOOR
    if not np.any(keep):
        raise AllAmplitudesZero("all modal amplitudes are below the floor")
    ratios = np.full(C.size, np.nan)
    ratios[keep] = (np.abs(R1[keep]) + np.abs(R2[keep])) * np.sqrt(lams[keep]) / np.abs(C[keep])
    worst = int(np.nanargmax(ratios))
    return RemainderReport(
        M_hat=float(ratios[worst]), nu=1.0, worst_n=int(ns[worst]), ratios=ratios
    )


def norm_equivalence_ratio(C, u0, u1, lams) -> float:
    """Ratio sum lam |C|^2 / (sum lam u0^2 + sum u1^2) for one data pair."""
    C = np.asarray(C, dtype=complex)
    u0 = np.asarray(u0, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    lams = np.asarray(lams, dtype=float)
    denom = float(np.sum(lams * u0**2) + np.sum(u1**2))
    if denom <= 0.0:
        raise ZeroData("data pair has zero norm")
    return float(np.sum(lams * np.abs(C) ** 2)) / denom


def norm_equivalence_sweep(
    params: ModelParams,
    roots: list[ModalRoots],
    draws: int,
    rng: np.random.Generator,
    decay: float = 1.5,
) -> np.ndarray:
    """Norm-equivalence ratios over random data draws.

    Each draw has u0n, u1n independent uniform on [-1, 1] scaled by
    n^{-decay}; returns the array of ratios, whose spread over many draws
    estimates the two-sided equivalence constants.
    """
    N = len(roots)
    lams = np.array([r.lam for r in roots])
    weights = np.arange(1, N + 1, dtype=float) ** (-decay)
    u0 = rng.uniform(-1.0, 1.0, size=(draws, N)) * weights
    u1 = rng.uniform(-1.0, 1.0, size=(draws, N)) * weights
    C, _, _ = exact_coefficients_batch(params, roots, u0, u1)
    num = np.sum(lams * np.abs(C) ** 2, axis=1)
    den = np.sum(lams * u0**2, axis=1) + np.sum(u1**2, axis=1)
    if np.any(den <= 0.0):
        raise ZeroData("a draw produced zero-norm data")
    return num / den


# single-pair operation name kept alongside the explicit one
norm_equivalence = norm_equivalence_ratio
