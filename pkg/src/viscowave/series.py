"""Solution synthesis: exponential sums, fields, traces, and an
independent time-stepping oracle.

A mode's time factor v(t) = C e^{i omega t} + conj(C) e^{-i conj(omega) t}
+ R1 + R2 e^{rho t} is a four-term exponential sum, and every signal this
package manipulates (solution values, boundary traces, adjoint traces,
controls) stays in that class: closed under derivatives, time reversal,
convolution with the relaxation kernel, and products. ExpSum implements
those operations exactly, so quadrature is needed only where an
inequality demands an honest time integral.

volterra_oracle integrates the same modes by a method that shares nothing
with the spectral pipeline (state-augmented classical fourth-order
stepping), providing the package's central cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import GridTooCoarse, NotConverged, SingularSystem
from .model import InitialData, ModelParams, SpectralBasis
from .modal import ModalCoefficients, exact_coefficients_batch
from .spectrum import ModalRoots, root_table

# Step-halving acceptance threshold for the oracle and forced solves.
STEP_TOL = 1e-8

# Exponent products with |z*T| below this use the series branch of
# (e^{zT} - 1)/z to avoid cancellation.
SMALL_EXPONENT = 1e-6


@dataclass(frozen=True)
class ExpSum:
    """Finite sum t -> sum_k amps[k] * exp(exps[k] * t), real-valued.

    The amplitude list is kept conjugate-closed by construction wherever
    signals are built, so evaluation returns the real part.
    """

    amps: np.ndarray
    exps: np.ndarray

    def __post_init__(self):
        amps = np.atleast_1d(np.asarray(self.amps, dtype=complex))
        exps = np.atleast_1d(np.asarray(self.exps, dtype=complex))
        if amps.shape != exps.shape or amps.ndim != 1:
            raise ValueError("amps and exps must be 1-D arrays of equal length")
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "exps", exps)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        value = np.exp(np.multiply.outer(t, self.exps)) @ self.amps
        value = value.real
        return float(value) if value.ndim == 0 else value

    def derivative(self) -> "ExpSum":
        return ExpSum(self.amps * self.exps, self.exps)

    def scaled(self, c) -> "ExpSum":
        return ExpSum(self.amps * c, self.exps)

    def __add__(self, other: "ExpSum") -> "ExpSum":
        return ExpSum(
            np.concatenate([self.amps, other.amps]), np.concatenate([self.exps, other.exps])
        )

    def time_reversed(self, T: float) -> "ExpSum":
        """The signal t -> self(T - t)."""
        return ExpSum(self.amps * np.exp(self.exps * T), -self.exps)

    def convolve_complement(self, params: ModelParams) -> "ExpSum":
        """Apply (I - K*) where (K*f)(t) = int_0^t K(t-s) f(s) ds.

        For a term a e^{zt} the convolution is exact:
        (K * a e^{z.})(t) = sum_i a b_i (e^{zt} - e^{-r_i t})/(z + r_i).
        Raises SingularSystem when some exponent collides with -r_i.
        """
        rates = (params.r1, params.r2)
        weights = (params.b1, params.b2)
        amps = [self.amps.copy()]
        exps = [self.exps.copy()]
        for b, r in zip(weights, rates):
            shift = self.exps + r
            if np.any(np.abs(shift) < 1e-10 * (1.0 + np.abs(self.exps))):
                raise SingularSystem(
                    f"exponent collides with -r = {-r}; kernel convolution is confluent"
                )
            amps[0] = amps[0] - self.amps * b / shift
            amps.append(self.amps * b / shift)
            exps.append(np.full_like(self.exps, -r))
        return ExpSum(np.concatenate(amps), np.concatenate(exps))

    def integral_product(self, other: "ExpSum", T: float) -> float:
        """Exact int_0^T self(t) * other(t) dt for real-valued signals."""
        z = self.exps[:, None] + other.exps[None, :]
        coef = self.amps[:, None] * other.amps[None, :]
        return float(np.sum(coef * _exp_integral(z, T)).real)

    def l2_norm(self, T: float) -> float:
        return math.sqrt(max(self.integral_product(self, T), 0.0))


def _exp_integral(z, T):
    # int_0^T e^{zt} dt = (e^{zT} - 1)/z, with a series branch near z = 0.
    z = np.asarray(z, dtype=complex)
    zT = z * T
    small = np.abs(zT) < SMALL_EXPONENT
    zs = np.where(small, 1.0, z)
    out = (np.exp(zT) - 1.0) / zs
    series = T * (1.0 + zT / 2.0 + zT**2 / 6.0)
    return np.where(small, series, out)


def stack_exp_sums(signals: list[ExpSum]) -> tuple[np.ndarray, np.ndarray]:
    """Merge signals onto a shared exponent list.

    Returns (A, exps) with A[s, k] the amplitude of exp(exps[k]*t) in
    signal s; exponents are matched bit-exactly, which holds by
    construction for signals derived from one root table.
    """
    index: dict[complex, int] = {}
    for sig in signals:
        for z in sig.exps:
            index.setdefault(complex(z), len(index))
    exps = np.fromiter(index.keys(), dtype=complex, count=len(index))
    A = np.zeros((len(signals), len(index)), dtype=complex)
    for s, sig in enumerate(signals):
        for a, z in zip(sig.amps, sig.exps):
            A[s, index[complex(z)]] += a
    return A, exps


def values_on_grid(A: np.ndarray, exps: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Real samples of stacked exponential sums: (A @ exp(exps x times)).real."""
    E = np.exp(np.multiply.outer(exps, np.asarray(times, dtype=float)))
    return (A @ E).real


def modal_exp_sum(roots: ModalRoots, coeffs: ModalCoefficients) -> ExpSum:
    """One mode's time factor as an exponential sum."""
    z = 1j * roots.omega
    return ExpSum(
        np.array([coeffs.C, np.conjugate(coeffs.C), coeffs.R1, coeffs.R2], dtype=complex),
        np.array([z, np.conjugate(z), 0.0, roots.rho], dtype=complex),
    )


@dataclass(frozen=True)
class TraceSignal:
    """A boundary trace sampled on an increasing time grid."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape or times.size < 2:
            raise GridTooCoarse("trace needs matching 1-D arrays with >= 2 samples")
        if np.any(np.diff(times) <= 0):
            raise GridTooCoarse("trace grid must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


def trace_times(omega_max: float, T: float, points_per_period: int = 32) -> np.ndarray:
    """Uniform grid on [0, T] resolving the fastest retained frequency."""
    period = 2.0 * math.pi / max(omega_max, 1e-12)
    count = max(int(math.ceil(T / period * points_per_period)), 16)
    return np.linspace(0.0, T, count + 1)


class SolutionField:
    """Truncated series solution assembled from roots and amplitudes."""

    def __init__(
        self,
        params: ModelParams,
        basis: SpectralBasis,
        roots: list[ModalRoots],
        coeffs: list[ModalCoefficients],
    ):
        if len(roots) != len(coeffs):
            raise ValueError("roots and coefficients must align")
        self.params = params
        self.basis = basis
        self.roots = roots
        self.coeffs = coeffs
        self.nmodes = len(roots)
        z = np.array([1j * r.omega for r in roots])
        C = np.array([c.C for c in coeffs])
        self._amps = np.column_stack(
            [C, np.conjugate(C), [c.R1 for c in coeffs], [c.R2 for c in coeffs]]
        ).astype(complex)
        self._exps = np.column_stack(
            [z, np.conjugate(z), np.zeros(self.nmodes), [r.rho for r in roots]]
        ).astype(complex)

    @classmethod
    def from_data(
        cls, params: ModelParams, basis: SpectralBasis, data: InitialData
    ) -> "SolutionField":
        roots = root_table(params, data.nmodes)
        C, R1, R2 = exact_coefficients_batch(params, roots, data.u0, data.u1)
        coeffs = [
            ModalCoefficients(n=i + 1, C=complex(C[i]), R1=float(R1[i]), R2=float(R2[i]))
            for i in range(data.nmodes)
        ]
        return cls(params, basis, roots, coeffs)

    def mode_exp_sum(self, i: int) -> ExpSum:
        return ExpSum(self._amps[i], self._exps[i])

    def modal_values(self, t) -> np.ndarray:
        """Matrix v_n(t_j) of the per-mode time factors, shape (len(t), N)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.einsum("nk,tnk->tn", self._amps, np.exp(self._exps * t[:, None, None])).real

    def modal_velocities(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        amps = self._amps * self._exps
        return np.einsum("nk,tnk->tn", amps, np.exp(self._exps * t[:, None, None])).real

    def evaluate(self, t, x):
        """Field values u(t, x); broadcasts over 1-D t and x arrays."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        n = np.arange(1, self.nmodes + 1)
        shapes = self.basis.scale * np.sin(np.outer(x, n))
        out = self.modal_values(t) @ shapes.T
        return out[0] if out.shape[0] == 1 else out

    def evaluate_velocity(self, t, x):
        """Time derivative u_t(t, x) on the same broadcasting rules."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        n = np.arange(1, self.nmodes + 1)
        shapes = self.basis.scale * np.sin(np.outer(x, n))
        out = self.modal_velocities(t) @ shapes.T
        return out[0] if out.shape[0] == 1 else out

    def trace_exp_sum(self, left: bool = False) -> ExpSum:
        """The trace u_x(t, end) as one exponential sum (end = pi or 0)."""
        n = np.arange(1, self.nmodes + 1)
        weights = self.basis.end_derivative(n, left=left)
        return ExpSum((self._amps * weights[:, None]).ravel(), self._exps.ravel())

    def boundary_trace(self, times: np.ndarray, left: bool = False) -> TraceSignal:
        """Sampled u_x(t, end); the grid must resolve the fastest mode."""
        times = np.asarray(times, dtype=float)
        omega_max = self.roots[-1].omega.real
        step = np.max(np.diff(times))
        if step > math.pi / (4.0 * omega_max) + 1e-12:
            raise GridTooCoarse(
                f"trace step {step:.3e} exceeds pi/(4 omega_max) = "
                f"{math.pi / (4 * omega_max):.3e}"
            )
        sig = self.trace_exp_sum(left=left)
        return TraceSignal(times, sig(times))


def auto_steps(omega_max: float, T: float, tol: float = STEP_TOL, safety: float = 10.0) -> int:
    """Step count keeping the stepper's phase error under tol.

    The classical fourth-order scheme tracks e^{i omega t} with local
    error ~ (omega h)^5/120, hence global error ~ (omega h)^4 (omega T)/120.
    """
    w = max(omega_max, 1.0)
    horizon = max(w * T, 1.0)
    h = (tol * 120.0 / (safety * horizon)) ** 0.25 / w
    return max(int(math.ceil(T / h)), 64)


def volterra_oracle(
    params: ModelParams,
    lam: float,
    u0n: float,
    u1n: float,
    T: float,
    steps: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate one mode by state-augmented stepping, with halving gate.

    Returns (times, values) on the accepted resolution. Independent of the
    root solver: only lam and the kernel parameters enter.
    """
    times, traj = volterra_oracle_batch(
        params, np.array([lam]), np.array([u0n]), np.array([u1n]), T, steps
    )
    return times, traj[:, 0]


def volterra_oracle_batch(
    params: ModelParams,
    lams: np.ndarray,
    u0: np.ndarray,
    u1: np.ndarray,
    T: float,
    steps: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Batched oracle over modes; returns (times, traj).

    Runs at the requested resolution and at half the step, accepting when
    the trajectories agree to STEP_TOL in relative sup norm; the accepted
    finer trajectory (2*steps+1 samples) is returned. When steps is
    omitted an adequate count is estimated from the fastest mode and the
    gate still runs; NotConverged reports the final disagreement.
    """
    lams = np.asarray(lams, dtype=float)
    explicit = steps is not None
    if steps is None:
        steps = auto_steps(math.sqrt(float(np.max(lams))), T)
    attempts = 1 if explicit else 3
    for _ in range(attempts):
        coarse, _ = _kernels.volterra_free(
            lams, u0, u1, params.b1, params.b2, params.r1, params.r2, T, steps
        )
        fine, _ = _kernels.volterra_free(
            lams, u0, u1, params.b1, params.b2, params.r1, params.r2, T, 2 * steps
        )
        scale = max(float(np.max(np.abs(fine))), 1e-300)
        err = float(np.max(np.abs(coarse - fine[::2]))) / scale
        if err <= STEP_TOL:
            return np.linspace(0.0, T, 2 * steps + 1), fine
        steps *= 2
    raise NotConverged(
        f"step halving left relative sup-norm change {err:.3e} > {STEP_TOL} at {steps} steps"
    )
