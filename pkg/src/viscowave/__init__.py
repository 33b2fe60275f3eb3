"""Spectral analysis, observability bounds, and boundary control of a
wave equation with a two-term exponential relaxation kernel on (0, pi)."""

from ._kernels import HAVE_COMPILED
from .errors import (
    ConditioningError,
    ConfigError,
    ConstraintError,
    ConstraintViolation,
    ConvergenceError,
    ViscowaveError,
)
from .model import (
    InitialData,
    ModelParams,
    Normalization,
    SpectralBasis,
    canonical_params,
    validate_params,
)
from .spectrum import (
    ModalRoots,
    SpectralLimits,
    asymptotic_roots,
    characteristic_poly,
    control_time_threshold,
    exact_roots,
    root_table,
    spectral_limits,
)
from .modal import (
    ModalCoefficients,
    asymptotic_coefficients,
    exact_coefficients,
    norm_equivalence,
    norm_equivalence_ratio,
    remainder_report,
)
from .series import ExpSum, SolutionField, TraceSignal, volterra_oracle
from .ingham import (
    WeightSetup,
    ingham_constant,
    kernel_G,
    kernel_bound,
    kernel_decay_bound,
    sine_weight,
    sine_weight_kernel,
    sine_weight_transform,
    tail_index,
    theorem_constant,
    verify_direct,
    verify_inverse,
    weight_g,
)
from .control import duality_check, solve_hum, verify_control

__version__ = "0.1.0"

__all__ = [
    "HAVE_COMPILED",
    "ViscowaveError",
    "ConfigError",
    "ConstraintError",
    "ConstraintViolation",
    "ConvergenceError",
    "ConditioningError",
    "ModelParams",
    "SpectralBasis",
    "Normalization",
    "InitialData",
    "validate_params",
    "canonical_params",
    "ModalRoots",
    "SpectralLimits",
    "characteristic_poly",
    "exact_roots",
    "root_table",
    "asymptotic_roots",
    "spectral_limits",
    "control_time_threshold",
    "ModalCoefficients",
    "exact_coefficients",
    "asymptotic_coefficients",
    "remainder_report",
    "norm_equivalence",
    "norm_equivalence_ratio",
    "ExpSum",
    "SolutionField",
    "TraceSignal",
    "volterra_oracle",
    "WeightSetup",
    "sine_weight",
    "sine_weight_kernel",
    "sine_weight_transform",
    "kernel_decay_bound",
    "ingham_constant",
    "weight_g",
    "kernel_G",
    "kernel_bound",
    "tail_index",
    "theorem_constant",
    "verify_inverse",
    "verify_direct",
    "solve_hum",
    "verify_control",
    "duality_check",
    "__version__",
]
