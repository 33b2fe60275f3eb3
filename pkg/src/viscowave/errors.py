"""Exception hierarchy.

Every error carries the process exit code the command line interface maps it
to: 2 for configuration problems, 3 for violated mathematical constraints,
4 for convergence failures of an adaptive numerical routine, 5 for linear
systems too ill-conditioned to trust.
"""


class ViscowaveError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(ViscowaveError):
    """Malformed or inconsistent run configuration."""

    exit_code = 2


class ConstraintError(ViscowaveError):
    """A mathematical precondition does not hold."""

    exit_code = 3


class ConstraintViolation(ConstraintError):
    """Model parameters violate a structural condition."""


class GridTooCoarse(ConstraintError):
    """A requested resolution cannot represent the fastest retained mode."""


class RootClassificationFailure(ConstraintError):
    """The characteristic roots do not split into one real root and a
    conjugate pair."""


class GapDegenerate(ConstraintError):
    """The frequency sequence is too short or not strictly separated."""


class NoThreshold(ConstraintError):
    """No finite time makes the observability constant positive."""


class SingularSystem(ConstraintError):
    """An exponent collision makes a representation non-unique."""


class AllAmplitudesZero(ConstraintError):
    """A verification draw produced identically zero data."""


class ZeroData(ConstraintError):
    """Initial data with zero energy cannot be used in a ratio."""


class NearPole(ConstraintError):
    """A frequency falls on a removable singularity outside the safe
    evaluation branch."""


class HypothesisViolated(ConstraintError):
    """The memory kernel fails a sign or mass hypothesis."""


class NotFoundWithinRange(ConstraintError):
    """A bracketing search exhausted its range."""


class ConvergenceError(ViscowaveError):
    """An iterative or adaptive routine failed to meet its tolerance."""

    exit_code = 4


class NotConverged(ConvergenceError):
    """Step halving did not reach the requested accuracy."""


class QuadratureNotConverged(ConvergenceError):
    """Panel refinement did not stabilize the integral."""


class ConditioningError(ViscowaveError):
    """A linear-algebra step is numerically untrustworthy."""

    exit_code = 5


class NotPositiveDefinite(ConditioningError):
    """A Gram matrix lost positive definiteness."""


class IllConditioned(ConditioningError):
    """A solve exceeded the conditioning budget."""
