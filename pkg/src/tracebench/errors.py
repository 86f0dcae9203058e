"""Exception hierarchy shared by all tracebench modules.

Every error carries an ``exit_code`` so the CLI can map failures onto its
documented exit codes: 2 for validation problems (bad input, bad config,
violated preconditions), 3 for numerical failures (solver or quadrature
did not converge, truncation not justified).
"""


class TracebenchError(Exception):
    exit_code = 3


class ValidationError(TracebenchError):
    exit_code = 2


# -- validation-type errors (exit code 2) --

class ConfigError(ValidationError):
    pass


class NotHyperbolic(ValidationError):
    """Matrix trace too close to [-2, 2]: no translation axis."""


class CutoffTooLarge(ValidationError):
    """Projected enumeration size exceeds the configured element budget."""


class RelatorViolation(ValidationError):
    """Generator images do not satisfy the surface-group relator."""


class SingularImage(ValidationError):
    """A generator image (or similarity transform) is singular/ill-conditioned."""


class ArgumentOutOfStrip(ValidationError):
    """Test-function argument outside the admissible horizontal strip."""


class IncompleteLengthSpectrum(ValidationError):
    """Class list does not reach the test function's support radius."""


class ConstraintCycleInconsistent(ValidationError):
    """Corner identification cycle does not close up under the representation."""


class CacheMismatch(ValidationError):
    """On-disk cache does not match the requested run (or is corrupted)."""


# -- numerical-type errors (exit code 3) --

class QuadratureNotConverged(TracebenchError):
    pass


class MeshQualityFailure(TracebenchError):
    pass


class SolverNotConverged(TracebenchError):
    pass


class ShiftTooCloseToEigenvalue(TracebenchError):
    pass


class TruncationNotJustified(TracebenchError):
    """Spectral sum cut off before the test function decayed enough."""
