"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`CavityError`.
The CLI maps the three families below onto exit codes 1, 2 and 3.
"""


class CavityError(Exception):
    """Base class for all package errors."""


# -- configuration / input (exit code 1) ------------------------------------

class ConfigError(CavityError, ValueError):
    """Malformed, missing or unknown configuration key."""


class InvalidScenarioError(ConfigError):
    """Physical inputs out of their allowed range."""


class EmptySpectrumError(ConfigError):
    """A mode truncation of zero was requested."""


# -- regime (exit code 3) ----------------------------------------------------

class RegimeViolationError(CavityError):
    """The small-cavity approximations are not applicable."""


# -- numerics (exit code 2) --------------------------------------------------

class NumericalError(CavityError, ArithmeticError):
    """Base for solver and numerical-domain failures."""


class RootNotBracketedError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class ResonanceError(NumericalError):
    """Linearized mode shift requested too close to the atom resonance."""


class PoleError(NumericalError):
    pass


class NumericalDomainError(NumericalError):
    pass


class SingularityError(NumericalError):
    pass


class OracleFailureError(NumericalError):
    pass


class TruncationError(CavityError, IndexError):
    """Index outside the available truncation, or mismatched truncations."""
