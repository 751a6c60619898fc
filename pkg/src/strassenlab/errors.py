"""Exception taxonomy shared by all modules.

Every guard in the library raises one of these, so callers (and the CLI
exit-code mapping) can tell configuration mistakes apart from genuine
statistical failures. Verdict failures are never exceptions; they are
recorded in reports.
"""


class StrassenlabError(Exception):
    """Base class for all library errors."""


class StructuralError(StrassenlabError, ValueError):
    """Malformed object: mismatched shapes, wrong model pairing, bad grid."""


class InputError(StrassenlabError, ValueError):
    """Argument outside the documented contract (budget too small, etc.)."""


class DomainError(StrassenlabError, ValueError):
    """Parameter outside the mathematical domain of the construction."""


class ResolutionError(StrassenlabError, ValueError):
    """Grid too coarse to represent the requested operation."""


class CapabilityError(StrassenlabError, NotImplementedError):
    """Requested regime is documented as out of range for this implementation."""


class PreconditionError(StrassenlabError, ValueError):
    """A documented numerical precondition failed (asymmetry, non-PD, ...)."""


class StatisticalPowerError(StrassenlabError, ValueError):
    """Sample budget too small for the requested statistical verdict."""


class ReliabilityError(StrassenlabError, RuntimeError):
    """The computation ran but its output cannot be trusted (positivity loss...)."""


class ConfigError(StrassenlabError, ValueError):
    """Scenario configuration failed schema validation."""
