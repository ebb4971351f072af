"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2,
physics-level failures (no stationary state, inverted trap) exit 3,
numerical faults exit 4.
"""


class TrimechError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(TrimechError):
    """Malformed or invalid configuration input.

    Carries the offending key and line number when known.
    """

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"key '{key}': "
        super().__init__(prefix + message)


class PhysicsError(TrimechError):
    """The requested quantity does not exist for these parameters."""


class DegenerateTrapError(PhysicsError):
    """Effective sphere trap frequency is zero or inverted (Omega2 <= 0)."""


class UnstableSystemError(PhysicsError):
    """Dynamics admit no stationary state (some eigenvalue has Re >= 0)."""


class NumericalError(TrimechError):
    """A solver failed to meet its accuracy contract."""
