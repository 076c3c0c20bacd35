"""Exception hierarchy shared across the package."""

__all__ = [
    "HybridSatError",
    "DomainError",
    "TruncationError",
    "DegenerateCatError",
    "KindMismatchError",
    "LayoutMismatchError",
    "NonPhysicalStateError",
    "UnknownLabelError",
    "QuadratureConvergenceError",
    "ConfigError",
]


class HybridSatError(Exception):
    """Base class for every error raised by hybridsat."""


class DomainError(HybridSatError, ValueError):
    """A numeric argument lies outside the domain of the operation."""


class TruncationError(HybridSatError):
    """The truncated Fock space cannot hold the requested state accurately."""


class DegenerateCatError(DomainError):
    """The odd cat state does not exist at zero amplitude."""


class KindMismatchError(HybridSatError, TypeError):
    """A pure state was combined with a mixed state."""


class LayoutMismatchError(HybridSatError, ValueError):
    """Two operands have different mode layouts."""


class NonPhysicalStateError(HybridSatError, ValueError):
    """A density matrix has a negative eigenvalue beyond tolerance."""


class UnknownLabelError(HybridSatError, KeyError):
    """An operator label is not recognised."""


class QuadratureConvergenceError(HybridSatError, RuntimeError):
    """Successive quadrature orders failed to agree."""


class ConfigError(HybridSatError, ValueError):
    """A scenario configuration failed validation.

    ``field`` names the offending configuration field.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
