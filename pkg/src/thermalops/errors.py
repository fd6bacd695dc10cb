"""Exception types shared across the package."""


class ThermalOpsError(ValueError):
    """Base class for all validation failures raised by this package."""


class DimensionMismatch(ThermalOpsError):
    pass


class NotHermitianError(ThermalOpsError):
    pass


class InvalidChannelError(ThermalOpsError):
    pass


class EnergyConservationError(ThermalOpsError):
    """The coupling unitary does not commute with the free Hamiltonian."""


class InfeasibleParameters(ThermalOpsError):
    """Requested qubit parameters lie outside the set of enhanced thermal operations."""


class DimensionCapExceeded(ThermalOpsError):
    """A construction would exceed the configured dimension budget."""

    def __init__(self, requested, cap):
        super().__init__(f"construction needs dimension {requested}, cap is {cap}")
        self.requested = requested
        self.cap = cap
