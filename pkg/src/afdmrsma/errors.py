"""Exception taxonomy shared by all modules."""


class SimulationError(Exception):
    """Base class for all library errors."""


class ConfigError(SimulationError, ValueError):
    """Invalid or inconsistent configuration."""


class InvalidLength(SimulationError, ValueError):
    """A sequence does not have the length the operation requires."""


class InvalidIndex(SimulationError, IndexError):
    """Index outside the valid range of the transform geometry."""


class InvalidChannel(SimulationError, ValueError):
    """Channel taps incompatible with the frame they are applied to."""


class DopplerPresent(SimulationError, ValueError):
    """A delay-only operation was given a channel with Doppler taps."""


class PilotContaminated(SimulationError, ValueError):
    """Clean-pilot estimation requested on a frame whose pilot shares
    resources with data."""


class DegeneratePilot(SimulationError, ValueError):
    """Pilot observation too weak to divide by."""


class GuardViolation(SimulationError, ValueError):
    """Channel shifts exceed the affine-domain guard."""


class UnresolvableDoppler(SimulationError, ValueError):
    """A pilot peak cannot be split into (delay, Doppler) because the
    Doppler range exceeds the chirp spreading factor."""


class SingularChannel(SimulationError, ValueError):
    """Zero-forcing requested on a (near-)zero channel coefficient."""
