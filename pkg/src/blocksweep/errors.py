"""Exception types shared across the package."""


class BlockSweepError(Exception):
    """Base class for structured errors raised by this package."""


class ConformanceError(BlockSweepError):
    """Operands disagree on block structure, dimensions, or weighting."""


class InvalidLawError(BlockSweepError):
    """A sweeping law violates its distributional requirements."""


class ScheduleViolationError(BlockSweepError):
    """A schedule value left its admissible range.

    ``iteration`` carries the first offending index when known.
    """

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


class CertificationError(BlockSweepError):
    """A hypothesis required by a certified bound could not be verified."""


class FixedPointError(BlockSweepError):
    """Fixed-point computation did not reach the required residual."""


class ConfigError(BlockSweepError):
    """Experiment configuration is malformed."""
