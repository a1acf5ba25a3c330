"""Exception types shared across the estimators and the batch pipeline.

Everything raised on purpose by this package derives from ChaosKitError,
so callers that want blanket per-window error handling (the batch runner
does) can catch one type and keep going.
"""


class ChaosKitError(Exception):
    """Base class for all errors raised by chaoskit."""


class ShortSeriesError(ChaosKitError):
    """The series is too short for the requested embedding or estimator."""


class DegenerateSeriesError(ChaosKitError):
    """The input has no usable variation (constant signal, all-duplicate points)."""


class EstimationError(ChaosKitError):
    """An estimator ran but could not produce a value."""


class NoScalingRegionError(EstimationError):
    """No window of the log-log correlation curve meets the linearity criterion."""


class GenerationError(ChaosKitError):
    """A synthetic orbit diverged or could not be produced."""


class ConfigError(ChaosKitError):
    """Invalid parameter value or parameter combination."""


class InputError(ChaosKitError):
    """A file, manifest, or record could not be parsed."""
