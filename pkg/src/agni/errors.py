"""Exception types shared across the simulator modules."""


class AgniError(Exception):
    """Base class for all simulator errors."""


class MalformedUnaryError(AgniError, ValueError):
    """A bit pattern violates the thermometer (contiguous-prefix) property."""


class RangeError(AgniError, ValueError):
    """A value falls outside its documented operating range."""


class ConfigError(AgniError, ValueError):
    """A configuration object is internally inconsistent."""


class CalibrationError(AgniError, RuntimeError):
    """Parameter calibration failed to converge.

    Carries the best-so-far residuals so callers can inspect how close
    the fit got before giving up.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class FormatError(AgniError, ValueError):
    """An input file could not be parsed."""


class ResourceGuardError(AgniError, ValueError):
    """A request would enumerate too large a space; override explicitly."""


class TraceUnavailableError(AgniError, RuntimeError):
    """A waveform trace was requested from a run that did not record one."""
