"""Exception types raised by the simulator."""


class TripodMemoryError(Exception):
    """Base class for all simulator errors."""


class InvalidParameterError(TripodMemoryError, ValueError):
    """A physical parameter is outside its allowed range."""


class InvalidReadError(TripodMemoryError, ValueError):
    """A read event was requested with no coupling field."""


class InvalidWriteError(TripodMemoryError, ValueError):
    """A write event was requested with no coupling field."""


class InvalidScheduleError(TripodMemoryError, ValueError):
    """Beam ramps overlap or are not time ordered."""


class StabilityError(TripodMemoryError, ValueError):
    """The time step is too coarse for the fastest rate in the model."""


class ConfigError(TripodMemoryError, ValueError):
    """Malformed or invalid run configuration.

    ``line`` and ``key`` locate the offending entry when known.
    """

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
