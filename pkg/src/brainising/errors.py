class DimensionError(ValueError):
    """Configuration or parameter vector has the wrong length."""


class CapacityError(ValueError):
    """System too large for exact enumeration."""


class UnsupportedError(TypeError):
    """Operation not defined for this kind of Hamiltonian."""


class DivergenceError(FloatingPointError):
    """A training step produced non-finite values."""


class ConfigError(ValueError):
    """Invalid experiment or solver configuration.

    ``field`` names the offending key so callers can report it; ``line`` is
    the 1-based source line when known.
    """

    def __init__(self, field: str, message: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{field}: {message}{where}")
        self.field = field
        self.message = message
        self.line = line
