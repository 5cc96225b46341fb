"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration, incompatible dimensions, or contract violation."""


class DataFormatError(ValueError):
    """Malformed or inconsistent input data; names the path/line when known."""

    def __init__(self, message: str, path=None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = f" [{path}" + (f":{line}" if line is not None else "") + "]"
        super().__init__(message + loc)
        self.path = path
        self.line = line


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or produced non-finite values."""
