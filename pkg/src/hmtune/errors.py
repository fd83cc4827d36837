class HmtuneError(Exception):
    pass


class ParseError(HmtuneError, ValueError):
    """Malformed input file. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}"
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class EmptyTraceError(HmtuneError, ValueError):
    pass


class InvalidParameterError(HmtuneError, ValueError):
    pass


class SimulationError(HmtuneError):
    """A tuning trial failed; carries the period that was being simulated."""

    def __init__(self, period: int, cause: Exception):
        self.period = period
        self.cause = cause
        super().__init__(f"simulation failed at period {period}: {cause}")
