"""Exception types. Each carries the CLI exit code it maps to."""


class PlantedCliqueError(Exception):
    exit_code = 1


class InvalidParametersError(PlantedCliqueError, ValueError):
    exit_code = 2


class PreconditionError(InvalidParametersError):
    """A structural hypothesis does not hold for the given mask.

    ``hypothesis`` names the failing condition (``"max_degree"`` or
    ``"vertex_count"``).
    """

    def __init__(self, message: str, hypothesis: str):
        super().__init__(message)
        self.hypothesis = hypothesis


class MaskParseError(PlantedCliqueError, ValueError):
    exit_code = 3

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)
        self.line = line


class ResourceLimitError(PlantedCliqueError, RuntimeError):
    exit_code = 4
