"""Exception hierarchy shared across the toolkit."""


class PfbError(Exception):
    """Base class for every error raised by pfb."""


class InvalidArgumentError(PfbError, ValueError):
    pass


class IncompleteBoundaryError(PfbError):
    pass


class MeshParseError(PfbError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GeometryError(PfbError):
    pass


class ConfigurationError(PfbError):
    """Material table or boundary table does not cover the mesh."""


class AssemblyError(PfbError):
    pass


class SingularMatrixError(PfbError):
    pass


class ViscosityOverflowError(PfbError, OverflowError):
    pass


class IncompatibleDataError(PfbError):
    def __init__(self, message, violation=None):
        self.violation = violation
        super().__init__(message)


class NonlinearDivergenceError(PfbError):
    def __init__(self, message, history=()):
        self.history = list(history)
        super().__init__(message)


class ConfigError(PfbError):
    """Invalid run configuration; ``path`` is a JSON path such as ``$.transport.dt``."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
