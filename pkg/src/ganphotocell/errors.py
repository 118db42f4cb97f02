"""Exception types raised across the package."""


class PhotocellError(Exception):
    """Base class for all package errors."""


class DomainError(PhotocellError, ValueError):
    """An argument lies outside the domain of a formula."""


class InvalidGeometry(DomainError):
    pass


class DegenerateGeometry(DomainError):
    """Electron energy falls below the CBM for one of the coupled levels."""


class InvalidParams(PhotocellError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{v.field}: {v.reason}" for v in self.violations)
        super().__init__(f"invalid device parameters: {lines}")


class QuadratureFailure(PhotocellError, ArithmeticError):
    pass


class SingularMatrix(PhotocellError, ArithmeticError):
    pass


class StepSizeUnderflow(PhotocellError, ArithmeticError):
    pass


class NewtonDivergence(PhotocellError, ArithmeticError):
    pass


class DegenerateKernel(PhotocellError, ArithmeticError):
    """Generator has more than one stationary distribution."""

    def __init__(self, dimension, message=None):
        self.dimension = dimension
        super().__init__(message or f"generator null space has dimension {dimension}")


class SweepFailure(PhotocellError):
    """A sweep could not produce a value for one of its cells."""


class ConfigError(PhotocellError, ValueError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class UnknownKey(ParseError):
    pass


class UnitMismatch(ParseError):
    pass
