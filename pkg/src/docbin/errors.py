"""Exception types raised across the package."""


class DocbinError(Exception):
    """Base class for all package errors."""


class ParameterError(DocbinError, ValueError):
    """A numeric parameter is outside its valid range."""


class ImageFormatError(DocbinError, ValueError):
    """An image has invalid dimensions or sample values."""


class ContractError(DocbinError, ValueError):
    """Inputs violate an operation precondition (shape mismatch, bad index)."""


class DivergenceError(DocbinError, ArithmeticError):
    """The explicit scheme produced non-finite values."""

    def __init__(self, iteration: int, message: str | None = None):
        self.iteration = iteration
        super().__init__(
            message
            or f"non-finite values at iteration {iteration}; time step is likely too large"
        )


class MetricUndefinedError(DocbinError, ValueError):
    """A metric is undefined for the given ground truth."""


class ConfigError(DocbinError, ValueError):
    """Malformed or out-of-range run configuration."""
