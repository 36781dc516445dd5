"""Exception taxonomy shared across the package."""


class RobustIdsError(Exception):
    """Base class for all package errors."""


class DimensionError(RobustIdsError, ValueError):
    """Operand shapes are incompatible for the requested operation."""


class ParameterError(RobustIdsError, ValueError):
    """A supplied parameter value is outside its allowed range."""


class ContractError(RobustIdsError, ValueError):
    """An API precondition was violated (e.g. backward from a non-scalar)."""


class SpecError(RobustIdsError, ValueError):
    """A network architecture description is internally inconsistent."""


class DataError(RobustIdsError, ValueError):
    """A dataset is unusable (empty, mismatched schema, ...)."""


class LabelError(RobustIdsError, ValueError):
    """A label is outside the binary {0, 1} convention."""


class MetricError(RobustIdsError, ValueError):
    """A metric is undefined for the given inputs (e.g. one class absent)."""


class ConfigError(RobustIdsError, ValueError):
    """An experiment or training configuration is invalid."""


class ParseError(RobustIdsError, ValueError):
    """A CSV row could not be parsed; carries the 1-based line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
