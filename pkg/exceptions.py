# exceptions.py - Custom exception classes for modspace-lab

class LabError(Exception):
    """Base exception class for all modspace-lab errors."""
    pass


class ConfigError(LabError):
    """Exception raised when a run configuration cannot be parsed or validated."""

    def __init__(self, message: str, key: str = None, value: str = None):
        super().__init__(message)
        self.key = key
        self.value = value

    def __str__(self):
        if self.key:
            return f"Config error for key '{self.key}': {super().__str__()}"
        return super().__str__()


class GridMismatchError(LabError):
    """Exception raised when values, windows or fields disagree with a grid."""

    def __init__(self, message: str, expected=None, actual=None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual

    def __str__(self):
        if self.expected is not None:
            return f"Grid mismatch (expected {self.expected}, got {self.actual}): {super().__str__()}"
        return super().__str__()


class ParameterError(LabError):
    """Exception raised when a numeric parameter is outside its admissible range."""

    def __init__(self, message: str, parameter: str = None, value=None):
        super().__init__(message)
        self.parameter = parameter
        self.value = value

    def __str__(self):
        if self.parameter:
            return f"Invalid parameter '{self.parameter}' = {self.value}: {super().__str__()}"
        return super().__str__()


class NonFiniteError(LabError):
    """Exception raised when a generator, symbol or derivative produces NaN/Inf."""

    def __init__(self, message: str, operation: str = None):
        super().__init__(message)
        self.operation = operation

    def __str__(self):
        if self.operation:
            return f"Non-finite value in '{self.operation}': {super().__str__()}"
        return super().__str__()


class GuardError(LabError):
    """Exception raised when a numerical validity guard is violated."""

    def __init__(self, message: str, guard: str = None, member: str = None):
        super().__init__(message)
        self.guard = guard
        self.member = member

    def __str__(self):
        text = super().__str__()
        if self.guard:
            text = f"Guard '{self.guard}' violated: {text}"
        if self.member:
            text = f"{text} (member {self.member})"
        return text


class CoverageError(LabError):
    """Exception raised when a covering leaves a node uncovered or the partition denominator is too small."""

    def __init__(self, message: str, node=None, value: float = None):
        super().__init__(message)
        self.node = node
        self.value = value

    def __str__(self):
        if self.node is not None:
            return f"Coverage error at node {self.node}: {super().__str__()}"
        return super().__str__()


class ResourceGuardError(LabError):
    """Exception raised when a computation would exceed its resource budget."""

    def __init__(self, message: str, cost: int = None, limit: int = None):
        super().__init__(message)
        self.cost = cost
        self.limit = limit

    def __str__(self):
        if self.cost is not None:
            return f"Resource guard ({self.cost} > {self.limit}): {super().__str__()}"
        return super().__str__()


class CheckFailure(LabError):
    """Exception raised when an asserted check or experiment criterion fails."""

    def __init__(self, message: str, check: str = None, row: str = None):
        super().__init__(message)
        self.check = check
        self.row = row

    def __str__(self):
        text = super().__str__()
        if self.check:
            text = f"Check '{self.check}' failed: {text}"
        if self.row:
            text = f"{text} [row {self.row}]"
        return text
