"""
Error types raised by services and mapped to exit codes by the CLI.
"""


class EigsLabError(Exception):
    """Base error; `exit_code` plays the role of an HTTP status."""

    exit_code = 1

    def __init__(self, detail: str, exit_code: int | None = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class ConfigError(EigsLabError):
    """A system document does not match the schema."""

    def __init__(self, detail: str, path: str | None = None):
        self.path = path
        super().__init__(f"{path}: {detail}" if path else detail)


class ValidationFailed(EigsLabError):
    """The system violates the standing assumptions."""

    def __init__(self, violations: list):
        self.violations = violations
        kinds = sorted({v.kind for v in violations})
        super().__init__(f"system failed validation: {len(violations)} violation(s) ({', '.join(kinds)})")


class EdgeCapExceeded(EigsLabError):
    def __init__(self, predicted: int, cap: int, level: int):
        self.predicted = predicted
        self.cap = cap
        self.level = level
        super().__init__(
            f"level {level} would have {predicted} edges, above the cap of {cap} "
            f"(raise it with --edge-cap or EIGSLAB_EDGE_CAP)"
        )


class PathCountExceeded(EigsLabError):
    def __init__(self, colour: int, cap: int):
        self.colour = colour
        self.cap = cap
        super().__init__(
            f"rule graph of colour {colour} has more than {cap} simple terminal paths; "
            f"supply the distance family manually"
        )


class ConvergenceError(EigsLabError):
    def __init__(self, iterations: int, residual: float, last_iterate):
        self.iterations = iterations
        self.residual = residual
        self.last_iterate = last_iterate
        super().__init__(
            f"no convergence after {iterations} iterations (residual {residual:.3e}, "
            f"last iterate {list(last_iterate)})"
        )


class InsufficientData(EigsLabError):
    pass


class UsageError(EigsLabError):
    exit_code = 2
