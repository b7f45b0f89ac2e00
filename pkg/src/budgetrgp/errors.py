"""Exception types shared across the toolkit."""


class InvalidParameterError(ValueError):
    """A numeric argument is outside its documented range."""


class ExhaustedProcessError(RuntimeError):
    """All edge offers of a process have been consumed."""


class InvalidPatternError(ValueError):
    """A pattern graph violates its structural contract."""


class InternalCheckError(RuntimeError):
    """An internal consistency check failed (indicates a bug, not bad input)."""


class StrategyError(RuntimeError):
    """A strategy raised while making decisions; carries the global step index."""

    def __init__(self, message: str, step: int):
        super().__init__(f"{message} (at step {step})")
        self.step = step


class InfeasibleParametersError(ValueError):
    """No feasible parameter assignment exists; names the violated constraint."""

    def __init__(self, constraint: str):
        super().__init__(f"infeasible parameters: {constraint}")
        self.constraint = constraint


class IncompleteInputError(ValueError):
    """A required map entry is missing; names the missing key."""
