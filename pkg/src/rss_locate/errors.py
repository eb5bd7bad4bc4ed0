class ConfigError(ValueError):
    """Invalid parameters, configuration or input file contents."""


class DomainError(ValueError):
    """A model was evaluated outside its domain (e.g. log of a zero distance)."""


class NonFiniteObjectiveError(ArithmeticError):
    """The objective returned NaN or inf during minimization."""

    def __init__(self, x, value):
        self.x = tuple(x)
        self.value = value
        super().__init__(f"objective is not finite at x={self.x}: {value!r}")
