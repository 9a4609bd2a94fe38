"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its accuracy target."""


class UnsupportedFamilyError(DomainError):
    """The requested operation has no implementation for this state family."""


class DivergenceError(DomainError):
    """An entropy power does not exist for the requested order.

    ``condition`` states the violated existence condition and ``limit`` is
    the degenerate value the quantity tends to (0.0 or math.inf).
    """

    def __init__(self, condition: str, limit: float):
        super().__init__(f"entropy power diverges: requires {condition}")
        self.condition = condition
        self.limit = limit
