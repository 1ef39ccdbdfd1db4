"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


class ConfigurationError(ValueError):
    """A filter bank or experiment configuration is unusable."""


class DegenerateInputError(ValueError):
    """Input data carries no usable information (e.g. all-zero magnitudes)."""


class FrameConditioningError(RuntimeError):
    """Conjugate gradients did not reach the requested residual.

    Carries the relative residual at the final iteration so callers can
    decide whether the partial solution is still usable.
    """

    def __init__(self, residual, iterations):
        self.residual = float(residual)
        self.iterations = int(iterations)
        super().__init__(
            f"frame operator inversion stalled: relative residual "
            f"{self.residual:.3e} after {self.iterations} iterations"
        )
