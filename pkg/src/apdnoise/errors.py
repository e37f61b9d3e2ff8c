"""Exception types raised for invalid device or network descriptions."""


class NoiseModelError(ValueError):
    """A value violates one of the model's domain invariants."""


class InvalidSpectrumError(NoiseModelError):
    """An ionization spectrum is malformed: a probability outside [0, 1],
    total mass above 1, or an empty probability list."""


class InvalidProbabilityError(NoiseModelError):
    """A Bernoulli step probability is outside [0, 1]."""


class InvalidNetworkError(NoiseModelError):
    """A cascade-network description is malformed."""


class StateSpaceLimitError(NoiseModelError):
    """Exact enumeration would exceed the configured outcome cap."""

    def __init__(self, required: int, cap: int):
        super().__init__(
            f"enumeration needs {required} joint outcomes, above the cap of {cap}"
        )
        self.required = required
        self.cap = cap
