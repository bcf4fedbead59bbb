"""Exception hierarchy shared by the simulation modules."""


class ConfigError(ValueError):
    """An experiment configuration violates an operation precondition."""


class DomainError(ValueError):
    """A parameter lies outside the range where a formula is defined."""


class EmptyDensityError(ValueError):
    """A coarse-grained density has no weight to normalize."""


class NumericalError(RuntimeError):
    """A simulation left its range of numerical validity."""


class NormDriftError(NumericalError):
    pass


class WraparoundError(NumericalError):
    """Probability reached the periodic boundary of the spatial grid."""


class EscapeError(NumericalError):
    """The wavefunction left the observation window entirely."""
