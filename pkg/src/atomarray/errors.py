"""Exception hierarchy shared by all modules."""


class AtomArrayError(Exception):
    """Base class for errors raised by :mod:`atomarray`."""


class InvalidArgumentError(AtomArrayError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(AtomArrayError, ValueError):
    """A quantity is evaluated outside its mathematical domain."""


class CoincidentAtomsError(DomainError):
    """Two atoms occupy the same position."""

    def __init__(self, j, l):
        self.pair = (int(j), int(l))
        super().__init__(f"atoms {j} and {l} coincide")


class NumericalError(AtomArrayError, RuntimeError):
    """A numerical routine failed or two independent routes disagree."""


class StiffnessError(NumericalError):
    """The adaptive integrator could not make progress."""


class ConfigError(AtomArrayError, ValueError):
    """Invalid run configuration; ``field`` names the offending key path."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
