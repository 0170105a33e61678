class ToeplitzError(ValueError):
    """Base class for every validation failure raised by the services."""


class InvalidInputError(ToeplitzError):
    pass


class NotHermitianError(ToeplitzError):
    pass


class NotPositiveError(ToeplitzError):
    pass


class NotSingularError(ToeplitzError):
    pass


class FactorizationError(ToeplitzError):
    pass


class DecompositionError(ToeplitzError):
    pass


class InvalidStateError(ToeplitzError):
    pass
