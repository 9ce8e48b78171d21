"""Exception hierarchy shared by every module."""


class VarimaxPhaseError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(VarimaxPhaseError, ValueError):
    pass


class ParameterError(VarimaxPhaseError, ValueError):
    pass


class SizeError(VarimaxPhaseError, ValueError):
    pass


class SingularityError(VarimaxPhaseError, ArithmeticError):
    pass


class DegenerateInputError(VarimaxPhaseError, ArithmeticError):
    pass


class LayoutError(VarimaxPhaseError, ValueError):
    pass
