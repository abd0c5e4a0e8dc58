"""Exception types raised by fibdyn."""


class FibDynError(Exception):
    pass


class OverflowToInfinite(FibDynError, ArithmeticError):
    """A coordinate left the finite floating-point range."""


class InverseUndefined(FibDynError, ArithmeticError):
    """The inverse branch (y, (x - c)/y) was evaluated on the line y = 0."""


class OriginExcluded(FibDynError, ValueError):
    pass


class ConstraintViolated(FibDynError, AssertionError):
    """Constructed radii failed the inequalities they were built to satisfy."""


class ParameterOutOfRange(FibDynError, ValueError):
    pass


class NotASaddle(FibDynError, ValueError):
    pass


class BranchDied(FibDynError, ArithmeticError):
    pass


class DepthExceeded(FibDynError, RuntimeError):
    def __init__(self, msg, piece=None):
        super().__init__(msg)
        self.piece = piece


class InvalidSpec(FibDynError, ValueError):
    pass


class UnsupportedFormat(FibDynError, ValueError):
    pass
