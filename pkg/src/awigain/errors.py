"""Exception hierarchy shared by the library and the CLI."""


class AWIError(Exception):
    """Base class for all errors raised by awigain."""


class InvalidArgument(AWIError, ValueError):
    pass


class ResonanceError(InvalidArgument):
    """Control frequency coincides with a transition line."""


class QuadratureError(AWIError, ArithmeticError):
    """Adaptive quadrature hit its node cap before converging.

    The last two estimates are kept on the exception so callers can judge
    how far from convergence the rule was.
    """

    def __init__(self, message, estimates=()):
        super().__init__(message)
        self.estimates = tuple(estimates)


class NoRootError(AWIError):
    def __init__(self, message, interval=None, alpha_min=None, alpha_max=None):
        super().__init__(message)
        self.interval = interval
        self.alpha_min = alpha_min
        self.alpha_max = alpha_max


class DecoupledUpperStateError(AWIError, ZeroDivisionError):
    """Upper-level orientation moment vanishes, so no population ratio exists."""


class SweepEvaluationError(AWIError):
    def __init__(self, message, x):
        super().__init__(message)
        self.x = x


class EnvelopeError(AWIError):
    """Rejection sampler acceptance rate fell below the usable floor."""


class MoleculeFileError(AWIError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
