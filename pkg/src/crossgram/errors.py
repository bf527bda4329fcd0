"""Exception hierarchy shared by all crossgram modules."""


class CrossGramError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(CrossGramError, ValueError):
    """Operand dimensions are inconsistent."""


class ConfigError(CrossGramError, ValueError):
    """Invalid user configuration (perturbation sets, specs, CLI input)."""


class NumericalError(CrossGramError, ArithmeticError):
    """A numerical kernel could not produce a trustworthy result."""


class DegenerateInputError(NumericalError):
    pass


class NotSymmetricError(NumericalError):
    pass


class SingularEquationError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class DivergenceError(NumericalError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ResonanceError(NumericalError):
    pass
