"""Cross-Gramian model reduction for state-space-symmetric linear systems."""

from .benchmark import BenchmarkSpec, GeneratedSystem, RandomStream, inverse_sylvester_procedure
from .errors import (ConfigError, ConvergenceError, CrossGramError, DegenerateInputError,
                     DivergenceError, NotSymmetricError, NumericalError, ResonanceError,
                     ShapeError, SingularEquationError)
from .gramian import (GramianResult, PerturbationSets, cross_gramian_sylvester,
                      empirical_cross_gramian, empirical_linear_cross_gramian,
                      hankel_singular_values)
from .metrics import ErrorReport
from .reduce import Projection, Rom, projection, reduce_system, truncate
from .system import LtiSystem, TimeGrid, Trajectory, simulate

__version__ = "0.1.0"

__all__ = [
    "BenchmarkSpec", "ConfigError", "ConvergenceError", "CrossGramError",
    "DegenerateInputError", "DivergenceError", "ErrorReport", "GeneratedSystem",
    "GramianResult", "LtiSystem", "NotSymmetricError", "NumericalError",
    "PerturbationSets", "Projection", "RandomStream", "ResonanceError", "Rom",
    "ShapeError", "SingularEquationError", "TimeGrid", "Trajectory",
    "cross_gramian_sylvester", "empirical_cross_gramian",
    "empirical_linear_cross_gramian", "hankel_singular_values",
    "inverse_sylvester_procedure", "projection", "reduce_system", "simulate",
    "truncate",
]
