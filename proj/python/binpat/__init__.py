"""Pattern counts and densities of binary words, their limits and extremes."""

from ._core import *  # noqa: F401,F403
from ._core import (
    BoundaryReached,
    ConvergenceError,
    InfeasibleExponent,
    InvalidArgument,
    StepMeasure,
)

__version__ = "0.1.0"
