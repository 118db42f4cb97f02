"""Linear algebra and time integration for the 5-state population equations."""
from .backend import NAME as BACKEND
from .expm import matrix_exponential_apply
from .linalg import lu_factor, lu_solve
from .conserve import is_generator, reduce_generator
from .ode import SolverConfig, SolverStats, Trajectory, integrate, output_times
from .steady import closed_classes, steady_state

__all__ = [
    "BACKEND", "SolverConfig", "SolverStats", "Trajectory", "closed_classes", "integrate", "is_generator",
    "lu_factor", "lu_solve", "matrix_exponential_apply", "output_times", "reduce_generator", "steady_state",
]
