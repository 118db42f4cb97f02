"""Adaptive Radau IIA integration of linear population equations."""
from dataclasses import dataclass, field

import numpy as np

from ..errors import NewtonDivergence, SingularMatrix, StepSizeUnderflow
from . import _status
from .backend import get_kernels
from .conserve import from_reduced, is_generator, reduce_generator, to_reduced

H_MIN = 1e-14  # ns


@dataclass(frozen=True)
class SolverConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float = float("inf")
    newton_tol: float = 1e-12
    max_newton_iters: int = 10

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "newton_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if int(self.max_newton_iters) < 1:
            raise ValueError("max_newton_iters must be at least 1")


@dataclass(frozen=True)
class SolverStats:
    steps: int
    rejected: int
    newton_iterations: int
    factorizations: int


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    values: np.ndarray  # (len(times), n)
    stats: SolverStats
    kind: object = field(default=None, repr=False)

    @property
    def states(self):
        from ..kinetics import PopulationState

        return [PopulationState(v, self.kind) for v in self.values]

    def trace_drift(self):
        return float(np.max(np.abs(self.values.sum(axis=1) - self.values[0].sum())))

    def min_population(self):
        return float(self.values.min())


def output_times(t_span, checkpoints=()):
    """Sorted unique output times: ``t0``, interior checkpoints, ``t_end``."""
    t0, t_end = map(float, t_span)
    if not t_end > t0:
        raise ValueError(f"t_span must be increasing, got {t_span}")
    cps = np.asarray(list(checkpoints), dtype=float)
    slack = 1e-12 * max(abs(t0), abs(t_end))
    if cps.size and (cps.min() < t0 - slack or cps.max() > t_end + slack):
        raise ValueError("checkpoints must lie inside t_span")
    inner = cps[(cps > t0) & (cps < t_end)]
    return np.unique(np.concatenate([[t0], inner, [t_end]]))


def integrate(g, rho0, t_span, cfg=None, checkpoints=(), backend=None, conserve=None):
    """Integrate ``rho' = A rho`` from ``t_span[0]`` to ``t_span[1]`` (ns).

    `g` is a kinetics Generator or a square matrix. Steps land exactly on the
    checkpoints, so no interpolation error enters the reported states. When
    `A` is a generator (columns summing to zero; detected unless `conserve`
    is given) the trace is held fixed exactly; see :mod:`.conserve`.
    """
    cfg = cfg or SolverConfig()
    A = np.asarray(getattr(g, "matrix", g), dtype=float)
    y0 = np.asarray(getattr(rho0, "values", rho0), dtype=float)
    if A.shape != (y0.size, y0.size):
        raise ValueError(f"generator shape {A.shape} does not match state size {y0.size}")
    times = output_times(t_span, checkpoints)
    conserve = is_generator(A) if conserve is None else bool(conserve)
    if conserve:
        z0, total = to_reduced(y0)
        B = reduce_generator(A, total)
    else:
        B, z0 = A, y0
    states, steps, rejected, newton, lus, status = get_kernels(backend).radau_linear(
        B, z0, times[0], times[1:], cfg.rel_tol, cfg.abs_tol, cfg.max_step,
        cfg.newton_tol, int(cfg.max_newton_iters), H_MIN)
    if status == _status.STEP_UNDERFLOW:
        raise StepSizeUnderflow(f"step size fell below {H_MIN} ns")
    if status == _status.NEWTON_DIVERGENCE:
        raise NewtonDivergence(f"stage equations did not converge in {cfg.max_newton_iters} iterations")
    if status == _status.SINGULAR:
        raise SingularMatrix("singular stage matrix")
    if conserve:
        states = from_reduced(states, total)
    values = np.vstack([y0[None, :], states])
    return Trajectory(times, values, SolverStats(int(steps), int(rejected), int(newton), int(lus)),
                      getattr(g, "kind", None))
