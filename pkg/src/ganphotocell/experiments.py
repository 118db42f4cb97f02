"""Population dynamics and enhancement sweeps over device parameters."""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import PhotocellError
from .kinetics import PopulationState, build_generator
from .model import ModelKind, derive_rates
from .numerics import integrate
from .observables import enhancement, iv_sweep

PHONON_MULTIPLIERS = (0.01, 0.1, 0.5, 1.0, 2.0, 4.0)
D_PERP_GRID = tuple(np.linspace(1.0, 4.0, 8).tolist())
W_BR_GRID = tuple(np.linspace(0.2, 1.5, 8).tolist())


def population_dynamics(params, kind, t_end=200.0, n_checkpoints=60, t_min=1e-6, cfg=None):
    """Populations from the ground state at log-spaced times up to `t_end` (ns).

    The returned trajectory starts with ``t = 0`` followed by ``n_checkpoints``
    times from `t_min` to `t_end`.
    """
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if n_checkpoints < 1:
        raise ValueError("need at least one checkpoint")
    kind = ModelKind(kind)
    g = build_generator(derive_rates(params, kind), kind)
    lo = min(t_min, t_end)
    times = np.logspace(math.log10(lo), math.log10(t_end), int(n_checkpoints))
    times[-1] = t_end
    return integrate(g, PopulationState.ground(kind), (0.0, t_end), cfg, checkpoints=times)


@dataclass(frozen=True)
class CellResult:
    eta: float = math.nan
    P_coupled_max: float = math.nan
    P_uncoupled_max: float = math.nan
    boundary: bool = False
    error: str = ""

    @property
    def converged(self):
        return not self.error and math.isfinite(self.eta)


@dataclass(frozen=True)
class EnhancementGrid:
    """Relative enhancement over one or two swept parameters.

    ``eta`` has shape ``(len(axis1),)`` or ``(len(axis1), len(axis2))``.
    Failed cells hold ``nan`` with ``converged`` false and the reason in
    ``errors``.
    """

    axis1: np.ndarray
    axis2: object
    eta: np.ndarray
    P_coupled_max: np.ndarray
    P_uncoupled_max: np.ndarray
    converged: np.ndarray
    boundary: np.ndarray
    errors: dict = field(default_factory=dict)
    axis_names: tuple = ("axis1", "axis2")

    @property
    def n_failed(self):
        return int((~self.converged).sum())

    def argmax(self):
        """Index of the largest converged eta."""
        masked = np.where(self.converged, self.eta, -np.inf)
        if not np.isfinite(masked).any():
            raise ValueError("no converged cells")
        return np.unravel_index(int(np.argmax(masked)), masked.shape)

    def max_is_interior(self):
        idx = self.argmax()
        return all(0 < i < n - 1 for i, n in zip(idx, self.eta.shape))


def _cell(params, gamma_grid):
    try:
        e = enhancement(params, gamma_grid)
    except (PhotocellError, ArithmeticError, ValueError) as exc:
        return CellResult(error=f"{type(exc).__name__}: {exc}")
    return CellResult(e.eta, e.coupled.P_max, e.uncoupled.P_max, e.boundary)


def _cell_star(args):
    return _cell(*args)


def _evaluate(jobs, workers):
    # map() yields in submission order, so the result never depends on scheduling
    if workers is None or workers <= 1 or len(jobs) <= 1:
        return [_cell_star(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_cell_star, jobs))


def _assemble(cells, shape, axis1, axis2, names):
    def arr(attr, dtype=float):
        return np.array([getattr(c, attr) for c in cells], dtype=dtype).reshape(shape)

    errors = {}
    for flat, c in enumerate(cells):
        if c.error:
            errors[np.unravel_index(flat, shape)] = c.error
    return EnhancementGrid(np.asarray(axis1, float), None if axis2 is None else np.asarray(axis2, float),
                           arr("eta"), arr("P_coupled_max"), arr("P_uncoupled_max"),
                           arr("converged", bool), arr("boundary", bool), errors, names)


def _check_axis(values, name):
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D sequence")
    if np.any(v <= 0):
        raise ValueError(f"{name} values must be positive")
    if np.any(np.diff(v) <= 0):
        raise ValueError(f"{name} must be strictly increasing")
    return v


def phonon_rate_sweep(params, multipliers=PHONON_MULTIPLIERS, gamma_grid=None, workers=None):
    """Enhancement as the phonon relaxation rate is scaled in units of 2J/hbar."""
    m = np.asarray(multipliers, dtype=float)
    if m.ndim != 1 or m.size == 0 or np.any(m <= 0):
        raise ValueError("multipliers must be a non-empty list of positive numbers")
    jobs = [(params.replace(gamma_x="2J", gamma_x_multiplier=float(x)), gamma_grid) for x in m]
    cells = _evaluate(jobs, workers)
    return _assemble(cells, (m.size,), m, None, ("gamma_x_multiplier", None))


def geometry_sweep(params, d_perp_grid=D_PERP_GRID, w_br_grid=W_BR_GRID, gamma_grid=None, workers=None):
    """Enhancement over interdot spacing (rows) and barrier width (columns), both in nm."""
    d = _check_axis(d_perp_grid, "d_perp_grid")
    w = _check_axis(w_br_grid, "w_br_grid")
    jobs = [(params.replace(d_perp=float(di), w_br=float(wj)), gamma_grid) for di in d for wj in w]
    cells = _evaluate(jobs, workers)
    return _assemble(cells, (d.size, w.size), d, w, ("d_perp_nm", "w_br_nm"))


def _iv_job(args):
    return iv_sweep(*args)


def iv_curves(params, kinds, gamma_grid=None, workers=None):
    """I-V curves for several model variants, in the order of `kinds`."""
    jobs = [(params, ModelKind(k), gamma_grid) for k in kinds]
    if workers is None or workers <= 1 or len(jobs) <= 1:
        return [_iv_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_iv_job, jobs))
