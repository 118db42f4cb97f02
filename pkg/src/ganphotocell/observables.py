"""Terminal voltage, current and power of the photocell at steady state."""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .constants import CODATA
from .errors import DomainError, PhotocellError, SweepFailure
from .kinetics import ALPHA, BETA, PopulationState, build_generator
from .model import ModelKind, derive_rates
from .numerics import steady_state

OPEN_CIRCUIT = "open_circuit"
SHORT_CIRCUIT = "short_circuit"

GAMMA_GRID_MIN = 1e-4  # 1/ns
GAMMA_GRID_MAX = 1e8  # 1/ns
GAMMA_GRID_POINTS = 60


def default_gamma_grid(lo=GAMMA_GRID_MIN, hi=GAMMA_GRID_MAX, n=GAMMA_GRID_POINTS):
    """Log-spaced load rates from near open circuit to past the power peak.

    Tunneling out of the dot runs at ~1e4-1e5 per ns for the reference
    device, so the power maximum sits near 1e6 per ns; the grid must reach
    beyond it.
    """
    return np.logspace(math.log10(lo), math.log10(hi), int(n))


def terminal_voltage(rho_aa, rho_bb_beta, E_alpha_beta, T_a, constants=CODATA):
    """Voltage (V) across the terminals from the alpha and beta populations."""
    if rho_aa <= 0 or rho_bb_beta <= 0:
        raise DomainError(f"populations must be positive, got {rho_aa}, {rho_bb_beta}")
    return E_alpha_beta + constants.k_B * T_a * math.log(rho_aa / rho_bb_beta)


@dataclass(frozen=True)
class OperatingPoint:
    Gamma_load: float
    V: float
    j: float
    P: float
    P_sun: float
    rho_ss: PopulationState = field(repr=False)
    flag: str = ""

    @property
    def finite(self):
        return all(math.isfinite(x) for x in (self.V, self.j, self.P, self.P_sun))


def operating_point(g, r=None):
    """Steady-state current, voltage and power for generator `g`.

    An exactly zero alpha or beta population makes the voltage undefined; the
    point is then flagged as an open- or short-circuit limit with ``V = nan``
    and ``P`` taken as zero.
    """
    r = r if r is not None else g.rates
    kind = ModelKind(g.kind)
    rho = steady_state(g, PopulationState.ground(kind).values)
    state = PopulationState(rho, kind)
    j = r.Gamma_load * rho[ALPHA]
    # ground level is the energy reference; the uncoupled E_a equals E_x1 = E_1b
    P_sun = j * r.E_x1
    if rho[ALPHA] > 0 and rho[BETA] > 0:
        V = terminal_voltage(rho[ALPHA], rho[BETA], r.E_alpha_beta, r.T_a)
        return OperatingPoint(r.Gamma_load, V, j, j * V, P_sun, state)
    flag = OPEN_CIRCUIT if rho[BETA] <= 0 else SHORT_CIRCUIT
    return OperatingPoint(r.Gamma_load, math.nan, j, 0.0, P_sun, state, flag)


@dataclass(frozen=True)
class IVCurve:
    points: tuple
    kind: ModelKind
    params: object = field(repr=False)
    failures: tuple = ()  # (Gamma_load, message) pairs

    @property
    def gammas(self):
        return np.array([p.Gamma_load for p in self.points])

    def column(self, name):
        return np.array([getattr(p, name) for p in self.points])


def _point_at(rates, kind, gamma):
    return operating_point(build_generator(rates.replace(Gamma_load=float(gamma)), kind))


def iv_sweep(params, kind, gamma_grid=None):
    """Operating points along a grid of load rates (1/ns).

    Failures at individual points are recorded in ``failures`` and the
    sweep carries on.
    """
    kind = ModelKind(kind)
    grid = default_gamma_grid() if gamma_grid is None else np.asarray(gamma_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("gamma grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("gamma grid must be strictly increasing")
    rates = derive_rates(params, kind)
    points, failures = [], []
    for gamma in grid:
        try:
            points.append(_point_at(rates, kind, gamma))
        except (PhotocellError, ArithmeticError) as exc:
            failures.append((float(gamma), str(exc)))
    return IVCurve(tuple(points), kind, params, tuple(failures))


@dataclass(frozen=True)
class PeakPower:
    P_max: float
    at: OperatingPoint
    boundary: bool = False


def peak_power(curve, rel_tol=1e-4):
    """Maximum power along `curve`, refined between grid neighbours.

    The grid argmax and its two neighbours bracket a golden-section search in
    ``log10(Gamma)``. A maximum at either end of the grid is returned as is,
    with ``boundary=True``.
    """
    pts = curve.points
    if not pts:
        raise ValueError("empty I-V curve")
    powers = np.array([p.P if math.isfinite(p.P) else -math.inf for p in pts])
    i = int(np.argmax(powers))
    if i == 0 or i == len(pts) - 1:
        return PeakPower(float(powers[i]), pts[i], boundary=True)
    rates = derive_rates(curve.params, curve.kind)

    def neg_power(log_gamma):
        return -_point_at(rates, curve.kind, 10.0**log_gamma).P

    a, b, c = (math.log10(pts[k].Gamma_load) for k in (i - 1, i, i + 1))
    # x tolerance well below what the flat peak needs for rel_tol in P
    res = optimize.minimize_scalar(neg_power, bracket=(a, b, c), method="golden",
                                   tol=min(rel_tol, 1e-4) * 1e-4)
    best = _point_at(rates, curve.kind, 10.0**res.x)
    if best.P < pts[i].P:
        best = pts[i]
    return PeakPower(float(best.P), best)


def relative_enhancement(P_coupled_max, P_uncoupled_max):
    """Fractional peak-power gain of the coupled cell over the uncoupled one."""
    if not P_uncoupled_max > 0:
        raise DomainError(f"uncoupled peak power must be positive, got {P_uncoupled_max}")
    return (P_coupled_max - P_uncoupled_max) / P_uncoupled_max


@dataclass(frozen=True)
class Enhancement:
    eta: float
    coupled: PeakPower
    uncoupled: PeakPower

    @property
    def boundary(self):
        return self.coupled.boundary or self.uncoupled.boundary


def enhancement(params, gamma_grid=None):
    """Peak-power enhancement of the coupled over the uncoupled cell."""
    peaks = {}
    for kind in (ModelKind.COUPLED, ModelKind.UNCOUPLED):
        curve = iv_sweep(params, kind, gamma_grid)
        if curve.failures:
            g, msg = curve.failures[0]
            raise SweepFailure(f"{kind.value} sweep failed at Gamma={g:g}: {msg}")
        peaks[kind] = peak_power(curve)
    eta = relative_enhancement(peaks[ModelKind.COUPLED].P_max, peaks[ModelKind.UNCOUPLED].P_max)
    return Enhancement(eta, peaks[ModelKind.COUPLED], peaks[ModelKind.UNCOUPLED])
