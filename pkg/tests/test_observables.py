import math

import numpy as np
import pytest

from ganphotocell.constants import CODATA
from ganphotocell.errors import DomainError
from ganphotocell.kinetics import ALPHA, PopulationState, build_generator
from ganphotocell.model import ModelKind, derive_rates
from ganphotocell.observables import (OPEN_CIRCUIT, IVCurve, OperatingPoint, default_gamma_grid, enhancement,
                                      iv_sweep, operating_point, peak_power, relative_enhancement,
                                      terminal_voltage)

KT = CODATA.k_B * 300.0


def test_terminal_voltage():
    assert terminal_voltage(0.3, 0.3, 3.51, 300.0) == 3.51
    assert terminal_voltage(math.e * 0.1, 0.1, 3.51, 300.0) == pytest.approx(3.51 + 0.025852, abs=1e-6)
    assert terminal_voltage(0.01, 0.1, 3.51, 300.0) == pytest.approx(3.4505, abs=1e-4)
    with pytest.raises(DomainError):
        terminal_voltage(0.0, 0.1, 3.51, 300.0)
    with pytest.raises(DomainError):
        terminal_voltage(0.1, -1e-3, 3.51, 300.0)


def test_open_circuit_point(params):
    g = build_generator(derive_rates(params.replace(Gamma_load=0.0)), "coupled")
    op = operating_point(g)
    assert op.j == 0.0 and op.P == 0.0
    assert op.flag == OPEN_CIRCUIT and math.isnan(op.V)


@pytest.mark.parametrize("kind", list(ModelKind))
def test_point_identities(params, kind):
    r = derive_rates(params)
    op = operating_point(build_generator(r, kind))
    rho = op.rho_ss.values
    assert op.j == r.Gamma_load * rho[ALPHA]
    assert op.P == op.j * op.V
    assert op.P_sun == op.j * r.E_x1
    assert op.finite and op.flag == ""


def test_reference_operating_point_snapshot(params):
    # regression snapshot of the default device at Gamma = 0.08 / ns
    r = derive_rates(params)
    c = operating_point(build_generator(r, "coupled"))
    u = operating_point(build_generator(r, "uncoupled"))
    assert c.V == pytest.approx(3.8435427095132373, rel=1e-9)
    assert c.j == pytest.approx(0.07999951363532691, rel=1e-9)
    assert u.j == pytest.approx(0.07999944121028123, rel=1e-9)
    assert c.rho_ss["x2"] == pytest.approx(3.29529856303982e-06, rel=1e-6)


def test_large_load_drains_alpha(params):
    r = derive_rates(params)
    ops = [operating_point(build_generator(r.replace(Gamma_load=g), "coupled")) for g in (1e2, 1e5, 1e8)]
    assert ops[0].rho_ss["alpha"] > ops[1].rho_ss["alpha"] > ops[2].rho_ss["alpha"]
    assert ops[0].V > ops[1].V > ops[2].V


def test_default_grid():
    g = default_gamma_grid()
    assert g.size == 60 and g[0] == pytest.approx(1e-4) and g[-1] == pytest.approx(1e8)
    assert np.all(np.diff(np.log(g)) > 0)


@pytest.mark.parametrize("kind", list(ModelKind))
def test_iv_monotone(params, kind):
    c = iv_sweep(params, kind)
    assert not c.failures and len(c.points) == 60
    V, j = c.column("V"), c.column("j")
    assert np.all(np.diff(V) <= 1e-9)
    assert np.all(np.diff(j) >= -1e-9)
    for p in c.points:
        assert p.P == p.j * p.V


def test_iv_validation(params):
    assert len(iv_sweep(params, "coupled", [0.08]).points) == 1
    with pytest.raises(ValueError):
        iv_sweep(params, "coupled", [])
    with pytest.raises(ValueError):
        iv_sweep(params, "coupled", [1.0, 0.5])


def test_coupled_draws_more_current_near_peak(params):
    cu = iv_sweep(params, "coupled")
    un = iv_sweep(params, "uncoupled")
    Vp = peak_power(un).at.V
    # current at the uncoupled peak voltage, interpolated along each curve
    def j_at(curve, V):
        v, j = curve.column("V")[::-1], curve.column("j")[::-1]
        return np.interp(V, v, j)
    assert j_at(cu, Vp) >= j_at(un, Vp)


def _synthetic(P_values, gammas):
    pts = tuple(OperatingPoint(g, 1.0, P, P, 0.0, PopulationState.ground()) for g, P in zip(gammas, P_values))
    return IVCurve(pts, ModelKind.COUPLED, None)


def test_peak_power_boundary_flag():
    g = np.logspace(0, 2, 5)
    pk = peak_power(_synthetic(g, g))
    assert pk.boundary and pk.P_max == g[-1]
    with pytest.raises(ValueError):
        peak_power(IVCurve((), ModelKind.COUPLED, None))


def test_peak_power_refines_between_grid_points(params):
    grid = default_gamma_grid()
    c = iv_sweep(params, "coupled", grid)
    pk = peak_power(c)
    assert not pk.boundary
    assert pk.P_max >= c.column("P").max()
    # independent refinement by brute force on a dense local grid
    i = int(np.argmax(c.column("P")))
    dense = np.logspace(np.log10(grid[i - 1]), np.log10(grid[i + 1]), 401)
    Pd = iv_sweep(params, "coupled", dense).column("P").max()
    assert pk.P_max == pytest.approx(Pd, rel=1e-4)


def test_relative_enhancement():
    assert relative_enhancement(2.0, 2.0) == 0.0
    assert relative_enhancement(1.246, 1.0) == pytest.approx(0.246)
    assert relative_enhancement(1.30, 1.0) == pytest.approx(0.30)
    with pytest.raises(DomainError):
        relative_enhancement(1.0, 0.0)


def test_enhancement_grid_rescaling_invariance(params):
    a = enhancement(params, default_gamma_grid(1e-4, 1e8, 60))
    b = enhancement(params, default_gamma_grid(1e-3, 1e9, 60))
    assert not a.boundary and not b.boundary
    assert abs(a.eta - b.eta) <= 1e-3


def test_narrow_grid_puts_peak_on_boundary(params):
    e = enhancement(params, default_gamma_grid(1e-4, 1e3, 60))
    assert e.boundary
