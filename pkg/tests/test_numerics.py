import math

import mpmath
import numpy as np
import pytest

from ganphotocell.errors import DegenerateKernel, NewtonDivergence, SingularMatrix
from ganphotocell.kinetics import PopulationState, build_generator
from ganphotocell.model import ModelKind, derive_rates
from ganphotocell.numerics import (SolverConfig, closed_classes, integrate, lu_factor, lu_solve,
                                   matrix_exponential_apply, output_times, steady_state)
from ganphotocell.numerics.expm import expm

CHECKPOINTS = np.logspace(-6, math.log10(200.0), 20)


def _mp_expm_apply(A, t, v, dps=50):
    with mpmath.workdps(dps):
        E = mpmath.expm(mpmath.matrix(A.tolist()) * t)
        out = E * mpmath.matrix(v.tolist())
        return np.array([float(x) for x in out])


# --- LU -------------------------------------------------------------------

def test_lu_identity(backend):
    b = np.arange(1.0, 6.0)
    assert np.array_equal(lu_solve(np.eye(5), b, backend), b)


def test_lu_permutation(backend):
    P = np.eye(5)[[3, 0, 4, 1, 2]]
    b = np.arange(1.0, 6.0)
    assert np.allclose(lu_solve(P, b, backend), P.T @ b, rtol=0, atol=0)


def test_lu_random_residual(backend, rng):
    for _ in range(20):
        A = rng.standard_normal((5, 5)) + 5 * np.eye(5)
        b = rng.standard_normal(5)
        x = lu_solve(A, b, backend)
        assert np.max(np.abs(A @ x - b)) <= 1e-12 * np.max(np.abs(b))


def test_lu_singular(backend):
    with pytest.raises(SingularMatrix):
        lu_factor(np.array([[1.0, 2.0], [2.0, 4.0]]), backend)
    with pytest.raises(ValueError):
        lu_factor(np.ones((2, 3)), backend)


# --- matrix exponential -----------------------------------------------------

def test_expm_identity_at_zero(params):
    A = build_generator(derive_rates(params), "coupled").matrix
    v = np.array([0.1, 0.2, 0.3, 0.15, 0.25])
    assert np.array_equal(matrix_exponential_apply(A, 0.0, v), v)


def test_expm_diagonal():
    d = np.array([-1.0, -2.5, 0.3, 0.0, -40.0])
    v = np.arange(1.0, 6.0)
    got = matrix_exponential_apply(np.diag(d), 1.7, v)
    assert np.allclose(got, np.exp(d * 1.7) * v, rtol=1e-13, atol=1e-15)


def test_expm_nilpotent():
    N = np.array([[0.0, 3.0], [0.0, 0.0]])
    assert np.allclose(expm(N), [[1.0, 3.0], [0.0, 1.0]], rtol=0, atol=1e-15)


@pytest.mark.parametrize("kind", list(ModelKind))
def test_expm_matches_high_precision(params, kind):
    A = build_generator(derive_rates(params), kind).matrix
    v = PopulationState.ground(kind).values
    for t in (1e-6, 1e-3, 1.0, 200.0):
        ref = _mp_expm_apply(A, t, v)
        assert np.max(np.abs(matrix_exponential_apply(A, t, v) - ref)) <= 1e-11


# --- integration ------------------------------------------------------------

def test_output_times():
    t = output_times((0.0, 10.0), [5.0, 1.0, 5.0, 10.0])
    assert t.tolist() == [0.0, 1.0, 5.0, 10.0]
    with pytest.raises(ValueError):
        output_times((1.0, 1.0))
    with pytest.raises(ValueError):
        output_times((0.0, 1.0), [2.0])


def test_scalar_decay(backend):
    tr = integrate(np.array([[-3.0]]), [1.0], (0.0, 2.0), checkpoints=[0.5, 1.0], backend=backend)
    assert tr.times.tolist() == [0.0, 0.5, 1.0, 2.0]
    assert np.allclose(tr.values[:, 0], np.exp(-3.0 * tr.times), rtol=1e-8, atol=0)


@pytest.mark.parametrize("kind", list(ModelKind))
def test_integrate_matches_expm(params, kind, backend):
    g = build_generator(derive_rates(params), kind)
    rho0 = PopulationState.ground(kind)
    tr = integrate(g, rho0, (0.0, 200.0), checkpoints=CHECKPOINTS, backend=backend)
    for t, v in zip(tr.times, tr.values):
        assert np.max(np.abs(v - matrix_exponential_apply(g.matrix, t, rho0.values))) <= 1e-8
    assert tr.trace_drift() <= 1e-10
    assert tr.min_population() >= -1e-9


def test_stiff_step_budget(params, backend):
    # rates from 0.08 to ~6e5 per ns: ratio ~1e7
    g = build_generator(derive_rates(params), "coupled")
    tr = integrate(g, PopulationState.ground(), (0.0, 200.0), checkpoints=CHECKPOINTS, backend=backend)
    assert tr.stats.steps < 2000
    assert tr.stats.factorizations <= tr.stats.steps + tr.stats.rejected


def test_tolerance_refinement_reduces_error(params):
    g = build_generator(derive_rates(params), "uncoupled")
    rho0 = PopulationState.ground(ModelKind.UNCOUPLED)
    ref = np.array([matrix_exponential_apply(g.matrix, t, rho0.values) for t in CHECKPOINTS])
    errs = []
    for rtol in (1e-4, 1e-6, 1e-8):
        tr = integrate(g, rho0, (0.0, 200.0), SolverConfig(rel_tol=rtol, abs_tol=rtol * 1e-2), CHECKPOINTS)
        errs.append(np.max(np.abs(tr.values[1:] - ref)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-9


def test_backends_agree(params):
    pytest.importorskip("ganphotocell.numerics._kernels")
    g = build_generator(derive_rates(params), "coupled")
    a = integrate(g, PopulationState.ground(), (0.0, 200.0), checkpoints=CHECKPOINTS, backend="python")
    b = integrate(g, PopulationState.ground(), (0.0, 200.0), checkpoints=CHECKPOINTS, backend="cython")
    assert a.stats == b.stats
    assert np.max(np.abs(a.values - b.values)) <= 1e-11


def test_deterministic(params, backend):
    g = build_generator(derive_rates(params), "coupled")
    runs = [integrate(g, PopulationState.ground(), (0.0, 50.0), checkpoints=CHECKPOINTS[:15], backend=backend)
            for _ in range(2)]
    assert np.array_equal(runs[0].values, runs[1].values)


def test_newton_failure_is_reported(params, backend):
    g = build_generator(derive_rates(params), "coupled")
    with pytest.raises(NewtonDivergence):
        integrate(g, PopulationState.ground(), (0.0, 1.0), SolverConfig(max_newton_iters=1), backend=backend)


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_newton_iters=0)


# --- steady state -----------------------------------------------------------

def test_steady_absorbing_ground(params, backend):
    g = build_generator(derive_rates(params.replace(n_h=0.0)), "coupled")
    assert np.array_equal(steady_state(g, backend=backend), [0, 0, 0, 0, 1.0])


@pytest.mark.parametrize("kind", list(ModelKind))
def test_steady_is_fixed_point_and_long_time_limit(params, kind, backend):
    g = build_generator(derive_rates(params), kind)
    rho = steady_state(g, backend=backend)
    assert np.max(np.abs(g.matrix @ rho)) <= 1e-11
    assert abs(rho.sum() - 1) <= 1e-14 and rho.min() >= 0
    rates = np.abs(g.matrix[g.matrix != 0])
    t_end = 1e4 / rates.min()
    tr = integrate(g, PopulationState.ground(kind), (0.0, t_end), backend=backend)
    assert np.max(np.abs(tr.values[-1] - rho)) <= 1e-8


def test_detailed_balance(params):
    r = derive_rates(params).replace(Gamma_a_alpha=0.0, Gamma_beta_b=0.0, Gamma_load=0.0)
    g = build_generator(r, "uncoupled")
    rho = steady_state(g, PopulationState.ground(ModelKind.UNCOUPLED).values)
    assert rho[0] / rho[4] == pytest.approx(r.n_h / (1 + r.n_h), rel=1e-10)


def test_degenerate_kernel(params):
    r = derive_rates(params).replace(gamma_x=0.0, Gamma_x2_alpha=0.0)
    g = build_generator(r, "coupled")
    assert len(closed_classes(g.matrix)) == 2
    with pytest.raises(DegenerateKernel) as exc:
        steady_state(g)
    assert exc.value.dimension == 2
    # from the ground state only the bright manifold is reachable
    rho = steady_state(g, PopulationState.ground().values)
    assert rho[1] == 0.0 and np.max(np.abs(g.matrix @ rho)) <= 1e-11


def test_generator_detection_and_reduction(params, rng):
    from ganphotocell.numerics import is_generator, reduce_generator
    A = build_generator(derive_rates(params), "coupled").matrix
    assert is_generator(A) and not is_generator(np.diag([-1.0, -2.0]))
    v = rng.random(5)
    B = reduce_generator(A, v.sum())
    z = np.append(v[:-1], 1.0)
    assert np.allclose((B @ z)[:-1], (A @ v)[:-1], rtol=1e-12, atol=1e-9)
    assert np.all(B[-1] == 0.0)


def test_conserved_and_plain_paths_agree(params):
    A = build_generator(derive_rates(params), "uncoupled").matrix
    v = PopulationState.ground(ModelKind.UNCOUPLED).values
    a = matrix_exponential_apply(A, 0.5, v, conserve=False)
    b = matrix_exponential_apply(A, 0.5, v, conserve=True)
    assert np.max(np.abs(a - b)) <= 1e-12
    ta = integrate(A, v, (0.0, 0.5), conserve=False)
    tb = integrate(A, v, (0.0, 0.5), conserve=True)
    assert np.max(np.abs(ta.values - tb.values)) <= 1e-9


def test_long_horizon_integration(params, backend):
    # steps of ~1e5 ns against rates of ~1e6 per ns
    g = build_generator(derive_rates(params.replace(Gamma_load=1e-3)), "coupled")
    tr = integrate(g, PopulationState.ground(), (0.0, 1e7), backend=backend)
    assert tr.trace_drift() <= 1e-12
    assert np.max(np.abs(tr.values[-1] - steady_state(g))) <= 1e-8
