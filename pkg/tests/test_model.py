import dataclasses

import pytest

from ganphotocell.constants import CODATA
from ganphotocell.errors import DegenerateGeometry, InvalidParams
from ganphotocell.model import DeviceParams, ModelKind, derive_rates, validate_params


def test_reference_params_valid(params):
    assert validate_params(params) == []


@pytest.mark.parametrize("field,value", [
    ("w_d", 0.0), ("dipole_fraction", 1.5), ("dipole_fraction", 0.0), ("T_a", -1.0),
    ("n_h", -1.0), ("E_star", float("nan")), ("gamma_x", "3J"), ("gamma_x", -1.0),
])
def test_violations_name_the_field(params, field, value):
    v = validate_params(params.replace(**{field: value}))
    assert [x.field for x in v] == [field]


def test_excited_level_below_barrier(params):
    v = validate_params(params.replace(E_1b=6.0))
    assert [x.field for x in v] == ["E_1b"]


def test_derive_rates_reference(params):
    r = derive_rates(params)
    assert r.J == pytest.approx(0.2074, abs=5e-5)
    assert r.mu_len == pytest.approx(2.16)
    assert r.gamma_h == pytest.approx(364.816, rel=1e-5)
    assert r.gamma_x == pytest.approx(2 * r.J / CODATA.hbar, rel=1e-14)
    assert r.E_x1 - r.E_x2 == pytest.approx(2 * r.J, abs=1e-14)
    assert r.E_x1 == params.E_1b
    assert r.Gamma_beta_b == r.Gamma_a_alpha
    assert r.Gamma_x1_alpha > r.Gamma_a_alpha > r.Gamma_x2_alpha > 0
    assert r.n_h == 60000.0 and r.Gamma_load == 0.08 and r.chi == 0.2


def test_derive_rates_is_model_independent(params):
    assert derive_rates(params, ModelKind.COUPLED) == derive_rates(params, ModelKind.UNCOUPLED)


def test_cubic_law_in_spacing(params):
    J1 = derive_rates(params).J
    J2 = derive_rates(params.replace(d_perp=3.0)).J
    assert J2 == pytest.approx(J1 / 8, rel=1e-14)


def test_explicit_gamma_x(params):
    assert derive_rates(params.replace(gamma_x=123.0)).gamma_x == 123.0
    base = derive_rates(params).gamma_x
    assert derive_rates(params.replace(gamma_x_multiplier=4.0)).gamma_x == pytest.approx(4 * base)


def test_invalid_params_raise(params):
    with pytest.raises(InvalidParams) as exc:
        derive_rates(params.replace(w_d=-1.0))
    assert exc.value.violations[0].field == "w_d"


def test_dark_level_below_cbm_is_degenerate(params):
    with pytest.raises(DegenerateGeometry):
        derive_rates(params.replace(d_perp=1.0))


def test_params_frozen(params):
    with pytest.raises(dataclasses.FrozenInstanceError):
        params.w_d = 3.0
    assert isinstance(params.replace(w_d=3.0), DeviceParams)


def test_state_labels():
    assert ModelKind.COUPLED.state_labels == ("x1", "x2", "alpha", "beta", "b")
    assert ModelKind.UNCOUPLED.state_labels == ("a1", "a2", "alpha", "beta", "b")
