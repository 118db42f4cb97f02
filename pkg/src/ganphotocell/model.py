"""Device parameters, model variants and the derived rate set."""
import enum
import math
import dataclasses
from dataclasses import dataclass, fields

from . import rates, tunneling
from .constants import CODATA
from .errors import DegenerateGeometry, InvalidParams

GAMMA_X_RULE = "2J"


class ModelKind(enum.Enum):
    UNCOUPLED = "uncoupled"
    COUPLED = "coupled"

    @property
    def excited_labels(self):
        return ("a1", "a2") if self is ModelKind.UNCOUPLED else ("x1", "x2")

    @property
    def state_labels(self):
        return self.excited_labels + ("alpha", "beta", "b")


@dataclass(frozen=True)
class DeviceParams:
    """Material, geometry and environment of the two-dot photocell.

    Defaults reproduce the GaN/AlGaN reference device with a 0.5 nm barrier
    and 1.5 nm interdot spacing. `E_star` (electron energy above the dot-centre
    CBM used for tunneling) and the unit of `Gamma_load` (1/ns) are
    conventions of this package, not measured values.
    """

    E_g: float = 3.51
    delta_E_c: float = 2.0
    delta_E_v: float = 0.7
    m_e_eff: float = 0.2
    m_h_eff: float = 1.0
    eps_r: float = 9.6
    w_d: float = 2.7
    F_d: float = 0.54
    F_br: float = 0.57
    chi: float = 0.20
    T_a: float = 300.0
    E_1b: float = 3.25
    n_h: float = 60000.0
    w_br: float = 0.5
    d_perp: float = 1.5
    dipole_fraction: float = 0.8
    E_star: float = 0.5
    Gamma_load: float = 0.08
    gamma_x: object = GAMMA_X_RULE  # "2J" or an explicit rate in 1/ns
    gamma_x_multiplier: float = 1.0

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class Violation:
    field: str
    reason: str


_POSITIVE = ("E_g", "delta_E_c", "delta_E_v", "m_e_eff", "m_h_eff", "eps_r", "w_d",
             "F_d", "F_br", "T_a", "E_1b", "d_perp")


def validate_params(p):
    """List every violated parameter invariant; empty when `p` is valid."""
    out = []
    for name in _POSITIVE:
        value = getattr(p, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            out.append(Violation(name, f"must be a positive finite number, got {value!r}"))
    for name in ("chi", "n_h", "E_star", "Gamma_load", "gamma_x_multiplier", "w_br"):
        value = getattr(p, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
            out.append(Violation(name, f"must be a non-negative finite number, got {value!r}"))
    if not (0 < p.dipole_fraction <= 1):
        out.append(Violation("dipole_fraction", f"must lie in (0, 1], got {p.dipole_fraction!r}"))
    if isinstance(p.gamma_x, str):
        if p.gamma_x != GAMMA_X_RULE:
            out.append(Violation("gamma_x", f"rule must be {GAMMA_X_RULE!r}, got {p.gamma_x!r}"))
    elif not (isinstance(p.gamma_x, (int, float)) and math.isfinite(p.gamma_x) and p.gamma_x >= 0):
        out.append(Violation("gamma_x", f"explicit rate must be non-negative, got {p.gamma_x!r}"))
    if not out and p.E_1b >= p.E_g + p.delta_E_c:
        out.append(Violation("E_1b", "excited level must lie below the barrier top E_g + delta_E_c"))
    return out


@dataclass(frozen=True)
class DerivedRates:
    """Every energy (eV) and rate (1/ns) entering the master equations."""

    J: float
    mu_len: float
    gamma_h: float
    gamma_x: float
    n_h: float
    n_x: float
    Gamma_x1_alpha: float
    Gamma_x2_alpha: float
    Gamma_a_alpha: float
    Gamma_beta_b: float
    Gamma_load: float
    chi: float
    E_x1: float
    E_x2: float
    E_alpha_beta: float
    T_a: float = 300.0

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def resolve_gamma_x(p, J, constants=CODATA):
    if isinstance(p.gamma_x, str):
        return p.gamma_x_multiplier * 2.0 * J / constants.hbar
    return float(p.gamma_x)


def derive_rates(p, kind=ModelKind.COUPLED, constants=CODATA):
    """Assemble the rate set for `p`.

    The rate set does not depend on `kind`; both variants read what they
    need from it. The excited level ``E_x1`` is pinned to ``E_1b`` and the
    dark level sits ``2J`` below. Tunneling from ``x1``/``x2`` uses
    ``E_star +/- J``; hole escape reuses the electron rate at ``E_star``.
    """
    violations = validate_params(p)
    if violations:
        raise InvalidParams(violations)
    mu_len = p.dipole_fraction * p.w_d
    J = rates.coupling_strength(mu_len, p.eps_r, p.d_perp, constants)
    if p.E_star - J < 0:
        raise DegenerateGeometry(
            f"E_star - J = {p.E_star - J:.6g} eV < 0: dark-state electron lies below the CBM")
    E_x1 = p.E_1b
    E_x2 = E_x1 - 2.0 * J
    gamma_h = rates.pumping_rate(E_x1, mu_len, constants)
    n_x = rates.planck_occupation(E_x1 - E_x2, p.T_a, constants)
    Gamma_a = tunneling.tunneling_rate(p.E_star, p, constants=constants)
    return DerivedRates(
        J=J,
        mu_len=mu_len,
        gamma_h=gamma_h,
        gamma_x=resolve_gamma_x(p, J, constants),
        n_h=float(p.n_h),
        n_x=n_x,
        Gamma_x1_alpha=tunneling.tunneling_rate(p.E_star + J, p, constants=constants),
        Gamma_x2_alpha=tunneling.tunneling_rate(p.E_star - J, p, constants=constants),
        Gamma_a_alpha=Gamma_a,
        Gamma_beta_b=Gamma_a,
        Gamma_load=float(p.Gamma_load),
        chi=float(p.chi),
        E_x1=E_x1,
        E_x2=E_x2,
        E_alpha_beta=p.E_g,
        T_a=float(p.T_a),
    )
