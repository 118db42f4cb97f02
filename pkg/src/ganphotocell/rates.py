"""Closed-form optical and excitonic rates for the two-dot system."""
import math

import numpy as np

from .constants import CODATA
from .errors import DomainError, InvalidGeometry


def coupling_strength(mu_len, eps_r, d_perp, constants=CODATA):
    """Dipole-dipole coupling energy J (eV) of two parallel excitonic dipoles.

    Parameters
    ----------
    mu_len : float
        Charge-separation length of each dipole, nm.
    eps_r : float
        Relative permittivity of the host.
    d_perp : float
        Perpendicular interdot spacing, nm.
    """
    if d_perp <= 0:
        raise InvalidGeometry(f"d_perp must be positive, got {d_perp}")
    return constants.coulomb_factor * mu_len**2 / (eps_r * d_perp**3)


def eigenstate_energies(E_ab, J):
    """Energies of the symmetric and antisymmetric one-exciton states."""
    if J < 0:
        raise DomainError(f"coupling strength must be non-negative, got {J}")
    return E_ab + J, E_ab - J


def eigenstate_dipoles(mu1, mu2):
    """Transition dipole magnitudes of the symmetric and antisymmetric states.

    Accepts scalars or vectors. Equal parallel dipoles give ``(sqrt(2)|mu|, 0)``,
    the second state being dark.
    """
    mu1 = np.asarray(mu1, dtype=float)
    mu2 = np.asarray(mu2, dtype=float)
    sym = float(np.linalg.norm(np.atleast_1d(mu1 + mu2))) / math.sqrt(2.0)
    anti = float(np.linalg.norm(np.atleast_1d(mu1 - mu2))) / math.sqrt(2.0)
    return sym, anti


def pumping_rate(E_transition, mu_len, constants=CODATA):
    """Radiative rate (1/ns) between the ground and symmetric states.

    This is twice the single-dot Weisskopf-Wigner rate for a transition of
    energy `E_transition` (eV) and dipole ``e * mu_len``. With
    ``e^2 / (pi eps0) = 4 * coulomb_factor`` the SI expression reduces to
    ``8 k_c L^2 E^3 / (hbar^4 c^3)`` in eV/nm/ns units.
    """
    if E_transition <= 0:
        raise DomainError(f"transition energy must be positive, got {E_transition}")
    hbar, c = constants.hbar, constants.c
    return 8.0 * constants.coulomb_factor * mu_len**2 * E_transition**3 / (hbar**4 * c**3)


def planck_occupation(delta_E, T, constants=CODATA):
    """Bose-Einstein occupation of a mode of energy `delta_E` (eV) at `T` (K)."""
    if delta_E <= 0 or T <= 0:
        raise DomainError(f"need delta_E > 0 and T > 0, got {delta_E}, {T}")
    x = delta_E / (constants.k_B * T)
    # e^-x / (1 - e^-x) stays finite for large gaps
    return math.exp(-x) / -math.expm1(-x)
