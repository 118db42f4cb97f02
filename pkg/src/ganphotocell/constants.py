"""Physical constants in the package's working units.

Energies are in eV, lengths in nm, times in ns, temperatures in K. Every
formula in the package consumes these values; nothing is converted
anywhere else.
"""
from dataclasses import dataclass

from scipy import constants as _si


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float  # eV ns
    k_B: float  # eV / K
    coulomb_factor: float  # e^2 / (4 pi eps0), eV nm
    electron_rest_energy: float  # m_e c^2, eV
    c: float  # nm / ns

    @property
    def hbar_c(self):
        """hbar * c in eV nm."""
        return self.hbar * self.c


CODATA = PhysicalConstants(
    hbar=_si.hbar / _si.e * 1e9,
    k_B=_si.k / _si.e,
    coulomb_factor=_si.e / (4.0 * _si.pi * _si.epsilon_0) * 1e9,
    electron_rest_energy=_si.m_e * _si.c**2 / _si.e,
    # 1 m/s == 1 nm/ns
    c=_si.c,
)

HBAR = CODATA.hbar
K_B = CODATA.k_B
COULOMB_FACTOR = CODATA.coulomb_factor
ELECTRON_REST_ENERGY = CODATA.electron_rest_energy
C_LIGHT = CODATA.c
