"""Physical constants used throughout the receiver model.

CODATA values come from :mod:`scipy.constants`. The free-space impedance is
pinned to 377 ohm rather than the CODATA 376.73 ohm so that link-budget
arithmetic matches the nominal radar model.
"""

from dataclasses import dataclass

import scipy.constants as sc


@dataclass(frozen=True)
class PhysicalConstants:
    """Immutable bundle of SI constants.

    Attributes:
        hbar: Reduced Planck constant [J s]
        epsilon0: Vacuum permittivity [F/m]
        electron_charge: Elementary charge q [C]
        bohr_radius: Bohr radius a0 [m]
        boltzmann: Boltzmann constant kB [J/K]
        light_speed: Speed of light c [m/s]
        free_space_impedance: Z [ohm]
    """

    hbar: float = sc.hbar
    epsilon0: float = sc.epsilon_0
    electron_charge: float = sc.e
    bohr_radius: float = sc.physical_constants["Bohr radius"][0]
    boltzmann: float = sc.k
    light_speed: float = 299792458.0
    free_space_impedance: float = 377.0

    @property
    def ea0(self) -> float:
        """Atomic unit of dipole moment e*a0 [C m]."""
        return self.electron_charge * self.bohr_radius


CONSTANTS = PhysicalConstants()
