"""Optical response of the four-level ladder atom and the LO-dressed gain.

Level scheme |1> -> |2> -> |3> -> |4>: probe on 1-2, coupling on 2-3 and the
RF/LO field on the Rydberg pair 3-4. Every Rabi frequency and decay rate is
angular (rad/s). Conversions from "2 pi x MHz" notation belong to the
configuration layer.

The gain constant C maps echo field amplitude (V/m) to probe power
modulation (W)::

    C     = kappa * d_rf / hbar
    kappa = alpha * P0 * kappa_p
    alpha = k_p * L * C0 * Abar
"""

import math
from dataclasses import dataclass, fields

from .constants import CONSTANTS, PhysicalConstants
from .errors import DomainError


@dataclass(frozen=True)
class AtomicSystem:
    """Parameters of the vapor-cell sensor.

    Attributes:
        gamma2: Decay rate of the intermediate state |2> [rad/s]
        omega_p: Probe Rabi frequency [rad/s]
        omega_c: Coupling Rabi frequency [rad/s]
        omega_lo: LO Rabi frequency on the Rydberg transition [rad/s]
        dipole_12: Probe transition dipole moment [C m]
        dipole_rf: Rydberg RF transition dipole moment [C m]
        density_n0: Atomic number density [1/m^3]
        cell_length: Vapor-cell length [m]
        probe_wavelength: Probe wavelength [m]
        probe_dc_power: DC probe power at the detector [W]
    """

    gamma2: float
    omega_p: float
    omega_c: float
    omega_lo: float
    dipole_12: float
    dipole_rf: float
    density_n0: float
    cell_length: float
    probe_wavelength: float
    probe_dc_power: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"AtomicSystem.{f.name} must be finite and > 0, got {value!r}")

    @property
    def probe_wavenumber(self) -> float:
        """k_p = 2 pi / lambda_p [rad/m]."""
        return 2.0 * math.pi / self.probe_wavelength


@dataclass(frozen=True)
class GainChain:
    """Signed intermediates of the optical gain computation (SI units)."""

    c0: float
    abar: float
    gamma_eit: float
    lambda_lo: float
    kappa_p: float
    alpha: float
    kappa: float
    c_signed: float

    @property
    def c_gain(self) -> float:
        """Magnitude of C [W per V/m]."""
        return abs(self.c_signed)


def rabi_from_field(dipole, field_amplitude, consts: PhysicalConstants = CONSTANTS):
    """Angular Rabi frequency Omega = d * E / hbar.

    Args:
        dipole: Transition dipole moment [C m]
        field_amplitude: Field amplitude [V/m]

    Returns:
        Rabi frequency [rad/s]
    """
    if dipole < 0 or field_amplitude < 0:
        raise DomainError("dipole and field amplitude must be non-negative")
    return dipole * field_amplitude / consts.hbar


def field_from_rabi(dipole, omega, consts: PhysicalConstants = CONSTANTS):
    """Inverse of :func:`rabi_from_field`: E = hbar * Omega / d [V/m]."""
    if dipole <= 0 or omega < 0:
        raise DomainError("dipole must be > 0 and omega >= 0")
    return consts.hbar * omega / dipole


def gaussian_beam_intensity(power, waist_radius):
    """Peak intensity 2P / (pi w^2) of a Gaussian beam with 1/e^2 radius w."""
    if power < 0 or waist_radius <= 0:
        raise DomainError("power must be >= 0 and waist radius > 0")
    return 2.0 * power / (math.pi * waist_radius**2)


def field_from_intensity(intensity, consts: PhysicalConstants = CONSTANTS):
    """Optical field amplitude sqrt(2 I / (c eps0)) [V/m]."""
    if intensity < 0:
        raise DomainError("intensity must be >= 0")
    return math.sqrt(2.0 * intensity / (consts.light_speed * consts.epsilon0))


def c0_coefficient(sys: AtomicSystem, consts: PhysicalConstants = CONSTANTS) -> float:
    """Susceptibility scale C0 so that chi = C0 * rho21.

    The probe dipole enters squared (one factor from the polarization, one
    from converting Omega_p back to the probe field), which keeps C0
    dimensionless.
    """
    return -2.0 * sys.density_n0 * sys.dipole_12**2 / (consts.epsilon0 * consts.hbar * sys.omega_p)


def im_rho21_resonant(omega_p, omega_c, omega_rf, delta_c, gamma2) -> float:
    """Imaginary part of the probe coherence at probe and RF resonance.

    Im rho21 = -Op g / (Oc^4 / (8 (Orf^2/(4 Dc) + Dc)^2) + 2 g^2)

    The removable singularities at ``delta_c == 0`` are resolved by
    continuity: 0 without RF (EIT dark resonance), -Op / (2 g) with RF.
    """
    if omega_p <= 0 or omega_c <= 0 or gamma2 <= 0:
        raise DomainError("omega_p, omega_c and gamma2 must be > 0")
    if omega_rf < 0:
        raise DomainError("omega_rf must be >= 0")
    if delta_c == 0:
        return 0.0 if omega_rf == 0 else -omega_p / (2.0 * gamma2)
    shift = omega_rf**2 / (4.0 * delta_c) + delta_c
    # square the ratio, not shift: shift**2 can underflow to 0 for tiny detunings
    ratio = omega_c * omega_c / shift
    inner = ratio * ratio / 8.0 + 2.0 * gamma2 * gamma2
    return -omega_p * gamma2 / inner


def probe_transmission(p_in, sys: AtomicSystem, im_chi) -> float:
    """Transmitted probe power P_in * exp(-k_p L Im chi) [W]."""
    if p_in < 0:
        raise DomainError("p_in must be >= 0")
    if im_chi < 0:
        raise DomainError("im_chi < 0 describes gain, which is not modeled")
    return p_in * math.exp(-sys.probe_wavenumber * sys.cell_length * im_chi)


def lambda_ratio(a, b) -> float:
    """Lorentzian ratio b^2 / (a^2 + b^2)."""
    if a == 0 and b == 0:
        raise DomainError("lambda_ratio undefined for a = b = 0")
    return b**2 / (a**2 + b**2)


def eit_linewidth_gamma(omega_p, omega_c, gamma2) -> float:
    """EIT linewidth Op * sqrt(2 (Oc^2 + Op^2) / (2 Op^2 + g^2)) [rad/s]."""
    if omega_p <= 0 or omega_c < 0 or gamma2 <= 0:
        raise DomainError("omega_p, gamma2 must be > 0 and omega_c >= 0")
    return omega_p * math.sqrt(2.0 * (omega_c**2 + omega_p**2) / (2.0 * omega_p**2 + gamma2**2))


def kappa_p_slope(omega_lo, gamma_eit) -> float:
    """Derivative of lambda_ratio(omega_lo, gamma_eit) w.r.t. omega_lo [s/rad]."""
    if gamma_eit <= 0:
        raise DomainError("gamma_eit must be > 0")
    return -2.0 * omega_lo * gamma_eit**2 / (omega_lo**2 + gamma_eit**2) ** 2


def dc_absorption_abar(gamma2, omega_p) -> float:
    """Steady-state absorption factor g Op / (g^2 + 2 Op^2)."""
    if gamma2 <= 0 or omega_p < 0:
        raise DomainError("gamma2 must be > 0 and omega_p >= 0")
    return gamma2 * omega_p / (gamma2**2 + 2.0 * omega_p**2)


def optical_gain_chain(sys: AtomicSystem, consts: PhysicalConstants = CONSTANTS) -> GainChain:
    """Evaluate every intermediate of the gain constant, keeping signs."""
    c0 = c0_coefficient(sys, consts)
    abar = dc_absorption_abar(sys.gamma2, sys.omega_p)
    gamma_eit = eit_linewidth_gamma(sys.omega_p, sys.omega_c, sys.gamma2)
    kappa_p = kappa_p_slope(sys.omega_lo, gamma_eit)
    alpha = sys.probe_wavenumber * sys.cell_length * c0 * abar
    kappa = alpha * sys.probe_dc_power * kappa_p
    return GainChain(
        c0=c0,
        abar=abar,
        gamma_eit=gamma_eit,
        lambda_lo=lambda_ratio(sys.omega_lo, gamma_eit),
        kappa_p=kappa_p,
        alpha=alpha,
        kappa=kappa,
        c_signed=kappa * sys.dipole_rf / consts.hbar,
    )


def optical_gain_c(sys: AtomicSystem, consts: PhysicalConstants = CONSTANTS) -> float:
    """Magnitude of the optical gain constant C [W per V/m]."""
    return optical_gain_chain(sys, consts).c_gain


def lo_field_amplitude(sys: AtomicSystem, consts: PhysicalConstants = CONSTANTS) -> float:
    """LO field amplitude A1 implied by the configured LO Rabi frequency [V/m]."""
    return field_from_rabi(sys.dipole_rf, sys.omega_lo, consts)
