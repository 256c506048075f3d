"""Radar link budget, photodetector noise and receiver SNRs.

Two receivers see the same echo:

* the Rydberg receiver, whose output is the APD photocurrent
  M * R * C * A2 * cos(...) buried in shot + thermal noise;
* a classical dipole-antenna receiver limited by kB * Ts * Be.

Both SNRs share the R^-4 factor of the monostatic radar equation, so their
ratio does not depend on range.
"""

import math
from dataclasses import dataclass

from .constants import CONSTANTS, PhysicalConstants
from .errors import DomainError

# APD shot noise scales as M^2 * F(M) with excess noise F(M) = M^0.3.
APD_NOISE_EXPONENT = 2.3

FOUR_PI_SQ = (4.0 * math.pi) ** 2


def _positive(obj, *names):
    for name in names:
        value = getattr(obj, name)
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"{type(obj).__name__}.{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class RadarLink:
    """Transmitter, target and aperture parameters.

    Attributes:
        transmit_power: Pt [W]
        transmit_gain: Gt, linear
        rcs: Radar cross section sigma [m^2]
        sensor_area: Rydberg sensor aperture Ae [m^2]
        classical_antenna_area: Effective area of the dipole receiver As [m^2]
        carrier_f1: Transmit / LO frequency [Hz]
    """

    transmit_power: float
    transmit_gain: float
    rcs: float
    sensor_area: float
    classical_antenna_area: float
    carrier_f1: float

    def __post_init__(self):
        _positive(self, "transmit_power", "transmit_gain", "rcs", "sensor_area",
                  "classical_antenna_area", "carrier_f1")
        if not 1e6 <= self.carrier_f1 <= 1e12:
            raise DomainError(f"carrier_f1 = {self.carrier_f1!r} Hz is outside [1 MHz, 1 THz]")


@dataclass(frozen=True)
class ReceiverNoise:
    """APD front end of the Rydberg receiver.

    Attributes:
        apd_gain: Avalanche multiplication M (>= 1)
        responsivity: R [A/W]
        load_resistance: Rl [ohm]
        dc_optical_power: DC probe power on the APD P0 [W]
        dark_current: Id [A]
        temperature: Operating temperature T [K]
        bandwidth: Electrical bandwidth Be [Hz]
    """

    apd_gain: float
    responsivity: float
    load_resistance: float
    dc_optical_power: float
    dark_current: float
    temperature: float
    bandwidth: float

    def __post_init__(self):
        _positive(self, "apd_gain", "responsivity", "load_resistance", "dc_optical_power",
                  "temperature", "bandwidth")
        if self.apd_gain < 1:
            raise DomainError(f"ReceiverNoise.apd_gain must be >= 1, got {self.apd_gain!r}")
        if not (math.isfinite(self.dark_current) and self.dark_current >= 0):
            raise DomainError(f"ReceiverNoise.dark_current must be >= 0, got {self.dark_current!r}")

    @property
    def dc_current(self) -> float:
        """Primary (unmultiplied) DC photocurrent I0 = R * P0 [A]."""
        return self.responsivity * self.dc_optical_power


@dataclass(frozen=True)
class ClassicalReceiver:
    """Dipole-antenna receiver characterised by its system noise temperature.

    Attributes:
        system_temperature: Ts [K]
        bandwidth: Noise bandwidth [Hz], the same Be as the APD chain
    """

    system_temperature: float
    bandwidth: float

    def __post_init__(self):
        _positive(self, "system_temperature", "bandwidth")


def _check_range(range_r):
    if not range_r > 0:
        raise DomainError(f"range must be > 0, got {range_r!r}")


def received_power(link: RadarLink, range_r) -> float:
    """Echo power captured by the sensor aperture, Pt Gt sigma Ae / ((4pi)^2 R^4) [W]."""
    _check_range(range_r)
    return link.transmit_power * link.transmit_gain * link.rcs * link.sensor_area / (FOUR_PI_SQ * range_r**4)


def echo_field_amplitude(p_r, sensor_area, consts: PhysicalConstants = CONSTANTS) -> float:
    """Field amplitude A2 = sqrt(2 Z P_r / Ae) of an echo carrying power P_r [V/m]."""
    if p_r < 0:
        raise DomainError("received power must be >= 0")
    if sensor_area <= 0:
        raise DomainError("sensor area must be > 0")
    return math.sqrt(2.0 * consts.free_space_impedance * p_r / sensor_area)


def incident_power(a2, sensor_area, consts: PhysicalConstants = CONSTANTS) -> float:
    """Forward relation P_r = A2^2 Ae / (2 Z) [W]."""
    return a2**2 * sensor_area / (2.0 * consts.free_space_impedance)


def shot_noise_variance(dc_current, dark_current, apd_gain, bandwidth,
                        consts: PhysicalConstants = CONSTANTS) -> float:
    """Multiplied shot noise 2 q (I0 + Id) M^2.3 Be [A^2]."""
    return (2.0 * consts.electron_charge * (dc_current + dark_current)
            * apd_gain**APD_NOISE_EXPONENT * bandwidth)


def thermal_noise_variance(temperature, bandwidth, load_resistance,
                           consts: PhysicalConstants = CONSTANTS) -> float:
    """Johnson noise of the load, 4 kB T Be / Rl [A^2]."""
    return 4.0 * consts.boltzmann * temperature * bandwidth / load_resistance


def noise_variance(rx: ReceiverNoise, consts: PhysicalConstants = CONSTANTS) -> float:
    """Total APD output noise variance sigma_z^2 [A^2]."""
    return (shot_noise_variance(rx.dc_current, rx.dark_current, rx.apd_gain, rx.bandwidth, consts)
            + thermal_noise_variance(rx.temperature, rx.bandwidth, rx.load_resistance, consts))


def signal_amplitude(a2, c_gain, rx: ReceiverNoise) -> float:
    """Peak AC photocurrent alpha = M R C A2 [A]."""
    return rx.apd_gain * rx.responsivity * c_gain * a2


def quantum_snr_from_amplitude(a2, c_gain, rx: ReceiverNoise,
                               consts: PhysicalConstants = CONSTANTS) -> float:
    """SNR 0.5 (M R C A2)^2 / sigma_z^2 of the Rydberg receiver."""
    if a2 < 0:
        raise DomainError("echo amplitude must be >= 0")
    return 0.5 * signal_amplitude(a2, c_gain, rx) ** 2 / noise_variance(rx, consts)


def quantum_snr(link: RadarLink, rx: ReceiverNoise, c_gain, range_r,
                consts: PhysicalConstants = CONSTANTS) -> float:
    """Rydberg receiver SNR at target range R, in closed form."""
    _check_range(range_r)
    mrc = rx.apd_gain * rx.responsivity * c_gain
    field_sq = (2.0 * consts.free_space_impedance * link.transmit_power * link.transmit_gain * link.rcs
                / (FOUR_PI_SQ * range_r**4))
    return 0.5 * mrc**2 * field_sq / noise_variance(rx, consts)


def classical_snr(link: RadarLink, cls: ClassicalReceiver, range_r,
                  consts: PhysicalConstants = CONSTANTS) -> float:
    """Dipole receiver SNR Pt Gt sigma As / ((4pi)^2 R^4 kB Ts Be)."""
    _check_range(range_r)
    return (link.transmit_power * link.transmit_gain * link.rcs * link.classical_antenna_area
            / (FOUR_PI_SQ * range_r**4 * consts.boltzmann * cls.system_temperature * cls.bandwidth))


def doppler_shift(velocity, carrier_f1, consts: PhysicalConstants = CONSTANTS) -> float:
    """Beat (intermediate) frequency 2 v f1 / c [Hz]; positive for v > 0."""
    if abs(velocity) >= consts.light_speed:
        raise DomainError("|velocity| must be below the speed of light")
    return 2.0 * velocity * carrier_f1 / consts.light_speed


def round_trip_delay(range_r, consts: PhysicalConstants = CONSTANTS) -> float:
    """Round-trip delay 2 R / c [s]."""
    if range_r < 0:
        raise DomainError("range must be >= 0")
    return 2.0 * range_r / consts.light_speed


def to_db(x) -> float:
    """Power ratio in dB."""
    return 10.0 * math.log10(x)
