"""Experiment configuration: a flat, sectioned INI document in SI units.

Every key carries its unit in the name. Angular frequencies are written as
``*_mhz_times_2pi`` (value v means 2 pi x v MHz) and converted to rad/s on
load. Missing keys take the nominal values in :data:`DEFAULTS`; unknown keys
are rejected. See ``README.md`` for the full schema.
"""

import configparser
import math
import re
from dataclasses import dataclass, field, replace
from typing import Optional

from .atomic import AtomicSystem
from .constants import CONSTANTS, PhysicalConstants
from .errors import ConfigError, DomainError
from .link import ClassicalReceiver, RadarLink, ReceiverNoise, doppler_shift

DEFAULTS = {
    "atomic": {
        "gamma2_mhz_times_2pi": 5.2,
        "omega_p_mhz_times_2pi": 4.75,
        "omega_c_mhz_times_2pi": 1.66,
        "omega_lo_mhz_times_2pi": 0.6,
        "dipole_12_ea0": 2.5,
        "dipole_rf_ea0": 551.35,
        "density_per_m3": 4.89e16,
        "cell_length_m": 0.01,
        "probe_wavelength_m": 852.35e-9,
        "probe_dc_power_w": 20.7e-6,
        "optical_gain_override_w_per_v_per_m": None,
    },
    "link": {
        "transmit_power_w": 10.0,
        "transmit_gain_db": 10.0,
        "rcs_m2": 1.0,
        "sensor_area_m2": 1e-4,
        "classical_antenna_area_m2": 1e-4,
        "carrier_hz": 29.539e9,
    },
    "noise": {
        "apd_gain": 50.0,
        "responsivity_a_per_w": 0.6,
        "load_resistance_ohm": 1000.0,
        "dc_optical_power_w": 10e-6,
        "dark_current_a": 1e-9,
        "temperature_k": 300.0,
        "bandwidth_hz": 1e6,
    },
    "classical": {
        "system_temperature_k": 1000.0,
    },
    "sweep": {
        "r_min_m": 100.0,
        "r_max_m": 10000.0,
        "points": 40,
        "log_spacing": True,
    },
    "montecarlo": {
        "trials": 500,
        "master_seed": 20260101,
        "target_velocity_mps": 100.0,
        "sample_rate_hz": 60000.0,
        "num_samples": 2048,
        "phase_mode": "uniform",
        "guard_fraction": 0.02,
        "zero_pad": 4,
        "noiseless": False,
    },
    "output": {
        "path": "-",
        "format": "csv",
    },
}

_INT_KEYS = {("sweep", "points"), ("montecarlo", "trials"), ("montecarlo", "master_seed"),
             ("montecarlo", "num_samples"), ("montecarlo", "zero_pad")}
_BOOL_KEYS = {("sweep", "log_spacing"), ("montecarlo", "noiseless")}
_STR_KEYS = {("montecarlo", "phase_mode"), ("output", "path"), ("output", "format")}
_CHOICES = {("montecarlo", "phase_mode"): ("uniform", "deterministic"), ("output", "format"): ("csv",)}
# Keys allowed to be zero or negative; everything else numeric must be > 0.
_NONNEG_KEYS = {("noise", "dark_current_a"), ("montecarlo", "master_seed"), ("montecarlo", "guard_fraction")}
_SIGNED_KEYS = {("montecarlo", "target_velocity_mps"), ("link", "transmit_gain_db")}
_OPTIONAL_KEYS = {("atomic", "optical_gain_override_w_per_v_per_m")}


@dataclass(frozen=True)
class SweepSettings:
    r_min: float
    r_max: float
    points: int
    log_spacing: bool


@dataclass(frozen=True)
class MonteCarloSettings:
    trials: int
    master_seed: int
    target_velocity: float
    sample_rate: float
    num_samples: int
    phase_mode: str
    guard_fraction: float
    zero_pad: int
    noiseless: bool


@dataclass(frozen=True)
class OutputSettings:
    path: str
    format: str


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment configuration with derived physical records."""

    atomic: AtomicSystem
    link: RadarLink
    noise: ReceiverNoise
    classical: ClassicalReceiver
    sweep: SweepSettings
    montecarlo: MonteCarloSettings
    output: OutputSettings
    optical_gain_override: Optional[float] = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def with_montecarlo(self, **changes) -> "ExperimentConfig":
        """Copy with some Monte Carlo settings replaced."""
        return replace(self, montecarlo=replace(self.montecarlo, **changes))

    def with_sweep(self, **changes) -> "ExperimentConfig":
        """Copy with some sweep settings replaced."""
        return replace(self, sweep=replace(self.sweep, **changes))


def _key_lines(text):
    """Map (section, key) to the 1-based line where the key is defined."""
    lines = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        m = re.match(r"^\[([^\]]+)\]$", stripped)
        if m:
            section = m.group(1).strip().lower()
            lines[(section, None)] = lineno
            continue
        m = re.match(r"^([^=:#;\s][^=:]*?)\s*[=:]", stripped)
        if m and section is not None:
            lines[(section, m.group(1).strip().lower())] = lineno
    return lines


def _convert(section, key, raw, line):
    name = f"{section}.{key}"
    if (section, key) in _STR_KEYS:
        value = raw.strip()
        choices = _CHOICES.get((section, key))
        if choices and value not in choices:
            raise ConfigError(f"must be one of {', '.join(choices)}, got {value!r}", name, line)
        return value
    if (section, key) in _BOOL_KEYS:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}", name, line)
    if (section, key) in _OPTIONAL_KEYS and raw.strip().lower() in ("", "none"):
        return None
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"expected a number, got {raw!r}", name, line) from None
    if not math.isfinite(value):
        raise ConfigError(f"must be finite, got {raw!r}", name, line)
    if (section, key) in _INT_KEYS:
        if value != int(value):
            raise ConfigError(f"expected an integer, got {raw!r}", name, line)
        value = int(value)
    if (section, key) in _SIGNED_KEYS:
        return value
    if (section, key) in _NONNEG_KEYS:
        if value < 0:
            raise ConfigError(f"must be >= 0, got {raw!r}", name, line)
    elif value <= 0:
        raise ConfigError(f"must be > 0, got {raw!r}", name, line)
    return value


def parse_config(text: str, consts: PhysicalConstants = CONSTANTS) -> ExperimentConfig:
    """Parse and validate a configuration document.

    Args:
        text: INI-style document; may be empty

    Returns:
        ExperimentConfig with defaults filled in

    Raises:
        ConfigError: unknown section or key, bad value, or an inconsistent
            combination (e.g. Nyquist violation); the message names the
            field and, where possible, the line
    """
    parser = configparser.ConfigParser(interpolation=None, default_section="__defaults_unused__")
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed document: {exc}", line=getattr(exc, "lineno", None)) from None
    lines = _key_lines(text)

    values = {sec: dict(keys) for sec, keys in DEFAULTS.items()}
    for section in parser.sections():
        sec = section.strip().lower()
        if sec not in DEFAULTS:
            raise ConfigError(f"unknown section [{section}]", sec, lines.get((sec, None)))
        for key, raw in parser.items(section):
            line = lines.get((sec, key))
            if key not in DEFAULTS[sec]:
                raise ConfigError("unknown key", f"{sec}.{key}", line)
            values[sec][key] = _convert(sec, key, raw, line)
    return build_config(values, consts, lines)


def build_config(values, consts: PhysicalConstants = CONSTANTS, lines=None) -> ExperimentConfig:
    """Assemble an :class:`ExperimentConfig` from already-typed section values."""
    lines = lines or {}

    def fail(msg, section, key):
        raise ConfigError(msg, f"{section}.{key}", lines.get((section, key)))

    two_pi_mhz = 2.0 * math.pi * 1e6
    a = values["atomic"]
    try:
        atomic = AtomicSystem(
            gamma2=a["gamma2_mhz_times_2pi"] * two_pi_mhz,
            omega_p=a["omega_p_mhz_times_2pi"] * two_pi_mhz,
            omega_c=a["omega_c_mhz_times_2pi"] * two_pi_mhz,
            omega_lo=a["omega_lo_mhz_times_2pi"] * two_pi_mhz,
            dipole_12=a["dipole_12_ea0"] * consts.ea0,
            dipole_rf=a["dipole_rf_ea0"] * consts.ea0,
            density_n0=a["density_per_m3"],
            cell_length=a["cell_length_m"],
            probe_wavelength=a["probe_wavelength_m"],
            probe_dc_power=a["probe_dc_power_w"],
        )
    except DomainError as exc:
        raise ConfigError(str(exc), "atomic") from None

    lk = values["link"]
    if not 1e6 <= lk["carrier_hz"] <= 1e12:
        fail("carrier must lie in [1 MHz, 1 THz]", "link", "carrier_hz")
    link = RadarLink(
        transmit_power=lk["transmit_power_w"],
        transmit_gain=10.0 ** (lk["transmit_gain_db"] / 10.0),
        rcs=lk["rcs_m2"],
        sensor_area=lk["sensor_area_m2"],
        classical_antenna_area=lk["classical_antenna_area_m2"],
        carrier_f1=lk["carrier_hz"],
    )

    nz = values["noise"]
    if nz["apd_gain"] < 1:
        fail("APD gain must be >= 1", "noise", "apd_gain")
    noise = ReceiverNoise(
        apd_gain=nz["apd_gain"],
        responsivity=nz["responsivity_a_per_w"],
        load_resistance=nz["load_resistance_ohm"],
        dc_optical_power=nz["dc_optical_power_w"],
        dark_current=nz["dark_current_a"],
        temperature=nz["temperature_k"],
        bandwidth=nz["bandwidth_hz"],
    )
    classical = ClassicalReceiver(values["classical"]["system_temperature_k"], nz["bandwidth_hz"])

    sw = values["sweep"]
    if not sw["r_min_m"] < sw["r_max_m"]:
        fail("r_min_m must be smaller than r_max_m", "sweep", "r_max_m")
    if sw["points"] < 2:
        fail("need at least 2 points", "sweep", "points")
    sweep = SweepSettings(sw["r_min_m"], sw["r_max_m"], sw["points"], sw["log_spacing"])

    mc = values["montecarlo"]
    if mc["trials"] < 1:
        fail("need at least 1 trial", "montecarlo", "trials")
    if mc["num_samples"] < 8:
        fail("need at least 8 samples", "montecarlo", "num_samples")
    if not mc["guard_fraction"] < 0.5:
        fail("guard_fraction must be < 0.5", "montecarlo", "guard_fraction")
    if abs(mc["target_velocity_mps"]) >= consts.light_speed:
        fail("speed must be below c", "montecarlo", "target_velocity_mps")
    beat = abs(doppler_shift(mc["target_velocity_mps"], link.carrier_f1, consts))
    if not 2.0 * beat < mc["sample_rate_hz"]:
        fail(f"Nyquist violated: beat frequency {beat:.6g} Hz needs fs > {2 * beat:.6g} Hz",
             "montecarlo", "sample_rate_hz")
    montecarlo = MonteCarloSettings(
        trials=mc["trials"],
        master_seed=mc["master_seed"],
        target_velocity=mc["target_velocity_mps"],
        sample_rate=mc["sample_rate_hz"],
        num_samples=mc["num_samples"],
        phase_mode=mc["phase_mode"],
        guard_fraction=mc["guard_fraction"],
        zero_pad=mc["zero_pad"],
        noiseless=mc["noiseless"],
    )
    output = OutputSettings(values["output"]["path"], values["output"]["format"])
    return ExperimentConfig(atomic, link, noise, classical, sweep, montecarlo, output,
                            a["optical_gain_override_w_per_v_per_m"], values)


def load_config(path, consts: PhysicalConstants = CONSTANTS) -> ExperimentConfig:
    """Read and parse a configuration file; ``None`` gives the defaults."""
    if path is None:
        return parse_config("", consts)
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), consts)


def default_config_text() -> str:
    """Render :data:`DEFAULTS` as a configuration document."""
    out = []
    for section, keys in DEFAULTS.items():
        out.append(f"[{section}]")
        for key, value in keys.items():
            if value is None:
                out.append(f"# {key} =")
            elif isinstance(value, bool):
                out.append(f"{key} = {'true' if value else 'false'}")
            else:
                out.append(f"{key} = {value}")
        out.append("")
    return "\n".join(out)
