"""Superheterodyne beat waveform and sampled APD current records.

Only the slow envelope of the LO + echo field is modeled; the carrier at f1 is
never sampled. Noise is drawn from a Philox (counter-based) generator keyed by
an integer tuple, e.g. ``(master_seed, receiver_id, range_index, trial_index)``,
so any trial can be regenerated in isolation.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ModelValidityError

# Largest echo/LO ratio for which the linearised envelope is accepted.
MAX_LINEAR_RATIO = 0.1

TWO_PI = 2.0 * math.pi


def make_rng(seed) -> np.random.Generator:
    """Deterministic generator from an int or a tuple of non-negative ints.

    The first element is the entropy, the rest form the spawn key, so
    ``make_rng((s, a, b))`` is the stream a child ``SeedSequence(s).spawn``
    tree would reach through path (a, b).
    """
    if isinstance(seed, (int, np.integer)):
        key = (int(seed),)
    else:
        key = tuple(int(k) for k in seed)
    if not key or any(k < 0 for k in key):
        raise DomainError(f"seed key must be non-empty and non-negative, got {seed!r}")
    ss = np.random.SeedSequence(entropy=key[0], spawn_key=key[1:])
    return np.random.Generator(np.random.Philox(ss))


def beat_envelope_exact(a1, a2, delta_f, phi, t):
    """Envelope sqrt(A1^2 + A2^2 + 2 A1 A2 cos(2 pi df t + phi)) of LO + echo."""
    if np.any(np.asarray(a1) < 0) or np.any(np.asarray(a2) < 0):
        raise DomainError("amplitudes must be >= 0")
    arg = a1**2 + a2**2 + 2.0 * a1 * a2 * np.cos(TWO_PI * delta_f * np.asarray(t) + phi)
    return np.sqrt(np.maximum(arg, 0.0))


def beat_envelope_linearized(a1, a2, delta_f, phi, t):
    """Strong-LO envelope A1 + A2 cos(2 pi df t + phi).

    Error against :func:`beat_envelope_exact` is at most ~A2^2 / (2 A1).
    """
    if a1 <= 0 or a2 < 0:
        raise DomainError("need a1 > 0 and a2 >= 0")
    if a2 > MAX_LINEAR_RATIO * a1:
        raise DomainError(f"a2/a1 = {a2 / a1:.3g} exceeds {MAX_LINEAR_RATIO}; linearisation invalid")
    return a1 + a2 * np.cos(TWO_PI * delta_f * np.asarray(t) + phi)


def probe_power_waveform(p0, c_gain, a2, delta_f, phi, t):
    """Probe power P0 + C A2 cos(2 pi df t + phi) at the detector [W]."""
    if p0 <= 0:
        raise DomainError("p0 must be > 0")
    swing = c_gain * a2
    if swing >= p0:
        raise ModelValidityError(f"modulation depth C*A2 = {swing:.3g} W reaches the DC power {p0:.3g} W")
    return p0 + swing * np.cos(TWO_PI * delta_f * np.asarray(t) + phi)


@dataclass(frozen=True)
class WaveformParams:
    """Parameters of one sampled beat record.

    Attributes:
        lo_amplitude: A1 [V/m]
        echo_amplitude: A2 [V/m]
        beat_freq: Delta f [Hz]
        phase: phi in [0, 2 pi) [rad]
        sample_rate: fs [Hz]
        num_samples: N
        signal_amplitude: alpha = M R C A2 [A]
    """

    lo_amplitude: float
    echo_amplitude: float
    beat_freq: float
    phase: float
    sample_rate: float
    num_samples: int
    signal_amplitude: float

    def __post_init__(self):
        if not self.lo_amplitude > 0:
            raise DomainError("lo_amplitude must be > 0")
        if not self.echo_amplitude >= 0:
            raise DomainError("echo_amplitude must be >= 0")
        if self.echo_amplitude > MAX_LINEAR_RATIO * self.lo_amplitude:
            raise ModelValidityError(
                f"echo/LO ratio {self.echo_amplitude / self.lo_amplitude:.3g} exceeds {MAX_LINEAR_RATIO}")
        if not self.sample_rate > 2.0 * abs(self.beat_freq):
            raise DomainError(
                f"Nyquist violated: fs = {self.sample_rate!r} Hz <= 2 |df| = {2 * abs(self.beat_freq)!r} Hz")
        if self.num_samples < 8:
            raise DomainError("num_samples must be >= 8")
        if not 0.0 <= self.phase < TWO_PI:
            raise DomainError("phase must lie in [0, 2 pi)")
        if not self.signal_amplitude >= 0:
            raise DomainError("signal_amplitude must be >= 0")

    @classmethod
    def from_chain(cls, lo_amplitude, echo_amplitude, beat_freq, phase, sample_rate, num_samples,
                   c_gain, apd_gain, responsivity):
        """Build parameters with alpha derived from the detection chain."""
        alpha = apd_gain * responsivity * c_gain * echo_amplitude
        return cls(lo_amplitude, echo_amplitude, beat_freq, phase, sample_rate, num_samples, alpha)

    @property
    def omega(self) -> float:
        """Normalised angular frequency 2 pi df / fs [rad/sample]."""
        return TWO_PI * self.beat_freq / self.sample_rate


@dataclass(frozen=True)
class SampledWaveform:
    """N real current samples y[n], n = 1..N, plus how they were made."""

    samples: np.ndarray
    sample_rate: float
    seed: object = None
    beat_freq: float = float("nan")
    phase: float = float("nan")
    sigma_z: float = float("nan")
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1:
            raise DomainError("samples must be one-dimensional")
        if not np.all(np.isfinite(samples)):
            raise DomainError("samples must be finite")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        """Sample instants n / fs for n = 1..N [s]."""
        return np.arange(1, len(self) + 1) / self.sample_rate


def sample_indices(num_samples) -> np.ndarray:
    """Sample index vector n = 1..N as floats."""
    return np.arange(1, num_samples + 1, dtype=float)


def noiseless_samples(amplitude, omega, phase, num_samples) -> np.ndarray:
    """alpha cos(omega n + phi), n = 1..N."""
    return amplitude * np.cos(omega * sample_indices(num_samples) + phase)


def synthesize_apd_record(params: WaveformParams, sigma_z, seed) -> SampledWaveform:
    """Noisy sampled APD current y[n] = alpha cos(omega n + phi) + z[n].

    Args:
        params: Waveform parameters
        sigma_z: Noise standard deviation [A]
        seed: Int or tuple key passed to :func:`make_rng`

    Returns:
        SampledWaveform with generation metadata attached
    """
    if sigma_z < 0:
        raise DomainError("sigma_z must be >= 0")
    clean = noiseless_samples(params.signal_amplitude, params.omega, params.phase, params.num_samples)
    if sigma_z > 0:
        y = clean + sigma_z * make_rng(seed).standard_normal(params.num_samples)
    else:
        y = clean
    return SampledWaveform(
        samples=y,
        sample_rate=params.sample_rate,
        seed=seed,
        beat_freq=params.beat_freq,
        phase=params.phase,
        sigma_z=float(sigma_z),
        metadata={"signal_amplitude": params.signal_amplitude, "omega": params.omega},
    )


def write_waveform_csv(record: SampledWaveform, destination):
    """Dump a record as ``n,t_seconds,y_amperes`` rows."""
    own = isinstance(destination, (str, bytes)) or hasattr(destination, "__fspath__")
    fh = open(destination, "w", newline="") if own else destination
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "t_seconds", "y_amperes"])
        for n, (t, y) in enumerate(zip(record.times, record.samples), start=1):
            writer.writerow([n, repr(float(t)), repr(float(y))])
    finally:
        if own:
            fh.close()
