"""SNR and velocity-RMSE sweeps over target range, CSV output, gain report.

Trial randomness comes from ``make_rng((master_seed, receiver_id,
range_index, trial_index))``: each trial first draws its phase (uniform
mode), then N standard normals. Rows are built in range order and each
RMSE is a compensated (``math.fsum``) mean, so outputs are byte-identical
for identical inputs and do not depend on trial ordering.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import atomic, link
from .config import ExperimentConfig
from .constants import CONSTANTS, PhysicalConstants
from .estimation import acrb_velocity, estimate_omega_batch, omega_to_velocity
from .synthesis import TWO_PI, make_rng, sample_indices

QUANTUM = 0
CLASSICAL = 1

CSV_COLUMNS = (
    "range_m",
    "snr_quantum_db",
    "snr_classical_db",
    "rmse_quantum_mps",
    "rmse_classical_mps",
    "acrb_rms_quantum_mps",
    "acrb_rms_classical_mps",
)


@dataclass
class SweepRow:
    range_m: float
    snr_quantum_linear: float
    snr_quantum_db: float
    snr_classical_linear: float
    snr_classical_db: float
    rmse_quantum_mps: Optional[float] = None
    rmse_classical_mps: Optional[float] = None
    acrb_rms_quantum_mps: Optional[float] = None
    acrb_rms_classical_mps: Optional[float] = None
    trials_used: int = 0


@dataclass
class SweepResult:
    """Per-range results; RMSE fields stay None for SNR-only sweeps."""

    rows: List[SweepRow] = field(default_factory=list)
    c_gain: float = float("nan")

    def column(self, name) -> np.ndarray:
        return np.array([np.nan if getattr(r, name) is None else getattr(r, name) for r in self.rows])

    @property
    def gap_db(self) -> np.ndarray:
        """Quantum minus classical SNR per row [dB]."""
        return self.column("snr_quantum_db") - self.column("snr_classical_db")


def sweep_ranges(cfg: ExperimentConfig) -> np.ndarray:
    sw = cfg.sweep
    if sw.log_spacing:
        return np.geomspace(sw.r_min, sw.r_max, sw.points)
    return np.linspace(sw.r_min, sw.r_max, sw.points)


def effective_gain(cfg: ExperimentConfig, consts: PhysicalConstants = CONSTANTS) -> float:
    """Optical gain C used by the sweeps: the override if set, else the atomic chain."""
    if cfg.optical_gain_override is not None:
        return cfg.optical_gain_override
    return atomic.optical_gain_c(cfg.atomic, consts)


def _snr_row(cfg, c_gain, r, consts) -> SweepRow:
    g_q = link.quantum_snr(cfg.link, cfg.noise, c_gain, r, consts)
    g_c = link.classical_snr(cfg.link, cfg.classical, r, consts)
    return SweepRow(float(r), g_q, link.to_db(g_q), g_c, link.to_db(g_c))


def run_snr_sweep(cfg: ExperimentConfig, consts: PhysicalConstants = CONSTANTS) -> SweepResult:
    """Quantum and classical SNR at each configured range (deterministic)."""
    c_gain = effective_gain(cfg, consts)
    return SweepResult([_snr_row(cfg, c_gain, r, consts) for r in sweep_ranges(cfg)], c_gain)


def trial_phase(cfg: ExperimentConfig, rng, range_m, consts: PhysicalConstants = CONSTANTS) -> float:
    """Echo phase for one trial.

    ``uniform`` draws from [0, 2 pi); ``deterministic`` uses 2 pi f2 tau_d
    with f2 = f1 - df.
    """
    if cfg.montecarlo.phase_mode == "uniform":
        return float(rng.uniform(0.0, TWO_PI))
    f1 = cfg.link.carrier_f1
    f2 = f1 - link.doppler_shift(cfg.montecarlo.target_velocity, f1, consts)
    cycles = math.fmod(f2 * link.round_trip_delay(range_m, consts), 1.0)
    return TWO_PI * cycles


def synthesize_trial(cfg, receiver_id, range_index, trial_index, range_m, amplitude, sigma,
                     consts: PhysicalConstants = CONSTANTS):
    """One noisy record and its phase, from its own keyed stream."""
    mc = cfg.montecarlo
    beat = abs(link.doppler_shift(mc.target_velocity, cfg.link.carrier_f1, consts))
    omega = TWO_PI * beat / mc.sample_rate
    rng = make_rng((mc.master_seed, receiver_id, range_index, trial_index))
    phi = trial_phase(cfg, rng, range_m, consts)
    y = amplitude * np.cos(omega * sample_indices(mc.num_samples) + phi)
    if sigma > 0:
        y += sigma * rng.standard_normal(mc.num_samples)
    return y, phi


def synthesize_trials(cfg, receiver_id, range_index, range_m, amplitude, sigma,
                      consts: PhysicalConstants = CONSTANTS) -> np.ndarray:
    """Noisy records for every trial at one range, shape (trials, N)."""
    mc = cfg.montecarlo
    out = np.empty((mc.trials, mc.num_samples))
    for t in range(mc.trials):
        out[t] = synthesize_trial(cfg, receiver_id, range_index, t, range_m, amplitude, sigma, consts)[0]
    return out


def receiver_signal(cfg, receiver_id, range_m, c_gain, consts: PhysicalConstants = CONSTANTS):
    """(amplitude, noise std) of the sampled record for one receiver at one range."""
    if receiver_id == QUANTUM:
        a2 = link.echo_field_amplitude(link.received_power(cfg.link, range_m), cfg.link.sensor_area, consts)
        amplitude = link.signal_amplitude(a2, c_gain, cfg.noise)
        sigma = math.sqrt(link.noise_variance(cfg.noise, consts))
    else:
        amplitude = 1.0
        sigma = math.sqrt(0.5 / link.classical_snr(cfg.link, cfg.classical, range_m, consts))
    return amplitude, (0.0 if cfg.montecarlo.noiseless else sigma)


def velocity_rmse(estimates, truth) -> float:
    """sqrt(mean((v_hat - v)^2)) with exactly rounded summation."""
    errs = np.asarray(estimates, dtype=float) - truth
    return math.sqrt(math.fsum((errs * errs).tolist()) / errs.size)


def _receiver_rmse(cfg, receiver_id, range_index, range_m, amplitude, sigma, consts):
    mc = cfg.montecarlo
    y = synthesize_trials(cfg, receiver_id, range_index, range_m, amplitude, sigma, consts)
    est = estimate_omega_batch(y, guard_fraction=mc.guard_fraction, zero_pad=mc.zero_pad)
    v_hat = omega_to_velocity(est.omega_hat, mc.sample_rate, cfg.link.carrier_f1, consts)
    return velocity_rmse(v_hat, abs(mc.target_velocity))


def run_rmse_sweep(cfg: ExperimentConfig, consts: PhysicalConstants = CONSTANTS) -> SweepResult:
    """Monte Carlo velocity RMSE of both receivers at each configured range.

    The quantum record has amplitude M R C A2 and noise sigma_z from the APD
    model. The classical record is a unit-amplitude sinusoid with noise
    variance 1 / (2 snr_classical), so both records have exactly the per-sample
    SNR of their receiver and share the same estimator.
    """
    mc = cfg.montecarlo
    c_gain = effective_gain(cfg, consts)
    result = SweepResult(c_gain=c_gain)
    for ri, r in enumerate(sweep_ranges(cfg)):
        row = _snr_row(cfg, c_gain, r, consts)
        for rid, attr in ((QUANTUM, "rmse_quantum_mps"), (CLASSICAL, "rmse_classical_mps")):
            amplitude, sigma = receiver_signal(cfg, rid, r, c_gain, consts)
            setattr(row, attr, _receiver_rmse(cfg, rid, ri, r, amplitude, sigma, consts))
        f1 = cfg.link.carrier_f1
        row.acrb_rms_quantum_mps = math.sqrt(
            acrb_velocity(row.snr_quantum_linear, mc.num_samples, mc.sample_rate, f1, consts))
        row.acrb_rms_classical_mps = math.sqrt(
            acrb_velocity(row.snr_classical_linear, mc.num_samples, mc.sample_rate, f1, consts))
        row.trials_used = mc.trials
        result.rows.append(row)
    return result


def departure_range(result: SweepResult, receiver: str, factor=2.0) -> float:
    """First range where RMSE leaves [sqrt(ACRB)/factor, factor*sqrt(ACRB)].

    Returns +inf when the RMSE tracks the bound over the whole sweep.
    """
    rmse = result.column(f"rmse_{receiver}_mps")
    bound = result.column(f"acrb_rms_{receiver}_mps")
    ratio = rmse / bound
    for r, q in zip(result.column("range_m"), ratio):
        if not (1.0 / factor <= q <= factor):
            return float(r)
    return math.inf


def _fmt(value) -> str:
    return "" if value is None else repr(float(value))


def write_csv(result: SweepResult, destination):
    """Write the sweep as CSV to a path or an open text stream."""
    own = isinstance(destination, (str, bytes)) or hasattr(destination, "__fspath__")
    fh = open(destination, "w", newline="") if own else destination
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in result.rows:
            writer.writerow([_fmt(getattr(row, col)) for col in CSV_COLUMNS])
    finally:
        if own:
            fh.close()


def csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    write_csv(result, buf)
    return buf.getvalue()


def compute_c_report(cfg: ExperimentConfig, consts: PhysicalConstants = CONSTANTS) -> str:
    """Human-readable report of every intermediate of the gain constant."""
    sys = cfg.atomic
    ch = atomic.optical_gain_chain(sys, consts)
    two_pi_mhz = 2.0 * math.pi * 1e6
    lines = [
        "Optical gain constant C (LO-dressed Rydberg receiver)",
        "Rabi convention: Omega = d * E / hbar (angular, rad/s)",
        "Inputs:",
        f"  gamma2     = 2pi x {sys.gamma2 / two_pi_mhz:.6g} MHz",
        f"  Omega_p    = 2pi x {sys.omega_p / two_pi_mhz:.6g} MHz",
        f"  Omega_c    = 2pi x {sys.omega_c / two_pi_mhz:.6g} MHz",
        f"  Omega_LO   = 2pi x {sys.omega_lo / two_pi_mhz:.6g} MHz",
        f"  d_12       = {sys.dipole_12 / consts.ea0:.6g} e a0 = {sys.dipole_12:.6e} C m",
        f"  d_RF       = {sys.dipole_rf / consts.ea0:.6g} e a0 = {sys.dipole_rf:.6e} C m",
        f"  N0         = {sys.density_n0:.6e} m^-3",
        f"  L          = {sys.cell_length:.6g} m",
        f"  lambda_p   = {sys.probe_wavelength:.6e} m",
        f"  P0_bar     = {sys.probe_dc_power:.6e} W",
        "Chain:",
        f"  C0         = {ch.c0:.6e} (dimensionless)",
        f"  Abar       = {ch.abar:.6e} (dimensionless)",
        f"  Gamma      = {ch.gamma_eit:.6e} rad/s (2pi x {ch.gamma_eit / two_pi_mhz:.6g} MHz)",
        f"  Lambda     = {ch.lambda_lo:.6e} (dimensionless)",
        f"  kappa_p    = {ch.kappa_p:.6e} s/rad",
        f"  alpha      = {ch.alpha:.6e} (dimensionless)",
        f"  kappa      = {ch.kappa:.6e} W s/rad",
        f"  C (signed) = {ch.c_signed:.6e} W/(V/m)",
        f"C = {ch.c_gain:.6e} W/(V/m)",
    ]
    if cfg.optical_gain_override is not None:
        lines.append(f"Sweeps use override C = {cfg.optical_gain_override:.6e} W/(V/m)")
    return "\n".join(lines) + "\n"
