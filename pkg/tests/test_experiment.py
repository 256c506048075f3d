import csv
import io
import math
import random
from pathlib import Path

import numpy as np
import pytest

from rydradar import atomic, experiment as ex, link
from rydradar.config import parse_config
from rydradar.estimation import estimate_omega_batch

GOLDEN = Path(__file__).parent / "data" / "snr_sweep_5ranges.csv"


@pytest.fixture(scope="module")
def cfg():
    return parse_config("")


@pytest.fixture(scope="module")
def snr_result(cfg):
    return ex.run_snr_sweep(cfg)


def small_mc(cfg, **mc):
    base = dict(trials=40)
    base.update(mc)
    return cfg.with_sweep(r_min=300.0, r_max=3000.0, points=3).with_montecarlo(**base)


def test_sweep_ranges(cfg):
    r = ex.sweep_ranges(cfg)
    assert len(r) == 40 and r[0] == 100.0 and r[-1] == pytest.approx(1e4, rel=1e-14)
    assert np.all(np.diff(r) > 0)
    lin = ex.sweep_ranges(cfg.with_sweep(log_spacing=False, points=5))
    np.testing.assert_allclose(np.diff(lin), 2475.0, rtol=1e-12)


def test_snr_gap_constant(snr_result):
    gap = snr_result.gap_db
    assert gap.max() - gap.min() < 0.01
    assert np.all(gap > 25.0)


def test_snr_drop_per_doubling(cfg):
    res = ex.run_snr_sweep(cfg.with_sweep(r_min=500.0, r_max=1000.0, points=2))
    for col in ("snr_quantum_db", "snr_classical_db"):
        drop = res.column(col)[0] - res.column(col)[1]
        assert drop == pytest.approx(40 * math.log10(2), abs=1e-9)
        assert drop == pytest.approx(12.04, abs=5e-3)


def test_snr_rows_equal_direct_calls(cfg, snr_result):
    c = atomic.optical_gain_c(cfg.atomic)
    assert snr_result.c_gain == c
    for row in snr_result.rows:
        assert row.snr_quantum_linear == link.quantum_snr(cfg.link, cfg.noise, c, row.range_m)
        assert row.snr_classical_linear == link.classical_snr(cfg.link, cfg.classical, row.range_m)
        assert row.snr_quantum_db == link.to_db(row.snr_quantum_linear)
        assert row.snr_quantum_linear > 0 and row.snr_classical_linear > 0
        assert row.rmse_quantum_mps is None


def test_override_gain_used(cfg):
    over = parse_config("[atomic]\noptical_gain_override_w_per_v_per_m = 6.59e-4\n")
    res = ex.run_snr_sweep(over)
    assert res.c_gain == 6.59e-4
    base = ex.run_snr_sweep(cfg)
    shift = 20 * math.log10(6.59e-4 / atomic.optical_gain_c(cfg.atomic))
    np.testing.assert_allclose(res.gap_db - base.gap_db, shift, atol=1e-9)


def test_snr_sweep_matches_golden_fixture(cfg):
    res = ex.run_snr_sweep(cfg.with_sweep(points=5))
    with open(GOLDEN, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 5
    for row, gold in zip(res.rows, rows):
        assert row.range_m == pytest.approx(float(gold["range_m"]), rel=1e-12)
        assert row.snr_quantum_db == pytest.approx(float(gold["snr_quantum_db"]), rel=1e-12)
        assert row.snr_classical_db == pytest.approx(float(gold["snr_classical_db"]), rel=1e-12)


def test_csv_header_and_line_count(cfg):
    text = ex.csv_text(ex.run_snr_sweep(cfg.with_sweep(points=2)))
    lines = text.splitlines()
    assert lines[0] == ("range_m,snr_quantum_db,snr_classical_db,rmse_quantum_mps,rmse_classical_mps,"
                        "acrb_rms_quantum_mps,acrb_rms_classical_mps")
    assert len(lines) == 3
    assert lines[1].endswith(",,,,")


def test_csv_roundtrip_exact(snr_result):
    rows = list(csv.DictReader(io.StringIO(ex.csv_text(snr_result))))
    for row, parsed in zip(snr_result.rows, rows):
        assert float(parsed["range_m"]) == row.range_m
        assert float(parsed["snr_quantum_db"]) == row.snr_quantum_db
        assert float(parsed["snr_classical_db"]) == row.snr_classical_db


def test_write_csv_to_path(tmp_path, snr_result):
    p = tmp_path / "out.csv"
    ex.write_csv(snr_result, p)
    assert p.read_text() == ex.csv_text(snr_result)


def test_noiseless_rmse_is_tiny(cfg):
    res = ex.run_rmse_sweep(cfg.with_sweep(points=4).with_montecarlo(trials=5, noiseless=True))
    assert np.all(res.column("rmse_quantum_mps") < 1e-4)
    assert np.all(res.column("rmse_classical_mps") < 1e-4)


def test_rmse_sweep_fields(cfg):
    res = ex.run_rmse_sweep(small_mc(cfg))
    for row in res.rows:
        assert row.trials_used == 40
        assert row.rmse_quantum_mps >= 0 and row.rmse_classical_mps >= 0
        assert row.acrb_rms_quantum_mps < row.acrb_rms_classical_mps
    text = ex.csv_text(res)
    assert ",," not in text


def test_rmse_sweep_byte_identical(cfg):
    a = ex.csv_text(ex.run_rmse_sweep(small_mc(cfg)))
    b = ex.csv_text(ex.run_rmse_sweep(small_mc(cfg)))
    c = ex.csv_text(ex.run_rmse_sweep(small_mc(cfg, master_seed=7)))
    assert a == b
    assert a != c


def test_trial_streams_are_keyed(cfg):
    small = small_mc(cfg)
    y1, p1 = ex.synthesize_trial(small, ex.QUANTUM, 1, 5, 1000.0, 1.0, 0.3)
    y2, p2 = ex.synthesize_trial(small, ex.QUANTUM, 1, 5, 1000.0, 1.0, 0.3)
    y3, _ = ex.synthesize_trial(small, ex.CLASSICAL, 1, 5, 1000.0, 1.0, 0.3)
    assert y1.tobytes() == y2.tobytes() and p1 == p2
    assert not np.array_equal(y1, y3)
    batch = ex.synthesize_trials(small, ex.QUANTUM, 1, 1000.0, 1.0, 0.3)
    np.testing.assert_array_equal(batch[5], y1)


def test_rmse_permutation_invariant(cfg):
    small = small_mc(cfg)
    amp, sigma = ex.receiver_signal(small, ex.QUANTUM, 3000.0, ex.effective_gain(small))
    y = ex.synthesize_trials(small, ex.QUANTUM, 2, 3000.0, amp, sigma)
    omega = estimate_omega_batch(y).omega_hat
    v_hat = (omega * small.montecarlo.sample_rate * 299792458 / (4 * math.pi * small.link.carrier_f1)).tolist()
    ref = ex.velocity_rmse(v_hat, 100.0)
    rng = random.Random(3)
    for _ in range(20):
        rng.shuffle(v_hat)
        assert ex.velocity_rmse(v_hat, 100.0) == pytest.approx(ref, rel=1e-12)


def test_velocity_rmse_values():
    assert ex.velocity_rmse([100.0, 100.0], 100.0) == 0.0
    assert ex.velocity_rmse([99.0, 101.0, 103.0, 97.0], 100.0) == pytest.approx(math.sqrt(5.0), rel=1e-15)


def test_receiver_signal_snr(cfg):
    c = ex.effective_gain(cfg)
    amp, sigma = ex.receiver_signal(cfg, ex.QUANTUM, 1000.0, c)
    assert 0.5 * amp**2 / sigma**2 == pytest.approx(link.quantum_snr(cfg.link, cfg.noise, c, 1000.0), rel=1e-12)
    amp, sigma = ex.receiver_signal(cfg, ex.CLASSICAL, 1000.0, c)
    assert amp == 1.0
    assert 0.5 / sigma**2 == pytest.approx(link.classical_snr(cfg.link, cfg.classical, 1000.0), rel=1e-12)


def test_deterministic_phase_mode(cfg):
    det = cfg.with_montecarlo(phase_mode="deterministic")
    phi = ex.trial_phase(det, None, 1500.0)
    f1 = cfg.link.carrier_f1
    f2 = f1 - link.doppler_shift(100.0, f1)
    expected = 2 * math.pi * math.fmod(f2 * 2 * 1500.0 / 299792458, 1.0)
    # ~3e5 cycles before the modulo: one rounding of the product is ~1e-10 rad
    assert phi == pytest.approx(expected, abs=1e-9)
    assert 0.0 <= phi < 2 * math.pi
    _, p_a = ex.synthesize_trial(det, 0, 0, 0, 1500.0, 1.0, 0.1)
    _, p_b = ex.synthesize_trial(det, 0, 0, 9, 1500.0, 1.0, 0.1)
    assert p_a == p_b == phi


def test_departure_range():
    res = ex.SweepResult(rows=[
        ex.SweepRow(r, 1, 0, 1, 0, rmse_quantum_mps=q, acrb_rms_quantum_mps=1.0)
        for r, q in ((100.0, 1.0), (200.0, 1.9), (400.0, 2.5), (800.0, 1.0))
    ])
    assert ex.departure_range(res, "quantum") == 400.0
    res.rows[2].rmse_quantum_mps = 1.5
    assert ex.departure_range(res, "quantum") == math.inf
    res.rows[0].rmse_quantum_mps = 0.4
    assert ex.departure_range(res, "quantum") == 100.0


def test_compute_c_report(cfg):
    text = ex.compute_c_report(cfg)
    assert text == ex.compute_c_report(cfg)
    ch = atomic.optical_gain_chain(cfg.atomic)
    for label, value in (("C0", ch.c0), ("Abar", ch.abar), ("Gamma", ch.gamma_eit), ("kappa_p", ch.kappa_p),
                         ("alpha", ch.alpha), ("kappa", ch.kappa)):
        line = next(l for l in text.splitlines() if l.strip().startswith(label + " "))
        assert float(line.split("=")[1].split()[0]) == pytest.approx(value, rel=1e-5)
    last = text.strip().splitlines()[-1]
    assert last.startswith("C = ") and last.endswith("W/(V/m)")
    assert float(last.split()[2]) == pytest.approx(ch.c_gain, rel=1e-5)
    assert "Rabi convention" in text
