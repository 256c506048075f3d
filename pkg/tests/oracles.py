"""Independent extended-precision reference formulas (mpmath, 40 digits).

These re-derive each quantity directly from its closed form with the same
constant values as the package, without calling package code. Golden numbers
frozen in the tests were produced by running this module as a script.
"""

import mpmath as mp

from rydradar.constants import CONSTANTS

mp.mp.dps = 40

HBAR = mp.mpf(CONSTANTS.hbar)
EPS0 = mp.mpf(CONSTANTS.epsilon0)
Q = mp.mpf(CONSTANTS.electron_charge)
A0 = mp.mpf(CONSTANTS.bohr_radius)
KB = mp.mpf(CONSTANTS.boltzmann)
C = mp.mpf(299792458)
Z = mp.mpf(377)
TWO_PI = 2 * mp.pi
MHZ2PI = TWO_PI * mp.mpf(10) ** 6

# Nominal parameter set.
GAMMA2 = mp.mpf("5.2") * MHZ2PI
OMEGA_P = mp.mpf("4.75") * MHZ2PI
OMEGA_C = mp.mpf("1.66") * MHZ2PI
OMEGA_LO = mp.mpf("0.6") * MHZ2PI
D12 = mp.mpf("2.5") * Q * A0
DRF = mp.mpf("551.35") * Q * A0
N0 = mp.mpf("4.89e16")
L = mp.mpf("0.01")
LAMBDA_P = mp.mpf("852.35e-9")
PBAR0 = mp.mpf("20.7e-6")

PT, GT, SIGMA, AE, AS = mp.mpf(10), mp.mpf(10), mp.mpf(1), mp.mpf("1e-4"), mp.mpf("1e-4")
F1 = mp.mpf("29.539e9")
M, RESP, RL, P0, ID, T, BE = (mp.mpf(50), mp.mpf("0.6"), mp.mpf(1000), mp.mpf("10e-6"),
                              mp.mpf("1e-9"), mp.mpf(300), mp.mpf("1e6"))
TS = mp.mpf(1000)
FS, NSAMP = mp.mpf(60000), 2048


def c0():
    return -2 * N0 * D12**2 / (EPS0 * HBAR * OMEGA_P)


def abar():
    return GAMMA2 * OMEGA_P / (GAMMA2**2 + 2 * OMEGA_P**2)


def gamma_eit():
    return OMEGA_P * mp.sqrt(2 * (OMEGA_C**2 + OMEGA_P**2) / (2 * OMEGA_P**2 + GAMMA2**2))


def lambda_ratio(a, b):
    return b**2 / (a**2 + b**2)


def kappa_p():
    # derivative by mpmath's numerical differentiation, independent of the closed form
    g = gamma_eit()
    return mp.diff(lambda a: lambda_ratio(a, g), OMEGA_LO)


def optical_gain():
    kp = 2 * mp.pi / LAMBDA_P
    alpha = kp * L * c0() * abar()
    kappa = alpha * PBAR0 * kappa_p()
    return abs(kappa * DRF / HBAR)


def im_rho21(op, oc, orf, dc, g):
    return -op * g / (oc**4 / (8 * (orf**2 / (4 * dc) + dc) ** 2) + 2 * g**2)


def received_power(r):
    return PT * GT * SIGMA * AE / ((4 * mp.pi) ** 2 * r**4)


def echo_amplitude(r):
    return mp.sqrt(2 * Z * received_power(r) / AE)


def noise_variance():
    return 2 * Q * (RESP * P0 + ID) * M ** mp.mpf("2.3") * BE + 4 * KB * T * BE / RL


def quantum_snr(r, c_gain=None):
    c_gain = optical_gain() if c_gain is None else c_gain
    return mp.mpf("0.5") * (M * RESP * c_gain * echo_amplitude(r)) ** 2 / noise_variance()


def classical_snr(r):
    return PT * GT * SIGMA * AS / ((4 * mp.pi) ** 2 * r**4 * KB * TS * BE)


def acrb_velocity(snr, n=NSAMP, fs=FS, f1=F1):
    # variance of v = omega fs c / (4 pi f1) under var(omega) = 12 / (snr (N^2 - 1) N)
    scale = fs * C / (4 * mp.pi * f1)
    return scale**2 * 12 / (snr * (mp.mpf(n) ** 2 - 1) * n)


def _golden():
    r = mp.mpf(1000)
    print("c0", mp.nstr(c0(), 17))
    print("abar", mp.nstr(abar(), 17))
    print("gamma_eit", mp.nstr(gamma_eit(), 17))
    print("lambda", mp.nstr(lambda_ratio(OMEGA_LO, gamma_eit()), 17))
    print("kappa_p", mp.nstr(kappa_p(), 17))
    print("C", mp.nstr(optical_gain(), 17))
    print("im_rho21(delta_c=2pi*1MHz, rf=lo)", mp.nstr(im_rho21(OMEGA_P, OMEGA_C, OMEGA_LO, MHZ2PI, GAMMA2), 17))
    print("P_r(1km)", mp.nstr(received_power(r), 17))
    print("A2(1km)", mp.nstr(echo_amplitude(r), 17))
    print("sigma_z^2", mp.nstr(noise_variance(), 17))
    for rr in (100, 1000, 10000):
        print("snr_q", rr, mp.nstr(quantum_snr(mp.mpf(rr)), 17))
    print("snr_c(1km)", mp.nstr(classical_snr(r), 17))
    print("acrb_v(0dB)", mp.nstr(acrb_velocity(mp.mpf(1)), 17))
    print("doppler(100)", mp.nstr(2 * 100 * F1 / C, 17))
    print("transmission", mp.nstr(mp.mpf("20.7e-6") * mp.exp(-2 * mp.pi / LAMBDA_P * L * mp.mpf("1e-5")), 17))


def golden_snr_rows(points=5):
    """Rows (range, snr_q_db, snr_c_db) for a log sweep 100 m .. 10 km."""
    rows = []
    for k in range(points):
        r = mp.mpf(100) * mp.mpf(100) ** (mp.mpf(k) / (points - 1))
        rows.append((r, 10 * mp.log10(quantum_snr(r)), 10 * mp.log10(classical_snr(r))))
    return rows


def write_golden_csv(path, points=5):
    with open(path, "w") as fh:
        fh.write("range_m,snr_quantum_db,snr_classical_db\n")
        for r, q, c in golden_snr_rows(points):
            fh.write(f"{mp.nstr(r, 20)},{mp.nstr(q, 20)},{mp.nstr(c, 20)}\n")


if __name__ == "__main__":
    _golden()
