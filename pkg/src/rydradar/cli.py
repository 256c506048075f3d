"""Command-line entry point ``rydradar``.

Subcommands::

    rydradar compute-c     [--config PATH] [--out PATH]
    rydradar snr-sweep     [--config PATH] [--out PATH]
    rydradar rmse-sweep    [--config PATH] [--out PATH] [--seed N] [--trials N]
    rydradar dump-waveform [--config PATH] [--out PATH] [--seed N] [--range M] [--receiver quantum|classical]
    rydradar show-defaults

Exit status: 0 success, 1 validation error, 2 I/O error.
"""

import argparse
import logging
import sys

from . import experiment, link
from .config import default_config_text, load_config
from .errors import ConfigError, DomainError
from .synthesis import SampledWaveform, write_waveform_csv

log = logging.getLogger("rydradar")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _add_common(p, seeded=False):
    p.add_argument("--config", help="configuration file (INI); defaults when omitted")
    p.add_argument("--out", help="output path; '-' or omitted writes to stdout")
    p.add_argument("--quiet", action="store_true", help="suppress the summary on stderr")
    if seeded:
        p.add_argument("--seed", type=int, help="master seed (overrides montecarlo.master_seed)")
        p.add_argument("--trials", type=int, help="trials per range (overrides montecarlo.trials)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rydradar", description="Rydberg-atom quantum radar simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("compute-c", help="report the optical gain constant chain"))
    _add_common(sub.add_parser("snr-sweep", help="SNR versus range for both receivers"))
    _add_common(sub.add_parser("rmse-sweep", help="Monte Carlo velocity RMSE versus range"), seeded=True)
    p = sub.add_parser("dump-waveform", help="write one sampled APD record as CSV")
    _add_common(p, seeded=True)
    p.add_argument("--range", type=float, default=1000.0, help="target range in metres (default 1000)")
    p.add_argument("--receiver", choices=("quantum", "classical"), default="quantum")
    p.add_argument("--trial", type=int, default=0, help="trial index selecting the noise stream")
    sub.add_parser("show-defaults", help="print the default configuration document")
    return parser


def _overrides(cfg, args):
    changes = {}
    if getattr(args, "seed", None) is not None:
        if args.seed < 0:
            raise ConfigError("seed must be >= 0", "--seed")
        changes["master_seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        if args.trials < 1:
            raise ConfigError("trials must be >= 1", "--trials")
        changes["trials"] = args.trials
    return cfg.with_montecarlo(**changes) if changes else cfg


def _emit(text_or_writer, out):
    """Send output to ``out`` (path) or stdout; callable gets a text stream."""
    if out is None or out == "-":
        if callable(text_or_writer):
            text_or_writer(sys.stdout)
        else:
            sys.stdout.write(text_or_writer)
        return
    with open(out, "w", newline="") as fh:
        if callable(text_or_writer):
            text_or_writer(fh)
        else:
            fh.write(text_or_writer)


def _dump_waveform(cfg, args):
    mc = cfg.montecarlo
    rid = experiment.QUANTUM if args.receiver == "quantum" else experiment.CLASSICAL
    amplitude, sigma = experiment.receiver_signal(cfg, rid, args.range, experiment.effective_gain(cfg))
    y, phi = experiment.synthesize_trial(cfg, rid, 0, args.trial, args.range, amplitude, sigma)
    beat = abs(link.doppler_shift(mc.target_velocity, cfg.link.carrier_f1))
    return SampledWaveform(y, mc.sample_rate, seed=(mc.master_seed, rid, 0, args.trial),
                           beat_freq=beat, phase=phi, sigma_z=sigma)


def _configure_logging(quiet):
    # Bind to the current stderr on every call so repeated in-process runs
    # (and captured streams) see the summary.
    for handler in list(log.handlers):
        log.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.WARNING if quiet else logging.INFO)
    log.propagate = False


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(getattr(args, "quiet", False))
    if args.command == "show-defaults":
        sys.stdout.write(default_config_text())
        return EXIT_OK
    try:
        cfg = _overrides(load_config(args.config), args)
        if args.command == "compute-c":
            _emit(experiment.compute_c_report(cfg), args.out)
        elif args.command == "snr-sweep":
            result = experiment.run_snr_sweep(cfg)
            _emit(lambda fh: experiment.write_csv(result, fh), args.out)
            log.info("C = %.6e W/(V/m); quantum - classical SNR gap = %.4f dB",
                     result.c_gain, float(result.gap_db[0]))
        elif args.command == "rmse-sweep":
            result = experiment.run_rmse_sweep(cfg)
            _emit(lambda fh: experiment.write_csv(result, fh), args.out)
            log.info("departure range (RMSE outside 2x sqrt(ACRB)): quantum %.6g m, classical %.6g m",
                     experiment.departure_range(result, "quantum"),
                     experiment.departure_range(result, "classical"))
        elif args.command == "dump-waveform":
            record = _dump_waveform(cfg, args)
            _emit(lambda fh: write_waveform_csv(record, fh), args.out)
    except (ConfigError, DomainError) as exc:
        print(f"rydradar: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"rydradar: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
