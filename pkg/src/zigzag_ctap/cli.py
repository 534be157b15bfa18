"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical/integration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import load_config
from .drive import effective_couplings, envelopes
from .errors import ConfigurationError, NumericalError
from .experiments import cdt_freeze, disorder_sweep, model_comparison, nnn_sweep
from .protocol import run_transfer
from .units import physical_units

log = logging.getLogger("zigzag_ctap")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _fmt(x) -> str:
    return format(float(x), ".15g")


def _emit_json(doc: dict, out: Path | None, name: str):
    text = json.dumps(doc, indent=2)
    if out is None:
        print(text)
    else:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text + "\n")


def cmd_transfer(args, doc):
    config = doc.transfer_config()
    traj, summary = run_transfer(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    traj.to_csv(out / "trajectory.csv")
    (out / "summary.json").write_text(json.dumps(summary.to_dict(), indent=2) + "\n")
    log.info("final fidelity %.6f", summary.final_fidelity)
    print(f"final_fidelity={_fmt(summary.final_fidelity)} max_even_leakage={_fmt(summary.max_even_leakage)} "
          f"norm_drift={_fmt(summary.norm_drift)}")


def cmd_pulses(args, doc):
    chain, protocol = doc.chain_spec(), doc.drive_protocol()
    t = np.linspace(-protocol.t_half, protocol.t_half, args.samples)
    ax, ay = envelopes(t, protocol, chain)
    theta_odd, theta_even, _ = effective_couplings(t, chain, protocol)
    rows = zip(t, chain.a * ax / protocol.omega, chain.b * ay / protocol.omega,
               theta_odd / chain.j_nn, theta_even / chain.j_nn)
    header = ["t", "ax_norm", "ay_norm", "omega_minus", "omega_plus"]
    if args.out is None:
        fh = sys.stdout
    else:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        fh = open(out / "pulses.csv", "w", newline="")
    try:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_sweep_disorder(args, doc):
    exp = doc.experiment
    seed = doc.disorder.master_seed if doc.disorder is not None else 0
    result = disorder_sweep(doc.transfer_config(), exp.kind, exp.deltas, exp.n_realizations,
                            seed, threads=args.threads)
    result.write(args.out)
    for value, stats in result.summary().items():
        print(f"delta={value} median={_fmt(stats['median'])} min={_fmt(stats['min'])}")


def cmd_sweep_nnn(args, doc):
    result = nnn_sweep(doc.transfer_config(), doc.experiment.ratios, threads=args.threads)
    result.write(args.out)
    for value, _, fid in result.records:
        print(f"jnnn_over_j={_fmt(value)} final_fidelity={_fmt(fid)}")


def cmd_compare(args, doc):
    rows = model_comparison(doc.transfer_config(), doc.experiment.omegas)
    report = {"omega": [w for w, _ in rows], "max_population_deviation": [d for _, d in rows]}
    _emit_json(report, None if args.out is None else Path(args.out), "compare.json")


def cmd_cdt(args, doc):
    chain = doc.chain_spec()
    duration = doc.experiment.cdt_duration or 20.0 / abs(chain.j_nn)
    traj = cdt_freeze(chain, doc.protocol.omega, duration, doc.initial_site)
    site = doc.initial_site - 1
    report = {
        "duration": duration,
        "initial_site": doc.initial_site,
        "final_population": float(np.abs(traj.final_state[site]) ** 2),
        "min_population": float(traj.populations[:, site].min()),
        "norm_drift": float(traj.norm_drift),
    }
    _emit_json(report, None if args.out is None else Path(args.out), "cdt.json")


def cmd_units(args, doc):
    report = physical_units(args.j_rad_per_s, doc)
    _emit_json(report, None if args.out is None else Path(args.out), "units.json")


COMMANDS = {
    "transfer": (cmd_transfer, "single transfer run: trajectory.csv + summary.json"),
    "pulses": (cmd_pulses, "sampled drive envelopes and effective hoppings (pulses.csv)"),
    "sweep-disorder": (cmd_sweep_disorder, "disorder ensemble sweep: sweep.csv + sweep_summary.json"),
    "sweep-nnn": (cmd_sweep_nnn, "next-nearest hopping sweep: sweep.csv + sweep_summary.json"),
    "compare": (cmd_compare, "full vs effective model population deviation"),
    "cdt": (cmd_cdt, "coherent destruction of tunneling freeze check"),
    "units": (cmd_units, "convert run parameters to physical units"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zigzag-ctap", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--out", metavar="DIR", required=name in ("transfer", "sweep-disorder", "sweep-nnn"))
        p.add_argument("--seed", type=int, metavar="U64")
        p.add_argument("--model", choices=["full", "effective"])
        p.add_argument("--threads", type=int, default=1, metavar="N")
        if name == "pulses":
            p.add_argument("--samples", type=int, default=1001)
        if name == "units":
            p.add_argument("--j-rad-per-s", type=float, default=1e4)
    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigurationError("--seed must be an unsigned 64-bit integer")
        if args.threads < 1:
            raise ConfigurationError("--threads must be >= 1")
        doc = load_config(args.config).with_overrides(seed=args.seed, model=args.model)
        handler = COMMANDS[args.command][0]
        handler(args, doc)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
