"""Command line: ``cqit single <config>``, ``cqit sweep <spec>``, ``cqit verify``."""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, build_config, parse_single
from .interferometer import readout, run_protocol
from .sweeps import format_number, parse_sweep, render_csv, run_sweep, write_atomic
from .verify import run_checks

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INVARIANT = 0, 1, 2, 3


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


def cmd_single(args) -> int:
    try:
        params = parse_single(_read(args.config))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        config = build_config(params, args.phase_faithful)
        res = run_protocol(config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    pt = readout(res.final, config.spin)
    lines = [
        ("success_prob", res.success_prob),
        ("d1", res.d1),
        ("d2", res.d2),
        ("leaked", res.leaked),
        ("target_fidelity", res.target_fidelity),
        ("x", pt.x),
        ("y", pt.y),
        ("z", pt.z),
    ]
    for key, value in lines:
        print(f"{key}={format_number(value, 12)}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        spec = parse_sweep(_read(args.spec))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        rows = run_sweep(spec, args.jobs, args.phase_faithful, args.unnormalized_fidelity)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    text = render_csv(spec.header, rows)
    out = args.out or spec.out
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    return EXIT_OK if run_checks(sys.stdout) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--phase-faithful", action="store_true",
                        help="use the complex cavity coefficients instead of signed magnitudes")
    common.add_argument("--unnormalized-fidelity", action="store_true",
                        help="average |<psi|psi'>|^2 without normalizing the states")

    parser = argparse.ArgumentParser(prog="cqit", description="Counterfactual quantum-information transfer simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("single", parents=[common], help="run one protocol config")
    p.add_argument("config")
    p.set_defaults(func=cmd_single)

    p = sub.add_parser("sweep", parents=[common], help="run a parameter sweep to CSV")
    p.add_argument("spec")
    p.add_argument("--out", help="CSV path (default: 'out' key of the spec, else stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (capped by $CQIT_MAX_WORKERS)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", parents=[common], help="run the self-check suite")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
