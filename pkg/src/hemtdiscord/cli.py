"""Command-line front end.

    hemtdiscord point --f HZ --gn2 VALUE [--config FILE] [--set key=value ...]
    hemtdiscord sweep --out PATH [--format csv|json] [grid options] [--workers N]
    hemtdiscord check

Exit codes: 0 success, 1 configuration or output-path error, 2 numerical
failure, 3 self-check failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__, checks, sweep
from .errors import ConfigError, NumericalError
from .params import apply_overrides, default_config, load_config

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3


def _parse_set(items) -> dict[str, float]:
    out = {}
    for item in items or ():
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"expected key=value, got {item!r}", "--set")
        try:
            out[key.strip()] = float(raw)
        except ValueError:
            raise ConfigError(f"not a number: {raw!r}", key.strip()) from None
    return out


def _load(args):
    p, n = load_config(args.config) if args.config else default_config()
    return apply_overrides(p, n, _parse_set(args.set))


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors; argparse's own code 2 is taken
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hemtdiscord", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", metavar="FILE", help="JSON configuration (default: bundled device set)")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key, repeatable")

    pt = sub.add_parser("point", help="evaluate one (f, gN2) point and print a JSON report")
    common(pt)
    pt.add_argument("--f", type=float, required=True, metavar="HZ", help="probe frequency in Hz")
    pt.add_argument("--gn2", type=float, required=True, metavar="VALUE", help="nonlinearity factor gN2 (A/V^2)")
    pt.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")

    sw = sub.add_parser("sweep", help="evaluate a frequency x gN2 grid")
    common(sw)
    sw.add_argument("--f-min", type=float, metavar="HZ")
    sw.add_argument("--f-max", type=float, metavar="HZ")
    sw.add_argument("--f-points", type=int, default=sweep.DEFAULT_POINTS)
    sw.add_argument("--gn2-min", type=float, default=sweep.DEFAULT_GN2_RANGE[0])
    sw.add_argument("--gn2-max", type=float, default=sweep.DEFAULT_GN2_RANGE[1])
    sw.add_argument("--gn2-points", type=int, default=sweep.DEFAULT_POINTS)
    sw.add_argument("--out", required=True, metavar="PATH")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--workers", type=int, help="worker processes (default: CPU count, at most 8)")

    ck = sub.add_parser("check", help="run the invariant self-check suite")
    ck.add_argument("--inject-fault", choices=checks.FAULTS, help=argparse.SUPPRESS)
    return parser


def _point(args) -> int:
    p, n = _load(args)
    text = sweep.dump_report(sweep.run_point(p, n, args.f, args.gn2))
    if args.out:
        path = sweep.check_output_path(args.out)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _sweep(args) -> int:
    p, n = load_config(args.config) if args.config else default_config()
    cfg = sweep.SweepConfig(
        f_min=args.f_min, f_max=args.f_max, f_points=args.f_points,
        gn2_min=args.gn2_min, gn2_max=args.gn2_max, gn2_points=args.gn2_points,
        overrides=_parse_set(args.set), output_path=args.out, format=args.format,
    )
    sweep.check_output_path(args.out)
    result = sweep.run_sweep(cfg, p, n, workers=args.workers)
    out, side = sweep.write_result(result, args.out, args.format)
    print(
        f"wrote {result.rows.shape[0]} rows to {out}; {len(result.errors)} failed cells in {side}",
        file=sys.stderr,
    )
    return EXIT_OK


def _check(args) -> int:
    report = checks.self_check(args.inject_fault)
    print(json.dumps(report, indent=2))
    return EXIT_OK if report["passed"] else EXIT_CHECK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"point": _point, "sweep": _sweep, "check": _check}[args.command]
    try:
        return handler(args)
    except (ConfigError, sweep.OutputPathError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"error [{exc.stage}]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
