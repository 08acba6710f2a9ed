"""``stecverify`` command line entry point."""

import argparse
import csv
import sys

from .. import casimir
from ..errors import StecVerifyError
from . import report as rp
from .config import load_scenario
from .runner import run


def _cmd_verify(args):
    scenario = load_scenario(args.config)
    rep = run(scenario, seed=args.seed, threads=args.threads)
    fmt = args.format or scenario.output_format
    if args.out:
        for path in rp.emit_report(rep, args.out, fmt):
            print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(rp.dumps(rep.payload()) + "\n")
    print(f"outcome: {', '.join(rep.outcomes) or 'none'}", file=sys.stderr)
    return rp.exit_code(rep.outcomes)


def _cmd_modes(args):
    if args.kind == "Interval":
        cavity = casimir.CavitySpec.interval(args.R)
    elif args.kind == "Slab":
        cavity = casimir.CavitySpec.slab(args.R)
    else:
        cavity = casimir.CavitySpec.box(tuple(args.xi), args.R)
    spec = casimir.enumerate_modes(cavity, args.n_max)
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(["epsilon", "degeneracy", "energy_over_hbar_c"])
        for e, g in zip(spec.epsilons, spec.degeneracies):
            w.writerow([format(e, ".17g"), int(g), format(e / cavity.R, ".17g")])
    finally:
        if args.out:
            fh.close()
    return rp.EXIT_OK


def _cmd_report(args):
    a, b = rp.load_report(args.diff[0]), rp.load_report(args.diff[1])
    if not args.all:
        for r in (a, b):
            r.pop("provenance", None)
    changes = rp.diff(a, b)
    for path, left, right in changes:
        print(f"{path}: {left!r} -> {right!r}")
    if not changes:
        print("reports are identical")
    return rp.EXIT_VIOLATED if changes else rp.EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="stecverify", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a scenario file")
    v.add_argument("config")
    v.add_argument("--out")
    v.add_argument("--format", choices=["json", "csv"])
    v.add_argument("--seed", type=int)
    v.add_argument("--threads", type=int, default=1)
    v.set_defaults(func=_cmd_verify)

    m = sub.add_parser("modes", help="list cavity mode constants")
    m.add_argument("kind", choices=["Interval", "Slab", "Box"])
    m.add_argument("--R", type=float, default=1.0)
    m.add_argument("--xi", type=float, nargs=3, default=[1.0, 1.0, 1.0])
    m.add_argument("--n-max", type=int, default=3)
    m.add_argument("--out")
    m.set_defaults(func=_cmd_modes)

    r = sub.add_parser("report", help="compare two JSON reports")
    r.add_argument("--diff", nargs=2, metavar=("A", "B"), required=True)
    r.add_argument("--all", action="store_true", help="include the provenance block")
    r.set_defaults(func=_cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return rp.EXIT_ERROR
    try:
        return args.func(args)
    except (StecVerifyError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return rp.EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
