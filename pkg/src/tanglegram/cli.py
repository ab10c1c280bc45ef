"""Command line entry point: ``tanglegram gen|solve|bench|render``."""

from __future__ import annotations

import argparse
import logging
import sys

from .bench import (
    ALGORITHMS,
    DEFAULT_ALGORITHMS,
    Instance,
    collect_instances,
    format_csv,
    format_summary,
    make_solver,
    run_benchmark,
    summarize,
)
from .core import count_crossings
from .generators import SETS, GenConfig, generate_set, write_set
from .io import load_tanglegram
from .render import render_svg


class CliError(Exception):
    pass


def _algo_list(text: str) -> list[str]:
    names = [a.strip() for a in text.split(",") if a.strip()]
    if names == ["all"]:
        return list(DEFAULT_ALGORITHMS)
    for a in names:
        if a not in ALGORITHMS:
            raise argparse.ArgumentTypeError(f"unknown algorithm {a!r}")
    return names


def _knobs(p: argparse.ArgumentParser):
    p.add_argument("--swap-fraction", type=float, default=None)
    p.add_argument("--reattach-fraction", type=float, default=0.25)
    p.add_argument("--climb-probability", type=float, default=0.75)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tanglegram", description="Binary tanglegram layout solvers.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a seeded random instance set")
    p.add_argument("--set", required=True, choices=SETS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", default=".")
    _knobs(p)

    p = sub.add_parser("solve", help="lay out one instance")
    p.add_argument("file")
    p.add_argument("--algo", default="rec-split-improved", choices=list(ALGORITHMS))
    p.add_argument("--time-limit", type=float, default=600.0)
    p.add_argument("--svg", metavar="OUT")
    p.add_argument("--orders", action="store_true", help="also print both leaf orders")

    p = sub.add_parser("bench", help="benchmark algorithms against the exact optimum")
    p.add_argument("instances", nargs="*", help=".tgl files or directories")
    p.add_argument("--set", choices=SETS, help="generate instances instead of reading files")
    p.add_argument("--n", type=int)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int)
    _knobs(p)
    p.add_argument("--algos", type=_algo_list, default=list(DEFAULT_ALGORITHMS),
                   help="comma separated, or 'all'")
    p.add_argument("--time-limit", type=float, default=600.0)
    p.add_argument("--csv", metavar="OUT", help="write records here instead of stdout")
    p.add_argument("--summary", metavar="OUT", help="write per-group ratio statistics here")

    p = sub.add_parser("render", help="draw a layout as SVG")
    p.add_argument("file")
    p.add_argument("--algo", default="rec-split-improved", choices=list(ALGORITHMS))
    p.add_argument("--time-limit", type=float, default=600.0)
    p.add_argument("--out", required=True)
    return parser


def _config(args) -> GenConfig:
    return GenConfig(
        args.set, args.n, args.count, args.seed,
        swap_fraction=args.swap_fraction,
        reattach_fraction=args.reattach_fraction,
        climb_probability=args.climb_probability,
    )


def _solve(args):
    t = load_tanglegram(args.file)
    solver = make_solver(args.algo, args.time_limit).fit(t)
    return t, solver


def cmd_gen(args) -> None:
    for path in write_set(_config(args), args.out_dir):
        print(path)


def cmd_solve(args) -> None:
    t, solver = _solve(args)
    line = f"crossings: {count_crossings(t, solver.orientation_)}"
    if args.algo in ("exact", "brute"):
        line += ", optimal: " + ("proved" if solver.stats_["proved_optimal"] else "not proved")
    print(line)
    if args.orders:
        left, right = solver.transform(t)
        print("left:  " + " ".join(left))
        print("right: " + " ".join(right))
    if args.svg:
        render_svg(t, solver.orientation_, args.svg)


def cmd_bench(args) -> None:
    if args.set is not None:
        if args.n is None or args.seed is None:
            raise CliError("--set needs --n and --seed")
        if args.instances:
            raise CliError("give instance files or --set, not both")
        instances = [Instance(name, t, args.set, str(s)) for name, s, t in generate_set(_config(args))]
    elif args.instances:
        instances = collect_instances(args.instances)
    else:
        raise CliError("no instances: pass .tgl files/directories or --set/--n/--seed")
    if not instances:
        raise CliError("no .tgl files found")
    records = run_benchmark(instances, args.algos, args.time_limit)
    text = format_csv(records)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(format_summary(summarize(records)))


def cmd_render(args) -> None:
    t, solver = _solve(args)
    render_svg(t, solver.orientation_, args.out)
    print(f"crossings: {count_crossings(t, solver.orientation_)}")


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "bench": cmd_bench, "render": cmd_render}


def cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (CliError, ValueError, OSError, RecursionError) as exc:
        print(f"tanglegram {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
