"""Command-line entry point.

Exit codes: 0 success, 2 usage error, 3 validation error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from boolhyper import __version__
from boolhyper.attractor import find_attractor
from boolhyper.engine import simulate
from boolhyper.ensemble import ExperimentConfig, run_experiment
from boolhyper.errors import DomainError
from boolhyper.netgen import (
    BipartiteNetwork,
    Network,
    dumps,
    extend_to_hypernetwork,
    generate_bn,
    load_network,
    to_bipartite,
    validate,
)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_IO = 0, 2, 3, 4


class ValidationFailed(Exception):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def parse_initial(text: str, n: int) -> np.ndarray:
    """``random:<seed>`` or an explicit 0/1 string with vertex 0 first."""
    if text.startswith("random:"):
        try:
            seed = int(text.split(":", 1)[1])
        except ValueError as exc:
            raise DomainError(f"bad seed in initial state {text!r}") from exc
        return np.random.default_rng(seed).integers(0, 2, size=n, dtype=np.uint8)
    if len(text) != n or set(text) - {"0", "1"}:
        raise DomainError(f"initial state must be 'random:<seed>' or {n} characters of 0/1")
    return np.array([int(c) for c in text], dtype=np.uint8)


def _load_valid(path: str) -> Network:
    net = load_network(path)
    problems = validate(net)
    if problems:
        raise ValidationFailed(problems)
    return net


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _require_seed(args) -> int:
    if args.seed is None:
        raise DomainError("--seed is required; there is no clock-based default")
    return args.seed


def cmd_generate(args) -> None:
    rng = np.random.default_rng(_require_seed(args))
    _emit(dumps(generate_bn(args.n, args.k, rng)), args.out)


def cmd_convert(args) -> None:
    net = _load_valid(args.input)
    if isinstance(net, BipartiteNetwork):
        raise DomainError("input is already bipartite")
    _emit(dumps(to_bipartite(net)), args.out)


def cmd_extend(args) -> None:
    net = _load_valid(args.input)
    if not isinstance(net, BipartiteNetwork):
        net = to_bipartite(net)
    rng = np.random.default_rng(_require_seed(args))
    _emit(dumps(extend_to_hypernetwork(net, args.l, rng)), args.out)


def cmd_simulate(args) -> None:
    net = _load_valid(args.input)
    traj = simulate(net, parse_initial(args.initial, net.n), args.steps)
    if args.format == "json":
        doc = {"resolution": traj.resolution, "n": traj.n, "states": traj.to_hex_rows()}
        _emit(json.dumps(doc) + "\n", args.out)
    else:
        _emit(traj.to_csv(), args.out)


def cmd_attractor(args) -> None:
    net = _load_valid(args.input)
    result = find_attractor(net, parse_initial(args.initial, net.n), args.cap)
    sys.stdout.write(json.dumps(result.as_dict()) + "\n")


def cmd_experiment(args) -> None:
    cfg = ExperimentConfig.load(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if overrides:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), **overrides})
    report = run_experiment(cfg, threads=args.threads)
    report.write(args.out_dir)
    if args.format == "json":
        sys.stdout.write(report.summary_json())


def cmd_validate(args) -> None:
    problems = validate(load_network(args.input))
    if problems:
        raise ValidationFailed(problems)
    sys.stdout.write("valid\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument("--threads", type=int, default=1, help="worker processes for experiments")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")

    parser = argparse.ArgumentParser(prog="boolhyper", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="random Boolean network")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("convert", parents=[common], help="BN to bipartite BBN")
    p.add_argument("input")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("extend", parents=[common], help="BBN to hypernetwork with E in-degree l")
    p.add_argument("input")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("simulate", parents=[common], help="trajectory from an initial state")
    p.add_argument("input")
    p.add_argument("--initial", required=True, help="'random:<seed>' or a 0/1 string, vertex 0 first")
    p.add_argument("--steps", type=int, required=True, help="BN steps, or half-steps for bipartite networks")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("attractor", parents=[common], help="transient and period from an initial state")
    p.add_argument("input")
    p.add_argument("--initial", required=True)
    p.add_argument("--cap", type=int, default=5000, help="macro steps to search")
    p.set_defaults(func=cmd_attractor)

    p = sub.add_parser("experiment", parents=[common], help="run an ensemble experiment config")
    p.add_argument("config")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("validate", parents=[common], help="check network invariants")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except ValidationFailed as exc:
        for problem in exc.problems:
            print(f"invalid: {problem}", file=sys.stderr)
        return EXIT_INVALID
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
