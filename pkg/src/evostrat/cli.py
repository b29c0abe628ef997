"""Benchmark command line: ``evostrat run ...`` and ``evostrat list``.

Config precedence: built-in defaults < ``--config`` JSON file < flags.
Exit codes: 0 success, 1 runtime failure, 2 argument error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .harness import RunConfig, RunFailure, build_run, multi_run, write_csv, write_test_csv
from .problems import PROBLEMS
from .strategies import STRATEGIES

# flag name -> RunConfig field
_FLAG_FIELDS = {
    "strategy": "strategy",
    "problem": "problem",
    "popsize": "popsize",
    "dims": "dims",
    "generations": "generations",
    "seed": "seed",
    "rollouts": "n_rollouts",
    "out": "out",
}


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(f"{self.prog}: error: {message}")


def _registry_listing() -> str:
    return "strategies: " + ", ".join(STRATEGIES) + "\nproblems: " + ", ".join(PROBLEMS)


def _parse_seeds(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise _ArgumentError(f"--seeds expects comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evostrat", description="Evolution-strategy benchmark runner.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    run = sub.add_parser("run", help="run a strategy on a problem")
    run.add_argument("--strategy")
    run.add_argument("--problem")
    run.add_argument("--popsize", type=int)
    run.add_argument("--dims", type=int)
    run.add_argument("--generations", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--seeds", help="comma-separated seeds; overrides --seed")
    run.add_argument("--rollouts", type=int)
    run.add_argument("--config", help="JSON file with RunConfig fields")
    run.add_argument("--out", help="prefix for <out>_seed<N>.csv and <out>_config.json")
    run.add_argument("--parallelism", type=int, default=1)
    sub.add_parser("list", help="list registered strategies and problems")
    return parser


def resolve_config(args) -> tuple[RunConfig, list[int]]:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise _ArgumentError(f"cannot load config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise _ArgumentError("config file must hold a JSON object")
    seeds = data.pop("seeds", None)
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag)
        if value is not None:
            data[name] = value
    try:
        config = RunConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise _ArgumentError(str(exc)) from exc
    if args.seeds:
        seeds = _parse_seeds(args.seeds)
    elif args.seed is not None or seeds is None:
        seeds = [config.seed]
    if not seeds:
        raise _ArgumentError("no seeds given")
    if config.strategy not in STRATEGIES or config.problem not in PROBLEMS:
        raise _ArgumentError(
            f"unknown strategy {config.strategy!r} or problem {config.problem!r}\n{_registry_listing()}"
        )
    if args.parallelism < 1:
        raise _ArgumentError("--parallelism must be >= 1")
    try:
        strategy, _, params = build_run(config)
        strategy.validate_params(params)
    except (TypeError, ValueError) as exc:
        raise _ArgumentError(f"invalid configuration: {exc}") from exc
    return config, seeds


def _run(args) -> int:
    config, seeds = resolve_config(args)
    logs = multi_run(config, seeds, parallelism=args.parallelism)
    if config.out:
        with open(f"{config.out}_config.json", "w") as fh:
            fh.write(replace(config, seed=seeds[0]).to_json())
    status = 0
    for seed, log in zip(seeds, logs):
        if isinstance(log, RunFailure):
            print(f"seed {seed}: FAILED {log.error}", file=sys.stderr)
            status = 1
            continue
        print(f"seed {seed}: best_fitness {log.best_fitness[-1]:.6g} after {len(log)} generations")
        if config.out:
            write_csv(log, f"{config.out}_seed{seed}.csv")
            if log.test_gen:
                write_test_csv(log, f"{config.out}_seed{seed}_test.csv")
    return status


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "list":
            print(_registry_listing())
            return 0
        return _run(args)
    except _ArgumentError as exc:
        print(exc, file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"evostrat: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_main())
