"""Command-line front end.

Subcommands: ``simulate``, ``sweep``, ``tightness``, ``nonoblivious``,
``verify-lemmas``.  Exit code 0 when the run succeeds and all contracts hold,
1 when a numeric contract is violated (e.g. a dominance check fails), 2 on
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .adversaries import (
    default_lemma_a1_grid,
    default_lemma_a2_grid,
    verify_lemma_a1,
    verify_lemma_a2,
)
from .errors import AdamFtrlError, ConfigError, ContractViolation
from .harness import ExperimentConfig, render_json, run_experiment, sweep, write_outputs

TIGHTNESS_PRESET = {
    "adversary": "geometric",
    "p": 0.5,
    "kappa": 4.0,
    "v0": 1.0,
    "domain": 1.0,
    "T": 2,
}

NONOBLIVIOUS_PRESET = {
    "adversary": "nonoblivious",
    "a": 0.2,
    "b": 0.5,
    "v": 1.0,
    "p": 0.5,
    "T": 2,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adamftrl",
        description="Scalar online-learning lab: simulate, bound-check, and stress the learner.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, help="JSON config file (flat key set)")
        p.add_argument("--out", type=Path, help="output base path (suffixes are added)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--format", choices=("csv", "json", "both"),
                       help="which output files to write")
        p.add_argument("--horizon", type=int, help="override the oracle horizon")

    for name, doc in (
        ("simulate", "run one experiment from a config file"),
        ("sweep", "run a config once per grid point"),
        ("tightness", "worst-case geometric-sequence run (two-round preset by default)"),
        ("nonoblivious", "paired-instance separation run (worked-pair preset by default)"),
        ("verify-lemmas", "check the two technical inequalities on dense grids"),
    ):
        add_common(sub.add_parser(name, help=doc))
    return parser


def _load_config(args, preset: dict | None = None) -> ExperimentConfig:
    raw = dict(preset) if preset else {}
    if args.config is not None:
        try:
            raw.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from exc
    if not raw:
        raise ConfigError("this subcommand needs --config")
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.format is not None:
        raw["format"] = args.format
    if args.horizon is not None:
        raw["oracle_horizon"] = args.horizon
    if args.out is not None:
        raw["out"] = str(args.out)
    return ExperimentConfig.from_dict(raw)


def _emit(result, config: ExperimentConfig) -> None:
    if config.out:
        for path in write_outputs(result, config.out, config.format):
            print(f"wrote {path}")
    else:
        sys.stdout.write(render_json(result))


def _cmd_experiment(args, preset: dict | None = None) -> int:
    config = _load_config(args, preset)
    result = run_experiment(config)
    _emit(result, config)
    return 0 if result.contracts_ok() else 1


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    result = sweep(config)
    _emit(result, config)
    return 0 if result.contracts_ok() else 1


def _cmd_verify_lemmas(args) -> int:
    code = 0
    report: dict = {"version": __version__}
    try:
        a1 = verify_lemma_a1(default_lemma_a1_grid())
        report["lemma_a1"] = {
            "max_value": a1.max_value, "bound": a1.bound,
            "points_checked": a1.points_checked, "holds": True,
        }
    except ContractViolation as exc:
        report["lemma_a1"] = {"holds": False, "detail": str(exc)}
        code = 1
    try:
        a2 = verify_lemma_a2(default_lemma_a2_grid())
        report["lemma_a2"] = {
            "max_value": a2.max_value, "bound": a2.bound,
            "points_checked": a2.points_checked, "holds": True,
        }
    except ContractViolation as exc:
        report["lemma_a2"] = {"holds": False, "detail": str(exc)}
        code = 1
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.out is not None:
        path = Path(args.out).with_suffix(".json")
        path.write_text(text, encoding="utf-8")
        print(f"wrote {path}")
    else:
        sys.stdout.write(text)
    return code


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_experiment(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "tightness":
            return _cmd_experiment(args, TIGHTNESS_PRESET)
        if args.command == "nonoblivious":
            return _cmd_experiment(args, NONOBLIVIOUS_PRESET)
        return _cmd_verify_lemmas(args)
    except ContractViolation as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return 1
    except (AdamFtrlError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
