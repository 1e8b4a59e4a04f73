"""Command line: ``srmu run | validate-config | oracle-dump``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import (format_summary, load_config, resolve_spec, run_experiment,
                    run_single_trial, shared_codebook, trial_seed)
from .codebook import build_codebook
from .memory import MemoryModel
from .sim import STREAMS, derive_seed, write_eventlog_csv


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _add_spec_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--experiment", choices=["exp1", "exp2", "exp3", "custom"])
    p.add_argument("--config", type=Path, help="JSON or TOML file overriding the preset")
    p.add_argument("--trials", type=int)
    p.add_argument("--steps", type=int, help="steps per trial (T)")
    p.add_argument("--dim", type=int)
    p.add_argument("--gamma-list", type=_floats,
                   help="comma-separated decay values; roster = naive + temporal/srmu per gamma")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--shared-codebook", action="store_true", default=None)
    p.add_argument("--final-window", type=int, help="average the last N steps for summary values")


def _spec_from_args(args):
    config = load_config(args.config) if args.config else None
    return resolve_spec(config, experiment=args.experiment, trials=args.trials,
                        steps=args.steps, dim=args.dim, gamma_list=args.gamma_list,
                        seed=args.seed, shared_codebook=args.shared_codebook,
                        final_window=args.final_window)


def cmd_run(args) -> int:
    spec = _spec_from_args(args)
    agg = run_experiment(spec, workers=args.workers, out_dir=args.out_dir,
                         eventlog_trials=args.eventlog_trials or ())
    print(format_summary(spec, agg))
    print(f"wrote outputs to {args.out_dir}")
    return 0


def cmd_validate(args) -> int:
    spec = _spec_from_args(args)
    print(json.dumps(spec.to_dict(), indent=2))
    return 0


def cmd_oracle_dump(args) -> int:
    """Event log, codebook and final memory snapshots for one trial."""
    spec = _spec_from_args(args)
    if not 0 <= args.trial < spec.trials:
        raise ValueError(f"trial {args.trial} outside [0, {spec.trials})")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = trial_seed(spec.master_seed, args.trial)
    trace = run_single_trial(spec, args.trial, record_events=True)
    if spec.shared_codebook:
        cb = shared_codebook(spec)
    else:
        cb = build_codebook(spec.env.K, spec.env.S, spec.dim, derive_seed(seed, STREAMS["codebook"]))
    stem = f"{spec.name}_{args.trial}"
    write_eventlog_csv(out / f"eventlog_{stem}.csv", trace.events)
    cb.dump(out / f"codebook_{stem}.json")
    snapshots = []
    for i, s in enumerate(trace.specs):
        m = MemoryModel(s.kind, s.gamma, spec.dim, state=trace.final_states[i],
                        update_count=spec.env.T, last_weight=float(trace.weight[i, -1]))
        snapshots.append(m.to_json())
    (out / f"snapshots_{stem}.json").write_text(json.dumps({
        "trial_seed": seed, "spec": spec.to_dict(), "models": snapshots,
        "final_true_states": trace.final_true_states.tolist()}))
    print(f"wrote oracle dump for trial {args.trial} (seed {seed}) to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srmu", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write CSV outputs")
    _add_spec_args(run)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out-dir", type=Path, default=Path("results"))
    run.add_argument("--eventlog-trials", type=_ints, help="comma-separated trial indices to log")
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate-config", help="resolve and print a configuration")
    _add_spec_args(val)
    val.set_defaults(func=cmd_validate)

    dump = sub.add_parser("oracle-dump", help="dump one trial for cross-implementation checks")
    _add_spec_args(dump)
    dump.add_argument("--trial", type=int, default=0)
    dump.add_argument("--out-dir", type=Path, default=Path("oracle"))
    dump.set_defaults(func=cmd_oracle_dump)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        if exc.code:
            print(json.dumps({"error": "UsageError", "message": "invalid command line"}), file=sys.stderr)
        return exc.code or 0
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - surfaced as a machine-readable line
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
