"""Inspect the SRMU gate: mean weight per step, split by sampling group.

Shows how redundant observations of frequently sampled devices are
suppressed while sparse devices and state changes keep passing the gate.

    python scripts/gate_trajectory.py --experiment exp3 --trials 200
"""
import argparse

import numpy as np

from srmu.bench import resolve_spec, run_single_trial


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--experiment", default="exp3", choices=["exp1", "exp2", "exp3"])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--gamma", type=float, default=0.95)
    args = ap.parse_args()

    spec = resolve_spec({"experiment": args.experiment, "models": [["srmu", args.gamma]]},
                        trials=args.trials)
    groups = np.repeat(["frequent", "medium", "sparse"], spec.env.group_sizes)
    by_group = {g: [] for g in ("frequent", "medium", "sparse")}
    by_change = {"corrupted": [], "clean": []}
    curve = np.zeros(spec.env.T)
    for i in range(spec.trials):
        tr = run_single_trial(spec, i, record_events=True)
        w = tr.weight[0]
        curve += w / spec.trials
        for e, wt in zip(tr.events, w):
            by_group[groups[e.device]].append(wt)
            by_change["corrupted" if e.corrupted else "clean"].append(wt)

    print(f"SRMU(gamma={args.gamma}) on {args.experiment}, {spec.trials} trials")
    for name, vals in {**by_group, **by_change}.items():
        if vals:
            print(f"  {name:<10} n={len(vals):>7}  mean w={np.mean(vals):.3f}  median w={np.median(vals):.3f}")
    marks = [0, 4, 9, 24, 49, 99, 249, spec.env.T - 1]
    print("  mean w at step: " + ", ".join(f"t={t + 1}:{curve[t]:.3f}" for t in marks if t < spec.env.T))


if __name__ == "__main__":
    main()
