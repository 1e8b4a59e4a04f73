"""Run all three experiment presets and print a Table-1 style summary.

    python scripts/run_table1.py --trials 1000 --out-dir results/
"""
import argparse
import time
from pathlib import Path

from srmu.bench import PRESETS, format_summary, resolve_spec, run_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--steps", type=int)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args()

    rows = {}
    for name in PRESETS:
        spec = resolve_spec({"experiment": name}, trials=args.trials, steps=args.steps, seed=args.seed)
        t0 = time.perf_counter()
        agg = run_experiment(spec, workers=args.workers, out_dir=args.out_dir / name)
        print(format_summary(spec, agg), f"\n({time.perf_counter() - t0:.1f}s)\n")
        rows[name] = agg

    labels = rows[PRESETS[0]].labels
    print(f"{'model':<22}" + "".join(f"{n + ' cos':>12}{n + ' |M|':>12}" for n in PRESETS))
    for i, label in enumerate(labels):
        cells = "".join(f"{rows[n].final_cosine[i]:>12.3f}{rows[n].final_magnitude[i]:>12.2f}"
                        for n in PRESETS)
        print(f"{label:<22}{cells}")
    e3 = rows["exp3"]
    temp, srmu = labels.index("temporal(gamma=0.95)"), labels.index("srmu(gamma=0.95)")
    print(f"\nexp3 srmu vs temporal: cosine {100 * (e3.final_cosine[srmu] / e3.final_cosine[temp] - 1):+.1f}%, "
          f"magnitude {100 * (e3.final_magnitude[srmu] / e3.final_magnitude[temp] - 1):+.1f}%")


if __name__ == "__main__":
    main()
