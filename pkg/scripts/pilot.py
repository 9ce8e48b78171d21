"""Pilot runs used to calibrate the Monte Carlo acceptance thresholds.

Uses a base seed disjoint from the acceptance suite so the frozen thresholds
are checked on fresh draws.

    python scripts/pilot.py --seed 1000 --trials 100
"""

import argparse
import time

from varimax_phase.harness import SweepConfig, run_sweep, summarize

REGIMES = {
    "recovery k=3 n=1e5 kappa=4": dict(n_list=[100_000], k_list=[3], law_list=["three_point:2.0"]),
    "failure k=32 n=128 kappa=4": dict(n_list=[128], k_list=[32], law_list=["three_point:2.0"],
                                       run_witness=True),
    "control k=3 n=1e5 kappa=3": dict(n_list=[100_000], k_list=[3], law_list=["gaussian"]),
    "phase k=8 kappa=4": dict(n_list=[64, 256, 1024, 4096, 16384], k_list=[8],
                              law_list=["three_point:2.0"]),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--only", default=None, help="substring filter on regime names")
    args = ap.parse_args()
    for name, spec in REGIMES.items():
        if args.only and args.only not in name:
            continue
        cfg = SweepConfig(trials=args.trials, base_seed=args.seed, **spec)
        t0 = time.time()
        recs = run_sweep(cfg, workers=args.workers)
        print(f"== {name}  ({time.time() - t0:.1f}s)")
        for cell in summarize(recs):
            d = sorted(r.dist for r in recs if r.n == cell.n and r.k == cell.k)
            small = sum(x < 0.05 for x in d)
            print(f"  n={cell.n:>6} k={cell.k:>2} success={float(cell.success_rate):.2f} "
                  f"(se {cell.success_se:.3f}) median={cell.median_dist:.4f} "
                  f"min={d[0]:.4f} max={d[-1]:.4f} dist<0.05: {small} "
                  f"witness={cell.witness_beat_rate} errors={cell.errors}")


if __name__ == "__main__":
    main()
