"""Run a sweep config and print the success-rate table next to the n = k^2 boundary.

    python scripts/phase_diagram.py configs/grid.txt --seed 1 --out runs/grid
"""

import argparse
import logging

from varimax_phase.harness import load_config, run_sweep, write_outputs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config")
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = load_config(args.config, base_seed=args.seed)
    summary = write_outputs(args.out, run_sweep(cfg, workers=args.workers))

    for law in cfg.law_list:
        cells = {(c.n, c.k): c for c in summary if (c.family, c.kappa) == (law.family, law.kappa)}
        print(f"\n{law} (kappa={law.kappa:.4g}); '*' marks n >= k^2")
        print("k \\ n " + "".join(f"{n:>8}" for n in cfg.n_list))
        for k in sorted(cfg.k_list, reverse=True):
            row = []
            for n in cfg.n_list:
                c = cells.get((n, k))
                row.append(f"{'':>8}" if c is None else
                           f"{float(c.success_rate):>7.2f}{'*' if n >= k * k else ' '}")
            print(f"{k:>5} " + "".join(row))
    print(f"\nwrote {args.out}/records.csv, summary.csv, phase.svg")


if __name__ == "__main__":
    main()
