"""Benchmark statistics over many seeds: placement accuracy and the low/high frequency error split."""

import argparse
import logging

import numpy as np

from lsmm import FSSConfig, run_benchmark_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--order", type=int, default=10)
    args = ap.parse_args()
    logging.disable(logging.WARNING)

    print("seed  placement   preserve   ratio<=bound  med<20     med>30     split")
    placed, split = [], []
    for seed in range(args.seeds):
        rep = run_benchmark_experiment(FSSConfig(seed=seed), order=args.order, grid=np.logspace(-2, 4, 500))
        s = rep.rel_error_median_high / rep.rel_error_median_low
        placed.append(rep.placement_error)
        split.append(s)
        print(f"{seed:4d}  {rep.placement_error:9.2e}  {rep.preservation_error:9.2e}  "
              f"{str(rep.ratio <= rep.bound + 1e-6):12s}  {rep.rel_error_median_low:9.3g}  "
              f"{rep.rel_error_median_high:9.3g}  {s:8.3g}")
    placed, split = np.array(placed), np.array(split)
    print(f"placement <= 1e-6 on {np.sum(placed <= 1e-6)}/{args.seeds} seeds")
    print(f"high/low median split >= 10 on {np.sum(split >= 10)}/{args.seeds} seeds "
          f"(quartiles {np.percentile(split, [25, 50, 75]).round(2).tolist()})")


if __name__ == "__main__":
    main()
