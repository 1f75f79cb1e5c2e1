#!/usr/bin/env python3
"""The complete exhaustive study: 3 instance topologies x 3^7 decision paths
x 5 replicates = 32,805 runs, plus clairvoyant baselines and indicators.

This is multi-day work on a single core; it exists for completeness and must
be enabled explicitly. The sweep is resumable, so it can run in slices.
"""

import argparse
from pathlib import Path

from dynroute.dynamics import auto_delta
from dynroute.emoa import EmoaConfig
from dynroute.harness import clairvoyant_front, evaluate_indicators, sweep, write_clairvoyant
from dynroute.instances import generate_clustered, generate_uniform, write_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--i-know-this-takes-days", action="store_true",
                    help="required acknowledgement")
    ap.add_argument("--out-dir", default="out/full")
    ap.add_argument("--replicates", type=int, default=5)
    ap.add_argument("--generations", type=int, default=65_000)
    ap.add_argument("--mu", type=int, default=100)
    ap.add_argument("--master-seed", type=int, default=1)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    if not args.i_know_this_takes_days:
        ap.error("pass --i-know-this-takes-days to start the full-scale sweep")

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n_eras = 7
    cfg = EmoaConfig(mu=args.mu, lambda_=args.mu, generations=args.generations,
                     ls_time_limit=1.0)

    instances = {
        "uniform-full": generate_uniform(25, 75, seed=1, n_eras=n_eras, delta=100.0),
        "cl2-full": generate_clustered(2, 25, 75, seed=3, n_eras=n_eras, delta=100.0),
        "cl3-full": generate_clustered(3, 25, 75, seed=3, n_eras=n_eras, delta=100.0),
    }
    deltas = {}
    for name, inst in instances.items():
        deltas[name] = auto_delta(inst, n_eras, seed=1)
        write_instance(inst, out / f"{name}.txt")

    results, fronts = sweep(instances, (0.25, 0.5, 0.75), n_eras, None, args.replicates,
                            cfg, out, master_seed=args.master_seed, jobs=args.jobs,
                            deltas=deltas)

    clairvoyant = {}
    for name, inst in instances.items():
        front = clairvoyant_front(inst, cfg, n_repeats=10)
        clairvoyant[name] = front
        write_clairvoyant(front, out / f"clairvoyant_{name}.csv")
    evaluate_indicators(results, fronts, clairvoyant, out / "indicators.csv")


if __name__ == "__main__":
    main()
