#!/usr/bin/env python3
"""CI-scale end-to-end experiment: tiny instances, exhaustive 3-era sweep,
clairvoyant baselines, indicator evaluation, and the summary table.

Finishes in a few minutes on one core. Results land in out/smoke/.
"""

import argparse
import time
from pathlib import Path

from dynroute.dynamics import auto_delta
from dynroute.emoa import EmoaConfig
from dynroute.harness import (aggregate, clairvoyant_front, evaluate_indicators, sweep,
                              write_clairvoyant)
from dynroute.instances import generate_clustered, generate_uniform, write_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out/smoke")
    ap.add_argument("--replicates", type=int, default=2)
    ap.add_argument("--generations", type=int, default=150)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n_eras = 3
    cfg = EmoaConfig(mu=16, lambda_=16, generations=args.generations)

    instances = {
        "uniform-smoke": generate_uniform(8, 16, seed=args.seed + 1, n_eras=n_eras, delta=50.0),
        "cl2-smoke": generate_clustered(2, 8, 16, seed=args.seed + 2, n_eras=n_eras, delta=50.0),
    }
    deltas = {}
    for name, inst in instances.items():
        deltas[name] = auto_delta(inst, n_eras, seed=args.seed)
        write_instance(inst, out / f"{name}.txt")

    t0 = time.time()
    results, fronts = sweep(instances, (0.25, 0.5, 0.75), n_eras, None, args.replicates,
                            cfg, out, master_seed=args.seed, jobs=args.jobs, deltas=deltas)
    print(f"sweep: {time.time() - t0:.0f}s -> {results}")

    clairvoyant = {}
    for name, inst in instances.items():
        front = clairvoyant_front(inst, cfg, n_repeats=3)
        clairvoyant[name] = front
        write_clairvoyant(front, out / f"clairvoyant_{name}.csv")

    summary = aggregate(results, out / "summary.csv")
    print(summary.to_string(index=False))
    ind = evaluate_indicators(results, fronts, clairvoyant, out / "indicators.csv")
    print(ind.groupby(["instance", "path"])["i_hv"].mean().to_string())


if __name__ == "__main__":
    main()
