"""Batch experiments: exhaustive decision-path sweeps, clairvoyant baselines,
Table-style aggregation, and hypervolume-indicator evaluation.

Sweeps append to two CSVs as runs finish so interrupted jobs can resume:
results.csv holds one row per run (the final-era chosen solution) and acts as
the completion marker; fronts.csv holds every final-era front member.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path

import pandas as pd

from .core import ObjectiveVector, nondominated_filter
from .decisions import DecisionPath, DRankPathSource, enumerate_paths
from .dynamics import run_clairvoyant, run_demoa
from .emoa import EmoaConfig
from .instances import Instance
from .metrics import filter_by_bound, hv_indicator, to_aposteriori

CSV_COLUMNS = ["instance", "topology", "path", "replicate", "era", "solution_id",
               "tour_length", "unvisited", "unvisited_apost", "selected", "upper_bound"]


def default_selected_paths(n_eras: int, lo: float = 0.25, hi: float = 0.75) -> list[DecisionPath]:
    """The four contrasting decision paths used for focused studies: constant
    low, constant high, low-then-high, and high-then-low."""
    head = (n_eras + 1) // 2
    tail = n_eras - head
    return [
        DecisionPath((lo,) * n_eras),
        DecisionPath((hi,) * n_eras),
        DecisionPath((lo,) * head + (hi,) * tail),
        DecisionPath((hi,) * head + (lo,) * tail),
    ]


def derive_seed(master_seed: int, instance_name: str, path: DecisionPath, replicate: int) -> int:
    """Stable per-run seed; independent of work ordering."""
    key = f"{master_seed}|{instance_name}|{path.compact()}|{replicate}"
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")


def _final_era_rows(instance_name: str, instance: Instance, path: DecisionPath,
                    replicate: int, trace) -> tuple[dict, list[dict]]:
    rec = trace.records[-1]
    total = instance.n_dynamic
    fronts = []
    chosen_row = None
    for i, (_, obj) in enumerate(rec.front.members):
        apost = to_aposteriori(obj, rec.appeared_count, total)
        row = {
            "instance": instance_name, "topology": instance.topology_label,
            "path": path.compact(), "replicate": replicate, "era": rec.era_index,
            "solution_id": i + 1, "tour_length": round(obj.tour_length, 6),
            "unvisited": obj.unvisited, "unvisited_apost": apost.unvisited,
            "selected": int(i == rec.decision.index), "upper_bound": rec.upper_bound,
        }
        fronts.append(row)
        if i == rec.decision.index:
            chosen_row = row
    return chosen_row, fronts


def run_one(instance: Instance, instance_name: str, path: DecisionPath, replicate: int,
            n_eras: int, delta: float, config: EmoaConfig, master_seed: int) -> tuple[dict, list[dict]]:
    """Single (instance, path, replicate) experiment; pure in its seed."""
    seed = derive_seed(master_seed, instance_name, path, replicate)
    cfg = dataclasses.replace(config, seed=seed)
    trace = run_demoa(instance, n_eras, delta, DRankPathSource(path), cfg)
    return _final_era_rows(instance_name, instance, path, replicate, trace)


def _completed_keys(results_csv: Path) -> set[tuple[str, str, int]]:
    if not results_csv.exists():
        return set()
    done = set()
    with results_csv.open() as fh:
        for row in csv.DictReader(fh):
            done.add((row["instance"], row["path"], int(row["replicate"])))
    return done


def _prune_orphan_fronts(fronts_csv: Path, done: set[tuple[str, str, int]]) -> None:
    """Drop front rows of runs that never reached their results.csv marker."""
    if not fronts_csv.exists():
        return
    with fronts_csv.open() as fh:
        rows = [r for r in csv.DictReader(fh)
                if (r["instance"], r["path"], int(r["replicate"])) in done]
    with fronts_csv.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        w.writerows(rows)


def _run_one_star(args):
    return run_one(*args)


def sweep(instances: dict[str, Instance], d_set, n_eras: int, delta: float | None,
          replicates: int, config: EmoaConfig, out_dir: str | Path,
          master_seed: int = 0, jobs: int = 1,
          deltas: dict[str, float] | None = None,
          paths: list[DecisionPath] | None = None) -> tuple[Path, Path]:
    """Run every (instance x decision path x replicate); append rows as runs
    complete and skip tuples already present in results.csv.

    By default the decision paths are the exhaustive |d_set|^n_eras
    enumeration; pass `paths` for a focused study.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results_csv = out / "results.csv"
    fronts_csv = out / "fronts.csv"

    done = _completed_keys(results_csv)
    _prune_orphan_fronts(fronts_csv, done)

    if paths is None:
        paths = list(enumerate_paths(d_set, n_eras))
    work = []
    for name, inst in sorted(instances.items()):
        run_delta = (deltas or {}).get(name, delta if delta is not None else inst.delta)
        for path in paths:
            for rep in range(1, replicates + 1):
                if (name, path.compact(), rep) in done:
                    continue
                work.append((inst, name, path, rep, n_eras, run_delta, config, master_seed))

    new_files = not results_csv.exists()
    with results_csv.open("a", newline="") as res_fh, fronts_csv.open("a", newline="") as fr_fh:
        res_w = csv.DictWriter(res_fh, fieldnames=CSV_COLUMNS)
        fr_w = csv.DictWriter(fr_fh, fieldnames=CSV_COLUMNS)
        if new_files:
            res_w.writeheader()
            fr_w.writeheader()

        def write(chosen_row, front_rows):
            fr_w.writerows(front_rows)
            fr_fh.flush()
            res_w.writerow(chosen_row)  # completion marker goes last
            res_fh.flush()

        if jobs <= 1:
            for item in work:
                chosen_row, front_rows = _run_one_star(item)
                write(chosen_row, front_rows)
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(_run_one_star, item) for item in work]
                for fut in as_completed(futures):
                    chosen_row, front_rows = fut.result()
                    write(chosen_row, front_rows)
    return results_csv, fronts_csv


def clairvoyant_front(instance: Instance, config: EmoaConfig, n_repeats: int = 10) -> list[ObjectiveVector]:
    return run_clairvoyant(instance, config, n_repeats).objective_list()


def write_clairvoyant(front: list[ObjectiveVector], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tour_length", "unvisited"])
        for obj in front:
            w.writerow([round(obj.tour_length, 6), obj.unvisited])


def read_clairvoyant(path: str | Path) -> list[ObjectiveVector]:
    with Path(path).open() as fh:
        return [ObjectiveVector(float(r["tour_length"]), int(r["unvisited"]))
                for r in csv.DictReader(fh)]


def aggregate(results_csv: str | Path, out_csv: str | Path | None = None) -> pd.DataFrame:
    """Mean/std of the final chosen tour length and unvisited count, split by
    topology and the decision made in the last era."""
    df = pd.read_csv(results_csv)
    df["last_d"] = df["path"].map(lambda p: float(p.split(",")[-1]))
    g = df.groupby(["topology", "last_d"])
    summary = g.agg(
        n_runs=("tour_length", "size"),
        tour_length_mean=("tour_length", "mean"),
        tour_length_std=("tour_length", lambda s: s.std(ddof=1) if len(s) > 1 else 0.0),
        unvisited_mean=("unvisited", "mean"),
        unvisited_std=("unvisited", lambda s: s.std(ddof=1) if len(s) > 1 else 0.0),
    ).reset_index()
    if out_csv is not None:
        summary.to_csv(out_csv, index=False)
    return summary


def evaluate_indicators(results_csv: str | Path, fronts_csv: str | Path,
                        clairvoyant: dict[str, list[ObjectiveVector]],
                        out_csv: str | Path | None = None) -> pd.DataFrame:
    """Per-run hypervolume indicator against the per-instance reference set.

    The reference is the non-dominated union of all final-era DEMOA fronts of
    that instance with the clairvoyant front, the latter first restricted to
    the maximum final-era upper bound observed over all runs.
    """
    res = pd.read_csv(results_csv)
    fronts = pd.read_csv(fronts_csv)
    rows = []
    for name, res_grp in res.groupby("instance"):
        if name not in clairvoyant:
            raise KeyError(f"no clairvoyant front for instance {name!r}")
        max_bound = int(res_grp["upper_bound"].max())
        cl = filter_by_bound([(o.tour_length, o.unvisited) for o in clairvoyant[name]], max_bound)
        inst_fronts = fronts[fronts["instance"] == name]
        union = [(tl, uv) for tl, uv in zip(inst_fronts["tour_length"],
                                            inst_fronts["unvisited_apost"])] + list(cl)
        ref = [union[i] for i in nondominated_filter(union)]
        for (path, rep), grp in inst_fronts.groupby(["path", "replicate"]):
            p = list(zip(grp["tour_length"], grp["unvisited_apost"]))
            rows.append({"instance": name, "topology": grp["topology"].iloc[0],
                         "path": path, "replicate": rep,
                         "i_hv": hv_indicator(p, ref)})
    out = pd.DataFrame(rows, columns=["instance", "topology", "path", "replicate", "i_hv"])
    if out_csv is not None:
        out.to_csv(out_csv, index=False)
    return out
