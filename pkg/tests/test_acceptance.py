"""Acceptance suite: one test per release criterion, each printing a PASS/FAIL
line (run with `pytest tests/test_acceptance.py -s` to see them live).

The directional experiments run at desk scale: generations=2000, mu=lambda=50,
N=100, 7 eras, d in {0.25, 0.5, 0.75}. Set DYNROUTE_ACCEPT_CACHE to a
directory to reuse completed sweep runs across invocations.
"""

import functools
import itertools
import math
import os
import time
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from dynroute.core import (ObjectiveVector, dominates, evaluate, is_feasible,
                           nondominated_filter, repair)
from dynroute.decisions import DecisionPath, DRankPathSource, parse_path
from dynroute.dynamics import auto_delta, run_demoa
from dynroute.emoa import EmoaConfig, fast_nondominated_sort
from dynroute.harness import default_selected_paths, sweep
from dynroute.instances import assign_request_times, generate_clustered, generate_uniform
from dynroute.localsearch import path_length
from dynroute.metrics import filter_by_bound, hv_indicator, hypervolume_2d

DESK = dict(mu=50, lambda_=50, generations=2000)
D_SET = (0.25, 0.5, 0.75)
N_ERAS = 7
REPLICATES = 10


def criterion(num, title):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            start = time.time()
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"\nACCEPTANCE {num} ({title}): FAIL [{time.time()-start:.1f}s]")
                raise
            print(f"\nACCEPTANCE {num} ({title}): PASS [{time.time()-start:.1f}s]")
        return wrapper
    return deco


# -- shared desk-scale fixtures -------------------------------------------------
#
# Desk instances follow the gen-instance flow: draw the topology, size the era
# length from the mandatory tour, then assign request times against that
# horizon so every request appears by the last era. The era length is scaled
# 1.5x over the bare mandatory-tour split because optimized tours carry many
# dynamic detours; this brings the committed-tour depth at the last era in
# line with the served counts the reference experiments report.
DELTA_SCALE = 1.5


def desk_uniform():
    inst = generate_uniform(25, 75, seed=1, n_eras=N_ERAS, delta=100.0)
    delta = DELTA_SCALE * auto_delta(inst, N_ERAS, seed=1)
    return assign_request_times(inst, N_ERAS, delta, seed=1)


def desk_cl2():
    inst = generate_clustered(2, 25, 75, seed=3, n_eras=N_ERAS, delta=100.0)
    delta = DELTA_SCALE * auto_delta(inst, N_ERAS, seed=3)
    return assign_request_times(inst, N_ERAS, delta, seed=3)


def _sweep_dir(tmp_path_factory, name):
    cache = os.environ.get("DYNROUTE_ACCEPT_CACHE")
    if cache:
        d = Path(cache) / name
        d.mkdir(parents=True, exist_ok=True)
        return d
    return tmp_path_factory.mktemp(name)


def _run_sweep(tmp_path_factory, dirname, name, inst, paths):
    out = _sweep_dir(tmp_path_factory, dirname)
    results, fronts = sweep({name: inst}, D_SET, N_ERAS, inst.delta, REPLICATES,
                            EmoaConfig(**DESK), out, master_seed=2024, paths=paths)
    return {"results": pd.read_csv(results), "fronts": pd.read_csv(fronts)}


@pytest.fixture(scope="session")
def uniform_direction_sweep(tmp_path_factory):
    """Constant decision paths, one per d value: criterion 4's 30 runs."""
    paths = [DecisionPath((d,) * N_ERAS) for d in D_SET]
    return _run_sweep(tmp_path_factory, "uniform_sweep", "uniform-desk",
                      desk_uniform(), paths)


@pytest.fixture(scope="session")
def uniform_four_sweep(tmp_path_factory):
    """The four contrasting paths on the uniform instance; shares the cache
    directory (and the two constant paths) with the direction sweep."""
    return _run_sweep(tmp_path_factory, "uniform_sweep", "uniform-desk",
                      desk_uniform(), default_selected_paths(N_ERAS))


@pytest.fixture(scope="session")
def cl2_four_sweep(tmp_path_factory):
    return _run_sweep(tmp_path_factory, "cl2_sweep", "cl2-desk",
                      desk_cl2(), default_selected_paths(N_ERAS))


# -- oracles ---------------------------------------------------------------------


def oracle_filter(points):
    return [i for i, p in enumerate(points)
            if not any(dominates(q, p) for q in points)]


def oracle_fronts(points):
    remaining = list(range(len(points)))
    fronts = []
    while remaining:
        sub = [points[i] for i in remaining]
        keep = set(oracle_filter(sub))
        front = sorted(remaining[i] for i in keep)
        fronts.append(front)
        remaining = [r for i, r in enumerate(remaining) if i not in keep]
    return fronts


def oracle_hv_exact(points, ref):
    """Exact dominated area by coordinate-compressed cell counting."""
    rx, ry = ref
    pts = [(x, y) for x, y in points if x <= rx and y <= ry]
    if not pts:
        return 0.0
    xs = np.array(sorted({x for x, _ in pts} | {rx}))
    ys = np.array(sorted({y for _, y in pts} | {ry}))
    covered = np.zeros((len(xs) - 1, len(ys) - 1), dtype=bool)
    for x, y in pts:
        covered |= (xs[:-1, None] >= x) & (ys[None, :-1] >= y)
    widths = np.diff(xs)[:, None]
    heights = np.diff(ys)[None, :]
    return float((covered * widths * heights).sum())


def oracle_hpp(dist, start, end):
    inner = [i for i in range(dist.shape[0]) if i not in (start, end)]
    best = math.inf
    for perm in itertools.permutations(inner):
        best = min(best, path_length(dist, np.array([start, *perm, end])))
    return best


# -- criteria ---------------------------------------------------------------------


@criterion(1, "oracle equivalence: sorting, dominance filter, hypervolume")
def test_acceptance_1_oracle_equivalence():
    rng = np.random.default_rng(101)
    sizes = ([int(rng.integers(1, 80)) for _ in range(920)]
             + [int(rng.integers(80, 200)) for _ in range(60)]
             + [int(rng.integers(200, 501)) for _ in range(20)])
    assert len(sizes) >= 1000
    for n in sizes:
        tl = np.round(rng.uniform(0, 50, n), 3)
        uv = rng.integers(0, 25, n)
        pts = [ObjectiveVector(float(a), int(b)) for a, b in zip(tl, uv)]
        assert nondominated_filter(pts) == oracle_filter(pts)
        got = [f.tolist() for f in fast_nondominated_sort(np.array(pts, dtype=float))]
        assert got == oracle_fronts(pts)
        ref = (float(tl.max()) + 1.0, float(uv.max()) + 1.0)
        hv = hypervolume_2d(pts, ref)
        exact = oracle_hv_exact(pts, ref)
        assert hv == pytest.approx(exact, rel=1e-3, abs=1e-9)


@criterion(2, "era-1 singleton at near-optimal Hamiltonian path")
def test_acceptance_2_era1_singleton():
    cfg = EmoaConfig(mu=10, lambda_=10, generations=10, seed=0)
    for seed, n_mand, n_dyn in [(0, 4, 6), (1, 6, 10), (2, 8, 8), (3, 10, 10),
                                (4, 10, 0), (5, 7, 20)]:
        inst = generate_uniform(n_mand, n_dyn, seed=seed, n_eras=3, delta=50.0)
        trace = run_demoa(inst, 1, 50.0, DRankPathSource(DecisionPath((0.5,))), cfg)
        assert len(trace.records) == 1
        front = trace.records[0].front
        assert len(front) == 1
        nodes = np.concatenate([[1], inst.mandatory_ids(), [inst.n]])
        sub = inst.dist[np.ix_(nodes - 1, nodes - 1)]
        optimum = oracle_hpp(sub, 0, len(nodes) - 1)
        got = front.members[0][1].tour_length
        assert got <= 1.05 * optimum + 1e-9, f"seed {seed}: {got} vs optimum {optimum}"


@pytest.mark.slow
@criterion(3, "feasibility over a full desk-scale run")
def test_acceptance_3_feasibility_suite():
    inst = desk_uniform()
    delta = inst.delta
    cfg = EmoaConfig(**DESK, seed=42)
    path = parse_path("0.25,0.5,0.75,0.25,0.75,0.5,0.5")
    trace = run_demoa(inst, N_ERAS, delta, DRankPathSource(path), cfg)
    assert len(trace.records) == N_ERAS
    from dynroute.localsearch import boost

    for prev, rec in zip(trace.records, trace.records[1:]):
        assert rec.committed.extends(prev.committed)
    for rec in trace.records:
        chosen_obj = rec.front.members[rec.decision.index][1]
        assert chosen_obj.unvisited <= rec.upper_bound
        now = rec.era_start_time
        for ind, obj in rec.front.members:
            assert is_feasible(ind, inst, rec.committed)
            again = repair(ind, inst, rec.committed)
            assert again.perm.tolist() == ind.perm.tolist()
            assert again.bits.tolist() == ind.bits.tolist()
            boosted = boost(ind, inst, rec.committed)
            assert (evaluate(boosted, inst, rec.committed, now).tour_length
                    <= obj.tour_length + 1e-9)


@pytest.mark.slow
@criterion(4, "final decision direction on the uniform instance")
def test_acceptance_4_direction_uniform(uniform_direction_sweep):
    constant = {DecisionPath((d,) * N_ERAS).compact() for d in D_SET}
    df = uniform_direction_sweep["results"]
    df = df[df["path"].isin(constant)].copy()
    assert len(df) == 3 * REPLICATES
    df["last_d"] = df["path"].map(lambda p: float(p.split(",")[-1]))
    by_d = df.groupby("last_d").agg(tl=("tour_length", "mean"), uv=("unvisited", "mean"))
    by_d = by_d.sort_index()
    assert list(by_d.index) == [0.25, 0.5, 0.75]
    tls, uvs = by_d["tl"].tolist(), by_d["uv"].tolist()
    print(f"\n  last-d means: tour_length={['%.1f' % v for v in tls]} "
          f"unvisited={['%.2f' % v for v in uvs]}")
    assert tls[0] < tls[1] < tls[2]
    assert uvs[0] > uvs[1] > uvs[2]


@pytest.mark.slow
@criterion(5, "topology contrast: clustered runs vary more")
def test_acceptance_5_topology_contrast(uniform_four_sweep, cl2_four_sweep):
    """Directional analogue of the reference comparison, which contrasts the
    final-unvisited std at the short-tour final preference (d = 0.25)."""
    four = {p.compact() for p in default_selected_paths(N_ERAS)}

    def group_stds(df):
        sub = df[df["path"].isin(four)].copy()
        assert len(sub) == 4 * REPLICATES
        sub["last_d"] = sub["path"].map(lambda p: float(p.split(",")[-1]))
        return sub.groupby("last_d")["unvisited"].std(ddof=1)

    uni = group_stds(uniform_four_sweep["results"])
    cl2 = group_stds(cl2_four_sweep["results"])
    print(f"\n  per-final-decision unvisited std: uniform={uni.round(3).to_dict()} "
          f"cl2={cl2.round(3).to_dict()}")
    assert cl2[0.25] > uni[0.25]


@criterion(6, "hypervolume indicator sanity")
def test_acceptance_6_indicator_sanity():
    rng = np.random.default_rng(606)
    for _ in range(300):
        n_p, n_r = rng.integers(1, 30, size=2)
        p = list(zip(rng.uniform(0, 100, n_p).round(2), rng.integers(0, 40, n_p)))
        extra = list(zip(rng.uniform(0, 100, n_r).round(2), rng.integers(0, 40, n_r)))
        union = p + extra
        ref_set = [union[i] for i in nondominated_filter(union)]
        assert hv_indicator(p, ref_set) >= -1e-9
        assert hv_indicator(p, p) == pytest.approx(0.0)
    # bound filtering keeps exactly the reference points within the cap
    r = [(100.0 - i, i) for i in range(20)]
    bound = 7
    kept = filter_by_bound(r, bound)
    assert kept == [pt for pt in r if pt[1] <= bound]
    assert all(pt[1] <= bound for pt in kept)


@pytest.mark.slow
@criterion(7, "sweep bookkeeping: 54 deterministic records")
def test_acceptance_7_sweep_bookkeeping(tmp_path):
    inst = generate_uniform(6, 12, seed=77, n_eras=3, delta=25.0)
    cfg = EmoaConfig(mu=16, lambda_=16, generations=120)
    a, _ = sweep({"smoke": inst}, D_SET, 3, None, 2, cfg, tmp_path / "a", master_seed=11)
    rows = a.read_text().splitlines()
    assert len(rows) - 1 == 3 ** 3 * 2 == 54
    b, _ = sweep({"smoke": inst}, D_SET, 3, None, 2, cfg, tmp_path / "b", master_seed=11)
    assert a.read_bytes() == b.read_bytes()


@criterion(8, "API replay equals CLI trace")
def test_acceptance_8_api_cli_equivalence():
    from fastapi.testclient import TestClient

    from dynroute.service import bundled_instances, create_app

    inst = bundled_instances()["cl2-small"]
    path = parse_path("0.25,0.75,0.5,0.25,0.75")
    cfg = EmoaConfig(mu=12, lambda_=12, generations=40, seed=9)
    cli_trace = run_demoa(inst, inst.n_eras, inst.delta, DRankPathSource(path), cfg)

    with TestClient(create_app()) as client:
        r = client.post("/api/sessions", json={"instance": "cl2-small", "mu": 12,
                                               "lambda_": 12, "generations": 40, "seed": 9})
        sid = r.json()["id"]
        for d in path.d_values:
            deadline = time.time() + 120
            while time.time() < deadline:
                snap = client.get(f"/api/sessions/{sid}").json()
                if snap["state"] == "awaiting_decision":
                    break
                time.sleep(0.02)
            assert snap["state"] == "awaiting_decision"
            assert client.post(f"/api/sessions/{sid}/decision",
                               json={"d": d}).status_code == 200
        deadline = time.time() + 120
        while time.time() < deadline:
            snap = client.get(f"/api/sessions/{sid}").json()
            if snap["state"] == "finished":
                break
            time.sleep(0.02)
        api_csv = client.get(f"/api/sessions/{sid}/trace.csv").text
    assert api_csv == cli_trace.to_csv()
