import itertools

import numpy as np
import pytest

from dynroute.core import CommittedState, evaluate, new_individual
from dynroute.localsearch import (boost, cycle_length, hpp_to_tsp, path_length,
                                  solve_hpp, solve_tsp)

from conftest import build_instance


def euclid(points):
    pts = np.asarray(points, dtype=float)
    return np.sqrt(((pts[:, None] - pts[None, :]) ** 2).sum(-1))


def hpp_oracle(dist, start, end):
    """Exhaustive shortest start->end Hamiltonian path."""
    inner = [i for i in range(dist.shape[0]) if i not in (start, end)]
    best = np.inf
    for perm in itertools.permutations(inner):
        order = np.array([start, *perm, end])
        best = min(best, path_length(dist, order))
    return best


def tsp_oracle(dist):
    k = dist.shape[0]
    best = np.inf
    for perm in itertools.permutations(range(1, k)):
        best = min(best, cycle_length(dist, np.array([0, *perm])))
    return best


# -- reduction ----------------------------------------------------------------


def test_hpp_collinear():
    dist = euclid([(0, 0), (1, 0), (2, 0)])
    order, length = solve_hpp(dist, 0, 2)
    assert length == pytest.approx(2.0)
    assert order[0] == 0 and order[-1] == 2


@pytest.mark.parametrize("seed", range(25))
def test_hpp_matches_factorial_oracle(seed):
    rng = np.random.default_rng(seed)
    dist = euclid(rng.uniform(0, 100, (5, 2)))
    order, length = solve_hpp(dist, 0, 4, seed=seed)
    assert length == pytest.approx(hpp_oracle(dist, 0, 4))
    assert order[0] == 0 and order[-1] == 4
    assert sorted(order.tolist()) == list(range(5))


def test_dummy_edges_prohibitive():
    dist = euclid([(0, 0), (5, 5), (10, 0), (2, 8)])
    aug = hpp_to_tsp(dist, 0, 2)
    big = 1.0 + np.triu(dist, 1).sum()
    assert aug[4, 0] == 0.0 and aug[4, 2] == 0.0
    assert aug[4, 1] == big and aug[4, 3] == big
    # any cycle using a non-endpoint dummy edge pays more than any detour saves
    assert big > dist.sum()/2


def test_hpp_rejects_equal_endpoints():
    with pytest.raises(ValueError):
        hpp_to_tsp(euclid([(0, 0), (1, 1), (2, 2)]), 1, 1)


def test_hpp_two_nodes_trivial():
    dist = euclid([(0, 0), (3, 4)])
    order, length = solve_hpp(dist, 0, 1)
    assert order.tolist() == [0, 1]
    assert length == pytest.approx(5.0)


# -- tsp solver ----------------------------------------------------------------


def test_tsp_unit_square():
    dist = euclid([(0, 0), (1, 0), (1, 1), (0, 1)])
    tour = solve_tsp(dist, seed=0)
    assert cycle_length(dist, tour) == pytest.approx(4.0)


def test_tsp_within_5pct_of_optimum():
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(5, 9))
        dist = euclid(rng.uniform(0, 100, (n, 2)))
        tour = solve_tsp(dist, seed=seed)
        if cycle_length(dist, tour) <= 1.05 * tsp_oracle(dist) + 1e-9:
            hits += 1
    assert hits >= 95


def test_tsp_visits_every_node_once():
    rng = np.random.default_rng(5)
    dist = euclid(rng.uniform(0, 100, (17, 2)))
    tour = solve_tsp(dist, seed=2)
    assert sorted(tour.tolist()) == list(range(17))


def test_tsp_deterministic_without_time_limit():
    rng = np.random.default_rng(8)
    dist = euclid(rng.uniform(0, 100, (20, 2)))
    a = solve_tsp(dist, seed=3)
    b = solve_tsp(dist, seed=3)
    assert a.tolist() == b.tolist()


# -- boost ----------------------------------------------------------------------


@pytest.fixture
def crossing_instance():
    # active order 2,3,4,5 crosses itself; uncrossing is strictly shorter
    return build_instance(
        [(0, 0), (1, 1), (3, 0.5), (1, 0.5), (3, 1), (4, 0)],
        ["SD", "M", "M", "M", "M", "ED"],
    )


def test_boost_removes_crossing(crossing_instance):
    inst = crossing_instance
    committed = CommittedState()
    ind = new_individual(inst)
    before = evaluate(ind, inst, committed, 0.0)
    out = boost(ind, inst, committed)
    after = evaluate(out, inst, committed, 0.0)
    assert after.tour_length < before.tour_length
    assert after.unvisited == before.unvisited


def test_boost_fixpoint_on_optimal_path():
    inst = build_instance(
        [(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)],
        ["SD", "M", "M", "M", "ED"],
    )
    ind = new_individual(inst)
    out = boost(ind, inst, CommittedState())
    assert out.perm.tolist() == ind.perm.tolist()


def test_boost_never_increases_length_never_touches_bits():
    inst = build_instance(
        [(i % 5, i // 5) for i in range(12)],
        ["SD"] + ["M"] * 4 + ["D"] * 6 + ["ED"],
        request_times=[0] + [0] * 4 + [1] * 6 + [0],
    )
    rng = np.random.default_rng(11)
    committed = CommittedState()
    for _ in range(25):
        ind = new_individual(inst)
        mask = inst.appeared_mask(np.inf)
        ind.bits[mask] = rng.integers(0, 2, size=mask.sum(), dtype=np.uint8)
        ind.perm = rng.permutation(inst.inner_ids)
        before = evaluate(ind, inst, committed, np.inf)
        out = boost(ind, inst, committed)
        after = evaluate(out, inst, committed, np.inf)
        assert after.tour_length <= before.tour_length + 1e-9
        assert after.unvisited == before.unvisited
        assert out.bits.tolist() == ind.bits.tolist()


def test_boost_keeps_committed_prefix_in_place():
    inst = build_instance(
        [(0, 0), (4, 4), (1, 0), (2, 3), (3, 1), (5, 5)],
        ["SD", "M", "M", "M", "M", "ED"],
    )
    committed = CommittedState((4, 2), 50.0)
    ind = new_individual(inst, perm=np.array([4, 2, 3, 5]))
    out = boost(ind, inst, committed)
    assert out.perm.tolist()[:2] == [4, 2]
