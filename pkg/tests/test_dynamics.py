import math

import numpy as np
import pytest

from dynroute.core import CommittedState, ContractViolation, dominates, evaluate, new_individual
from dynroute.decisions import DRankPathSource, DecisionPath
from dynroute.dynamics import (advance_clock, auto_delta, mandatory_tour, run_clairvoyant,
                               run_demoa, upper_bound)
from dynroute.emoa import run_static
from dynroute.instances import generate_uniform

from conftest import build_instance


def constant_path(d, n):
    return DecisionPath((d,) * n)


# -- advance_clock -------------------------------------------------------------


def test_advance_clock_cumulative_threshold(line_instance):
    inst = line_instance
    ind = new_individual(inst)  # legs 3, 4, 5 to the mandatory customers
    state = advance_clock(ind, CommittedState(), 0.0, 8.0, inst)
    assert state.prefix == (2, 3)
    assert state.era_start_time == 8.0


def test_advance_clock_zero_time(line_instance):
    ind = new_individual(line_instance)
    assert advance_clock(ind, CommittedState(), 0.0, 0.0, line_instance).prefix == ()


def test_advance_clock_full_tour(line_instance):
    ind = new_individual(line_instance)
    state = advance_clock(ind, CommittedState(), 0.0, 1e6, line_instance)
    assert state.prefix == (2, 3, 4)


def test_advance_clock_exact_arrival_commits(line_instance):
    ind = new_individual(line_instance)
    state = advance_clock(ind, CommittedState(), 0.0, 7.0, line_instance)
    assert state.prefix == (2, 3)


def test_advance_clock_extends_previous(line_instance):
    inst = line_instance
    ind = new_individual(inst)
    first = advance_clock(ind, CommittedState(), 0.0, 4.0, inst)
    assert first.prefix == (2,)
    from dynroute.core import repair

    ind = repair(ind, inst, first)
    second = advance_clock(ind, first, 4.0, 8.0, inst)
    assert second.prefix == (2, 3)
    assert second.extends(first)


def test_advance_clock_rejects_inconsistent_selected(line_instance):
    inst = line_instance
    ind = new_individual(inst)
    foreign = CommittedState((4, 3), 12.0)  # not a prefix of ind.perm
    with pytest.raises(ContractViolation):
        advance_clock(ind, foreign, 12.0, 20.0, inst)


# -- upper bound -----------------------------------------------------------------


def test_upper_bound_counts():
    inst = build_instance(
        [(0, 0)] + [(i, 1) for i in range(1, 11)] + [(11, 0)],
        ["SD"] + ["D"] * 10 + ["ED"],
        request_times=[0] + [1.0] * 10 + [0],
    )
    committed = CommittedState((2, 5, 7, 9), 20.0)
    assert upper_bound(committed, inst, now=5.0) == 6  # 10 appeared, 4 served
    assert upper_bound(CommittedState(), inst, now=5.0) == 10
    assert upper_bound(CommittedState(), inst, now=0.5) == 0  # nothing appeared yet


def test_upper_bound_three_appeared_one_served():
    inst = build_instance(
        [(0, 0), (1, 1), (2, 1), (3, 1), (4, 0)],
        ["SD", "D", "D", "D", "ED"],
        request_times=[0, 1.0, 1.5, 2.0, 0],
    )
    committed = CommittedState((3,), 5.0)
    assert upper_bound(committed, inst, now=2.5) == 2


# -- era loop ----------------------------------------------------------------------


@pytest.fixture
def run_instance():
    return generate_uniform(6, 10, seed=21, n_eras=4, delta=40.0)


def test_run_demoa_single_era_is_hpp(run_instance, tiny_config):
    trace = run_demoa(run_instance, 1, 40.0, DRankPathSource(constant_path(0.5, 1)), tiny_config)
    assert len(trace.records) == 1
    rec = trace.records[0]
    assert len(rec.front) == 1
    ind, length = mandatory_tour(run_instance, seed=tiny_config.seed)
    assert rec.front.members[0][1].tour_length == pytest.approx(
        evaluate(ind, run_instance, CommittedState(), 0.0).tour_length)
    assert rec.front.members[0][1].unvisited == 0


def test_run_demoa_feasibility_and_nesting(run_instance, tiny_config):
    trace = run_demoa(run_instance, 4, 40.0, DRankPathSource(constant_path(0.75, 4)), tiny_config)
    assert len(trace.records) == 4
    for prev, rec in zip(trace.records, trace.records[1:]):
        assert rec.committed.extends(prev.committed)
        assert rec.era_start_time == pytest.approx((rec.era_index - 1) * 40.0)
    for rec in trace.records:
        chosen_obj = rec.front.members[rec.decision.index][1]
        assert chosen_obj.unvisited <= rec.upper_bound
    # irreversibility: committed ids keep their position in later chosen tours
    final_active = trace.final_individual.active_ids().tolist()
    for rec in trace.records:
        k = len(rec.committed.prefix)
        assert final_active[:k] == list(rec.committed.prefix)


def test_run_demoa_trace_csv_round(run_instance, tiny_config, tmp_path):
    trace = run_demoa(run_instance, 3, 40.0, DRankPathSource(constant_path(0.5, 3)), tiny_config)
    out = tmp_path / "trace.csv"
    trace.write_csv(out)
    lines = out.read_text().splitlines()
    assert lines[0] == "era,t,tour_length,unvisited,unvisited_aposteriori,selected,upper_bound"
    assert sum(1 for ln in lines[1:] if ln.split(",")[5] == "1") == 3  # one pick per era
    tour = tmp_path / "tour.txt"
    trace.write_tour(tour)
    rows = [ln.split() for ln in tour.read_text().splitlines()[1:]]
    assert rows[0][1] == "1" and rows[-1][1] == str(run_instance.n)
    arrivals = [float(r[2]) for r in rows]
    assert arrivals == sorted(arrivals)


def test_run_demoa_deterministic(run_instance, tiny_config):
    src = lambda: DRankPathSource(constant_path(0.25, 3))
    a = run_demoa(run_instance, 3, 40.0, src(), tiny_config)
    b = run_demoa(run_instance, 3, 40.0, src(), tiny_config)
    assert a.to_csv() == b.to_csv()


def test_run_demoa_rejects_bad_parameters(run_instance, tiny_config):
    with pytest.raises(ValueError):
        run_demoa(run_instance, 0, 40.0, DRankPathSource(constant_path(0.5, 1)), tiny_config)
    with pytest.raises(ValueError):
        run_demoa(run_instance, 2, 0.0, DRankPathSource(constant_path(0.5, 2)), tiny_config)


def test_auto_delta_spans_mandatory_tour(run_instance):
    delta = auto_delta(run_instance, 4, seed=0)
    _, length = mandatory_tour(run_instance, seed=0)
    assert delta * 4 == pytest.approx(length)


# -- clairvoyant ---------------------------------------------------------------------


def test_clairvoyant_union_nondominated(run_instance, tiny_config):
    front = run_clairvoyant(run_instance, tiny_config, n_repeats=3)
    objs = front.objective_list()
    for i, a in enumerate(objs):
        assert not any(dominates(b, a) for j, b in enumerate(objs) if j != i)
    tls = [o.tour_length for o in objs]
    assert tls == sorted(tls)


def test_clairvoyant_no_dynamics_singleton(tiny_config):
    inst = generate_uniform(7, 0, seed=2, n_eras=4, delta=10.0)
    front = run_clairvoyant(inst, tiny_config, n_repeats=2)
    assert len(front) == 1
    assert front.members[0][1].unvisited == 0


def test_clairvoyant_union_dominates_individual_runs(run_instance, tiny_config):
    from dynroute.metrics import hypervolume_2d

    union = run_clairvoyant(run_instance, tiny_config, n_repeats=3)
    seeds = np.random.SeedSequence(tiny_config.seed).spawn(3)
    ref = (max(o.tour_length for o in union.objective_list()) + 1,
           max(o.unvisited for o in union.objective_list()) + 1)
    hv_union = hypervolume_2d(union.objective_list(), ref)
    for s in seeds:
        rng = np.random.default_rng(s)
        front, _ = run_static(run_instance, CommittedState(), math.inf, tiny_config, rng=rng)
        hv_single = hypervolume_2d(front.objective_list(), ref)
        assert hv_union >= hv_single - 1e-9
