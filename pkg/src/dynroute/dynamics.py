"""Era driver: clock advancement against committed prefixes, per-era upper
bounds, the full optimization loop, and the clairvoyant baseline.

The vehicle departs depot 1 at time 0 and moves at unit speed; a customer is
committed once fully reached. Re-planning itself takes no model time.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import localsearch
from .core import (ApproximationSet, CommittedState, ContractViolation, Individual,
                   ObjectiveVector, approximation_set, evaluate, is_feasible,
                   new_individual, nondominated_filter)
from .decisions import Decision, DecisionAborted, DecisionSource
from .emoa import EmoaConfig, init_random, init_transfer, run_static
from .instances import Instance
from .metrics import to_aposteriori


@dataclass
class EraRecord:
    era_index: int
    era_start_time: float
    appeared_count: int
    upper_bound: int
    front: ApproximationSet
    committed: CommittedState
    decision: Decision
    chosen: Individual


@dataclass
class EraTrace:
    instance: Instance
    records: list[EraRecord] = field(default_factory=list)
    aborted: bool = False

    @property
    def final_individual(self) -> Individual | None:
        return self.records[-1].chosen if self.records else None

    def chosen_objectives(self) -> list[ObjectiveVector]:
        return [r.front.members[r.decision.index][1] for r in self.records]

    def to_csv(self) -> str:
        """One row per (era, front solution): era, t, tour_length, unvisited,
        unvisited_aposteriori, selected, upper_bound."""
        total = self.instance.n_dynamic
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["era", "t", "tour_length", "unvisited",
                    "unvisited_aposteriori", "selected", "upper_bound"])
        for rec in self.records:
            for i, (_, obj) in enumerate(rec.front.members):
                apost = to_aposteriori(obj, rec.appeared_count, total)
                w.writerow([rec.era_index, f"{rec.era_start_time:.6f}",
                            f"{obj.tour_length:.6f}", obj.unvisited, apost.unvisited,
                            int(i == rec.decision.index), rec.upper_bound])
        return buf.getvalue()

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())

    def final_tour_rows(self) -> list[tuple[int, int, float]]:
        """(position, customer id, arrival time) along the final tour,
        including both depots."""
        ind = self.final_individual
        if ind is None:
            return []
        inst = self.instance
        rows = np.concatenate([[0], ind.active_ids() - 1, [inst.n - 1]])
        arrivals = np.concatenate([[0.0], np.cumsum(inst.dist[rows[:-1], rows[1:]])])
        return [(p, int(r + 1), float(t)) for p, (r, t) in enumerate(zip(rows, arrivals))]

    def write_tour(self, path: str | Path) -> None:
        lines = ["# position id arrival_time"]
        for pos, cid, t in self.final_tour_rows():
            lines.append(f"{pos} {cid} {t:.6f}")
        Path(path).write_text("\n".join(lines) + "\n")


def advance_clock(selected: Individual, committed: CommittedState, from_time: float,
                  to_time: float, instance: Instance) -> CommittedState:
    """Commit every active customer the vehicle has fully reached by to_time."""
    if to_time < from_time:
        raise ValueError("to_time must be >= from_time")
    if not is_feasible(selected, instance, committed):
        raise ContractViolation("selected tour is inconsistent with the committed state")
    active = selected.active_ids()
    if len(active) == 0:
        return CommittedState((), to_time)
    rows = active - 1
    legs = np.concatenate([[instance.dist[0, rows[0]]], instance.dist[rows[:-1], rows[1:]]])
    arrival = np.cumsum(legs)
    k = int(np.searchsorted(arrival, to_time, side="right"))
    new_prefix = tuple(int(c) for c in active[:k])
    new_state = CommittedState(new_prefix, to_time)
    if not new_state.extends(committed):
        raise ContractViolation("advancing the clock must extend the previous prefix")
    return new_state


def upper_bound(committed: CommittedState, instance: Instance, now: float) -> int:
    """Appeared dynamic customers minus those already served."""
    appeared = int(np.count_nonzero(instance.appeared_mask(now)))
    dyn = set(instance.dynamic_ids().tolist())
    served = sum(1 for c in committed.prefix if c in dyn)
    return appeared - served


def mandatory_tour(instance: Instance, seed: int = 0,
                   time_limit: float | None = None) -> tuple[Individual, float]:
    """Era-1 solution: approximate shortest Hamiltonian path over depot 1, all
    mandatory customers, and depot N; dynamic customers inactive."""
    nodes = np.concatenate([[1], instance.mandatory_ids(), [instance.n]])
    sub = instance.dist[np.ix_(nodes - 1, nodes - 1)]
    order, length = localsearch.solve_hpp(sub, 0, len(nodes) - 1, time_limit=time_limit, seed=seed)
    visit_ids = nodes[order][1:-1]  # mandatory ids in visiting order
    inactive = np.setdiff1d(instance.inner_ids, visit_ids, assume_unique=False)
    perm = np.concatenate([visit_ids, inactive]).astype(np.int64)
    return new_individual(instance, perm), float(length)


def auto_delta(instance: Instance, n_eras: int, seed: int = 0) -> float:
    """Era length so the mandatory tour roughly spans the horizon."""
    _, length = mandatory_tour(instance, seed=seed)
    return length / n_eras


def run_demoa(instance: Instance, n_eras: int, delta: float, decision_source: DecisionSource,
              config: EmoaConfig,
              on_progress: Callable[[int, int], None] | None = None) -> EraTrace:
    """Era loop: the era-1 Hamiltonian path special case, then one static EMOA
    per era against the evolving committed prefix, one decision per era."""
    if n_eras < 1 or delta <= 0:
        raise ValueError("n_eras must be >= 1 and delta > 0")
    trace = EraTrace(instance)
    seeds = np.random.SeedSequence(config.seed).spawn(n_eras)

    committed = CommittedState((), 0.0)
    ind, _ = mandatory_tour(instance, seed=config.seed, time_limit=config.ls_time_limit)
    evaluate(ind, instance, committed, now=0.0)
    front = ApproximationSet([(ind, ind.objectives)], era_index=1)
    try:
        decision = decision_source.decide(1, front, instance, committed)
    except DecisionAborted:
        trace.aborted = True
        return trace
    chosen = front.members[decision.index][0]
    trace.records.append(EraRecord(1, 0.0, 0, 0, front, committed, decision, chosen))

    population = None
    for era in range(2, n_eras + 1):
        now = (era - 1) * delta
        committed = advance_clock(chosen, committed, committed.era_start_time, now, instance)
        rng = np.random.default_rng(seeds[era - 1])
        if population is None:
            population = init_random(instance, committed, now, config, rng)
        else:
            population = init_transfer(population, chosen, instance, committed, now, config, rng)
        progress = (lambda g, e=era: on_progress(e, g)) if on_progress else None
        front, population = run_static(instance, committed, now, config,
                                       population=population, rng=rng, era_index=era,
                                       progress=progress)
        try:
            decision = decision_source.decide(era, front, instance, committed)
        except DecisionAborted:
            trace.aborted = True
            return trace
        chosen = front.members[decision.index][0]
        appeared = int(np.count_nonzero(instance.appeared_mask(now)))
        trace.records.append(EraRecord(era, now, appeared, upper_bound(committed, instance, now),
                                       front, committed, decision, chosen))
    return trace


def run_clairvoyant(instance: Instance, config: EmoaConfig, n_repeats: int = 10) -> ApproximationSet:
    """Non-dominated union of independent full-knowledge EMOA runs: every
    dynamic customer counts as appeared, nothing is committed."""
    committed = CommittedState((), 0.0)
    seeds = np.random.SeedSequence(config.seed).spawn(n_repeats)
    union: list[tuple[Individual, ObjectiveVector]] = []
    for i in range(n_repeats):
        rng = np.random.default_rng(seeds[i])
        front, _ = run_static(instance, committed, math.inf, config, rng=rng, era_index=-1)
        union.extend(front.members)
    keep = nondominated_filter([obj for _, obj in union])
    seen: set[ObjectiveVector] = set()
    members = []
    for i in keep:
        if union[i][1] in seen:
            continue
        seen.add(union[i][1])
        members.append(union[i])
    members.sort(key=lambda m: m[1][0])
    return ApproximationSet(members, era_index=-1)
