"""Solution encoding, objective evaluation, Pareto dominance, prefix repair.

An individual carries three vectors over the interior ids 2..N-1 (array index
= id - 2): activity bits, a full visiting permutation, and per-customer
mutation rates. Rate 0 freezes a position against mutation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .instances import Instance


class ContractViolation(ValueError):
    """An operation received an individual that breaks its preconditions."""


class ObjectiveVector(NamedTuple):
    """Both objectives are minimized."""

    tour_length: float
    unvisited: int


@dataclass(frozen=True)
class CommittedState:
    """Irreversible ordered prefix of customers served by an era boundary."""

    prefix: tuple[int, ...] = ()
    era_start_time: float = 0.0

    def __post_init__(self):
        if len(set(self.prefix)) != len(self.prefix):
            raise ContractViolation("committed prefix contains duplicates")

    @property
    def served_set(self) -> frozenset[int]:
        return frozenset(self.prefix)

    def extends(self, other: "CommittedState") -> bool:
        return self.prefix[: len(other.prefix)] == other.prefix


@dataclass
class Individual:
    bits: np.ndarray                       # uint8, 1 = customer visited
    perm: np.ndarray                       # int64 permutation of ids 2..N-1
    rates: np.ndarray                      # float64 mutation probabilities
    objectives: ObjectiveVector | None = None

    def copy(self) -> "Individual":
        return Individual(self.bits.copy(), self.perm.copy(), self.rates.copy(), self.objectives)

    def active_ids(self) -> np.ndarray:
        return self.perm[self.bits[self.perm - 2] == 1]


def new_individual(instance: Instance, perm: np.ndarray | None = None) -> Individual:
    """All-inactive individual with mandatory customers switched on."""
    m = instance.n - 2
    bits = np.zeros(m, dtype=np.uint8)
    bits[instance.mandatory_mask] = 1
    rates = np.zeros(m, dtype=float)
    if perm is None:
        perm = instance.inner_ids.copy()
    return Individual(bits, np.asarray(perm, dtype=np.int64), rates)


def is_feasible(ind: Individual, instance: Instance, committed: CommittedState) -> bool:
    k = len(committed.prefix)
    if k and not np.array_equal(ind.perm[:k], np.asarray(committed.prefix)):
        return False
    if k and not np.all(ind.bits[np.asarray(committed.prefix) - 2] == 1):
        return False
    return bool(np.all(ind.bits[instance.mandatory_mask] == 1))


def evaluate(ind: Individual, instance: Instance, committed: CommittedState,
             now: float) -> ObjectiveVector:
    """Open-path tour length depot 1 -> active customers -> depot N, plus the
    count of appeared-but-inactive dynamic customers. Cached on the individual."""
    if not is_feasible(ind, instance, committed):
        raise ContractViolation("individual is infeasible w.r.t. committed state")
    rows = ind.active_ids() - 1
    d = instance.dist
    n = instance.n
    if len(rows) == 0:
        tour = d[0, n - 1]
    else:
        tour = d[0, rows[0]] + d[rows[:-1], rows[1:]].sum() + d[rows[-1], n - 1]
    appeared = instance.appeared_mask(now)
    unvisited = int(np.count_nonzero(appeared & (ind.bits == 0)))
    obj = ObjectiveVector(float(tour), unvisited)
    ind.objectives = obj
    return obj


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    return (a[0] <= b[0] and a[1] <= b[1]) and (a[0] < b[0] or a[1] < b[1])


def nondominated_filter(points) -> list[int]:
    """Indices of points not dominated by any other point (both objectives
    minimized). Exact duplicates of a non-dominated point are all kept."""
    pts = [(float(p[0]), float(p[1])) for p in points]
    n = len(pts)
    if n == 0:
        return []
    order = sorted(range(n), key=lambda i: pts[i])
    keep = []
    best_y = float("inf")
    keeper = None
    for i in order:
        x, y = pts[i]
        if y < best_y:
            keep.append(i)
            best_y = y
            keeper = (x, y)
        elif (x, y) == keeper:
            keep.append(i)
    return sorted(keep)


def repair(ind: Individual, instance: Instance, committed: CommittedState) -> Individual:
    """Force mandatory and committed customers active and frozen, and move the
    committed prefix to the front of the permutation in exactly the committed
    order, preserving the relative order of everything else. Idempotent."""
    bits = ind.bits.copy()
    rates = ind.rates.copy()
    bits[instance.mandatory_mask] = 1
    rates[instance.mandatory_mask] = 0.0
    prefix = np.asarray(committed.prefix, dtype=np.int64)
    if len(prefix):
        bits[prefix - 2] = 1
        rates[prefix - 2] = 0.0
        if np.array_equal(ind.perm[: len(prefix)], prefix):
            perm = ind.perm.copy()
        else:
            rest = ind.perm[~np.isin(ind.perm, prefix)]
            perm = np.concatenate([prefix, rest])
    else:
        perm = ind.perm.copy()
    return Individual(bits, perm, rates)


@dataclass
class ApproximationSet:
    """Mutually non-dominated, objective-space-deduplicated solutions sorted by
    ascending tour length (hence strictly descending unvisited count)."""

    members: list[tuple[Individual, ObjectiveVector]]
    era_index: int

    def __len__(self) -> int:
        return len(self.members)

    def objective_list(self) -> list[ObjectiveVector]:
        return [obj for _, obj in self.members]


def approximation_set(population: list[Individual], era_index: int) -> ApproximationSet:
    objs = [ind.objectives for ind in population]
    if any(o is None for o in objs):
        raise ContractViolation("approximation_set requires evaluated individuals")
    keep = nondominated_filter(objs)
    seen: set[ObjectiveVector] = set()
    members = []
    for i in keep:
        if objs[i] in seen:
            continue
        seen.add(objs[i])
        members.append((population[i], objs[i]))
    members.sort(key=lambda m: m[1][0])
    return ApproximationSet(members, era_index)
