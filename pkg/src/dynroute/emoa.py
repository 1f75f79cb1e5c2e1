"""Static per-era multi-objective EA: (mu + lambda) with NSGA-II survival,
feasibility-preserving mutation, and scheduled local-search boosting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import localsearch
from .core import (ApproximationSet, CommittedState, Individual, ObjectiveVector,
                   approximation_set, evaluate, new_individual, repair)
from .instances import Instance


@dataclass
class EmoaConfig:
    mu: int = 50
    lambda_: int = 50
    generations: int = 2000
    p_swap: float = 0.6
    sigma_swap: int = 10
    ls_schedule: frozenset[int] | None = None  # None: {0, G//2, G-1}
    ls_time_limit: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mu <= 0 or self.lambda_ <= 0 or self.generations < 0:
            raise ValueError("mu, lambda_ must be positive and generations >= 0")
        if not 0.0 < self.p_swap < 1.0:
            raise ValueError("p_swap must lie in (0, 1)")
        if self.sigma_swap < 1:
            raise ValueError("sigma_swap must be >= 1")

    def resolved_schedule(self) -> frozenset[int]:
        if self.ls_schedule is not None:
            return self.ls_schedule
        g = self.generations
        if g == 0:
            return frozenset()
        return frozenset({0, g // 2, g - 1})


def _open_positions(instance: Instance, committed: CommittedState, now: float) -> np.ndarray:
    """Mask of appeared dynamic customers that are not yet committed."""
    mask = instance.appeared_mask(now).copy()
    if committed.prefix:
        mask[np.asarray(committed.prefix) - 2] = False
    return mask


def init_random(instance: Instance, committed: CommittedState, now: float,
                config: EmoaConfig, rng: np.random.Generator | None = None) -> list[Individual]:
    """mu individuals: mandatory fixed active, appeared dynamics random with
    rate 0.5, everything else frozen inactive."""
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    open_mask = _open_positions(instance, committed, now)
    pop = []
    for _ in range(config.mu):
        ind = new_individual(instance)
        ind.bits[open_mask] = rng.integers(0, 2, size=int(open_mask.sum()), dtype=np.uint8)
        ind.rates[open_mask] = 0.5
        ind.perm = rng.permutation(instance.inner_ids)
        pop.append(repair(ind, instance, committed))
    return pop


def init_transfer(prev_population: list[Individual], selected: Individual,
                  instance: Instance, committed: CommittedState, now: float,
                  config: EmoaConfig, rng: np.random.Generator | None = None) -> list[Individual]:
    """Carry the previous era's population over: repair against the new
    committed state and open newly appeared customers with random bits and
    rate 0.5. The selected solution is always part of the result."""
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    appeared = instance.appeared_mask(now)

    def carry(src: Individual) -> Individual:
        ind = src.copy()
        ind.objectives = None
        # rate 0 on an appeared, unmanaged position means it was frozen as
        # not-yet-requested in the previous era
        fresh = appeared & (ind.rates == 0.0) & ~instance.mandatory_mask
        if committed.prefix:
            fresh[np.asarray(committed.prefix) - 2] = False
        ind.bits[fresh] = rng.integers(0, 2, size=int(fresh.sum()), dtype=np.uint8)
        ind.rates[fresh] = 0.5
        return repair(ind, instance, committed)

    pop = [carry(selected)]
    for src in prev_population:
        if len(pop) >= config.mu:
            break
        pop.append(carry(src))
    while len(pop) < config.mu:
        pop.append(carry(selected))
    return pop


def mutate(ind: Individual, instance: Instance, committed: CommittedState,
           config: EmoaConfig, rng: np.random.Generator) -> Individual:
    """Independent bit flips at the per-customer rates, then with probability
    p_swap a burst of sigma_swap transpositions of non-committed positions."""
    bits = ind.bits.copy()
    flips = rng.random(len(bits)) < ind.rates
    bits[flips] ^= 1
    perm = ind.perm.copy()
    if rng.random() < config.p_swap:
        lo = len(committed.prefix)
        n = len(perm)
        if n - lo >= 2:
            for _ in range(config.sigma_swap):
                i = int(rng.integers(lo, n))
                j = int(rng.integers(lo, n - 1))
                if j >= i:
                    j += 1
                perm[i], perm[j] = perm[j], perm[i]
    return repair(Individual(bits, perm, ind.rates.copy()), instance, committed)


def fast_nondominated_sort(objs: np.ndarray) -> list[np.ndarray]:
    """Partition points into fronts by iterated dominance peeling."""
    n = len(objs)
    f0, f1 = objs[:, 0], objs[:, 1]
    le = (f0[:, None] <= f0[None, :]) & (f1[:, None] <= f1[None, :])
    lt = (f0[:, None] < f0[None, :]) | (f1[:, None] < f1[None, :])
    dom = le & lt  # dom[i, j]: i dominates j
    n_dom = dom.sum(axis=0)
    remaining = np.ones(n, dtype=bool)
    fronts = []
    while remaining.any():
        front = np.nonzero(remaining & (n_dom == 0))[0]
        if front.size == 0:  # numerical safety; cannot happen for finite inputs
            front = np.nonzero(remaining)[0]
        fronts.append(front)
        remaining[front] = False
        n_dom = n_dom - dom[front].sum(axis=0)
    return fronts


def crowding_distance(objs: np.ndarray) -> np.ndarray:
    """NSGA-II crowding distance; boundary points get +inf."""
    n = len(objs)
    dist = np.zeros(n)
    for k in range(objs.shape[1]):
        vals = objs[:, k]
        order = np.argsort(vals, kind="stable")
        dist[order[0]] = dist[order[-1]] = np.inf
        rng_ = vals[order[-1]] - vals[order[0]]
        if rng_ <= 0 or n < 3:
            continue
        dist[order[1:-1]] += (vals[order[2:]] - vals[order[:-2]]) / rng_
    return dist


def survival_select(population: list[Individual], mu: int) -> list[Individual]:
    """Fill by non-domination rank; break the final front by descending
    crowding distance."""
    objs = np.array([ind.objectives for ind in population], dtype=float)
    survivors: list[int] = []
    for front in fast_nondominated_sort(objs):
        if len(survivors) + len(front) <= mu:
            survivors.extend(front.tolist())
            if len(survivors) == mu:
                break
        else:
            crowd = crowding_distance(objs[front])
            order = np.argsort(-crowd, kind="stable")
            need = mu - len(survivors)
            survivors.extend(front[order[:need]].tolist())
            break
    return [population[i] for i in survivors]


def _boost_population(pop: list[Individual], instance: Instance, committed: CommittedState,
                      now: float, config: EmoaConfig) -> list[Individual]:
    # converged populations carry many duplicate active tours; improve each
    # active sequence once and restitch per individual
    k = len(committed.prefix)
    cache: dict[bytes, np.ndarray] = {}
    out = []
    for ind in pop:
        active = ind.active_ids()
        key = active.tobytes()
        new_free = cache.get(key)
        if new_free is None:
            new_free = localsearch.improve_free_segment(active[k:], instance, committed,
                                                        config.ls_time_limit)
            cache[key] = new_free
        inactive = ind.perm[ind.bits[ind.perm - 2] == 0]
        b = Individual(ind.bits.copy(),
                       np.concatenate([active[:k], new_free, inactive]).astype(np.int64),
                       ind.rates.copy())
        evaluate(b, instance, committed, now)
        out.append(b)
    return out


def _batch_offspring(pop: list[Individual], instance: Instance, committed: CommittedState,
                     now: float, config: EmoaConfig, rng: np.random.Generator
                     ) -> list[Individual]:
    """Vectorized equivalent of lambda x (mutate + evaluate).

    Parents are feasible, flips only touch positions with positive rates and
    swaps stay clear of the committed prefix, so offspring are feasible by
    construction and need no repair pass.
    """
    lam, m, n = config.lambda_, instance.n - 2, instance.n
    parents = rng.integers(0, len(pop), size=lam)
    bits = np.stack([pop[p].bits for p in parents])
    perms = np.stack([pop[p].perm for p in parents])
    rates = np.stack([pop[p].rates for p in parents])

    bits[rng.random((lam, m)) < rates] ^= 1

    lo = len(committed.prefix)
    if m - lo >= 2:
        swap_rows = np.nonzero(rng.random(lam) < config.p_swap)[0]
        if swap_rows.size:
            ii = rng.integers(lo, m, size=(swap_rows.size, config.sigma_swap))
            jj = rng.integers(lo, m - 1, size=(swap_rows.size, config.sigma_swap))
            jj = jj + (jj >= ii)
            for t, r in enumerate(swap_rows):
                row = perms[r]
                for i, j in zip(ii[t], jj[t]):
                    row[i], row[j] = row[j], row[i]

    # active customers first (stable), inactive padded onto the end depot row
    active = np.take_along_axis(bits, perms - 2, axis=1) == 1
    order = np.argsort(~active, axis=1, kind="stable")
    rows = np.take_along_axis(perms, order, axis=1) - 1
    rows[~np.take_along_axis(active, order, axis=1)] = n - 1
    full = np.concatenate([np.zeros((lam, 1), dtype=rows.dtype), rows,
                           np.full((lam, 1), n - 1, dtype=rows.dtype)], axis=1)
    tours = instance.dist[full[:, :-1], full[:, 1:]].sum(axis=1)
    unvisited = (instance.appeared_mask(now) & (bits == 0)).sum(axis=1)

    return [Individual(bits[k], perms[k], rates[k],
                       ObjectiveVector(float(tours[k]), int(unvisited[k])))
            for k in range(lam)]


def run_static(instance: Instance, committed: CommittedState, now: float,
               config: EmoaConfig, population: list[Individual] | None = None,
               rng: np.random.Generator | None = None, era_index: int = 0,
               progress: Callable[[int], None] | None = None
               ) -> tuple[ApproximationSet, list[Individual]]:
    """Generational loop; returns the non-dominated set of the final
    population along with the population itself."""
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    pop = population if population is not None else init_random(instance, committed, now, config, rng)
    for ind in pop:
        if ind.objectives is None:
            evaluate(ind, instance, committed, now)
    schedule = config.resolved_schedule()
    for g in range(config.generations):
        if g in schedule:
            pop = _boost_population(pop, instance, committed, now, config)
        offspring = _batch_offspring(pop, instance, committed, now, config, rng)
        pop = survival_select(pop + offspring, config.mu)
        if progress is not None:
            progress(g + 1)
    return approximation_set(pop, era_index), pop
