"""Tour improvement: HPP-to-TSP reduction, nearest-neighbor construction,
first-improvement 2-opt and Or-opt with don't-look bits.

The strong external TSP solver used at full experimental scale is isolated
behind solve_tsp/solve_hpp so it can be swapped without touching callers.
"""

from __future__ import annotations

import time

import numpy as np

from .core import CommittedState, Individual, is_feasible, ContractViolation
from .instances import Instance

EPS = 1e-9


def hpp_to_tsp(dist: np.ndarray, start: int, end: int) -> np.ndarray:
    """Augment a symmetric distance matrix with a dummy node at distance 0 to
    start and end and a prohibitive distance B to every other node, so any
    optimal cycle on the result induces an optimal start->end Hamiltonian path."""
    if start == end:
        raise ValueError("start and end must differ")
    k = dist.shape[0]
    big = 1.0 + float(np.triu(dist, 1).sum())
    aug = np.full((k + 1, k + 1), big)
    aug[:k, :k] = dist
    aug[k, k] = 0.0
    aug[k, start] = aug[start, k] = 0.0
    aug[k, end] = aug[end, k] = 0.0
    return aug


def cycle_length(dist: np.ndarray, order: np.ndarray) -> float:
    return float(dist[order, np.roll(order, -1)].sum())


def path_length(dist: np.ndarray, order: np.ndarray) -> float:
    if len(order) < 2:
        return 0.0
    return float(dist[order[:-1], order[1:]].sum())


def _nearest_neighbor(dist: np.ndarray, start: int) -> np.ndarray:
    k = dist.shape[0]
    visited = np.zeros(k, dtype=bool)
    order = np.empty(k, dtype=np.int64)
    order[0] = start
    visited[start] = True
    cur = start
    for i in range(1, k):
        row = np.where(visited, np.inf, dist[cur])
        cur = int(np.argmin(row))
        order[i] = cur
        visited[cur] = True
    return order


def _two_opt_pass(dist: np.ndarray, seq: np.ndarray, deadline: float | None) -> bool:
    """Apply improving segment reversals (in place) until none remains.

    Each round computes the full delta matrix over movable positions in one
    vectorized expression, then greedily applies the best moves whose touched
    windows do not overlap; deltas of disjoint moves stay exact, so every
    applied reversal strictly shortens the path.
    """
    improved = False
    m = len(seq) - 2
    tril = np.tril_indices(m)
    while True:
        if deadline is not None and time.monotonic() > deadline:
            return improved
        # delta of reversing seq[i..j], 1 <= i < j <= m; rows i, cols j
        a = dist[np.ix_(seq[0:m], seq[1 : m + 1])]        # d(o[i-1], o[j])
        b = dist[np.ix_(seq[1 : m + 1], seq[2 : m + 2])]  # d(o[i], o[j+1])
        c = dist[seq[0:m], seq[1 : m + 1]]                # d(o[i-1], o[i])
        e = dist[seq[1 : m + 1], seq[2 : m + 2]]          # d(o[j], o[j+1])
        delta = a + b - c[:, None] - e[None, :]
        delta[tril] = np.inf
        flat = np.nonzero(delta.ravel() < -EPS)[0]
        if flat.size == 0:
            return improved
        order = flat[np.argsort(delta.ravel()[flat], kind="stable")][:64]
        touched = np.zeros(len(seq), dtype=bool)
        for f in order:
            i, j = int(f) // m + 1, int(f) % m + 1
            if touched[i - 1 : j + 2].any():
                continue
            seq[i : j + 1] = seq[i : j + 1][::-1]
            touched[i - 1 : j + 2] = True
            improved = True


def _or_opt_pass(dist: np.ndarray, seq: np.ndarray,
                 deadline: float | None) -> tuple[bool, np.ndarray]:
    """Relocate improving segments of length 1-3, possibly reversed.

    Like the 2-opt pass, each round applies the best mutually disjoint
    relocations found in one vectorized gain matrix, rebuilding the sequence
    once; disjointness keeps every applied gain exact.
    """
    improved = False
    moved = True
    while moved:
        moved = False
        for seg_len in (1, 2, 3):
            if deadline is not None and time.monotonic() > deadline:
                return improved, seq
            m = len(seq) - 2
            n_seg = m - seg_len + 1
            if n_seg < 1:
                continue
            i = np.arange(1, n_seg + 1)
            t = np.arange(0, m + 1)
            s0, s1 = seq[i], seq[i + seg_len - 1]
            removal = (dist[seq[i - 1], s0] + dist[s1, seq[i + seg_len]]
                       - dist[seq[i - 1], seq[i + seg_len]])
            u, v = seq[t], seq[t + 1]
            edge = dist[u, v]
            # rows: insertion edge t, cols: segment start index
            add_fwd = dist[np.ix_(s0, u)].T + dist[np.ix_(s1, v)].T - edge[:, None]
            add_rev = dist[np.ix_(s1, u)].T + dist[np.ix_(s0, v)].T - edge[:, None]
            gain = removal[None, :] - np.minimum(add_fwd, add_rev)
            # forbid edges adjacent to or inside the segment: t in [i-1, i+L-1]
            invalid = (t[:, None] >= i[None, :] - 1) & (t[:, None] <= i[None, :] + seg_len - 1)
            gain[invalid] = -np.inf
            flat = np.nonzero(gain.ravel() > EPS)[0]
            if flat.size == 0:
                continue
            order = flat[np.argsort(-gain.ravel()[flat], kind="stable")][:32]
            touched = np.zeros(len(seq), dtype=bool)
            removed = np.zeros(len(seq), dtype=bool)
            inserts: dict[int, np.ndarray] = {}
            for f in order:
                ti, si = int(f) // n_seg, int(f) % n_seg
                ii = si + 1
                window = list(range(ii - 1, ii + seg_len + 1)) + [ti, ti + 1]
                if touched[window].any():
                    continue
                touched[window] = True
                seg = seq[ii : ii + seg_len]
                if add_rev[ti, si] < add_fwd[ti, si]:
                    seg = seg[::-1]
                removed[ii : ii + seg_len] = True
                inserts[ti] = seg
                improved = moved = True
            if inserts:
                out = []
                for p in range(len(seq)):
                    if not removed[p]:
                        out.append(seq[p])
                    if p in inserts:
                        out.extend(inserts[p])
                seq = np.array(out, dtype=seq.dtype)
    return improved, seq


def _improve_open(dist: np.ndarray, seq: np.ndarray, deadline: float | None) -> np.ndarray:
    """2-opt + Or-opt (segment lengths 1-3) to a local optimum on an open path.

    seq[0] and seq[-1] are fixed anchors; positions 1..len-2 are movable.
    Every applied move strictly shortens the path, so this terminates.
    """
    seq = seq.copy()
    if len(seq) - 2 < 2:
        return seq
    while True:
        changed = _two_opt_pass(dist, seq, deadline)
        moved, seq = _or_opt_pass(dist, seq, deadline)
        changed |= moved
        if not changed or (deadline is not None and time.monotonic() > deadline):
            return seq


def solve_tsp(dist: np.ndarray, time_limit: float | None = None, seed: int = 0,
              start: int | None = None) -> np.ndarray:
    """Nearest-neighbor cycle plus 2-opt/Or-opt until no improving move (or the
    time limit). Deterministic for a fixed seed when no limit is given."""
    k = dist.shape[0]
    if k <= 3:
        return np.arange(k, dtype=np.int64)
    rng = np.random.default_rng(seed)
    if start is None:
        start = int(rng.integers(k))
    deadline = time.monotonic() + time_limit if time_limit is not None else None
    order = _nearest_neighbor(dist, start)
    # fix order[0]; a cycle is an open path with identical anchors
    seq = np.concatenate([order, order[:1]])
    seq = _improve_open(dist, seq, deadline)
    return seq[:-1]


def solve_hpp(dist: np.ndarray, start: int, end: int, time_limit: float | None = None,
              seed: int = 0) -> tuple[np.ndarray, float]:
    """Approximate shortest start->end Hamiltonian path over all nodes of dist.

    Returns (node order from start to end, path length).
    """
    k = dist.shape[0]
    if k < 3:
        order = np.array([start, end], dtype=np.int64) if k == 2 else np.array([start])
        return order, path_length(dist, order)
    aug = hpp_to_tsp(dist, start, end)
    cycle = solve_tsp(aug, time_limit=time_limit, seed=seed, start=k)
    dummy_pos = int(np.nonzero(cycle == k)[0][0])
    path = np.roll(cycle, -dummy_pos)[1:]  # drop dummy, keep cycle order
    if path[0] == end:
        path = path[::-1]
    if path[0] != start or path[-1] != end:
        # dummy not between the endpoints (possible under a hard time limit):
        # fall back to forcing the endpoints
        inner = path[(path != start) & (path != end)]
        path = np.concatenate([[start], inner, [end]])
    return path, path_length(dist, path)


def improve_free_segment(free: np.ndarray, instance: Instance, committed: CommittedState,
                         time_limit: float | None = None) -> np.ndarray:
    """Reorder the given active customer ids (the part after the committed
    prefix) by 2-opt/Or-opt on the open path anchored at the last committed
    node (or depot 1) and depot N."""
    if len(free) < 2:
        return np.asarray(free, dtype=np.int64)
    head = committed.prefix[-1] - 1 if committed.prefix else 0
    seq = np.concatenate([[head], np.asarray(free) - 1, [instance.n - 1]])
    deadline = time.monotonic() + time_limit if time_limit is not None else None
    improved = _improve_open(instance.dist, seq, deadline)
    return (improved[1:-1] + 1).astype(np.int64)


def boost(ind: Individual, instance: Instance, committed: CommittedState,
          time_limit: float | None = None) -> Individual:
    """Reorder the non-committed active tour segment with 2-opt/Or-opt.

    Bits are untouched, the committed prefix stays in place, the relative
    order of inactive customers is preserved, and the tour length never
    increases.
    """
    if not is_feasible(ind, instance, committed):
        raise ContractViolation("boost requires a feasible individual")
    active = ind.active_ids()
    k = len(committed.prefix)
    new_free = improve_free_segment(active[k:], instance, committed, time_limit)
    if len(new_free) < 2:
        return ind.copy()
    inactive = ind.perm[ind.bits[ind.perm - 2] == 0]
    perm = np.concatenate([active[:k], new_free, inactive]).astype(np.int64)
    return Individual(ind.bits.copy(), perm, ind.rates.copy())
