"""Decision makers: automatic d-rank rules over sorted fronts, exhaustive
decision-path enumeration, and a blocking source for interactive sessions."""

from __future__ import annotations

import itertools
import math
import queue
from dataclasses import dataclass
from typing import Callable, Iterator, Protocol

from .core import ApproximationSet, CommittedState
from .instances import Instance


class DecisionAborted(RuntimeError):
    """The decision source was cancelled or timed out; the era loop stops."""


@dataclass(frozen=True)
class DecisionPath:
    """One preference value in [0, 1] per era; small d favors short tours."""

    d_values: tuple[float, ...]

    def __post_init__(self):
        for d in self.d_values:
            if not 0.0 <= d <= 1.0:
                raise ValueError(f"d value out of [0, 1]: {d}")

    def __len__(self) -> int:
        return len(self.d_values)

    def __str__(self) -> str:
        return "(" + ", ".join(_fmt(d) for d in self.d_values) + ")"

    def compact(self) -> str:
        return ",".join(_fmt(d) for d in self.d_values)

    @property
    def last(self) -> float:
        return self.d_values[-1]


def _fmt(d: float) -> str:
    return format(d, "g")


def parse_path(text: str) -> DecisionPath:
    """Accepts both "0.25,0.5,0.75" and the canonical "(0.25, 0.5, 0.75)"."""
    body = text.strip().lstrip("(").rstrip(")")
    if not body:
        raise ValueError("empty decision path")
    try:
        values = tuple(float(tok) for tok in body.split(","))
    except ValueError:
        raise ValueError(f"cannot parse decision path: {text!r}") from None
    return DecisionPath(values)


def d_rank_select(front: ApproximationSet, d: float) -> int:
    """1-based rank k = ceil(d * m) clamped to [1, m] into the tour-length
    sorted front."""
    m = len(front)
    if m == 0:
        raise ValueError("d_rank_select on an empty front")
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"d must lie in [0, 1]: {d}")
    return min(max(math.ceil(d * m), 1), m)


def enumerate_paths(d_set, n_eras: int) -> Iterator[DecisionPath]:
    """All |D|^n_eras decision paths in lexicographic order, lazily."""
    values = sorted(set(d_set))
    if not values:
        raise ValueError("empty decision set")
    for combo in itertools.product(values, repeat=n_eras):
        yield DecisionPath(combo)


@dataclass(frozen=True)
class Decision:
    """A resolved per-era choice: index is 0-based into the sorted front."""

    era_index: int
    index: int
    d: float | None = None


class DecisionSource(Protocol):
    def decide(self, era_index: int, front: ApproximationSet, instance: Instance,
               committed: CommittedState) -> Decision: ...


class DRankPathSource:
    """Automatic decision maker following a fixed decision path."""

    def __init__(self, path: DecisionPath):
        self.path = path

    def decide(self, era_index: int, front: ApproximationSet, instance: Instance,
               committed: CommittedState) -> Decision:
        if era_index > len(self.path):
            raise DecisionAborted(f"path has no entry for era {era_index}")
        d = self.path.d_values[era_index - 1]
        k = d_rank_select(front, d)
        return Decision(era_index, k - 1, d)


class QueueSource:
    """Blocking handoff point between the era loop and an interactive client.

    The optimizer thread publishes the front via on_front and waits; another
    thread feeds resolved decisions through submit(). submit(None) aborts.
    """

    def __init__(self, on_front: Callable[[int, ApproximationSet, CommittedState], None] | None = None,
                 timeout: float | None = None):
        self.on_front = on_front
        self.timeout = timeout
        self._q: queue.Queue = queue.Queue()

    def submit(self, index: int | None, d: float | None = None) -> None:
        self._q.put((index, d))

    def decide(self, era_index: int, front: ApproximationSet, instance: Instance,
               committed: CommittedState) -> Decision:
        if self.on_front is not None:
            self.on_front(era_index, front, committed)
        try:
            index, d = self._q.get(timeout=self.timeout)
        except queue.Empty:
            raise DecisionAborted(f"no decision for era {era_index} within {self.timeout}s") from None
        if index is None:
            raise DecisionAborted("session cancelled")
        if not 0 <= index < len(front):
            raise DecisionAborted(f"decision index {index} out of range for front of {len(front)}")
        return Decision(era_index, int(index), d)
