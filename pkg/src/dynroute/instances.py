"""Problem instances: customer topologies, dynamic request times, text serialization.

A single vehicle starts at depot id 1 and ends at depot id N. Ids 2..N-1 are
customers, split into mandatory ones (known upfront, must be served) and
dynamic ones (appear at a positive request time, may be skipped).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

START_DEPOT = "SD"
END_DEPOT = "ED"
MANDATORY = "M"
DYNAMIC = "D"
KINDS = (START_DEPOT, END_DEPOT, MANDATORY, DYNAMIC)

MAX_CENTER_ATTEMPTS = 10_000


class InstanceError(ValueError):
    """Invalid instance data or generator parameters."""


class ParseError(InstanceError):
    """Malformed instance file; message carries the offending line number."""


class GenerationError(InstanceError):
    """Random generation could not satisfy the geometric constraints."""


@dataclass(frozen=True)
class Customer:
    id: int
    x: float
    y: float
    kind: str
    request_time: float = 0.0


@dataclass
class Instance:
    """Immutable-after-construction problem instance with a cached distance matrix."""

    customers: list[Customer]
    topology_label: str
    n_eras: int
    delta: float
    seed: int

    # derived arrays, filled in __post_init__
    coords: np.ndarray = field(init=False, repr=False)
    dist: np.ndarray = field(init=False, repr=False)
    request_times: np.ndarray = field(init=False, repr=False)
    dynamic_mask: np.ndarray = field(init=False, repr=False)    # over ids 2..N-1
    mandatory_mask: np.ndarray = field(init=False, repr=False)  # over ids 2..N-1

    def __post_init__(self):
        self._validate()
        n = len(self.customers)
        self.coords = np.array([(c.x, c.y) for c in self.customers], dtype=float)
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        self.dist = np.sqrt((diff ** 2).sum(axis=2))
        self.request_times = np.array([c.request_time for c in self.customers], dtype=float)
        kinds = [c.kind for c in self.customers]
        self.dynamic_mask = np.array([k == DYNAMIC for k in kinds[1 : n - 1]], dtype=bool)
        self.mandatory_mask = np.array([k == MANDATORY for k in kinds[1 : n - 1]], dtype=bool)

    def _validate(self):
        n = len(self.customers)
        if n < 2:
            raise InstanceError("instance needs at least the two depots")
        ids = [c.id for c in self.customers]
        if ids != list(range(1, n + 1)):
            raise InstanceError("customer ids must be contiguous 1..N in order")
        if self.customers[0].kind != START_DEPOT or self.customers[-1].kind != END_DEPOT:
            raise InstanceError("id 1 must be the start depot and id N the end depot")
        for c in self.customers[1:-1]:
            if c.kind not in (MANDATORY, DYNAMIC):
                raise InstanceError(f"customer {c.id}: interior kind must be M or D")
        if self.n_eras < 1 or self.delta <= 0:
            raise InstanceError("n_eras must be >= 1 and delta > 0")
        for c in self.customers:
            if c.kind == DYNAMIC:
                if not 0 < c.request_time <= self.horizon:
                    raise InstanceError(
                        f"customer {c.id}: dynamic request_time must lie in (0, horizon]")
            elif c.request_time != 0:
                raise InstanceError(f"customer {c.id}: non-dynamic request_time must be 0")

    # -- basic queries ------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.customers)

    @property
    def n_mandatory(self) -> int:
        """Mandatory count including both depots."""
        return int(self.mandatory_mask.sum()) + 2

    @property
    def n_dynamic(self) -> int:
        return int(self.dynamic_mask.sum())

    @property
    def horizon(self) -> float:
        return self.n_eras * self.delta

    @property
    def inner_ids(self) -> np.ndarray:
        return np.arange(2, self.n, dtype=np.int64)

    def distance(self, i: int, j: int) -> float:
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise InstanceError(f"customer id out of range: ({i}, {j})")
        return float(self.dist[i - 1, j - 1])

    def appeared_mask(self, now: float) -> np.ndarray:
        """Dynamic customers with request_time <= now, as a mask over ids 2..N-1."""
        return self.dynamic_mask & (self.request_times[1 : self.n - 1] <= now)

    def dynamic_ids(self) -> np.ndarray:
        return self.inner_ids[self.dynamic_mask]

    def mandatory_ids(self) -> np.ndarray:
        """Non-depot mandatory customer ids."""
        return self.inner_ids[self.mandatory_mask]


# -- generation -------------------------------------------------------------


def _check_counts(n_mandatory: int, n_dynamic: int, side: float):
    if n_mandatory < 2:
        raise InstanceError("n_mandatory must be >= 2 (includes both depots)")
    if n_dynamic < 0:
        raise InstanceError("n_dynamic must be >= 0")
    if side <= 0:
        raise InstanceError("side must be > 0")


def _build(coords: np.ndarray, n_mandatory: int, n_dynamic: int, label: str,
           n_eras: int, delta: float, seed: int) -> Instance:
    """Assemble customers from coordinates; ids 2..n_mandatory-1 are mandatory,
    n_mandatory..N-1 dynamic."""
    n = n_mandatory + n_dynamic
    customers = []
    for i in range(n):
        cid = i + 1
        if cid == 1:
            kind = START_DEPOT
        elif cid == n:
            kind = END_DEPOT
        elif cid < n_mandatory:
            kind = MANDATORY
        else:
            kind = DYNAMIC
        rt = delta if kind == DYNAMIC else 0.0  # placeholder, replaced below
        customers.append(Customer(cid, float(coords[i, 0]), float(coords[i, 1]), kind, rt))
    inst = Instance(customers, label, n_eras, delta, seed)
    return assign_request_times(inst, n_eras, delta, seed)


def generate_uniform(n_mandatory: int, n_dynamic: int, seed: int, side: float = 100.0,
                     n_eras: int = 7, delta: float = 100.0) -> Instance:
    """Customers i.i.d. uniform on [0, side]^2; depots are the first and last ids."""
    _check_counts(n_mandatory, n_dynamic, side)
    rng = np.random.default_rng(seed)
    n = n_mandatory + n_dynamic
    coords = rng.uniform(0.0, side, size=(n, 2))
    return _build(coords, n_mandatory, n_dynamic, "uniform", n_eras, delta, seed)


def generate_clustered(n_clusters: int, n_mandatory: int, n_dynamic: int, seed: int,
                       side: float = 100.0, n_eras: int = 7, delta: float = 100.0) -> Instance:
    """Gaussian clusters (std side/20) around centers separated by >= side/2.

    Non-depot customers are assigned to clusters round-robin in id order; both
    depots belong to the first cluster.
    """
    if n_clusters not in (2, 3):
        raise InstanceError("n_clusters must be 2 or 3")
    _check_counts(n_mandatory, n_dynamic, side)
    rng = np.random.default_rng(seed)

    centers = None
    for _ in range(MAX_CENTER_ATTEMPTS):
        cand = rng.uniform(0.0, side, size=(n_clusters, 2))
        d = np.sqrt(((cand[:, None, :] - cand[None, :, :]) ** 2).sum(axis=2))
        if np.all(d[np.triu_indices(n_clusters, 1)] >= side / 2):
            centers = cand
            break
    if centers is None:
        raise GenerationError(
            f"no center placement with pairwise distance >= side/2 in {MAX_CENTER_ATTEMPTS} attempts")

    n = n_mandatory + n_dynamic
    std = side / 20.0
    coords = np.empty((n, 2))
    for i in range(n):
        cid = i + 1
        if cid == 1 or cid == n:
            cluster = 0
        else:
            cluster = (cid - 2) % n_clusters
        coords[i] = centers[cluster] + rng.normal(0.0, std, size=2)
    coords = np.clip(coords, 0.0, side)
    return _build(coords, n_mandatory, n_dynamic, f"cl{n_clusters}", n_eras, delta, seed)


def assign_request_times(instance: Instance, n_eras: int, delta: float, seed: int) -> Instance:
    """Redraw dynamic request times uniformly from (0, (n_eras-1)*delta].

    The open-at-zero interval guarantees every request appears before the final
    era's planning point.
    """
    if delta <= 0:
        raise InstanceError("delta must be > 0")
    if n_eras < 2:
        raise InstanceError("n_eras must be >= 2")
    rng = np.random.default_rng(seed)
    high = (n_eras - 1) * delta
    customers = []
    for c in instance.customers:
        if c.kind == DYNAMIC:
            rt = (1.0 - rng.random()) * high  # in (0, high]
            customers.append(replace(c, request_time=rt))
        else:
            customers.append(c)
    return Instance(customers, instance.topology_label, n_eras, delta, instance.seed)


# -- text format -------------------------------------------------------------
#
# line 1:        N n_mandatory n_dynamic topology_label n_eras delta seed
# lines 2..N+1:  id x y kind request_time        (kind in {SD, ED, M, D})
# '#' starts a comment; blank lines ignored.


def write_instance(instance: Instance, path: str | Path) -> None:
    lines = ["# dynroute instance"]
    lines.append(
        f"{instance.n} {instance.n_mandatory} {instance.n_dynamic} "
        f"{instance.topology_label} {instance.n_eras} {instance.delta!r} {instance.seed}"
    )
    for c in instance.customers:
        lines.append(f"{c.id} {c.x!r} {c.y!r} {c.kind} {c.request_time!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_instance(path: str | Path) -> Instance:
    return parse_instance_text(Path(path).read_text())


def parse_instance_text(text: str) -> Instance:
    header = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 7:
                raise ParseError(f"line {lineno}: header needs 7 fields, got {len(parts)}")
            try:
                header = (int(parts[0]), int(parts[1]), int(parts[2]), parts[3],
                          int(parts[4]), float(parts[5]), int(parts[6]))
            except ValueError as exc:
                raise ParseError(f"line {lineno}: bad header field ({exc})") from None
            continue
        if len(parts) != 5:
            raise ParseError(f"line {lineno}: customer record needs 5 fields, got {len(parts)}")
        try:
            rows.append((lineno, Customer(int(parts[0]), float(parts[1]), float(parts[2]),
                                          parts[3], float(parts[4]))))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad customer field ({exc})") from None

    if header is None:
        raise ParseError("line 1: missing header")
    n, n_mand, n_dyn, label, n_eras, delta, seed = header
    if len(rows) != n:
        raise ParseError(f"line 1: header declares N={n} but file has {len(rows)} records")
    seen = set()
    for lineno, c in rows:
        if c.kind not in KINDS:
            raise ParseError(f"line {lineno}: unknown kind {c.kind!r}")
        if c.id in seen:
            raise ParseError(f"line {lineno}: duplicate customer id {c.id}")
        seen.add(c.id)
    customers = [c for _, c in sorted(rows, key=lambda r: r[1].id)]
    try:
        inst = Instance(customers, label, n_eras, delta, seed)
    except InstanceError as exc:
        raise ParseError(f"line 1: {exc}") from None
    if inst.n_mandatory != n_mand or inst.n_dynamic != n_dyn:
        raise ParseError(
            f"line 1: header counts ({n_mand} mandatory, {n_dyn} dynamic) do not match records "
            f"({inst.n_mandatory}, {inst.n_dynamic})")
    return inst
