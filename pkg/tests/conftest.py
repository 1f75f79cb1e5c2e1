import pytest

from dynroute.core import CommittedState
from dynroute.emoa import EmoaConfig
from dynroute.instances import (Customer, END_DEPOT, Instance, MANDATORY, START_DEPOT,
                                generate_clustered, generate_uniform)


def build_instance(coords, kinds, request_times=None, n_eras=4, delta=10.0, seed=0,
                   label="custom"):
    """Low-level instance builder for hand-crafted geometries."""
    request_times = request_times or [0.0] * len(coords)
    customers = [Customer(i + 1, float(x), float(y), kind, rt)
                 for i, ((x, y), kind, rt) in enumerate(zip(coords, kinds, request_times))]
    return Instance(customers, label, n_eras, delta, seed)


@pytest.fixture
def unit_square():
    """Depots at (0,0) and (1,0), two mandatory customers at (0,1) and (1,1)."""
    return build_instance(
        [(0, 0), (0, 1), (1, 1), (1, 0)],
        [START_DEPOT, MANDATORY, MANDATORY, END_DEPOT],
    )


@pytest.fixture
def line_instance():
    """Collinear layout with leg distances 3, 4, 5 from the start depot."""
    return build_instance(
        [(0, 0), (3, 0), (7, 0), (12, 0), (20, 0)],
        [START_DEPOT, MANDATORY, MANDATORY, MANDATORY, END_DEPOT],
    )


@pytest.fixture
def small_uniform():
    return generate_uniform(8, 12, seed=3, n_eras=5, delta=45.0)


@pytest.fixture
def small_cl2():
    return generate_clustered(2, 8, 12, seed=3, n_eras=5, delta=45.0)


@pytest.fixture
def tiny_config():
    return EmoaConfig(mu=10, lambda_=10, generations=30, seed=5)


@pytest.fixture
def empty_committed():
    return CommittedState((), 0.0)


def appeared_now(instance, fraction=0.5):
    """A time by which roughly the given fraction of dynamics has appeared."""
    times = sorted(c.request_time for c in instance.customers if c.request_time > 0)
    if not times:
        return 0.0
    return times[max(0, int(len(times) * fraction) - 1)]
