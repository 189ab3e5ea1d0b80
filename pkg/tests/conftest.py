import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings

from fprakit.model import RingInstance, WeightedSsufNetwork

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def parallel_arcs(c=(0, 1)):
    """Two parallel arcs s->t carrying two demands of one each."""
    return WeightedSsufNetwork.build(
        ["s", "t"], [("a1", "s", "t", c[0]), ("a2", "s", "t", c[1])], "s", [("t", 1), ("t", 1)]
    )


def diamond(demand=1):
    return WeightedSsufNetwork.build(
        ["s", "a", "b", "t"],
        [("sa", "s", "a", 1), ("sb", "s", "b", 2), ("at", "a", "t", 1), ("bt", "b", "t", 0)],
        "s",
        [("t", demand)],
    )


def crossing_pair(d=(1, 2), costs=(1, 1, 1, 1)):
    """Canonical k=2 ring: s1, s2, t1, t2 clockwise."""
    return RingInstance.build(["s1", "s2", "t1", "t2"], list(costs), [("s1", "t1", d[0]), ("s2", "t2", d[1])])


@pytest.fixture
def par():
    return parallel_arcs()


def F(s):
    return Fraction(s)
