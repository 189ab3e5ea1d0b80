from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fprakit.errors import UnsatisfiableParams
from fprakit.generate import random_crossing_ring, random_ring, random_ssuf
from fprakit.model import check_membership_Q, find_cycle
from fprakit.ring import canonicalize_crossing, preprocess


def test_deterministic():
    assert random_ssuf(7) == random_ssuf(7)
    assert random_ring(7, capacities=True) == random_ring(7, capacities=True)
    assert random_crossing_ring(7) == random_crossing_ring(7)
    assert random_ssuf(7) != random_ssuf(8)


@given(seed=st.integers(0, 10**6), nodes=st.integers(2, 6), terms=st.integers(0, 4))
def test_ssuf_instances_are_feasible_and_acyclic(seed, nodes, terms):
    terms = min(terms, nodes - 1)
    d = random_ssuf(seed, nodes=nodes, arcs=min(10, nodes - 1 + seed % 4), terminals=terms)
    net = d.network
    assert len(net.arcs) <= 10 and len(net.terminals) == terms
    assert find_cycle(net) is None
    assert check_membership_Q(net, d.fractional).ok


@given(seed=st.integers(0, 10**6))
def test_ring_splits_and_capacities(seed):
    d = random_ring(seed, nodes=5, commodities=4, capacities=True)
    assert all(0 <= s <= 1 for s in d.fractional)
    assert all(e.capacity >= d.ring.d_max for e in d.ring.edges)


@given(seed=st.integers(0, 10**6), k=st.integers(1, 6))
def test_crossing_rings_keep_every_commodity(seed, k):
    d = random_crossing_ring(seed, commodities=k)
    assert all(0 < s < 1 for s in d.fractional)
    form = canonicalize_crossing(preprocess(d.ring, d.fractional))
    assert form.k == k


@pytest.mark.parametrize("call", [
    lambda: random_ssuf(0, nodes=0),
    lambda: random_ssuf(0, nodes=3, terminals=3),
    lambda: random_ssuf(0, nodes=4, arcs=2),
    lambda: random_ssuf(0, nodes=3, terminals=-1),
    lambda: random_ring(0, nodes=1),
    lambda: random_ring(0, commodities=-1),
    lambda: random_crossing_ring(0, commodities=0),
])
def test_unsatisfiable(call):
    with pytest.raises(UnsatisfiableParams):
        call()


def test_zero_terminals_is_valid():
    d = random_ssuf(3, nodes=3, terminals=0)
    assert d.network.terminals == () and all(v == Fraction(0) for v in d.fractional.values())
