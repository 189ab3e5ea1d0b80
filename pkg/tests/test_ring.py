import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import crossing_pair
from oracles import ring_choice_load, ring_cost, ring_load
from fprakit.errors import NoSolutionInBody, NotCrossing, NotParallel, OneSidedViolated, ZeroDmax
from fprakit.generate import random_crossing_ring, random_ring
from fprakit.model import RingInstance, ring_fractional_load, ring_induced_load
from fprakit.ring import (
    Preprocessed,
    UniformReductionRingFpra,
    canonicalize_crossing,
    check_opposing_edges,
    eliminate_parallel_pair,
    embed_solution,
    fix_unsplit_commodities,
    nonuniform_to_uniform,
    parallel_labelling,
    preprocess,
    ring_round_with_cost,
    strip_artificials,
    two_sided_bound,
    violation,
)

Q = Fraction


def _parallel_square():
    # commodity 0 on edge 0 clockwise, commodity 1 on edge 2 clockwise: parallel
    return RingInstance.build([0, 1, 2, 3], [1, 2, 3, 4], [(0, 1, 1), (2, 3, 1)])


# fixing and parallel pairs --------------------------------------------------------


def test_fix_all_unsplit():
    ring = crossing_pair()
    st_ = fix_unsplit_commodities(ring, (Q(1), Q(0)))
    assert st_.fixed == ((0, 1), (1, 2)) and st_.active == ()
    assert canonicalize_crossing(st_).ring is None


def test_fix_none_when_all_split():
    ring = crossing_pair()
    st_ = fix_unsplit_commodities(ring, (Q(1, 2), Q(1, 3)))
    assert st_.fixed == () and st_.split == (Q(1, 2), Q(1, 3))


def test_fix_one_reduces_loads_along_its_path():
    ring = crossing_pair((1, 2))
    split = (Q(1), Q(1, 3))
    st_ = fix_unsplit_commodities(ring, split)
    assert st_.fixed == ((0, 1),)
    # derived: active load is the full load minus commodity 0 on its first path
    full = ring_load(ring, split)
    path = ring_choice_load(RingInstance(ring.nodes, ring.edges, ring.commodities[:1]), (1,))
    assert list(st_.active_load()) == [a - b for a, b in zip(full, path)]


def test_parallel_elimination_example():
    ring = _parallel_square()
    # second-path amounts 7/10 and 2/5
    state = Preprocessed(ring, (Q(3, 10), Q(3, 5)), ())
    assert parallel_labelling(ring, 0, 1) == (1, 1)
    before = ring_fractional_load(ring, state.split)
    after_state = eliminate_parallel_pair(state, 0, 1)
    after = ring_fractional_load(ring, after_state.split)
    # derived: m = 2/5 moves to the disjoint paths; edges off them lose 2m
    assert after_state.split == (Q(7, 10), Q(1))
    assert after_state.fixed == ((1, 1),)
    assert all(a <= b for a, b in zip(after, before))
    assert before[0] == after[0] and before[2] == after[2]
    assert before[1] - after[1] == Q(4, 5)


def test_parallel_elimination_zero_shift():
    ring = _parallel_square()
    state = Preprocessed(ring, (Q(1, 2), Q(1)), ())
    out = eliminate_parallel_pair(state, 0, 1)
    assert ring_fractional_load(ring, out.split) == ring_fractional_load(ring, state.split)
    assert (1, 1) in out.fixed


def test_parallel_elimination_symmetric_pair():
    ring = _parallel_square()
    out = eliminate_parallel_pair(Preprocessed(ring, (Q(1, 2), Q(1, 2)), ()), 0, 1)
    assert out.split == (1, 1)
    assert out.fixed == ((0, 1), (1, 1))


def test_crossing_pair_is_not_parallel():
    ring = crossing_pair()
    with pytest.raises(NotParallel):
        eliminate_parallel_pair(Preprocessed(ring, (Q(1, 2), Q(1, 2)), ()), 0, 1)


@given(seed=st.integers(0, 10**6))
def test_preprocess_never_raises_loads(seed):
    doc = random_ring(seed, nodes=7, commodities=5)
    state = preprocess(doc.ring, doc.fractional)
    before = ring_load(doc.ring, doc.fractional)
    after = ring_load(doc.ring, state.split)
    assert all(a <= b for a, b in zip(after, before))
    form = canonicalize_crossing(state)
    assert set(j for j, _ in form.commodity_map) == set(state.active)


# canonical form ---------------------------------------------------------------------


def test_canonical_identity():
    ring = crossing_pair((1, 2), (1, 2, 3, 4))
    form = canonicalize_crossing(fix_unsplit_commodities(ring, (Q(1, 2), Q(1, 3))))
    assert form.commodity_map == ((0, False), (1, False))
    assert form.edge_map == (0, 1, 2, 3)
    assert form.ring.costs() == (1, 2, 3, 4)


def test_canonical_contracts_free_vertex():
    ring = RingInstance.build(["s1", "s2", "v", "t1", "t2"], [1, 2, 3, 4, 5],
                              [("s1", "t1", 1), ("s2", "t2", 2)])
    split = (Q(1, 3), Q(3, 4))
    form = canonicalize_crossing(fix_unsplit_commodities(ring, split))
    assert form.edge_map == (0, 1, 1, 2, 3)
    assert form.ring.costs() == (1, 5, 4, 5)
    # derived: loads agree under contraction for every choice and the split
    for ch in itertools.product((1, 2), repeat=2):
        assert form.expand_load(ring_choice_load(form.ring, ch)) == tuple(ring_choice_load(ring, ch))
    assert form.expand_load(ring_load(form.ring, form.xbar)) == tuple(ring_load(ring, split))


def test_canonical_scrambled_labels():
    # commodity 0 runs t->s in canonical terms and the labels start mid-way
    ring = RingInstance.build(["b", "c", "d", "a"], [1, 1, 1, 1], [("c", "a", 1), ("d", "b", 2)])
    split = (Q(1, 4), Q(2, 3))
    form = canonicalize_crossing(fix_unsplit_commodities(ring, split))
    k = form.k
    assert k == 2
    for c, comm in enumerate(form.ring.commodities):
        assert (comm.source, comm.sink) == (form.ring.nodes[c], form.ring.nodes[k + c])
    assert form.expand_load(ring_load(form.ring, form.xbar)) == tuple(ring_load(ring, split))
    for ch in itertools.product((1, 2), repeat=2):
        orig = form.to_original_choice(ch)
        assert form.expand_load(ring_choice_load(form.ring, ch)) == tuple(ring_choice_load(ring, orig))


def test_canonicalize_rejects_parallel():
    ring = _parallel_square()
    with pytest.raises(NotCrossing):
        canonicalize_crossing(fix_unsplit_commodities(ring, (Q(1, 2), Q(1, 2))))


# opposing edges ------------------------------------------------------------------------


def _form(d=(1, 2)):
    ring = crossing_pair(d)
    return canonicalize_crossing(fix_unsplit_commodities(ring, (Q(1, 2), Q(1, 2))))


def test_opposing_edges_clockwise_example():
    form = _form()
    load = ring_choice_load(form.ring, (1, 1))
    assert load == [1, 3, 2, 0]
    for ch in itertools.product((1, 2), repeat=2):
        assert check_opposing_edges(form, ring_choice_load(form.ring, ch))


def test_opposing_edges_fractional_and_corrupted():
    form = _form()
    rng = random.Random(7)
    for _ in range(20):
        split = [Q(rng.randint(0, 12), 12) for _ in range(2)]
        assert check_opposing_edges(form, ring_load(form.ring, split))
    bad = ring_choice_load(form.ring, (1, 2))
    bad[1] += Q(1, 100)
    assert not check_opposing_edges(form, bad)


def test_two_sided_margins():
    form = _form()
    rep = two_sided_bound(form, form.xbar, (1, 1), Q(13, 10))
    assert rep.certified and all(m >= 0 for m in rep.lower_margin)


def test_two_sided_zero_alpha_integral():
    ring = crossing_pair((1, 2))
    form = canonicalize_crossing(Preprocessed(ring, (Q(1, 2), Q(1, 2)), ()))
    rep = two_sided_bound(form, (Q(1), Q(0)), (1, 2), 0)
    assert rep.upper_margin == rep.lower_margin == (0, 0, 0, 0)


def test_two_sided_rejects_one_sided_violation():
    form = _form()
    with pytest.raises(OneSidedViolated):
        two_sided_bound(form, form.xbar, (1, 1), 0)


# uniform reduction --------------------------------------------------------------------


def test_uniform_reduction_substitution():
    ring = RingInstance.build([0, 1, 2], [(1, 10), (1, 4), (1, 10)], [(0, 1, 2), (1, 2, 1)])
    red = nonuniform_to_uniform(ring)
    assert red.u_unif == 10 and red.r == {1: 3}
    arts = red.uniform.commodities[ring.k:]
    assert len(arts) == 6 and all(c.demand == 2 for c in arts)


def test_uniform_reduction_half_gap():
    ring = RingInstance.build([0, 1, 2], [(1, 10), (1, Q(19, 2)), (1, 10)], [(0, 1, 2)])
    red = nonuniform_to_uniform(ring)
    assert red.r == {1: 1}
    assert [c.demand for c in red.uniform.commodities[ring.k:]] == [Q(1, 2), Q(1, 2)]


def test_uniform_reduction_identity():
    ring = RingInstance.build([0, 1, 2], [(1, 5), (2, 5), (3, 5)], [(0, 2, 1)])
    red = nonuniform_to_uniform(ring)
    assert red.uniform == ring and red.artificial == ()
    choice, rep = strip_artificials(red, (2,))
    assert choice == (2,) and rep.ok


def test_uniform_reduction_zero_dmax():
    ring = RingInstance.build([0, 1, 2], [(1, 5), (2, 4), (3, 5)], [])
    with pytest.raises(ZeroDmax):
        nonuniform_to_uniform(ring)


def test_embed_then_strip_recovers_choice():
    ring = RingInstance.build([0, 1, 2, 3], [(1, 6), (1, 2), (1, 3), (1, 6)], [(0, 2, 2), (1, 3, Q(3, 2))])
    red = nonuniform_to_uniform(ring)
    for choice in itertools.product((1, 2), repeat=2):
        emb = embed_solution(red, choice)
        back, rep = strip_artificials(red, emb)
        assert back == choice
        oviol = violation(ring_induced_load(ring, choice), [e.capacity for e in ring.edges])
        # artificials on their own edges reproduce the original violation exactly
        assert rep.uniform_violation == oviol == rep.original_violation


def test_adversarial_artificial_split_still_bounded():
    ring = RingInstance.build([0, 1, 2], [(1, 10), (1, 4), (1, 10)], [(0, 2, 2)])
    red = nonuniform_to_uniform(ring)
    # r_e = 3: send one artificial of each side around the long way
    uchoice = (1, 2, 1, 1, 2, 1, 1)
    _, rep = strip_artificials(red, uchoice)
    assert rep.ok
    on1, on2 = rep.artificial_load[1]
    assert max(on1, on2) >= red.u_unif - ring.edges[1].capacity


# full pipeline --------------------------------------------------------------------------


def test_pipeline_already_unsplittable():
    ring = crossing_pair((1, 2), (1, 2, 3, 4))
    choice, cert = ring_round_with_cost(ring, (Q(1), Q(0)))
    assert choice == (1, 2)
    assert cert.output_load == cert.x_load and cert.output_cost == cert.input_cost


def test_pipeline_crossing_pair_bound():
    ring = crossing_pair((1, 2), (3, 1, 2, 5))
    split = (Q(1, 3), Q(1, 2))
    choice, cert = ring_round_with_cost(ring, split, alpha=Q(13, 10), lam=1)
    x = ring_load(ring, split)
    z = ring_choice_load(ring, choice)
    # worked example: load within x_e + 13/5 d_max, cost at most c.x
    assert all(z[e] <= x[e] + Q(13, 5) * 2 for e in range(4))
    assert ring_cost(ring, z) <= ring_cost(ring, x)
    assert cert.ok


def test_pipeline_rejects_negative_costs():
    ring = crossing_pair((1, 2), (-1, 1, 1, 1))
    with pytest.raises(ValueError):
        ring_round_with_cost(ring, (Q(1, 2), Q(1, 2)))


def test_pipeline_strict_raises_when_body_too_small():
    ring = crossing_pair((1, 2), (3, 1, 2, 5))
    # alpha = 0 pins y* to xbar, which no unsplittable solution matches
    with pytest.raises(NoSolutionInBody):
        ring_round_with_cost(ring, (Q(1, 3), Q(1, 2)), alpha=0)


@given(seed=st.integers(0, 10**6), k=st.integers(1, 5))
def test_pipeline_lambda_half_against_enumeration(seed, k):
    doc = random_crossing_ring(seed, commodities=k)
    ring, split = doc.ring, doc.fractional
    lam = Q(1, 2)
    choice, cert = ring_round_with_cost(ring, split, lam=lam)
    x = ring_load(ring, split)
    z = ring_choice_load(ring, choice)
    dm = max(c.demand for c in ring.commodities)
    assert all(z[e] <= x[e] + Q(3, 2) * Q(13, 10) * dm for e in range(ring.n))
    assert ring_cost(ring, z) <= 2 * ring_cost(ring, x)
    # derived: the enumeration contains at least one solution that meets both bounds
    assert any(
        all(l <= xe + Q(3, 2) * Q(13, 10) * dm for l, xe in zip(ring_choice_load(ring, ch), x))
        and ring_cost(ring, ring_choice_load(ring, ch)) <= 2 * ring_cost(ring, x)
        for ch in itertools.product((1, 2), repeat=k)
    )


def test_uniform_search_variant():
    doc = random_crossing_ring(3, commodities=3)
    choice, cert = ring_round_with_cost(doc.ring, doc.fractional, UniformReductionRingFpra())
    assert cert.ok
