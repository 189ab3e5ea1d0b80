"""Seeded random instances with feasible fractional solutions.

The same seed and parameters always produce the same instance. Rationals
are drawn as small numerators over small denominators so that exact
arithmetic stays cheap.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .errors import UnsatisfiableParams
from .io import RingDocument, SsufDocument
from .model import Arc, Commodity, RingEdge, RingInstance, Terminal, WeightedSsufNetwork


def _rational(rng: random.Random, lo: int, hi: int, max_den: int) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(lo * den, hi * den), den)


def _weights(rng: random.Random, m: int, max_den: int = 4) -> list:
    """``m`` positive rationals summing to one."""
    raw = [Fraction(rng.randint(1, max_den)) for _ in range(m)]
    total = sum(raw)
    return [w / total for w in raw]


def random_ssuf(seed: int, nodes: int = 5, arcs: int | None = None, terminals: int = 2,
                max_paths: int = 3, cost_range=(0, 5), negative_costs: bool = False) -> SsufDocument:
    """Random acyclic single-source instance plus a fractional flow.

    Nodes are ``0..nodes-1`` in topological order with source ``0``. Every
    other node gets one in-arc from an earlier node, so all terminals are
    reachable; the remaining arcs join random earlier/later pairs and may be
    parallel. ``x`` mixes up to ``max_paths`` random source paths per terminal.
    """
    if nodes < 1:
        raise UnsatisfiableParams("need at least one node")
    if arcs is None:
        arcs = min(2 * (nodes - 1), 10) if nodes > 1 else 0
    if terminals < 0 or terminals > nodes - 1:
        raise UnsatisfiableParams(f"{terminals} terminals need at least {terminals + 1} nodes")
    if arcs < nodes - 1:
        raise UnsatisfiableParams(f"{arcs} arcs cannot connect {nodes} nodes")
    if nodes == 1 and arcs > 0:
        raise UnsatisfiableParams("a single node admits no acyclic arcs")
    rng = random.Random(seed)
    lo, hi = cost_range
    if negative_costs:
        lo = -hi
    pairs = [(rng.randrange(v), v) for v in range(1, nodes)]
    pairs += [tuple(sorted(rng.sample(range(nodes), 2))) for _ in range(arcs - len(pairs))]
    arc_list = tuple(Arc(f"a{i}", u, v, _rational(rng, lo, hi, 2)) for i, (u, v) in enumerate(pairs))
    sinks = sorted(rng.sample(range(1, nodes), terminals))
    terms = tuple(Terminal(t, _rational(rng, 1, 3, 3)) for t in sinks)
    net = WeightedSsufNetwork(tuple(range(nodes)), arc_list, 0, terms)

    x = {a.id: Fraction(0) for a in arc_list}
    for term in terms:
        count = rng.randint(1, max_paths)
        for w in _weights(rng, count):
            node = term.node
            while node != net.source:
                arc = rng.choice(net.in_arcs[node])
                x[arc.id] += w * term.demand
                node = arc.tail
    return SsufDocument(net, x)


def random_ring(seed: int, nodes: int = 6, commodities: int = 3, capacities: bool = False,
                unsplit_share: Fraction = Fraction(1, 5), cost_range=(0, 5)) -> RingDocument:
    """Random ring instance with one split per commodity.

    About ``unsplit_share`` of the splits are 0 or 1; the rest lie strictly
    between. Capacities, when asked for, are drawn between ``d_max`` and
    three times the total demand.
    """
    if nodes < 2:
        raise UnsatisfiableParams("a ring needs at least two nodes")
    if commodities < 0:
        raise UnsatisfiableParams("commodity count must be nonnegative")
    rng = random.Random(seed)
    comms = []
    for _ in range(commodities):
        s, t = rng.sample(range(nodes), 2)
        comms.append(Commodity(s, t, _rational(rng, 1, 3, 3)))
    total = sum((c.demand for c in comms), Fraction(0))
    d_max = max((c.demand for c in comms), default=Fraction(0))
    edges = []
    for _ in range(nodes):
        cost = _rational(rng, cost_range[0], cost_range[1], 2)
        cap = _rational(rng, 1, 3, 2) * max(total, Fraction(1)) if capacities else None
        if cap is not None:
            cap = max(cap, d_max)
        edges.append(RingEdge(cost, cap))
    split = []
    for _ in comms:
        if rng.random() < unsplit_share:
            split.append(Fraction(rng.randint(0, 1)))
        else:
            split.append(Fraction(rng.randint(1, 5), 6))
    ring = RingInstance(tuple(range(nodes)), tuple(edges), tuple(comms))
    return RingDocument(ring, tuple(split))


def random_crossing_ring(seed: int, commodities: int = 3, extra_nodes: int = 2,
                         cost_range=(0, 5)) -> RingDocument:
    """Ring whose commodities pairwise cross, all strictly split.

    Endpoints are placed as ``s_1..s_k, t_1..t_k`` clockwise with
    ``extra_nodes`` demand-free vertices scattered between them and a random
    rotation; sources and sinks are swapped at random.
    """
    k = commodities
    if k < 1:
        raise UnsatisfiableParams("a crossing ring needs at least one commodity")
    rng = random.Random(seed)
    slots = [("end", i) for i in range(2 * k)]
    for _ in range(extra_nodes):
        slots.insert(rng.randint(0, len(slots)), ("free", None))
    shift = rng.randrange(len(slots))
    slots = slots[shift:] + slots[:shift]
    where = {i: p for p, (kind, i) in enumerate(slots) if kind == "end"}
    comms = []
    for i in range(k):
        s, t = where[i], where[k + i]
        if rng.random() < 0.5:
            s, t = t, s
        comms.append(Commodity(s, t, _rational(rng, 1, 3, 3)))
    n = len(slots)
    edges = tuple(RingEdge(_rational(rng, cost_range[0], cost_range[1], 2)) for _ in range(n))
    split = tuple(Fraction(rng.randint(1, 5), 6) for _ in range(k))
    return RingDocument(RingInstance(tuple(range(n)), edges, tuple(comms)), split)
