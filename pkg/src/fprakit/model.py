"""Exact data model for single-source unsplittable flow and ring loading.

All numbers are :class:`fractions.Fraction`. Flow vectors are plain dicts
keyed by arc id; ring solutions are tuples indexed by commodity.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .errors import BadLambda, InvalidPath

Rational = Fraction
FractionalFlow = dict  # arc id -> Fraction

_RATIONAL_RE = re.compile(r"^\s*-?\d+(\s*/\s*\d+)?\s*$")


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, an integer string, or an int. Floats are refused."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str) and _RATIONAL_RE.match(value):
        q = Fraction(value.replace(" ", ""))
        return q
    raise ValueError(f"not an exact rational: {value!r}")


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


def check_lambda(lam) -> Fraction:
    lam = Fraction(lam)
    if not 0 < lam <= 1:
        raise BadLambda(f"lambda must lie in (0, 1], got {lam}")
    return lam


# ---------------------------------------------------------------------------
# single-source networks


@dataclass(frozen=True)
class Arc:
    id: str
    tail: Hashable
    head: Hashable
    cost: Fraction = Fraction(0)


@dataclass(frozen=True)
class Terminal:
    node: Hashable
    demand: Fraction


@dataclass(frozen=True)
class WeightedSsufNetwork:
    """Directed network with one source and demand-carrying terminals.

    Several terminals may sit on the same node; their demands add up in the
    conservation constraints. Costs may be negative (only the ``lambda = 1``
    rounding accepts that).
    """

    nodes: tuple
    arcs: tuple
    source: Hashable
    terminals: tuple

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "arcs", tuple(self.arcs))
        object.__setattr__(self, "terminals", tuple(self.terminals))
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise ValueError("duplicate node ids")
        if self.source not in known:
            raise ValueError(f"source {self.source!r} is not a node")
        ids = set()
        for a in self.arcs:
            if a.id in ids:
                raise ValueError(f"duplicate arc id {a.id!r}")
            ids.add(a.id)
            if a.tail not in known or a.head not in known:
                raise ValueError(f"arc {a.id!r} has an unknown endpoint")
        for t in self.terminals:
            if t.node not in known:
                raise ValueError(f"terminal node {t.node!r} is not a node")
            if t.demand < 0:
                raise ValueError("demands must be nonnegative")

    @classmethod
    def build(cls, nodes, arcs, source, terminals):
        """Convenience constructor from plain tuples.

        ``arcs`` holds ``(id, tail, head, cost)`` and ``terminals`` holds
        ``(node, demand)``; numbers go through :func:`parse_rational`.
        """
        return cls(
            nodes=tuple(nodes),
            arcs=tuple(Arc(i, u, v, parse_rational(c)) for i, u, v, c in arcs),
            source=source,
            terminals=tuple(Terminal(n, parse_rational(d)) for n, d in terminals),
        )

    @cached_property
    def arc_ids(self) -> tuple:
        return tuple(a.id for a in self.arcs)

    @cached_property
    def arc_index(self) -> dict:
        return {a.id: i for i, a in enumerate(self.arcs)}

    @cached_property
    def arc_by_id(self) -> dict:
        return {a.id: a for a in self.arcs}

    @cached_property
    def out_arcs(self) -> dict:
        out = {v: [] for v in self.nodes}
        for a in self.arcs:
            out[a.tail].append(a)
        return out

    @cached_property
    def in_arcs(self) -> dict:
        inc = {v: [] for v in self.nodes}
        for a in self.arcs:
            inc[a.head].append(a)
        return inc

    @property
    def d_max(self) -> Fraction:
        return max((t.demand for t in self.terminals), default=Fraction(0))

    @property
    def total_demand(self) -> Fraction:
        return sum((t.demand for t in self.terminals), Fraction(0))

    def costs(self) -> dict:
        return {a.id: a.cost for a in self.arcs}

    def net_supply(self) -> dict:
        """Required out-minus-in flow at every node."""
        b = {v: Fraction(0) for v in self.nodes}
        b[self.source] += self.total_demand
        for t in self.terminals:
            b[t.node] -= t.demand
        return b

    def cost_of(self, vector: Mapping) -> Fraction:
        return sum((a.cost * Fraction(vector.get(a.id, 0)) for a in self.arcs), Fraction(0))

    def is_acyclic(self, arc_ids: Optional[Iterable] = None) -> bool:
        return find_cycle(self, arc_ids) is None

    def restrict(self, arc_ids: Iterable) -> "WeightedSsufNetwork":
        keep = set(arc_ids)
        return WeightedSsufNetwork(
            self.nodes, tuple(a for a in self.arcs if a.id in keep), self.source, self.terminals
        )


@dataclass(frozen=True)
class UnsplittablePathFlow:
    """One arc-id path per terminal (indexed like ``network.terminals``)."""

    paths: tuple

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(tuple(p) for p in self.paths))


def find_cycle(network: WeightedSsufNetwork, arc_ids: Optional[Iterable] = None):
    """Return the arc ids of some directed cycle, or ``None``.

    Depth-first search in node order, arcs taken in network order, so the
    result is deterministic.
    """
    allowed = None if arc_ids is None else set(arc_ids)
    WHITE, GREY, BLACK = 0, 1, 2
    color = {v: WHITE for v in network.nodes}
    for root in network.nodes:
        if color[root] != WHITE:
            continue
        # stack of (node, iterator over outgoing arcs); path of arcs in use
        color[root] = GREY
        stack = [(root, iter(network.out_arcs[root]))]
        arc_stack: list = []
        while stack:
            node, it = stack[-1]
            advanced = False
            for a in it:
                if allowed is not None and a.id not in allowed:
                    continue
                if color[a.head] == GREY:
                    # cycle: arcs from the occurrence of a.head on the stack
                    nodes_on_stack = [n for n, _ in stack]
                    start = nodes_on_stack.index(a.head)
                    return tuple(arc_stack[start:]) + (a.id,)
                if color[a.head] == WHITE:
                    color[a.head] = GREY
                    stack.append((a.head, iter(network.out_arcs[a.head])))
                    arc_stack.append(a.id)
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
                if arc_stack:
                    arc_stack.pop()
    return None


def validate_path(network: WeightedSsufNetwork, terminal_index: int, path: Sequence) -> None:
    terminal = network.terminals[terminal_index]
    node = network.source
    seen = {node}
    for aid in path:
        arc = network.arc_by_id.get(aid)
        if arc is None:
            raise InvalidPath(f"terminal {terminal_index}: unknown arc {aid!r}")
        if arc.tail != node:
            raise InvalidPath(f"terminal {terminal_index}: arc {aid!r} does not continue the path")
        node = arc.head
        if node in seen:
            raise InvalidPath(f"terminal {terminal_index}: path is not simple")
        seen.add(node)
    if node != terminal.node:
        raise InvalidPath(f"terminal {terminal_index}: path ends at {node!r}, not {terminal.node!r}")


def induced_load(network: WeightedSsufNetwork, solution: UnsplittablePathFlow) -> dict:
    """Arc load of an unsplittable flow: demand summed over paths using each arc."""
    if len(solution.paths) != len(network.terminals):
        raise InvalidPath("need exactly one path per terminal")
    load = {aid: Fraction(0) for aid in network.arc_ids}
    for i, (term, path) in enumerate(zip(network.terminals, solution.paths)):
        validate_path(network, i, path)
        for aid in path:
            load[aid] += term.demand
    return load


@dataclass(frozen=True)
class MembershipReport:
    ok: bool
    violations: tuple = ()

    def __bool__(self):
        return self.ok


def check_membership_Q(network: WeightedSsufNetwork, x: Mapping) -> MembershipReport:
    """Exact test of flow conservation and nonnegativity.

    Violations are ``("conservation", node, required - actual)``,
    ``("negative", arc_id, value)`` or ``("unknown-arc", arc_id, value)``.
    """
    violations = []
    for aid in x:
        if aid not in network.arc_by_id:
            violations.append(("unknown-arc", aid, Fraction(x[aid])))
    for a in network.arcs:
        val = Fraction(x.get(a.id, 0))
        if val < 0:
            violations.append(("negative", a.id, val))
    b = network.net_supply()
    for v in network.nodes:
        out = sum((Fraction(x.get(a.id, 0)) for a in network.out_arcs[v]), Fraction(0))
        inc = sum((Fraction(x.get(a.id, 0)) for a in network.in_arcs[v]), Fraction(0))
        if out - inc != b[v]:
            violations.append(("conservation", v, b[v] - (out - inc)))
    return MembershipReport(not violations, tuple(violations))


def support(x: Mapping) -> set:
    return {k for k, v in x.items() if v > 0}


def eliminate_cycle_flow(network: WeightedSsufNetwork, x: Mapping) -> dict:
    """Cancel flow around directed cycles until the support is acyclic."""
    y = {aid: Fraction(x.get(aid, 0)) for aid in network.arc_ids}
    while True:
        cycle = find_cycle(network, support(y))
        if cycle is None:
            return y
        delta = min(y[aid] for aid in cycle)
        for aid in cycle:
            y[aid] -= delta


def support_subnetwork(network: WeightedSsufNetwork, x: Mapping) -> WeightedSsufNetwork:
    """Drop every arc with zero flow. Arc ids are kept, so paths re-embed as is."""
    return network.restrict(support(x))


# ---------------------------------------------------------------------------
# error bodies


@dataclass(frozen=True)
class BoxErrorBody:
    """Axis-aligned box ``lower <= v <= upper`` that contains the origin."""

    lower: Mapping
    upper: Mapping

    def __post_init__(self):
        lower = {k: Fraction(v) for k, v in self.lower.items()}
        upper = {k: Fraction(v) for k, v in self.upper.items()}
        if lower.keys() != upper.keys():
            raise ValueError("lower and upper must share coordinates")
        for k in lower:
            if lower[k] > 0 or upper[k] < 0:
                raise ValueError(f"body must contain the origin (coordinate {k!r})")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def symmetric(cls, coords: Iterable, radius) -> "BoxErrorBody":
        r = Fraction(radius)
        coords = list(coords)
        return cls({k: -r for k in coords}, {k: r for k in coords})

    @property
    def coords(self) -> tuple:
        return tuple(self.lower)

    def radius(self, coord, sign: int) -> Fraction:
        """Room in direction ``sign`` (+1 towards upper, -1 towards lower)."""
        return self.upper[coord] if sign > 0 else -self.lower[coord]


def scale_body(body: BoxErrorBody, lam) -> BoxErrorBody:
    lam = check_lambda(lam)
    return BoxErrorBody(
        {k: lam * v for k, v in body.lower.items()},
        {k: lam * v for k, v in body.upper.items()},
    )


def minkowski_diff_body(body: BoxErrorBody, lam) -> BoxErrorBody:
    """The box ``R - lam*R``."""
    lam = check_lambda(lam)
    return BoxErrorBody(
        {k: body.lower[k] - lam * body.upper[k] for k in body.lower},
        {k: body.upper[k] - lam * body.lower[k] for k in body.lower},
    )


def body_contains(body: BoxErrorBody, v: Mapping) -> bool:
    """Exact box membership. Coordinates missing from ``v`` count as zero."""
    if any(k not in body.lower for k in v):
        raise KeyError("vector has coordinates outside the body")
    return all(body.lower[k] <= Fraction(v.get(k, 0)) <= body.upper[k] for k in body.lower)


# ---------------------------------------------------------------------------
# ring loading


@dataclass(frozen=True)
class RingEdge:
    cost: Fraction = Fraction(0)
    capacity: Optional[Fraction] = None


@dataclass(frozen=True)
class Commodity:
    source: Hashable
    sink: Hashable
    demand: Fraction


@dataclass(frozen=True)
class RingInstance:
    """Undirected cycle ``nodes[0], ..., nodes[n-1]``.

    Edge ``i`` joins ``nodes[i]`` and ``nodes[(i+1) % n]``. For commodity ``j``
    the first path runs clockwise (increasing positions) from its source to
    its sink; the second path is the complementary edge set.
    """

    nodes: tuple
    edges: tuple
    commodities: tuple

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "commodities", tuple(self.commodities))
        if len(self.nodes) < 2:
            raise ValueError("a ring needs at least two nodes")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("duplicate node ids")
        if len(self.edges) != len(self.nodes):
            raise ValueError("a ring has as many edges as nodes")
        pos = {v: i for i, v in enumerate(self.nodes)}
        for c in self.commodities:
            if c.source not in pos or c.sink not in pos:
                raise ValueError("commodity endpoint is not a node")
            if c.source == c.sink:
                raise ValueError("commodity source and sink must differ")
            if c.demand < 0:
                raise ValueError("demands must be nonnegative")

    @classmethod
    def build(cls, nodes, edges, commodities):
        """``edges`` holds ``cost`` or ``(cost, capacity)``; commodities ``(s, t, d)``."""
        es = []
        for e in edges:
            if isinstance(e, tuple):
                cost, cap = e
                es.append(RingEdge(parse_rational(cost), None if cap is None else parse_rational(cap)))
            else:
                es.append(RingEdge(parse_rational(e)))
        return cls(
            tuple(nodes),
            tuple(es),
            tuple(Commodity(s, t, parse_rational(d)) for s, t, d in commodities),
        )

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def k(self) -> int:
        return len(self.commodities)

    @cached_property
    def position(self) -> dict:
        return {v: i for i, v in enumerate(self.nodes)}

    @property
    def d_max(self) -> Fraction:
        return max((c.demand for c in self.commodities), default=Fraction(0))

    @property
    def total_demand(self) -> Fraction:
        return sum((c.demand for c in self.commodities), Fraction(0))

    def clockwise_edges(self, a, b) -> tuple:
        """Edge indices walked clockwise from node ``a`` to node ``b``."""
        i, j = self.position[a], self.position[b]
        out = []
        while i != j:
            out.append(i)
            i = (i + 1) % self.n
        return tuple(out)

    @cached_property
    def paths(self) -> tuple:
        """``(first, second)`` edge sets for every commodity."""
        res = []
        for c in self.commodities:
            first = frozenset(self.clockwise_edges(c.source, c.sink))
            second = frozenset(range(self.n)) - first
            res.append((first, second))
        return tuple(res)

    def path(self, j: int, choice: int) -> frozenset:
        return self.paths[j][choice - 1]

    def costs(self) -> tuple:
        return tuple(e.cost for e in self.edges)

    def cost_of(self, load: Sequence) -> Fraction:
        return sum((e.cost * Fraction(l) for e, l in zip(self.edges, load)), Fraction(0))


RingFractionalSolution = tuple  # split[j] = share of commodity j on its first path
RingUnsplittableSolution = tuple  # choice[j] in {1, 2}


def ring_fractional_load(ring: RingInstance, split: Sequence) -> tuple:
    """Edge loads of a fractional ring solution."""
    if len(split) != ring.k:
        raise ValueError("need one split value per commodity")
    load = [Fraction(0)] * ring.n
    for c, (first, second), lam in zip(ring.commodities, ring.paths, split):
        lam = Fraction(lam)
        if not 0 <= lam <= 1:
            raise ValueError(f"split {lam} outside [0, 1]")
        for e in first:
            load[e] += lam * c.demand
        for e in second:
            load[e] += (1 - lam) * c.demand
    return tuple(load)


def ring_induced_load(ring: RingInstance, choice: Sequence) -> tuple:
    """Edge loads of an unsplittable ring solution."""
    if len(choice) != ring.k:
        raise InvalidPath("need one path choice per commodity")
    load = [Fraction(0)] * ring.n
    for j, (c, ch) in enumerate(zip(ring.commodities, choice)):
        if ch not in (1, 2):
            raise InvalidPath(f"commodity {j}: choice must be 1 or 2, got {ch!r}")
        for e in ring.path(j, ch):
            load[e] += c.demand
    return tuple(load)


def choice_as_split(choice: Sequence) -> tuple:
    return tuple(Fraction(1) if ch == 1 else Fraction(0) for ch in choice)
