"""Exact min-cost flow with per-arc lower and upper bounds.

Successive shortest augmenting paths over a residual graph with rational
node potentials. Arcs with negative cost start saturated so every residual
arc has nonnegative reduced cost from the outset; remaining imbalances are
routed from a super source to a super sink.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from ..errors import Infeasible, Unbounded
from ..model import WeightedSsufNetwork, check_lambda, BoxErrorBody


@dataclass(frozen=True)
class ArcBounds:
    lower: Mapping
    upper: Mapping  # None means no upper bound

    def __post_init__(self):
        for k, lo in self.lower.items():
            hi = self.upper.get(k)
            if lo < 0:
                raise ValueError(f"arc {k!r}: lower bound below zero")
            if hi is not None and hi < lo:
                raise ValueError(f"arc {k!r}: lower bound above upper bound")

    @classmethod
    def unbounded(cls, network: WeightedSsufNetwork) -> "ArcBounds":
        return cls({a: Fraction(0) for a in network.arc_ids}, {a: None for a in network.arc_ids})


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible"
    objective: Optional[Fraction] = None
    point: Optional[dict] = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Residual:
    """Residual graph on integer node ids; edge e and e ^ 1 are twins."""

    def __init__(self, n):
        self.adj = [[] for _ in range(n)]
        self.to, self.cap, self.cost = [], [], []

    def add(self, u, v, cap, cost):
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.cost.append(cost)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(Fraction(0))
        self.cost.append(-cost)
        return len(self.to) - 2

    def push(self, e, amount):
        if self.cap[e] is not None:
            self.cap[e] -= amount
        if self.cap[e ^ 1] is not None:
            self.cap[e ^ 1] += amount


def _has_room(cap):
    return cap is None or cap > 0


def min_cost_flow_bounded(network: WeightedSsufNetwork, bounds: ArcBounds, trace=None) -> LpSolution:
    """Cheapest flow in the flow polytope of ``network`` within ``bounds``.

    Returns an :class:`LpSolution` whose point maps every arc id to its flow.
    Infeasible bounds give ``status == "infeasible"``. A negative-cost arc
    without an upper bound raises :class:`Unbounded`.
    """
    idx = {v: i for i, v in enumerate(network.nodes)}
    n = len(network.nodes)
    S, T = n, n + 1
    res = _Residual(n + 2)

    flow0 = {}
    arc_edge = {}
    excess = [Fraction(0)] * n  # required (out - in) still missing at each node
    for v, b in network.net_supply().items():
        excess[idx[v]] = b
    for a in network.arcs:
        lo = Fraction(bounds.lower[a.id])
        hi = bounds.upper[a.id]
        hi = None if hi is None else Fraction(hi)
        if a.cost < 0:
            if hi is None:
                raise Unbounded(f"arc {a.id!r} has negative cost and no upper bound")
            start = hi
        else:
            start = lo
        flow0[a.id] = start
        excess[idx[a.tail]] -= start
        excess[idx[a.head]] += start
        e = res.add(idx[a.tail], idx[a.head], None if hi is None else hi - start, a.cost)
        res.cap[e ^ 1] = start - lo
        arc_edge[a.id] = e

    need = Fraction(0)
    for v in range(n):
        if excess[v] > 0:
            res.add(S, v, excess[v], Fraction(0))
            need += excess[v]
        elif excess[v] < 0:
            res.add(v, T, -excess[v], Fraction(0))

    potential = [Fraction(0)] * (n + 2)
    sent = Fraction(0)
    while sent < need:
        dist, pred = _dijkstra(res, S, potential)
        if dist[T] is None:
            break
        for v in range(n + 2):
            if dist[v] is not None:
                potential[v] += dist[v]
        # bottleneck along the path
        amount = need - sent
        v = T
        path = []
        while v != S:
            e = pred[v]
            path.append(e)
            if res.cap[e] is not None:
                amount = min(amount, res.cap[e])
            v = res.to[e ^ 1]
        for e in path:
            res.push(e, amount)
        sent += amount
        if trace is not None:
            trace.append(f"augment {amount} cost {potential[T] - potential[S]}")

    if sent < need:
        return LpSolution("infeasible")

    point = {}
    for a in network.arcs:
        e = arc_edge[a.id]
        lo = Fraction(bounds.lower[a.id])
        point[a.id] = lo + res.cap[e ^ 1]
    objective = sum((a.cost * point[a.id] for a in network.arcs), Fraction(0))
    return LpSolution("optimal", objective, point)


def _dijkstra(res: _Residual, src: int, potential):
    n = len(res.adj)
    dist = [None] * n
    pred = [None] * n
    dist[src] = Fraction(0)
    done = [False] * n
    heap = [(Fraction(0), src)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u] or d != dist[u]:
            continue
        done[u] = True
        for e in res.adj[u]:
            if not _has_room(res.cap[e]):
                continue
            v = res.to[e]
            if done[v]:
                continue
            nd = d + res.cost[e] + potential[u] - potential[v]
            if dist[v] is None or nd < dist[v]:
                dist[v] = nd
                pred[v] = e
                heapq.heappush(heap, (nd, v))
    return dist, pred


def restricted_bounds(network: WeightedSsufNetwork, x: Mapping, body: BoxErrorBody, lam) -> ArcBounds:
    """Per-arc bounds describing ``Q_G`` intersected with ``x - lam*R``."""
    lam = check_lambda(lam)
    lower, upper = {}, {}
    for aid in network.arc_ids:
        xa = Fraction(x.get(aid, 0))
        lower[aid] = max(Fraction(0), xa - lam * body.upper[aid])
        upper[aid] = xa - lam * body.lower[aid]
    return ArcBounds(lower, upper)


def restricted_min_cost_ssuf(network: WeightedSsufNetwork, x: Mapping, body: BoxErrorBody, lam) -> LpSolution:
    """Cheapest flow within ``lam * R`` of ``x`` (first line of the cost-aware rounding)."""
    sol = min_cost_flow_bounded(network, restricted_bounds(network, x, body, lam))
    if not sol.optimal:
        # x itself satisfies the bounds, so this means x was not a flow
        raise Infeasible("restricted problem infeasible; is x in the flow polytope?")
    return sol
