"""Restricted min-cost problem for ring loading, solved by exact simplex."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..errors import Infeasible
from ..model import RingInstance, WeightedSsufNetwork, check_lambda, ring_fractional_load
from .mincostflow import ArcBounds, LpSolution
from .simplex import LinearProgram, solve_lp


def ring_linear_program(ring: RingInstance, xbar: Sequence, radius, lam) -> LinearProgram:
    """LP over the splits: minimize cost of the loads, each load within
    ``lam * radius`` of the loads of ``xbar``.

    Load coefficients are read off the path sets: edge ``e`` gets
    ``+d_j`` per unit of split if it lies on the first path of ``j``
    and ``-d_j`` otherwise, on top of the constant all-second-path load.
    """
    lam = check_lambda(lam)
    radius = Fraction(radius)
    k, n = ring.k, ring.n
    base = [Fraction(0)] * n
    coef = [[Fraction(0)] * k for _ in range(n)]
    for j, (c, (first, second)) in enumerate(zip(ring.commodities, ring.paths)):
        for e in second:
            base[e] += c.demand
            coef[e][j] -= c.demand
        for e in first:
            coef[e][j] += c.demand
    target = ring_fractional_load(ring, xbar)
    slack = lam * radius
    A_ub, b_ub = [], []
    for e in range(n):
        A_ub.append(coef[e])
        b_ub.append(target[e] + slack - base[e])
        A_ub.append([-v for v in coef[e]])
        b_ub.append(-(target[e] - slack - base[e]))
    cost = [sum(ring.edges[e].cost * coef[e][j] for e in range(n)) for j in range(k)]
    return LinearProgram(
        c=cost,
        lower=[0] * k,
        upper=[1] * k,
        A_ub=A_ub,
        b_ub=b_ub,
    ), ring.cost_of(base)


def ring_restricted_min_cost(ring: RingInstance, xbar: Sequence, radius, lam) -> LpSolution:
    """Optimal splits minimizing load cost within ``lam * radius`` of ``xbar``.

    The returned point is a tuple of splits, the objective the exact load cost.
    """
    lp, offset = ring_linear_program(ring, xbar, radius, lam)
    sol = solve_lp(lp)
    if not sol.optimal:
        raise Infeasible("restricted ring problem infeasible; xbar should always be feasible")
    split = tuple(sol.point[j] for j in range(ring.k))
    return LpSolution("optimal", ring.cost_of(ring_fractional_load(ring, split)), split)


def ssuf_linear_program(network: WeightedSsufNetwork, bounds: ArcBounds) -> LinearProgram:
    """Flow-polytope LP over the arcs with the given bounds (for the oracle)."""
    ids = network.arc_ids
    supply = network.net_supply()
    A_eq, b_eq = [], []
    for v in network.nodes:
        row = [Fraction(0)] * len(ids)
        for a in network.out_arcs[v]:
            row[network.arc_index[a.id]] += 1
        for a in network.in_arcs[v]:
            row[network.arc_index[a.id]] -= 1
        A_eq.append(row)
        b_eq.append(supply[v])
    return LinearProgram(
        c=[a.cost for a in network.arcs],
        lower=[bounds.lower[a] for a in ids],
        upper=[bounds.upper[a] for a in ids],
        A_eq=A_eq,
        b_eq=b_eq,
    )


def ring_linear_program_by_evaluation(ring: RingInstance, xbar: Sequence, radius, lam) -> LinearProgram:
    """Same feasible set as :func:`ring_linear_program`, built only from load
    evaluations (unit splits against the all-zero split) so that the oracle
    check does not share the path-coefficient bookkeeping."""
    lam = check_lambda(lam)
    k, n = ring.k, ring.n
    zero = ring_fractional_load(ring, [0] * k)
    cols = []
    for j in range(k):
        unit = [0] * k
        unit[j] = 1
        lj = ring_fractional_load(ring, unit)
        cols.append([lj[e] - zero[e] for e in range(n)])
    target = ring_fractional_load(ring, xbar)
    slack = lam * Fraction(radius)
    A_ub, b_ub = [], []
    for e in range(n):
        row = [cols[j][e] for j in range(k)]
        A_ub.append(row)
        b_ub.append(target[e] + slack - zero[e])
        A_ub.append([-v for v in row])
        b_ub.append(zero[e] - target[e] + slack)
    c = [ring.cost_of(cols[j]) for j in range(k)]
    return LinearProgram(c=c, lower=[0] * k, upper=[1] * k, A_ub=A_ub, b_ub=b_ub)
