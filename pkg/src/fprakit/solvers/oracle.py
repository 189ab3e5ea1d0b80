"""Brute-force LP oracle for tiny problems, used to cross-check the solvers.

Equality constraints are eliminated first by parametrising their solution
space; every vertex of what remains is the unique solution of some choice of
tight inequalities, so enumerating those choices finds the optimum.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from ..errors import TooLarge
from .mincostflow import LpSolution
from .simplex import LinearProgram

MAX_VARIABLES = 6


def _rref(rows):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols - 1):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][col]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def _solve_square(A, b):
    """Unique solution of A t = b, or None if A is singular."""
    d = len(b)
    rows, pivots = _rref([list(A[i]) + [b[i]] for i in range(d)])
    if len(pivots) < d:
        return None
    return [rows[i][-1] for i in range(d)]


def _distinct(rows):
    """Scale each row so its first nonzero entry is +-1 and keep only the
    tightest copy. Zero rows are dropped, or signal infeasibility (None)."""
    best = {}
    for coef, rhs in rows:
        lead = next((abs(c) for c in coef if c != 0), None)
        if lead is None:
            if rhs < 0:
                return None
            continue
        key = tuple(c / lead for c in coef)
        val = rhs / lead
        if key not in best or val < best[key]:
            best[key] = val
    return [(list(k), v) for k, v in best.items()]


def lp_oracle_enumerate(lp: LinearProgram) -> LpSolution:
    """Exact optimum by vertex enumeration. All bounds must be finite."""
    n = lp.n
    if n > MAX_VARIABLES:
        raise TooLarge(f"oracle handles at most {MAX_VARIABLES} variables, got {n}")
    if any(u is None for u in lp.upper):
        raise ValueError("the oracle needs finite upper bounds")

    # affine parametrisation x = x0 + N t of the equality constraints
    if lp.A_eq:
        rows, pivots = _rref([list(r) + [b] for r, b in zip(lp.A_eq, lp.b_eq)])
        for row in rows[len(pivots):]:
            if row[-1] != 0:
                return LpSolution("infeasible")
        free = [j for j in range(n) if j not in pivots]
        x0 = [Fraction(0)] * n
        for i, p in enumerate(pivots):
            x0[p] = rows[i][-1]
        N = [[Fraction(0)] * len(free) for _ in range(n)]
        for k, f in enumerate(free):
            N[f][k] = Fraction(1)
            for i, p in enumerate(pivots):
                N[p][k] = -rows[i][f]
    else:
        free = list(range(n))
        x0 = [Fraction(0)] * n
        N = [[Fraction(1) if i == k else Fraction(0) for k in range(n)] for i in range(n)]
    d = len(free)

    # inequalities g @ x <= h, rewritten in t
    ineq = []
    for j in range(n):
        e = [Fraction(0)] * n
        e[j] = Fraction(1)
        ineq.append(([-v for v in e], -lp.lower[j]))
        ineq.append((e, lp.upper[j]))
    for row, b in zip(lp.A_ub, lp.b_ub):
        ineq.append((list(row), b))
    in_t = []
    for g, h in ineq:
        coef = [sum(g[i] * N[i][k] for i in range(n)) for k in range(d)]
        rhs = h - sum(g[i] * x0[i] for i in range(n))
        in_t.append((coef, rhs))
    in_t = _distinct(in_t)
    if in_t is None:
        return LpSolution("infeasible")

    best = None
    if d == 0:
        candidates = [[]]
    else:
        candidates = (
            _solve_square([in_t[i][0] for i in combo], [in_t[i][1] for i in combo])
            for combo in combinations(range(len(in_t)), d)
        )
    for t in candidates:
        if t is None:
            continue
        if any(sum(c * tk for c, tk in zip(coef, t)) > rhs for coef, rhs in in_t):
            continue
        x = [x0[i] + sum(N[i][k] * t[k] for k in range(d)) for i in range(n)]
        val = lp.objective(x)
        if best is None or val < best[0]:
            best = (val, x)
    if best is None:
        return LpSolution("infeasible")
    return LpSolution("optimal", best[0], dict(enumerate(best[1])))
