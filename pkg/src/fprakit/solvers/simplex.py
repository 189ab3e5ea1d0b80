"""Dense two-phase simplex over the rationals with Bland's rule.

Problems are given as :class:`LinearProgram`:

    minimize    c @ x
    subject to  A_eq @ x == b_eq
                A_ub @ x <= b_ub
                lower <= x <= upper      (upper may be None)

Variables are shifted to ``x - lower >= 0`` and finite upper bounds become
extra rows. Bland's rule (smallest eligible index for entering and for
leaving ties) guarantees termination.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ..errors import Unbounded
from .mincostflow import LpSolution


@dataclass(frozen=True)
class LinearProgram:
    c: tuple
    lower: tuple
    upper: tuple
    A_eq: tuple = ()
    b_eq: tuple = ()
    A_ub: tuple = ()
    b_ub: tuple = ()

    def __post_init__(self):
        n = len(self.c)
        conv = lambda row: tuple(Fraction(v) for v in row)
        object.__setattr__(self, "c", conv(self.c))
        object.__setattr__(self, "lower", conv(self.lower))
        object.__setattr__(self, "upper", tuple(None if u is None else Fraction(u) for u in self.upper))
        object.__setattr__(self, "A_eq", tuple(conv(r) for r in self.A_eq))
        object.__setattr__(self, "b_eq", conv(self.b_eq))
        object.__setattr__(self, "A_ub", tuple(conv(r) for r in self.A_ub))
        object.__setattr__(self, "b_ub", conv(self.b_ub))
        if len(self.lower) != n or len(self.upper) != n:
            raise ValueError("bounds must match the number of variables")
        if any(len(r) != n for r in self.A_eq + self.A_ub):
            raise ValueError("constraint rows must match the number of variables")
        if len(self.A_eq) != len(self.b_eq) or len(self.A_ub) != len(self.b_ub):
            raise ValueError("right-hand sides must match the constraint rows")

    @property
    def n(self) -> int:
        return len(self.c)

    def objective(self, x: Sequence) -> Fraction:
        return sum((ci * xi for ci, xi in zip(self.c, x)), Fraction(0))

    def is_feasible(self, x: Sequence) -> bool:
        for xi, lo, hi in zip(x, self.lower, self.upper):
            if xi < lo or (hi is not None and xi > hi):
                return False
        for row, b in zip(self.A_eq, self.b_eq):
            if sum(a * xi for a, xi in zip(row, x)) != b:
                return False
        for row, b in zip(self.A_ub, self.b_ub):
            if sum(a * xi for a, xi in zip(row, x)) > b:
                return False
        return True


def _pivot(tab, basis, r, col):
    prow = tab[r]
    pv = prow[col]
    if pv != 1:
        tab[r] = prow = [v / pv for v in prow]
    for i, row in enumerate(tab):
        if i != r and row[col] != 0:
            f = row[col]
            tab[i] = [a - f * b for a, b in zip(row, prow)]
    basis[r] = col


def _run(tab, basis, allowed, trace=None):
    """Minimize the objective held in the last row. Returns False if unbounded."""
    m = len(tab) - 1
    obj = tab[-1]
    while True:
        obj = tab[-1]
        entering = next((j for j in allowed if obj[j] < 0), None)
        if entering is None:
            return True
        best = None
        for i in range(m):
            a = tab[i][entering]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        if trace is not None:
            trace.append(f"pivot enter={entering} leave={basis[best[1]]}")
        _pivot(tab, basis, best[1], entering)


def solve_lp(lp: LinearProgram, trace=None) -> LpSolution:
    """Exact optimum of ``lp``; point keys are variable indices."""
    n = lp.n
    rows = []  # (coefficients over shifted vars, sense, rhs)
    for row, b in zip(lp.A_eq, lp.b_eq):
        rows.append((list(row), "=", b - sum(a * lo for a, lo in zip(row, lp.lower))))
    for row, b in zip(lp.A_ub, lp.b_ub):
        rows.append((list(row), "<", b - sum(a * lo for a, lo in zip(row, lp.lower))))
    for j in range(n):
        if lp.upper[j] is not None:
            if lp.upper[j] < lp.lower[j]:
                return LpSolution("infeasible")
            row = [Fraction(0)] * n
            row[j] = Fraction(1)
            rows.append((row, "<", lp.upper[j] - lp.lower[j]))

    m = len(rows)
    n_slack = sum(1 for _, s, _ in rows if s == "<")
    width = n + n_slack + m + 1  # structural, slack, artificial, rhs
    art0 = n + n_slack
    tab = []
    basis = []
    slack = n
    for i, (coef, sense, rhs) in enumerate(rows):
        line = [Fraction(0)] * width
        line[:n] = coef
        if sense == "<":
            line[slack] = Fraction(1)
            slack += 1
        if rhs < 0:
            line = [-v for v in line]
            rhs = -rhs
        line[art0 + i] = Fraction(1)
        line[-1] = rhs
        tab.append(line)
        basis.append(art0 + i)

    # phase 1: minimize the sum of artificials
    phase1 = [Fraction(0)] * width
    for line in tab:
        for j in range(art0):
            phase1[j] -= line[j]
        phase1[-1] -= line[-1]
    tab.append(phase1)
    _run(tab, basis, range(art0 + m), trace)
    if tab[-1][-1] != 0:
        return LpSolution("infeasible")

    # drive artificials out of the basis; drop redundant rows
    i = 0
    while i < len(basis):
        if basis[i] >= art0:
            col = next((j for j in range(art0) if tab[i][j] != 0), None)
            if col is None:
                del tab[i]
                del basis[i]
                continue
            _pivot(tab, basis, i, col)
        i += 1

    # phase 2 objective row, expressed in terms of the non-basic variables
    cost = list(lp.c) + [Fraction(0)] * (width - n)
    obj = cost[:]
    obj[-1] = Fraction(0)
    for r, b in enumerate(basis):
        if cost[b] != 0:
            f = cost[b]
            obj = [o - f * t for o, t in zip(obj, tab[r])]
    tab[-1] = obj
    if not _run(tab, basis, range(art0), trace):
        raise Unbounded("linear program is unbounded")

    shifted = [Fraction(0)] * n
    for r, b in enumerate(basis):
        if b < n:
            shifted[b] = tab[r][-1]
    x = [lo + v for lo, v in zip(lp.lower, shifted)]
    return LpSolution("optimal", lp.objective(x), dict(enumerate(x)))
