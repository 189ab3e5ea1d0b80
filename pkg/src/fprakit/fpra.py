"""Face-preserving rounding algorithms (FPRAs) and the flow decomposition they use.

An FPRA takes a fractional point and returns an unsplittable solution on the
minimal face of the relaxation containing that point. For the flow polytope
this means: never use an arc that carries no flow. For the ring polytope it
means: commodities that are already unsplit keep their path.

The shipped implementations are exhaustive searches, suitable for small
instances; polynomial algorithms plug into the same call signature.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import CyclicSupport, InvalidPath, NoSolutionInBody, TooLarge
from .model import (
    BoxErrorBody,
    RingInstance,
    UnsplittablePathFlow,
    WeightedSsufNetwork,
    body_contains,
    find_cycle,
    induced_load,
    ring_fractional_load,
    ring_induced_load,
    support,
    support_subnetwork,
)

DEFAULT_PATH_CAP = 64
DEFAULT_ASSIGNMENT_CAP = 200_000
DEFAULT_RING_CAP = 20


@dataclass(frozen=True)
class FpraDescriptor:
    name: str
    declared_body: Optional[BoxErrorBody]  # None: reports the realized deviation
    strictness: str = "strict"  # "strict" | "report"


@dataclass(frozen=True)
class FpraOutput:
    solution: object  # UnsplittablePathFlow or choice tuple
    load: object  # dict (ssuf) or tuple (ring)
    deviation: object  # load minus input point, same shape
    within_body: Optional[bool]


# ---------------------------------------------------------------------------
# flow decomposition


@dataclass(frozen=True)
class PathDecomposition:
    parts: tuple  # (terminal index, arc-id path, amount)

    def arc_sums(self) -> dict:
        out = {}
        for _, path, amount in self.parts:
            for aid in path:
                out[aid] = out.get(aid, Fraction(0)) + amount
        return out

    def for_terminal(self, t: int) -> list:
        return [(p, amt) for ti, p, amt in self.parts if ti == t]


def flow_decomposition(network: WeightedSsufNetwork, x: Mapping) -> PathDecomposition:
    """Split an acyclic flow into source-terminal paths.

    Terminals are served in index order. Each step follows positive residual
    flow backwards from the terminal (lowest arc index first) and strips the
    bottleneck, so every step zeroes an arc or finishes a demand.
    """
    residual = {aid: Fraction(x.get(aid, 0)) for aid in network.arc_ids}
    if find_cycle(network, support(residual)) is not None:
        raise CyclicSupport("flow support contains a directed cycle")
    parts = []
    for ti, term in enumerate(network.terminals):
        need = term.demand
        while need > 0:
            path = []
            node = term.node
            while node != network.source:
                arc = next((a for a in network.in_arcs[node] if residual[a.id] > 0), None)
                if arc is None:
                    raise InvalidPath(f"no flow reaches terminal {ti}; is x a flow?")
                path.append(arc.id)
                node = arc.tail
            path.reverse()
            amount = min([need] + [residual[a] for a in path])
            for a in path:
                residual[a] -= amount
            need -= amount
            parts.append((ti, tuple(path), amount))
    return PathDecomposition(tuple(parts))


# ---------------------------------------------------------------------------
# single-source rounding


def source_sink_paths(network: WeightedSsufNetwork, sink, cap: int = DEFAULT_PATH_CAP) -> list:
    """All simple source-to-``sink`` arc paths, sorted by arc index sequence."""
    out = []

    def walk(node, seen, path):
        if node == sink:
            out.append(tuple(path))
            if len(out) > cap:
                raise TooLarge(f"more than {cap} paths to {sink!r}")
            return
        for a in network.out_arcs[node]:
            if a.head not in seen:
                seen.add(a.head)
                path.append(a.id)
                walk(a.head, seen, path)
                path.pop()
                seen.discard(a.head)

    walk(network.source, {network.source}, [])
    idx = network.arc_index
    out.sort(key=lambda p: [idx[a] for a in p])
    return out


def _score(dev: Mapping, body: BoxErrorBody):
    """Body-scaled L-infinity size of ``dev``; ``None`` if outside the body."""
    worst = Fraction(0)
    for k, v in dev.items():
        if v == 0:
            continue
        room = body.radius(k, 1 if v > 0 else -1)
        if room == 0 or abs(v) > room:
            return None
        worst = max(worst, abs(v) / room)
    return worst


def _raw_score(dev: Mapping, body: BoxErrorBody):
    """Scaled size used to rank out-of-body candidates in report mode."""
    worst = (Fraction(0), Fraction(0))  # (excess over zero-room coords, scaled)
    for k, v in dev.items():
        if v == 0:
            continue
        room = body.radius(k, 1 if v > 0 else -1)
        item = (abs(v), Fraction(0)) if room == 0 else (Fraction(0), abs(v) / room)
        worst = max(worst, item)
    return worst


def fallback_path(network: WeightedSsufNetwork, terminal_index: int) -> tuple:
    """Some path for a terminal, used only for zero demands outside the support."""
    paths = source_sink_paths(network, network.terminals[terminal_index].node, cap=10**6)
    if not paths:
        raise InvalidPath(f"terminal {terminal_index} is unreachable from the source")
    return paths[0]


def recheck_no_solution(network: WeightedSsufNetwork, x: Mapping, body: BoxErrorBody,
                        path_cap: int = DEFAULT_PATH_CAP) -> bool:
    """Independent plain enumeration: True iff no assignment lies in ``x + R``.

    Shares no pruning or ordering logic with :class:`BruteForceSsufFpra`.
    """
    sub = support_subnetwork(network, x)
    choices = []
    for t in network.terminals:
        ps = source_sink_paths(sub, t.node, path_cap)
        if t.demand == 0:
            ps = ps[:1] or [None]
        choices.append(ps)
    for combo in itertools.product(*choices):
        load = {aid: Fraction(0) for aid in network.arc_ids}
        for t, p in zip(network.terminals, combo):
            for aid in p or ():
                load[aid] += t.demand
        if all(body.lower[a] <= load[a] - Fraction(x.get(a, 0)) <= body.upper[a] for a in network.arc_ids):
            return False
    return True


class BruteForceSsufFpra:
    """Exhaustive FPRA for single-source unsplittable flow.

    Searches all assignments of terminals to paths inside the support of the
    input flow. Among assignments whose load deviation lies in the body, the
    one with the smallest body-scaled L-infinity deviation wins; ties go to
    the lexicographically smallest tuple of path indices. With the default
    body ``[-d_max, d_max]`` per arc this stands in for a rounding that meets
    lower and upper bounds simultaneously on acyclic networks.

    In report mode an assignment is always returned (the best one overall)
    and ``within_body`` tells whether it met the body.
    """

    name = "brute"

    def __init__(self, body: Optional[BoxErrorBody] = None, strict: bool = True,
                 path_cap: int = DEFAULT_PATH_CAP, assignment_cap: int = DEFAULT_ASSIGNMENT_CAP):
        self.body = body
        self.strict = strict
        self.path_cap = path_cap
        self.assignment_cap = assignment_cap

    def body_for(self, network: WeightedSsufNetwork) -> BoxErrorBody:
        if self.body is not None:
            return self.body
        return BoxErrorBody.symmetric(network.arc_ids, network.d_max)

    def descriptor(self, network: WeightedSsufNetwork) -> FpraDescriptor:
        return FpraDescriptor(self.name, self.body_for(network), "strict" if self.strict else "report")

    def __call__(self, network: WeightedSsufNetwork, x: Mapping) -> FpraOutput:
        body = self.body_for(network)
        sub = support_subnetwork(network, x)
        if find_cycle(sub) is not None:
            raise CyclicSupport("flow support contains a directed cycle")
        ids = network.arc_ids
        xv = {a: Fraction(x.get(a, 0)) for a in ids}
        terms = network.terminals

        options = []
        total = 1
        for ti, t in enumerate(terms):
            ps = source_sink_paths(sub, t.node, self.path_cap)
            if t.demand == 0:
                # load-neutral: any single path will do
                ps = ps[:1] or [fallback_path(network, ti)]
            if not ps:
                raise InvalidPath(f"terminal {ti} is not reachable inside the support")
            options.append(ps)
            total *= len(ps)
        if total > self.assignment_cap:
            raise TooLarge(f"{total} assignments exceed the cap of {self.assignment_cap}")

        # deepest-first order keeps the search lexicographic in path indices
        upper_room = {a: body.upper[a] for a in ids}
        best = None  # (score, index tuple, load)
        best_any = None
        enumeration = []
        load = {a: Fraction(0) for a in ids}
        k = len(terms)
        choice = [0] * k

        def partial_excess():
            worst = Fraction(0)
            for a in ids:
                over = load[a] - xv[a]
                if over > 0:
                    room = upper_room[a]
                    if room == 0 or over > room:
                        return None
                    worst = max(worst, over / room)
            return worst

        def rec(depth):
            nonlocal best, best_any
            if depth == k:
                dev = {a: load[a] - xv[a] for a in ids}
                score = _score(dev, body)
                if not self.strict:
                    raw = _raw_score(dev, body)
                    if best_any is None or raw < best_any[0]:
                        best_any = (raw, tuple(choice), dict(load))
                if score is not None and (best is None or score < best[0]):
                    best = (score, tuple(choice), dict(load))
                if score is None and self.strict:
                    enumeration.append((tuple(choice), dict(load)))
                return
            t = terms[depth]
            for pi, p in enumerate(options[depth]):
                for a in p:
                    load[a] += t.demand
                choice[depth] = pi
                prune = False
                if self.strict:
                    lb = partial_excess()
                    if lb is None or (best is not None and lb >= best[0]):
                        prune = True
                if prune:
                    enumeration.append((tuple(choice[: depth + 1]), dict(load)))
                else:
                    rec(depth + 1)
                for a in p:
                    load[a] -= t.demand

        rec(0)
        pick = best if best is not None else (None if self.strict else best_any)
        if pick is None:
            raise NoSolutionInBody(
                "no unsplittable flow inside the support lies in the error body",
                enumeration,
                {"x": xv, "body": body},
            )
        paths = tuple(options[i][c] for i, c in enumerate(pick[1]))
        sol = UnsplittablePathFlow(paths)
        zl = induced_load(network, sol)
        dev = {a: zl[a] - xv[a] for a in ids}
        return FpraOutput(sol, zl, dev, body_contains(body, dev))


class GreedyPathStripFpra:
    """Route every terminal along its heaviest path in a flow decomposition.

    Face preserving by construction; no error body is promised, the realized
    deviation is reported instead.
    """

    name = "greedy"
    strict = False

    def descriptor(self, network):
        return FpraDescriptor(self.name, None, "report")

    def __call__(self, network: WeightedSsufNetwork, x: Mapping) -> FpraOutput:
        dec = flow_decomposition(network, x)
        paths = []
        for ti in range(len(network.terminals)):
            cands = dec.for_terminal(ti)
            if not cands:
                if network.terminals[ti].node == network.source:
                    paths.append(())
                else:
                    paths.append(fallback_path(network, ti))
                continue
            best = max(range(len(cands)), key=lambda i: (cands[i][1], -i))
            paths.append(cands[best][0])
        sol = UnsplittablePathFlow(tuple(paths))
        zl = induced_load(network, sol)
        dev = {a: zl[a] - Fraction(x.get(a, 0)) for a in network.arc_ids}
        return FpraOutput(sol, zl, dev, None)


def brute_force_ssuf_fpra(network, x, body=None, strict=True, **caps) -> FpraOutput:
    return BruteForceSsufFpra(body, strict, **caps)(network, x)


def greedy_path_strip_fpra(network, x) -> FpraOutput:
    return GreedyPathStripFpra()(network, x)


# ---------------------------------------------------------------------------
# ring rounding


class BruteForceRingFpra:
    """Exhaustive FPRA for ring loading.

    Commodities whose split is already 0 or 1 keep that path (these are the
    coordinates that pin down the minimal face). All choices for the others
    are enumerated; among those with ``load - xbar`` in the body, the one
    with the smallest scaled L-infinity deviation wins, ties going to the
    lexicographically smallest choice vector.
    """

    name = "brute"

    def __init__(self, strict: bool = True, cap: int = DEFAULT_RING_CAP):
        self.strict = strict
        self.cap = cap

    def __call__(self, ring: RingInstance, split: Sequence, body: BoxErrorBody) -> FpraOutput:
        split = tuple(Fraction(s) for s in split)
        free = [j for j, s in enumerate(split) if 0 < s < 1]
        if ring.k > self.cap:
            raise TooLarge(f"{ring.k} commodities exceed the enumeration cap of {self.cap}")
        xbar = ring_fractional_load(ring, split)
        base = [1 if s == 1 else 2 for s in split]
        best, best_any = None, None
        enumeration = []
        for combo in itertools.product((1, 2), repeat=len(free)):
            choice = list(base)
            for j, c in zip(free, combo):
                choice[j] = c
            load = ring_induced_load(ring, choice)
            dev = {e: load[e] - xbar[e] for e in range(ring.n)}
            score = _score(dev, body)
            if score is None:
                enumeration.append((tuple(choice), load))
                if not self.strict:
                    raw = _raw_score(dev, body)
                    if best_any is None or raw < best_any[0]:
                        best_any = (raw, tuple(choice))
                continue
            if best is None or score < best[0]:
                best = (score, tuple(choice))
        pick = best or (None if self.strict else best_any)
        if pick is None:
            raise NoSolutionInBody(
                "no unsplittable ring solution on the face lies in the error body",
                enumeration,
                {"split": split, "body": body},
            )
        choice = pick[1]
        load = ring_induced_load(ring, choice)
        dev = tuple(load[e] - xbar[e] for e in range(ring.n))
        return FpraOutput(choice, load, dev, body_contains(body, dict(enumerate(dev))))


def brute_force_ring_fpra(ring, split, body, strict=True, cap=DEFAULT_RING_CAP) -> FpraOutput:
    return BruteForceRingFpra(strict, cap)(ring, split, body)


SSUF_FPRAS = {"brute": BruteForceSsufFpra, "greedy": GreedyPathStripFpra}


def make_ssuf_fpra(name: str, **kwargs):
    try:
        cls = SSUF_FPRAS[name]
    except KeyError:
        raise ValueError(f"unknown FPRA {name!r}; choose from {sorted(SSUF_FPRAS)}") from None
    return cls(**kwargs) if cls is BruteForceSsufFpra else cls()
