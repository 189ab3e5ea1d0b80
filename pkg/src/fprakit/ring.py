"""Cost-aware rounding for weighted ring loading.

Pipeline for a fractional solution ``x`` (given as splits):

1. commodities that ``x`` already routes on one path are fixed;
2. parallel pairs are uncrossed by shifting flow onto their disjoint paths,
   which fixes one commodity per shift and never raises an edge load;
3. the remaining commodities pairwise cross, and after relabelling and
   contracting demand-free vertices the cycle reads
   ``s_1, ..., s_k, t_1, ..., t_k`` clockwise;
4. on that canonical ring the cost-aware rounding runs with a symmetric body
   of radius ``alpha * d_max``;
5. fixed commodities are added back.

On the canonical ring opposite edges ``{s_i, s_i+1}`` and ``{t_i, t_i+1}``
always carry the total demand together, which turns a one-sided load
guarantee into a two-sided one.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import (
    CertificateViolation,
    NoSolutionInBody,
    NotCrossing,
    NotParallel,
    OneSidedViolated,
    TooLarge,
    ZeroDmax,
)
from .fpra import BruteForceRingFpra, FpraOutput, _raw_score, _score
from .meta import RingRelaxation, RoundingCertificate, certify
from .model import (
    BoxErrorBody,
    Commodity,
    RingEdge,
    RingInstance,
    body_contains,
    check_lambda,
    choice_as_split,
    ring_fractional_load,
    ring_induced_load,
)
from .solvers import ring_restricted_min_cost

DEFAULT_ALPHA = Fraction(13, 10)


# ---------------------------------------------------------------------------
# preprocessing


@dataclass(frozen=True)
class Preprocessed:
    """Splits after preprocessing plus the commodities fixed so far.

    ``split`` still covers every commodity; for a fixed commodity it equals 1
    or 0 matching its fixed path.
    """

    ring: RingInstance
    split: tuple
    fixed: tuple  # ((commodity, choice), ...) in fixing order
    log: tuple = ()

    @property
    def fixed_map(self) -> dict:
        return dict(self.fixed)

    @property
    def active(self) -> tuple:
        f = self.fixed_map
        return tuple(j for j in range(self.ring.k) if j not in f)

    def active_load(self) -> tuple:
        """Edge loads of the commodities that are still split."""
        load = [Fraction(0)] * self.ring.n
        for j in self.active:
            c = self.ring.commodities[j]
            first, second = self.ring.paths[j]
            s = self.split[j]
            for e in first:
                load[e] += s * c.demand
            for e in second:
                load[e] += (1 - s) * c.demand
        return tuple(load)

    def fixed_load(self) -> tuple:
        load = [Fraction(0)] * self.ring.n
        for j, ch in self.fixed:
            for e in self.ring.path(j, ch):
                load[e] += self.ring.commodities[j].demand
        return tuple(load)


def fix_unsplit_commodities(ring: RingInstance, split: Sequence, state: Optional[Preprocessed] = None) -> Preprocessed:
    """Move commodities with split 0 or 1 (or zero demand) to the fixed set."""
    split = tuple(Fraction(s) for s in split)
    if len(split) != ring.k or any(not 0 <= s <= 1 for s in split):
        raise ValueError("need one split in [0, 1] per commodity")
    fixed = list(state.fixed) if state else []
    log = list(state.log) if state else []
    done = {j for j, _ in fixed}
    split = list(split)
    for j, c in enumerate(ring.commodities):
        if j in done:
            continue
        if c.demand == 0 and 0 < split[j] < 1:
            split[j] = Fraction(1)
        if split[j] in (0, 1):
            ch = 1 if split[j] == 1 else 2
            fixed.append((j, ch))
            log.append(f"fix {j} on path {ch}")
    return Preprocessed(ring, tuple(split), tuple(fixed), tuple(log))


def parallel_labelling(ring: RingInstance, i: int, j: int):
    """Return ``(a, b)`` such that path ``a`` of ``i`` and path ``b`` of ``j``
    are edge-disjoint, or ``None`` if the commodities cross."""
    for a in (1, 2):
        for b in (1, 2):
            if not (ring.path(i, a) & ring.path(j, b)):
                return a, b
    return None


def eliminate_parallel_pair(state: Preprocessed, i: int, j: int) -> Preprocessed:
    """Uncross parallel commodities ``i`` and ``j``.

    With ``A`` (of ``i``) and ``B`` (of ``j``) disjoint, ``A`` lies inside the
    other path of ``j`` and vice versa. Moving ``m``, the smaller of the two
    amounts on the non-disjoint paths, onto ``A`` and ``B`` leaves loads on
    ``A`` and ``B`` unchanged and lowers the rest by ``2m``; the commodity
    attaining the minimum ends up unsplit and is fixed.
    """
    ring = state.ring
    lab = parallel_labelling(ring, i, j)
    if lab is None:
        raise NotParallel(f"commodities {i} and {j} cross")
    a, b = lab
    split = list(state.split)

    def on_other(idx, keep):
        share = split[idx] if keep == 2 else 1 - split[idx]
        return share * ring.commodities[idx].demand

    ai, aj = on_other(i, a), on_other(j, b)
    m = min(ai, aj)
    for idx, keep, amt in ((i, a, ai), (j, b, aj)):
        d = ring.commodities[idx].demand
        rest = (amt - m) / d if d else Fraction(0)
        split[idx] = 1 - rest if keep == 1 else rest
    log = state.log + (f"shift {m} for parallel pair ({i}, {j})",)
    moved = Preprocessed(ring, tuple(split), state.fixed, log)
    return fix_unsplit_commodities(ring, moved.split, moved)


def preprocess(ring: RingInstance, split: Sequence) -> Preprocessed:
    """Fix unsplit commodities and eliminate parallel pairs to a fixpoint.

    Pairs are scanned in lexicographic index order; after each elimination
    the scan restarts.
    """
    state = fix_unsplit_commodities(ring, split)
    while True:
        active = state.active
        for i, j in itertools.combinations(active, 2):
            if parallel_labelling(ring, i, j) is not None:
                state = eliminate_parallel_pair(state, i, j)
                break
        else:
            return state


# ---------------------------------------------------------------------------
# canonical form


@dataclass(frozen=True)
class CanonicalRingForm:
    """Crossing instance on ``2k`` vertices ``s_1..s_k, t_1..t_k`` clockwise.

    Canonical edge ``i`` joins canonical vertices ``i`` and ``i+1``.
    ``commodity_map[c] = (original index, swapped)`` where ``swapped`` means
    the original source is the canonical sink. ``edge_map[e]`` is the
    canonical edge containing original edge ``e``.
    """

    original: RingInstance
    ring: Optional[RingInstance]  # None when nothing is left to round
    commodity_map: tuple
    edge_map: tuple
    segments: tuple
    fixed: tuple
    xbar: tuple  # canonical splits

    @property
    def k(self) -> int:
        return len(self.commodity_map)

    @property
    def d_max(self) -> Fraction:
        return self.original.d_max

    def to_original_choice(self, canonical_choice: Sequence) -> tuple:
        """Full original choice vector: canonical choices plus fixed paths."""
        out = [None] * self.original.k
        for j, ch in self.fixed:
            out[j] = ch
        for (j, swapped), ch in zip(self.commodity_map, canonical_choice):
            out[j] = 3 - ch if swapped else ch
        return tuple(out)

    def to_original_split(self, canonical_split: Sequence) -> tuple:
        out = [None] * self.original.k
        for j, ch in self.fixed:
            out[j] = Fraction(1) if ch == 1 else Fraction(0)
        for (j, swapped), s in zip(self.commodity_map, canonical_split):
            out[j] = 1 - Fraction(s) if swapped else Fraction(s)
        return tuple(out)

    def expand_load(self, canonical_load: Sequence) -> tuple:
        """Load on original edges induced by a canonical load vector."""
        return tuple(canonical_load[c] for c in self.edge_map)


def _interleaved(p, q, r, s, n):
    """Chord (p, q) crosses chord (r, s) on an n-cycle (all distinct)."""
    def between(a, b, v):
        return 0 < (v - a) % n < (b - a) % n
    return between(p, q, r) != between(p, q, s)


def canonicalize_crossing(state: Preprocessed) -> CanonicalRingForm:
    """Relabel and contract a preprocessed instance into canonical form."""
    ring = state.ring
    active = state.active
    pos = ring.position
    ends = {}
    for j in active:
        c = ring.commodities[j]
        for v in (c.source, c.sink):
            if pos[v] in ends:
                raise NotCrossing(f"commodities {ends[pos[v]]} and {j} share an endpoint, so they are parallel")
            ends[pos[v]] = j
    for i, j in itertools.combinations(active, 2):
        ci, cj = ring.commodities[i], ring.commodities[j]
        if not _interleaved(pos[ci.source], pos[ci.sink], pos[cj.source], pos[cj.sink], ring.n):
            raise NotCrossing(f"commodities {i} and {j} are parallel")

    if not active:
        return CanonicalRingForm(ring, None, (), (0,) * ring.n, (), state.fixed, ())

    k = len(active)
    order = sorted(ends)  # clockwise from the first endpoint
    first_half = [ends[p] for p in order[:k]]
    if len(set(first_half)) != k:
        raise NotCrossing("endpoint order is not s_1..s_k, t_1..t_k")
    commodity_map = []
    xbar = []
    comms = []
    for i, j in enumerate(first_half):
        c = ring.commodities[j]
        src_pos, snk_pos = order[i], order[k + i]
        if ends[snk_pos] != j:
            raise NotCrossing("partner endpoints are not k positions apart")
        swapped = pos[c.source] != src_pos
        commodity_map.append((j, swapped))
        xbar.append(1 - state.split[j] if swapped else state.split[j])
        comms.append(Commodity(ring.nodes[src_pos], ring.nodes[snk_pos], c.demand))

    segments = []
    edge_map = [None] * ring.n
    edges = []
    for i in range(2 * k):
        a, b = order[i], order[(i + 1) % (2 * k)]
        seg = []
        e = a
        while True:
            seg.append(e)
            edge_map[e] = i
            e = (e + 1) % ring.n
            if e == b:
                break
        segments.append(tuple(seg))
        caps = [ring.edges[e].capacity for e in seg]
        cap = None if any(c is None for c in caps) else min(caps)
        edges.append(RingEdge(sum((ring.edges[e].cost for e in seg), Fraction(0)), cap))
    canon = RingInstance(tuple(ring.nodes[p] for p in order), tuple(edges), tuple(comms))
    return CanonicalRingForm(ring, canon, tuple(commodity_map), tuple(edge_map), tuple(segments),
                             state.fixed, tuple(xbar))


def opposing_pairs(k: int) -> list:
    """Canonical edge pairs ``({s_i, s_i+1}, {t_i, t_i+1})`` for ``i = 1..k``."""
    return [(i, k + i) for i in range(k)]


def check_opposing_edges(form: CanonicalRingForm, load: Sequence) -> bool:
    """Opposite canonical edges sum to the total demand, exactly."""
    if form.ring is None:
        return True
    total = form.ring.total_demand
    return all(Fraction(load[a]) + Fraction(load[b]) == total for a, b in opposing_pairs(form.k))


@dataclass(frozen=True)
class TwoSidedReport:
    bound: Fraction  # alpha * d_max
    upper_margin: tuple  # xbar + bound - load
    lower_margin: tuple  # load - (xbar - bound), derived through opposite edges
    certified: bool


def two_sided_bound(form: CanonicalRingForm, xbar_split: Sequence, choice: Sequence, alpha) -> TwoSidedReport:
    """Lower load bound from the upper one via the opposing-edges identity.

    For opposite edges ``e, f``: ``load_e = D - load_f`` and
    ``xbar_e = D - xbar_f``, hence ``load_e - xbar_e = xbar_f - load_f
    >= -alpha * d_max`` whenever ``load_f <= xbar_f + alpha * d_max``.
    """
    bound = Fraction(alpha) * form.d_max
    if form.ring is None:
        return TwoSidedReport(bound, (), (), True)
    xbar = ring_fractional_load(form.ring, xbar_split)
    load = ring_induced_load(form.ring, choice)
    upper = tuple(xbar[e] + bound - load[e] for e in range(form.ring.n))
    bad = [e for e, m in enumerate(upper) if m < 0]
    if bad:
        raise OneSidedViolated(f"edges {bad} exceed xbar + {bound}")
    if not (check_opposing_edges(form, load) and check_opposing_edges(form, xbar)):
        return TwoSidedReport(bound, upper, (), False)
    partner = {}
    for a, b in opposing_pairs(form.k):
        partner[a], partner[b] = b, a
    # margin on e equals the upper margin of its opposite edge
    lower = tuple(upper[partner[e]] for e in range(form.ring.n))
    direct = tuple(load[e] - xbar[e] + bound for e in range(form.ring.n))
    certified = lower == direct and all(m >= 0 for m in lower)
    return TwoSidedReport(bound, upper, lower, certified)


# ---------------------------------------------------------------------------
# non-uniform capacities to uniform


@dataclass(frozen=True)
class UniformReduction:
    original: RingInstance
    uniform: RingInstance
    u_unif: Fraction
    d_max: Fraction
    images: tuple  # original edge -> tuple of uniform edge indices
    r: dict  # original edge -> r_e for subdivided edges
    artificial: tuple  # (original edge, side 1|2) for each artificial commodity

    @property
    def k_original(self) -> int:
        return self.original.k


def nonuniform_to_uniform(ring: RingInstance) -> UniformReduction:
    """Equalize capacities by subdividing each under-capacity edge ``e`` and
    adding ``2 r_e`` artificial commodities of demand ``(u_unif - u(e)) / r_e``,
    half spanning each half of ``e``, where ``r_e = ceil((u_unif - u(e)) / d_max)``."""
    caps = [e.capacity for e in ring.edges]
    if any(c is None for c in caps):
        raise ValueError("every edge needs a capacity")
    u_unif = max(caps)
    d_max = ring.d_max
    nodes, edges, images, r = [], [], [], {}
    art_specs = []
    for i, (v, e) in enumerate(zip(ring.nodes, ring.edges)):
        nodes.append(v)
        if e.capacity == u_unif:
            images.append((len(edges),))
            edges.append(RingEdge(e.cost, u_unif))
            continue
        if d_max == 0:
            raise ZeroDmax("subdivision needs a positive maximum demand")
        gap = u_unif - e.capacity
        re = math.ceil(gap / d_max)
        r[i] = re
        w = ("sub", i)
        nodes.append(w)
        images.append((len(edges), len(edges) + 1))
        edges.append(RingEdge(e.cost, u_unif))
        edges.append(RingEdge(Fraction(0), u_unif))
        nxt = ring.nodes[(i + 1) % ring.n]
        art_specs.append((i, re, gap / re, v, w, nxt))
    comms = list(ring.commodities)
    artificial = []
    for i, re, dem, v, w, nxt in art_specs:
        for _ in range(re):
            comms.append(Commodity(v, w, dem))
            artificial.append((i, 1))
        for _ in range(re):
            comms.append(Commodity(w, nxt, dem))
            artificial.append((i, 2))
    uniform = RingInstance(tuple(nodes), tuple(edges), tuple(comms))
    return UniformReduction(ring, uniform, u_unif, d_max, tuple(images), r, tuple(artificial))


def violation(load: Sequence, caps: Sequence) -> tuple:
    return tuple(max(Fraction(0), Fraction(l) - Fraction(c)) for l, c in zip(load, caps))


def embed_solution(red: UniformReduction, choice: Sequence) -> tuple:
    """Extend an original solution by routing every artificial commodity on its own edge."""
    return tuple(choice) + (1,) * len(red.artificial)


@dataclass(frozen=True)
class StripReport:
    original_violation: tuple
    uniform_violation: tuple  # per original edge: max over its images
    artificial_load: tuple  # per original edge: (load of A(e) on e1, on e2) or ()
    ok: bool


def strip_artificials(red: UniformReduction, uniform_choice: Sequence):
    """Drop artificial commodities and account for the violation edge by edge.

    For a subdivided edge one of its halves carries at least
    ``u_unif - u(e)`` from its own artificial commodities, so the original
    violation never exceeds the uniform violation on that edge's halves.
    """
    k = red.k_original
    choice = tuple(uniform_choice[:k])
    uload = ring_induced_load(red.uniform, uniform_choice)
    uviol = violation(uload, [red.u_unif] * red.uniform.n)
    oload = ring_induced_load(red.original, choice)
    oviol = violation(oload, [e.capacity for e in red.original.edges])
    art = {}
    for idx, (e, _side) in enumerate(red.artificial):
        j = k + idx
        img = red.images[e]
        on = art.setdefault(e, [Fraction(0), Fraction(0)])
        path = red.uniform.path(j, uniform_choice[j])
        for h in (0, 1):
            if img[h] in path:
                on[h] += red.uniform.commodities[j].demand
    per_edge_u = tuple(max(uviol[i] for i in img) for img in red.images)
    art_load = tuple(tuple(art[e]) if e in art else () for e in range(red.original.n))
    ok = all(o <= u for o, u in zip(oviol, per_edge_u))
    return choice, StripReport(oviol, per_edge_u, art_load, ok)


class UniformReductionRingFpra:
    """Ring FPRA that searches the uniform formulation.

    Capacities are set to the input loads, the instance is made uniform,
    every artificial commodity and every split commodity is enumerated, and
    the solution with the smallest uniform violation is stripped back. The
    result is then measured against the two-sided body.
    """

    name = "brute-uniform"

    def __init__(self, strict: bool = True, cap: int = 16):
        self.strict = strict
        self.cap = cap

    def __call__(self, ring: RingInstance, split: Sequence, body: BoxErrorBody) -> FpraOutput:
        split = tuple(Fraction(s) for s in split)
        xbar = ring_fractional_load(ring, split)
        capped = RingInstance(ring.nodes, tuple(RingEdge(e.cost, xbar[i]) for i, e in enumerate(ring.edges)),
                              ring.commodities)
        red = nonuniform_to_uniform(capped)
        free = [j for j, s in enumerate(split) if 0 < s < 1]
        nart = len(red.artificial)
        if len(free) + nart > self.cap:
            raise TooLarge(f"{len(free) + nart} binary choices exceed the cap of {self.cap}")
        base = [1 if s == 1 else 2 for s in split]
        best = None
        for combo in itertools.product((1, 2), repeat=len(free) + nart):
            choice = list(base)
            for j, c in zip(free, combo):
                choice[j] = c
            uchoice = tuple(choice) + combo[len(free):]
            worst = max(violation(ring_induced_load(red.uniform, uchoice), [red.u_unif] * red.uniform.n))
            if best is None or worst < best[0]:
                best = (worst, uchoice)
        choice, _ = strip_artificials(red, best[1])
        load = ring_induced_load(ring, choice)
        dev = tuple(load[e] - xbar[e] for e in range(ring.n))
        inside = body_contains(body, dict(enumerate(dev)))
        if self.strict and not inside:
            raise NoSolutionInBody("uniform search found no solution inside the body", [(choice, load)],
                                   {"split": split})
        return FpraOutput(choice, load, dev, inside)


RING_FPRAS = {"brute": BruteForceRingFpra, "brute-uniform": UniformReductionRingFpra}


# ---------------------------------------------------------------------------
# full pipeline


@dataclass(frozen=True)
class RingCertificate:
    lam: Fraction
    alpha: Fraction
    d_max: Fraction
    input_cost: Fraction
    output_cost: Fraction
    x_load: tuple
    output_load: tuple
    load_margin: tuple  # x + (1+lam)*alpha*d_max - load, per original edge
    form: CanonicalRingForm
    preprocessed_split: tuple
    core: Optional[RoundingCertificate]
    y_star: tuple  # canonical splits
    canonical_choice: tuple
    two_sided_fpra: Optional[TwoSidedReport]
    two_sided_total: Optional[TwoSidedReport]
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list:
        return [k for k, v in self.checks.items() if not v]


def ring_round_with_cost(ring: RingInstance, split: Sequence, fpra=None, alpha=DEFAULT_ALPHA, lam=1,
                         strict: bool = True):
    """Round the fractional ring solution ``split`` with cost guarantee.

    Returns the original choice vector and a :class:`RingCertificate` showing
    ``lam * cost(P) <= c.x`` and ``load_e(P) <= x_e + (1 + lam) * alpha * d_max``.
    ``fpra`` is called as ``fpra(canonical_ring, y_star_split, body)``.
    """
    lam = check_lambda(lam)
    alpha = Fraction(alpha)
    if any(e.cost < 0 for e in ring.edges):
        raise ValueError("ring costs must be nonnegative")
    if fpra is None:
        fpra = BruteForceRingFpra()
    split = tuple(Fraction(s) for s in split)
    x_load = ring_fractional_load(ring, split)
    state = preprocess(ring, split)
    form = canonicalize_crossing(state)
    d_max = ring.d_max
    radius = alpha * d_max

    checks = {}
    core = None
    two_fpra = two_total = None
    y_star = canonical_choice = ()
    if form.ring is not None:
        cring = form.ring
        body = BoxErrorBody.symmetric(range(cring.n), radius)
        lp = ring_restricted_min_cost(cring, form.xbar, radius, lam)
        y_star = lp.point
        out = fpra(cring, y_star, body)
        canonical_choice = tuple(out.solution)
        core = certify(RingRelaxation(cring), dict(enumerate(form.xbar)), dict(enumerate(y_star)),
                       dict(enumerate(choice_as_split(canonical_choice))), body, lam)
        checks.update({f"canonical:{k}": v for k, v in core.checks.items()})
        xbar_load = ring_fractional_load(cring, form.xbar)
        checks["opposing_edges_xbar"] = check_opposing_edges(form, xbar_load)
        checks["opposing_edges_y_star"] = check_opposing_edges(form, ring_fractional_load(cring, y_star))
        checks["opposing_edges_output"] = check_opposing_edges(form, ring_induced_load(cring, canonical_choice))
        try:
            two_fpra = two_sided_bound(form, y_star, canonical_choice, alpha)
            checks["two_sided_fpra"] = two_fpra.certified
        except OneSidedViolated:
            checks["two_sided_fpra"] = False
        try:
            two_total = two_sided_bound(form, form.xbar, canonical_choice, (1 + lam) * alpha)
            checks["two_sided_vs_xbar"] = two_total.certified
        except OneSidedViolated:
            checks["two_sided_vs_xbar"] = False
        contracted = form.expand_load(xbar_load)
    else:
        contracted = (Fraction(0),) * ring.n

    fixed_load = state.fixed_load()
    checks["preprocessing_dominated"] = all(
        contracted[e] + fixed_load[e] <= x_load[e] for e in range(ring.n)
    )
    checks["preprocessing_cost"] = ring.cost_of([contracted[e] + fixed_load[e] for e in range(ring.n)]) <= ring.cost_of(x_load)

    choice = form.to_original_choice(canonical_choice)
    load = ring_induced_load(ring, choice)
    cx, cz = ring.cost_of(x_load), ring.cost_of(load)
    slack = (1 + lam) * alpha * d_max
    margin = tuple(x_load[e] + slack - load[e] for e in range(ring.n))
    checks["cost_bound"] = lam * cz <= cx
    checks["load_bound"] = all(m >= 0 for m in margin)
    cert = RingCertificate(
        lam=lam, alpha=alpha, d_max=d_max, input_cost=cx, output_cost=cz, x_load=x_load,
        output_load=load, load_margin=margin, form=form, preprocessed_split=state.split, core=core,
        y_star=tuple(y_star), canonical_choice=canonical_choice, two_sided_fpra=two_fpra,
        two_sided_total=two_total, checks=checks,
    )
    if strict and not cert.ok:
        raise CertificateViolation(f"ring certificate checks failed: {cert.failed()}", cert)
    return choice, cert
