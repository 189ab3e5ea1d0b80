"""Standalone re-verification of run reports.

Nothing here calls a solver or an FPRA. Every quantity is recomputed from
the primary data in the report (instance, fractional input, chosen paths,
recorded ``y*``) and the certificate's numbers are treated as claims that
must match the recomputation exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import IndexMismatch, InvalidPath, ParseError
from .io import body_from_doc, parse_instance, _q
from .model import (
    BoxErrorBody,
    Commodity,
    RingEdge,
    RingInstance,
    check_membership_Q,
    induced_load,
    UnsplittablePathFlow,
    ring_fractional_load,
    ring_induced_load,
)


@dataclass(frozen=True)
class Check:
    name: str
    claimed: object
    computed: object
    passed: bool


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    def add(self, name, passed, claimed=None, computed=None):
        self.checks.append(Check(name, claimed, computed, bool(passed)))
        return bool(passed)

    def claim(self, name, claimed, computed):
        return self.add(name, claimed == computed, claimed, computed)

    @property
    def verdict(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def failed(self) -> list:
        return [c.name for c in self.checks if not c.passed]

    def to_doc(self) -> dict:
        return {
            "verdict": "pass" if self.verdict else "fail",
            "checks": [{"name": c.name, "claimed": _show(c.claimed), "computed": _show(c.computed),
                        "passed": c.passed} for c in self.checks],
        }


def _show(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _show(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_show(x) for x in v]
    return v


def _lam(value) -> Fraction:
    lam = _q(value, "lambda")
    if not 0 < lam <= 1:
        raise ParseError(f"lambda {lam} outside (0, 1]")
    return lam


def _vec(doc, keys, where, keytype=str) -> dict:
    if not isinstance(doc, dict):
        raise ParseError(f"{where} must be an object")
    out = {keytype(k): _q(v, where) for k, v in doc.items()}
    if set(out) != set(keys):
        raise IndexMismatch(f"{where} is indexed differently from the instance")
    return out


def _epsilon(coords, y, z, lo, hi):
    """Largest step keeping ``y + eps (y - z)`` within [lo, hi]; None if unbounded;
    raises ValueError when a tight bound would be left."""
    eps = None
    for k in coords:
        step = y[k] - z[k]
        if step < 0:
            room = y[k] - lo
        elif step > 0 and hi is not None:
            room = hi - y[k]
        else:
            continue
        if room == 0:
            raise ValueError(k)
        cand = room / abs(step)
        eps = cand if eps is None else min(eps, cand)
    return eps


def _inside(vec, lower, upper, scale=Fraction(1)):
    return all(scale * lower[k] <= vec[k] <= scale * upper[k] for k in lower)


def _check_proof(rep, prefix, coords, x, y, z, lo, hi, to_body, cost, in_q, body, lam, claims):
    """Recompute eps, ybar, yhat and the chain of inequalities."""
    try:
        eps = _epsilon(coords, y, z, lo, hi)
        face = True
    except ValueError:
        eps, face = None, False
    rep.add(prefix + "face_preserving", face)
    if not face:
        return
    e = Fraction(1) if eps is None else eps
    ybar = {k: (1 + e) * y[k] - e * z[k] for k in coords}
    yhat = {k: e / (lam + e) * x[k] + lam / (lam + e) * ybar[k] for k in coords}
    claimed_eps = claims.get("epsilon")
    rep.claim(prefix + "epsilon", claimed_eps, "unbounded" if eps is None else str(eps))
    rep.claim(prefix + "y_bar", claims.get("y_bar"), {str(k): str(v) for k, v in ybar.items()})
    rep.claim(prefix + "y_hat", claims.get("y_hat"), {str(k): str(v) for k, v in yhat.items()})
    xb, barb, hatb = to_body(x), to_body(ybar), to_body(yhat)
    rep.add(prefix + "ybar_in_Q", in_q(ybar))
    rep.add(prefix + "ybar_in_x_minus_lam_plus_eps_R",
            _inside({k: xb[k] - barb[k] for k in body.lower}, body.lower, body.upper, lam + e))
    rep.add(prefix + "yhat_in_Q_and_x_minus_lam_R",
            in_q(yhat) and _inside({k: xb[k] - hatb[k] for k in body.lower}, body.lower, body.upper, lam))
    rep.add(prefix + "restricted_cost_le_yhat_cost", cost(y) <= cost(yhat))


def verify_ssuf_run(network, x, solution, certificate: dict) -> VerificationReport:
    """Re-check one single-source run from its primary data."""
    rep = VerificationReport()
    ids = network.arc_ids
    lam = _lam(certificate.get("lambda"))
    x = _vec(x, ids, "x")
    try:
        y = _vec(certificate["y_star"], ids, "y_star")
        body = body_from_doc(certificate["body_R"])
    except KeyError as exc:
        raise ParseError(f"certificate lacks {exc}") from None
    if set(body.lower) != set(ids):
        raise IndexMismatch("error body is indexed differently from the instance")

    rep.add("costs_nonnegative_or_lambda_one", lam == 1 or all(a.cost >= 0 for a in network.arcs))
    rep.add("x_in_Q", check_membership_Q(network, x))
    rep.add("y_star_in_Q", check_membership_Q(network, y))
    try:
        z = induced_load(network, UnsplittablePathFlow(solution))
        rep.add("paths_valid", True)
    except InvalidPath as exc:
        rep.add("paths_valid", False, None, str(exc))
        return rep
    rep.add("z_in_Q", check_membership_Q(network, z))

    cost = network.cost_of
    cx, cy, cz = cost(x), cost(y), cost(z)
    rep.claim("input_cost", certificate.get("input_cost"), str(cx))
    rep.claim("restricted_cost", certificate.get("restricted_cost"), str(cy))
    rep.claim("output_cost", certificate.get("output_cost"), str(cz))
    rep.add("restricted_cost_le_input_cost", cy <= cx, None, (str(cy), str(cx)))
    rep.add("cost_bound", lam * cz <= cx, str(cx / lam), str(cz))

    diff_lower = {a: body.lower[a] - lam * body.upper[a] for a in ids}
    diff_upper = {a: body.upper[a] - lam * body.lower[a] for a in ids}
    rep.claim("body_R_minus_lambda_R", certificate.get("body_R_minus_lambda_R"),
              {"lower": {a: str(v) for a, v in diff_lower.items()},
               "upper": {a: str(v) for a, v in diff_upper.items()}})
    dev = {a: z[a] - x[a] for a in ids}
    rep.claim("deviation", certificate.get("deviation"), {a: str(v) for a, v in dev.items()})
    rep.add("deviation_in_R_minus_lam_R", _inside(dev, diff_lower, diff_upper))
    rep.add("y_star_in_x_minus_lam_R", _inside({a: x[a] - y[a] for a in ids}, body.lower, body.upper, lam))
    rep.add("fpra_error_in_R", _inside({a: z[a] - y[a] for a in ids}, body.lower, body.upper))
    rep.add("support_z_within_support_y_star", all(y[a] > 0 for a in ids if z[a] > 0))

    _check_proof(rep, "", ids, x, y, z, Fraction(0), None, lambda p: p, cost,
                 lambda p: bool(check_membership_Q(network, p)), body, lam, certificate)
    claimed = certificate.get("checks", {})
    rep.add("claimed_checks_all_true", isinstance(claimed, dict) and all(v is True for v in claimed.values()))
    return rep


def _canonical_ring(ring, commodity_map, edge_map):
    """Rebuild the canonical ring from the claimed maps, validating them."""
    n = ring.n
    k = len(commodity_map)
    if len(edge_map) != n or any(not isinstance(c, int) or not 0 <= c < 2 * k for c in edge_map):
        raise ParseError("edge map does not cover the ring")
    # segments must be clockwise runs in canonical order
    start = next((e for e in range(n) if edge_map[e] == 0 and edge_map[e - 1] != 0), None)
    if start is None:
        raise ParseError("edge map has no first segment")
    order = [(start + i) % n for i in range(n)]
    seq = [edge_map[e] for e in order]
    expect = 0
    starts = [order[0]]
    for pos, c in zip(order[1:], seq[1:]):
        if c == expect:
            continue
        if c != expect + 1:
            raise ParseError("edge map segments are not consecutive")
        expect = c
        starts.append(pos)
    if expect != 2 * k - 1:
        raise ParseError("edge map does not use every canonical edge")
    nodes = tuple(ring.nodes[p] for p in starts)
    edges = []
    for c in range(2 * k):
        seg = [e for e in range(n) if edge_map[e] == c]
        caps = [ring.edges[e].capacity for e in seg]
        edges.append(RingEdge(sum((ring.edges[e].cost for e in seg), Fraction(0)),
                              None if any(v is None for v in caps) else min(caps)))
    comms = []
    for c, (j, swapped) in enumerate(commodity_map):
        orig = ring.commodities[j]
        s, t = nodes[c], nodes[k + c]
        if (s, t) != ((orig.sink, orig.source) if swapped else (orig.source, orig.sink)):
            raise ParseError(f"canonical commodity {c} does not match original commodity {j}")
        comms.append(Commodity(s, t, orig.demand))
    return RingInstance(nodes, tuple(edges), tuple(comms))


def verify_ring_run(ring, split, choice, certificate: dict) -> VerificationReport:
    """Re-check one ring run, including the canonical-form bookkeeping."""
    rep = VerificationReport()
    lam = _lam(certificate.get("lambda"))
    alpha = _q(certificate.get("alpha"), "alpha")
    if alpha < 0:
        raise ParseError("alpha must be nonnegative")
    split = tuple(_q(s, "split") for s in split)
    if len(split) != ring.k or len(choice) != ring.k:
        raise IndexMismatch("solution length differs from the number of commodities")
    d_max = ring.d_max
    rep.claim("d_max", certificate.get("d_max"), str(d_max))
    rep.add("costs_nonnegative", all(e.cost >= 0 for e in ring.edges))
    try:
        load = ring_induced_load(ring, choice)
        rep.add("choice_valid", True)
    except InvalidPath as exc:
        rep.add("choice_valid", False, None, str(exc))
        return rep
    xl = ring_fractional_load(ring, split)
    cx, cz = ring.cost_of(xl), ring.cost_of(load)
    slack = (1 + lam) * alpha * d_max
    rep.claim("x_load", certificate.get("x_load"), [str(v) for v in xl])
    rep.claim("output_load", certificate.get("output_load"), [str(v) for v in load])
    rep.claim("input_cost", certificate.get("input_cost"), str(cx))
    rep.claim("output_cost", certificate.get("output_cost"), str(cz))
    margin = [xl[e] + slack - load[e] for e in range(ring.n)]
    rep.claim("load_margin", certificate.get("load_margin"), [str(m) for m in margin])
    rep.add("cost_bound", lam * cz <= cx, str(cx / lam), str(cz))
    rep.add("load_bound", all(m >= 0 for m in margin))

    pre = tuple(_q(s, "preprocessed_split") for s in certificate.get("preprocessed_split", ()))
    if len(pre) != ring.k or any(not 0 <= s <= 1 for s in pre):
        raise ParseError("preprocessed split malformed")
    pre_load = ring_fractional_load(ring, pre)
    rep.add("preprocessing_dominated", all(p <= v for p, v in zip(pre_load, xl)))
    rep.add("preprocessing_cost", ring.cost_of(pre_load) <= cx)
    fixed = {int(j): int(ch) for j, ch in certificate.get("fixed", ())}
    rep.add("fixed_paths_kept", all(choice[j] == ch and pre[j] == (1 if ch == 1 else 0)
                                    for j, ch in fixed.items()))

    canon = certificate.get("canonical") or {}
    cmap = [(int(j), bool(s)) for j, s in canon.get("commodity_map", ())]
    active = sorted(j for j, _ in cmap)
    rep.add("commodities_partitioned", active == sorted(set(range(ring.k)) - set(fixed)))
    if not cmap:
        return rep
    cring = _canonical_ring(ring, cmap, list(canon.get("edge_map", ())))
    k = len(cmap)
    xbar = tuple(_q(v, "xbar") for v in canon.get("xbar", ()))
    ystar = tuple(_q(v, "y_star") for v in canon.get("y_star", ()))
    cchoice = tuple(canon.get("choice", ()))
    if not (len(xbar) == len(ystar) == len(cchoice) == k):
        raise IndexMismatch("canonical vectors have the wrong length")
    rep.add("xbar_matches_preprocessed", all(
        xbar[c] == (1 - pre[j] if sw else pre[j]) for c, (j, sw) in enumerate(cmap)))
    rep.add("choice_matches_canonical", all(
        choice[j] == (3 - cchoice[c] if sw else cchoice[c]) for c, (j, sw) in enumerate(cmap)))
    rep.add("y_star_in_box", all(0 <= v <= 1 for v in ystar))
    if not all(0 <= v <= 1 for v in xbar + ystar):
        return rep  # loads of points outside the box mean nothing
    try:
        zl = ring_induced_load(cring, cchoice)
    except InvalidPath:
        rep.add("canonical_choice_valid", False)
        return rep
    xbl, yl = ring_fractional_load(cring, xbar), ring_fractional_load(cring, ystar)
    total = cring.total_demand
    for name, vec in (("xbar", xbl), ("y_star", yl), ("output", zl)):
        rep.add(f"opposing_edges_{name}", all(vec[i] + vec[k + i] == total for i in range(k)))

    radius = alpha * d_max
    body = BoxErrorBody.symmetric(range(cring.n), radius)
    core = canon.get("core") or {}
    rep.claim("canonical:lambda", core.get("lambda"), str(lam))
    for name, val in (("input_cost", cring.cost_of(xbl)), ("restricted_cost", cring.cost_of(yl)),
                      ("output_cost", cring.cost_of(zl))):
        rep.claim(f"canonical:{name}", core.get(name), str(val))
    rep.add("canonical:y_star_in_x_minus_lam_R", all(abs(xbl[e] - yl[e]) <= lam * radius for e in range(cring.n)))
    rep.add("canonical:fpra_error_in_R", all(abs(zl[e] - yl[e]) <= radius for e in range(cring.n)))
    rep.add("canonical:cost_bound", lam * cring.cost_of(zl) <= cring.cost_of(xbl))
    two = certificate.get("two_sided_vs_xbar") or {}
    lower = [zl[e] - xbl[e] + slack for e in range(cring.n)]
    rep.claim("two_sided_lower_margin", two.get("lower_margin"), [str(v) for v in lower])
    rep.add("two_sided_vs_xbar", all(v >= 0 for v in lower))

    coords = tuple(range(k))
    xs = dict(enumerate(xbar))
    ys = dict(enumerate(ystar))
    zs = {c: Fraction(1) if cchoice[c] == 1 else Fraction(0) for c in coords}
    to_body = lambda p: dict(enumerate(ring_fractional_load(cring, [p[c] for c in coords])))
    _check_proof(rep, "canonical:", coords, xs, ys, zs, Fraction(0), Fraction(1), to_body,
                 lambda p: cring.cost_of(to_body(p).values()),
                 lambda p: all(0 <= p[c] <= 1 for c in coords), body, lam, core)
    claimed = certificate.get("checks", {})
    rep.add("claimed_checks_all_true", isinstance(claimed, dict) and all(v is True for v in claimed.values()))
    return rep


def verify_report(doc: dict) -> VerificationReport:
    """Dispatch on the report kind and verify it."""
    if not isinstance(doc, dict):
        raise ParseError("report must be a JSON object")
    kind = doc.get("kind")
    try:
        if kind == "ssuf-report":
            inst = parse_instance(doc["instance"])
            if inst.fractional is None:
                raise ParseError("report instance lacks the fractional input")
            paths = [tuple(p) for p in doc["paths"]]
            return verify_ssuf_run(inst.network, {a: str(v) for a, v in inst.fractional.items()}, paths,
                                   doc["certificate"])
        if kind == "ring-report":
            inst = parse_instance(doc["instance"])
            if inst.fractional is None:
                raise ParseError("report instance lacks the fractional input")
            return verify_ring_run(inst.ring, inst.fractional, tuple(doc["choice"]), doc["certificate"])
    except KeyError as exc:
        raise ParseError(f"report lacks field {exc}") from None
    except (TypeError, AttributeError) as exc:
        raise ParseError(f"malformed report: {exc}") from None
    raise ParseError(f"unknown report kind {kind!r}")
