"""Instance files and run reports as JSON with exact rationals.

Every number is written as a string ``"p/q"`` or ``"n"``; floats are
rejected on input. Instance documents::

    {"kind": "ssuf", "nodes": [...], "source": s,
     "arcs": [{"id": "a0", "tail": u, "head": v, "cost": "1"}, ...],
     "terminals": [{"node": t, "demand": "1/2"}, ...],
     "fractional": {"a0": "1/2", ...}}                    # optional

    {"kind": "ring", "nodes": [...],
     "edges": [{"cost": "1", "capacity": "3"}, ...],      # edge i: nodes[i]-nodes[i+1]
     "commodities": [{"source": u, "sink": v, "demand": "2"}, ...],
     "fractional": ["1/2", ...]}                           # share on the clockwise path
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .errors import ParseError
from .model import (
    Arc,
    BoxErrorBody,
    Commodity,
    RingEdge,
    RingInstance,
    Terminal,
    WeightedSsufNetwork,
    format_rational,
    parse_rational,
)


@dataclass(frozen=True)
class SsufDocument:
    network: WeightedSsufNetwork
    fractional: Optional[dict]


@dataclass(frozen=True)
class RingDocument:
    ring: RingInstance
    fractional: Optional[tuple]


def _q(value, where):
    try:
        return parse_rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def _node(value, where):
    if isinstance(value, (str, int)) and not isinstance(value, bool):
        return value
    raise ParseError(f"{where}: node ids must be strings or integers")


def parse_instance(doc: dict):
    """Build an :class:`SsufDocument` or :class:`RingDocument` from parsed JSON."""
    if not isinstance(doc, dict):
        raise ParseError("instance must be a JSON object")
    kind = doc.get("kind")
    try:
        if kind == "ssuf":
            return _parse_ssuf(doc)
        if kind == "ring":
            return _parse_ring(doc)
    except ParseError:
        raise
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed {kind} instance: missing or bad field {exc}") from None
    except ValueError as exc:
        raise ParseError(f"invalid {kind} instance: {exc}") from None
    raise ParseError(f"unknown instance kind {kind!r}")


def _parse_ssuf(doc):
    nodes = tuple(_node(v, "nodes") for v in doc["nodes"])
    arcs = tuple(
        Arc(str(a["id"]), _node(a["tail"], "arc tail"), _node(a["head"], "arc head"),
            _q(a.get("cost", "0"), f"arc {a['id']} cost"))
        for a in doc["arcs"]
    )
    terms = tuple(Terminal(_node(t["node"], "terminal"), _q(t["demand"], "terminal demand"))
                  for t in doc["terminals"])
    net = WeightedSsufNetwork(nodes, arcs, _node(doc["source"], "source"), terms)
    frac = None
    if doc.get("fractional") is not None:
        raw = doc["fractional"]
        if not isinstance(raw, dict):
            raise ParseError("ssuf fractional solution must map arc ids to values")
        frac = {str(k): _q(v, f"fractional[{k}]") for k, v in raw.items()}
        unknown = set(frac) - set(net.arc_ids)
        if unknown:
            raise ParseError(f"fractional solution names unknown arcs {sorted(unknown)}")
        for a in net.arc_ids:
            frac.setdefault(a, Fraction(0))
    return SsufDocument(net, frac)


def _parse_ring(doc):
    nodes = tuple(_node(v, "nodes") for v in doc["nodes"])
    edges = tuple(
        RingEdge(_q(e.get("cost", "0"), "edge cost"),
                 None if e.get("capacity") is None else _q(e["capacity"], "edge capacity"))
        for e in doc["edges"]
    )
    comms = tuple(
        Commodity(_node(c["source"], "commodity source"), _node(c["sink"], "commodity sink"),
                  _q(c["demand"], "commodity demand"))
        for c in doc["commodities"]
    )
    ring = RingInstance(nodes, edges, comms)
    frac = None
    if doc.get("fractional") is not None:
        frac = tuple(_q(v, "fractional") for v in doc["fractional"])
        if len(frac) != ring.k:
            raise ParseError("ring fractional solution needs one split per commodity")
        if any(not 0 <= s <= 1 for s in frac):
            raise ParseError("ring splits must lie in [0, 1]")
    return RingDocument(ring, frac)


def ssuf_to_doc(net: WeightedSsufNetwork, fractional: Optional[dict] = None) -> dict:
    doc = {
        "kind": "ssuf",
        "nodes": list(net.nodes),
        "source": net.source,
        "arcs": [{"id": a.id, "tail": a.tail, "head": a.head, "cost": format_rational(a.cost)} for a in net.arcs],
        "terminals": [{"node": t.node, "demand": format_rational(t.demand)} for t in net.terminals],
    }
    if fractional is not None:
        doc["fractional"] = {a: format_rational(fractional.get(a, 0)) for a in net.arc_ids}
    return doc


def ring_to_doc(ring: RingInstance, fractional=None) -> dict:
    doc = {
        "kind": "ring",
        "nodes": list(ring.nodes),
        "edges": [
            {"cost": format_rational(e.cost)}
            | ({} if e.capacity is None else {"capacity": format_rational(e.capacity)})
            for e in ring.edges
        ],
        "commodities": [
            {"source": c.source, "sink": c.sink, "demand": format_rational(c.demand)} for c in ring.commodities
        ],
    }
    if fractional is not None:
        doc["fractional"] = [format_rational(s) for s in fractional]
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def load_document(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return loads(text)


def loads(text: str) -> dict:
    try:
        return json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None


def _reject_float(s):
    raise ParseError(f"floating point literal {s!r}; write rationals as strings")


def load_instance(path):
    return parse_instance(load_document(path))


# ---------------------------------------------------------------------------
# reports


def qmap(d: dict) -> dict:
    return {str(k): format_rational(v) for k, v in d.items()}


def qlist(seq) -> list:
    return [format_rational(v) for v in seq]


def body_to_doc(body: BoxErrorBody) -> dict:
    return {"lower": qmap(body.lower), "upper": qmap(body.upper)}


def body_from_doc(doc: dict, keytype=str) -> BoxErrorBody:
    try:
        lower = {keytype(k): _q(v, "body lower") for k, v in doc["lower"].items()}
        upper = {keytype(k): _q(v, "body upper") for k, v in doc["upper"].items()}
        return BoxErrorBody(lower, upper)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed body: {exc}") from None
    except ValueError as exc:
        raise ParseError(f"invalid body: {exc}") from None


def _eps(e):
    return "unbounded" if e is None else format_rational(e)


def core_certificate_to_doc(cert) -> dict:
    return {
        "lambda": format_rational(cert.lam),
        "y_star": qmap(cert.y_star),
        "input_cost": format_rational(cert.input_cost),
        "restricted_cost": format_rational(cert.restricted_cost),
        "output_cost": format_rational(cert.output_cost),
        "deviation": qmap(cert.deviation),
        "body_R": body_to_doc(cert.body_R),
        "body_R_minus_lambda_R": body_to_doc(cert.body_R_minus_lambda_R),
        "epsilon": _eps(cert.epsilon),
        "y_bar": qmap(cert.y_bar),
        "y_hat": qmap(cert.y_hat),
        "checks": dict(cert.checks),
    }


def ssuf_report(net, x, solution, cert, fpra_name: str, verification=None) -> dict:
    doc = {
        "kind": "ssuf-report",
        "instance": ssuf_to_doc(net, x),
        "fpra": fpra_name,
        "paths": [list(p) for p in solution.paths],
        "certificate": core_certificate_to_doc(cert),
    }
    if verification is not None:
        doc["verification"] = verification.to_doc()
    return doc


def ring_report(ring, split, choice, cert, fpra_name: str, verification=None) -> dict:
    form = cert.form
    canonical = {
        "commodity_map": [[j, bool(s)] for j, s in form.commodity_map],
        "edge_map": list(form.edge_map),
        "xbar": qlist(form.xbar),
        "y_star": qlist(cert.y_star),
        "choice": list(cert.canonical_choice),
        "core": None if cert.core is None else core_certificate_to_doc(cert.core),
    }
    doc = {
        "kind": "ring-report",
        "instance": ring_to_doc(ring, split),
        "fpra": fpra_name,
        "choice": list(choice),
        "certificate": {
            "lambda": format_rational(cert.lam),
            "alpha": format_rational(cert.alpha),
            "d_max": format_rational(cert.d_max),
            "input_cost": format_rational(cert.input_cost),
            "output_cost": format_rational(cert.output_cost),
            "x_load": qlist(cert.x_load),
            "output_load": qlist(cert.output_load),
            "load_margin": qlist(cert.load_margin),
            "fixed": [[j, ch] for j, ch in form.fixed],
            "preprocessed_split": qlist(cert.preprocessed_split),
            "canonical": canonical,
            "two_sided_vs_xbar": None if cert.two_sided_total is None else {
                "bound": format_rational(cert.two_sided_total.bound),
                "upper_margin": qlist(cert.two_sided_total.upper_margin),
                "lower_margin": qlist(cert.two_sided_total.lower_margin),
            },
            "checks": dict(cert.checks),
        },
    }
    if verification is not None:
        doc["verification"] = verification.to_doc()
    return doc
