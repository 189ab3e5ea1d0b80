"""Cost-aware rounding from a cost-oblivious FPRA.

``round_with_cost`` first finds the cheapest point ``y*`` of the relaxation
within ``lam * R`` of the input (``y* in x - lam*R``), then rounds ``y*``
with the FPRA. The certificate rebuilds the points used to argue the cost
bound: ``ybar = y* + eps*(y* - z)`` (still in the relaxation because ``z``
sits on the face of ``y*``) and ``yhat``, the convex combination of ``x`` and
``ybar`` that lands back in ``x - lam*R``; optimality of ``y*`` against
``yhat`` then gives ``c.z <= c.x / lam``.

The argument is written once against a small :class:`Relaxation` interface
and instantiated for flows (:class:`SsufRelaxation`) and ring splits
(:class:`RingRelaxation`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .errors import CertificateViolation, CyclicSupport, FaceViolation, Infeasible
from .model import (
    BoxErrorBody,
    RingInstance,
    UnsplittablePathFlow,
    WeightedSsufNetwork,
    body_contains,
    check_lambda,
    check_membership_Q,
    find_cycle,
    minkowski_diff_body,
    ring_fractional_load,
    support,
    support_subnetwork,
)
from .solvers import restricted_min_cost_ssuf


class Relaxation:
    """Polyhedron whose inequalities are per-coordinate bounds.

    Points are dicts over ``coords``. ``body_vector`` maps a point to the
    space the error body lives in; ``cost`` prices a point.
    """

    coords: tuple

    def bounds(self, coord):
        raise NotImplementedError

    def contains(self, point: Mapping) -> bool:
        raise NotImplementedError

    def body_vector(self, point: Mapping) -> dict:
        raise NotImplementedError

    def cost(self, point: Mapping) -> Fraction:
        raise NotImplementedError


class SsufRelaxation(Relaxation):
    def __init__(self, network: WeightedSsufNetwork):
        self.network = network
        self.coords = network.arc_ids

    def bounds(self, coord):
        return Fraction(0), None

    def contains(self, point):
        return bool(check_membership_Q(self.network, point))

    def body_vector(self, point):
        return {a: Fraction(point.get(a, 0)) for a in self.coords}

    def cost(self, point):
        return self.network.cost_of(point)


class RingRelaxation(Relaxation):
    """Ring loads parametrised by the splits, one coordinate per commodity."""

    def __init__(self, ring: RingInstance):
        self.ring = ring
        self.coords = tuple(range(ring.k))

    def bounds(self, coord):
        return Fraction(0), Fraction(1)

    def contains(self, point):
        return all(0 <= Fraction(point[j]) <= 1 for j in self.coords) and len(point) == len(self.coords)

    def body_vector(self, point):
        load = ring_fractional_load(self.ring, [point[j] for j in self.coords])
        return dict(enumerate(load))

    def cost(self, point):
        return self.ring.cost_of(self.body_vector(point).values())


def _combine(*terms):
    """Linear combination of dict points given as (coefficient, point) pairs."""
    out = {}
    for coef, pt in terms:
        for k, v in pt.items():
            out[k] = out.get(k, Fraction(0)) + coef * Fraction(v)
    return out


def _sub(a, b):
    return {k: Fraction(a.get(k, 0)) - Fraction(b.get(k, 0)) for k in set(a) | set(b)}


def epsilon_for(rel: Relaxation, y_star: Mapping, z: Mapping) -> Optional[Fraction]:
    """Largest ``eps`` with ``y* + eps*(y* - z)`` inside ``rel``; None if unbounded.

    Raises :class:`FaceViolation` when ``z`` leaves a bound that is tight at
    ``y*`` (no positive ``eps`` exists then).
    """
    eps = None
    for k in rel.coords:
        y, zk = Fraction(y_star[k]), Fraction(z[k])
        lo, hi = rel.bounds(k)
        step = y - zk  # direction of movement per unit eps
        if step < 0:
            if y == lo:
                raise FaceViolation(f"coordinate {k!r}: tight at the lower bound but the rounding moves off it")
            cand = (y - lo) / -step
        elif step > 0 and hi is not None:
            if y == hi:
                raise FaceViolation(f"coordinate {k!r}: tight at the upper bound but the rounding moves off it")
            cand = (hi - y) / step
        else:
            continue
        eps = cand if eps is None else min(eps, cand)
    return eps


def compute_epsilon(network: WeightedSsufNetwork, y_star: Mapping, z: Mapping) -> Optional[Fraction]:
    """Flow version of :func:`epsilon_for`: min of ``y*(a) / (z(a) - y*(a))``
    over arcs where ``z`` exceeds ``y*``."""
    return epsilon_for(SsufRelaxation(network), y_star, z)


@dataclass(frozen=True)
class ProofPoints:
    epsilon: Optional[Fraction]
    y_bar: dict
    y_hat: dict
    checks: dict


def proof_points(rel: Relaxation, x, y_star, z, body: BoxErrorBody, lam) -> ProofPoints:
    lam = check_lambda(lam)
    eps = epsilon_for(rel, y_star, z)
    e = Fraction(1) if eps is None else eps
    y_bar = _combine((1 + e, y_star), (-e, z))
    y_hat = _combine((e / (lam + e), x), (lam / (lam + e), y_bar))
    xb = rel.body_vector(x)
    bar_dev = _sub(xb, rel.body_vector(y_bar))  # x - ybar must lie in (lam+eps) R
    hat_dev = _sub(xb, rel.body_vector(y_hat))
    wide = BoxErrorBody(
        {k: (lam + e) * v for k, v in body.lower.items()},
        {k: (lam + e) * v for k, v in body.upper.items()},
    )
    narrow = BoxErrorBody(
        {k: lam * v for k, v in body.lower.items()},
        {k: lam * v for k, v in body.upper.items()},
    )
    cost_x, cost_y, cost_z, cost_hat = (rel.cost(p) for p in (x, y_star, z, y_hat))
    checks = {
        "ybar_in_Q": rel.contains(y_bar),
        "ybar_in_x_minus_lam_plus_eps_R": body_contains(wide, bar_dev),
        "yhat_in_Q_and_x_minus_lam_R": rel.contains(y_hat) and body_contains(narrow, hat_dev),
        "restricted_cost_le_yhat_cost": cost_y <= cost_hat,
        "cost_chain": lam * cost_z <= cost_x,
    }
    return ProofPoints(eps, y_bar, y_hat, checks)


def verify_proof_points(network: WeightedSsufNetwork, x, y_star, z, body: BoxErrorBody, lam) -> dict:
    """Named boolean results of the five proof-point checks for flows."""
    return proof_points(SsufRelaxation(network), x, y_star, z, body, lam).checks


@dataclass(frozen=True)
class RoundingCertificate:
    lam: Fraction
    input_cost: Fraction
    restricted_cost: Fraction
    output_cost: Fraction
    x: dict
    y_star: dict
    z: dict
    deviation: dict
    body_R: BoxErrorBody
    body_R_minus_lambda_R: BoxErrorBody
    epsilon: Optional[Fraction]
    y_bar: dict
    y_hat: dict
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list:
        return [k for k, v in self.checks.items() if not v]


def certify(rel: Relaxation, x, y_star, z, body: BoxErrorBody, lam, fpra_within_body=None) -> RoundingCertificate:
    """Build the certificate for one run in any relaxation."""
    lam = check_lambda(lam)
    xb, yb, zb = rel.body_vector(x), rel.body_vector(y_star), rel.body_vector(z)
    deviation = {k: zb[k] - xb[k] for k in body.coords}
    diff_body = minkowski_diff_body(body, lam)
    try:
        pp = proof_points(rel, x, y_star, z, body, lam)
        eps, y_bar, y_hat, pchecks = pp.epsilon, pp.y_bar, pp.y_hat, pp.checks
        face_ok = True
    except FaceViolation:
        eps, y_bar, y_hat = None, {}, {}
        pchecks = {
            "ybar_in_Q": False,
            "ybar_in_x_minus_lam_plus_eps_R": False,
            "yhat_in_Q_and_x_minus_lam_R": False,
            "restricted_cost_le_yhat_cost": False,
            "cost_chain": False,
        }
        face_ok = False
    cx, cy, cz = rel.cost(x), rel.cost(y_star), rel.cost(z)
    narrow = BoxErrorBody({k: lam * v for k, v in body.lower.items()},
                          {k: lam * v for k, v in body.upper.items()})
    checks = {
        "x_in_Q": rel.contains(x),
        "y_star_in_Q": rel.contains(y_star),
        "y_star_in_x_minus_lam_R": body_contains(narrow, _sub(xb, yb)),
        "z_in_Q": rel.contains(z),
        "face_preserving": face_ok,
        "fpra_error_in_R": body_contains(body, {k: zb[k] - yb[k] for k in body.coords}),
        "restricted_cost_le_input_cost": cy <= cx,
        **pchecks,
        "cost_bound": lam * cz <= cx,
        "deviation_in_R_minus_lam_R": body_contains(diff_body, deviation),
    }
    return RoundingCertificate(
        lam=lam,
        input_cost=cx,
        restricted_cost=cy,
        output_cost=cz,
        x=dict(x),
        y_star=dict(y_star),
        z=dict(z),
        deviation=deviation,
        body_R=body,
        body_R_minus_lambda_R=diff_body,
        epsilon=eps,
        y_bar=y_bar,
        y_hat=y_hat,
        checks=checks,
    )


def check_costs_for_lambda(costs, lam) -> None:
    if lam < 1 and any(c < 0 for c in costs):
        raise ValueError("negative costs are only allowed with lambda = 1")


def round_with_cost(network: WeightedSsufNetwork, x: Mapping, fpra, body: Optional[BoxErrorBody] = None,
                    lam=1, strict: bool = True):
    """Cost-aware unsplittable rounding of the fractional flow ``x``.

    ``fpra`` is called as ``fpra(subnetwork, y_star)`` and returns an
    :class:`~fprakit.fpra.FpraOutput`. ``body`` defaults to
    ``[-d_max, d_max]`` on every arc. Returns the path flow and its
    :class:`RoundingCertificate`; in strict mode a failed check raises
    :class:`CertificateViolation`.
    """
    lam = check_lambda(lam)
    check_costs_for_lambda(network.costs().values(), lam)
    x = {a: Fraction(x.get(a, 0)) for a in network.arc_ids}
    report = check_membership_Q(network, x)
    if not report:
        raise Infeasible(f"x is not a fractional flow: {report.violations}")
    if find_cycle(network, support(x)) is not None:
        raise CyclicSupport("x has flow on a directed cycle; apply eliminate_cycle_flow first")
    if body is None:
        body = BoxErrorBody.symmetric(network.arc_ids, network.d_max)

    lp = restricted_min_cost_ssuf(network, x, body, lam)
    y_star = lp.point
    sub = support_subnetwork(network, y_star)
    try:
        out = fpra(sub, y_star)
    except Exception as exc:  # keep y* with the error so counterexamples stay inspectable
        if hasattr(exc, "context"):
            exc.context.setdefault("y_star", y_star)
        raise
    solution = out.solution
    z = {a: Fraction(0) for a in network.arc_ids}
    z.update(out.load)
    cert = certify(SsufRelaxation(network), x, y_star, z, body, lam)
    if strict and not cert.ok:
        raise CertificateViolation(f"certificate checks failed: {cert.failed()}", cert)
    return solution, cert
