"""Command-line front end.

Subcommands: ``ssuf-round``, ``ring-round``, ``generate``,
``oracle-compare`` and ``verify``. Exit codes: 0 success, 1 certificate or
verification failure, 2 input error, 3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction

from .errors import (
    BadLambda,
    CertificateViolation,
    CyclicSupport,
    FprakitError,
    Infeasible,
    NoSolutionInBody,
    ParseError,
    TooLarge,
    UnsatisfiableParams,
)
from .fpra import DEFAULT_ASSIGNMENT_CAP, DEFAULT_RING_CAP, SSUF_FPRAS, make_ssuf_fpra
from .generate import random_crossing_ring, random_ring, random_ssuf
from .io import (
    RingDocument,
    SsufDocument,
    dumps,
    load_document,
    parse_instance,
    qmap,
    ring_report,
    ring_to_doc,
    ssuf_report,
    ssuf_to_doc,
)
from .meta import round_with_cost
from .model import (
    BoxErrorBody,
    eliminate_cycle_flow,
    find_cycle,
    parse_rational,
    ring_fractional_load,
    ring_induced_load,
    support,
)
from .ring import RING_FPRAS, nonuniform_to_uniform, embed_solution, strip_artificials, violation, ring_round_with_cost
from .solvers import (
    ArcBounds,
    lp_oracle_enumerate,
    min_cost_flow_bounded,
    restricted_bounds,
    ring_linear_program_by_evaluation,
    ring_restricted_min_cost,
    ssuf_linear_program,
)
from .verify import verify_report

OK, FAILED, INPUT_ERROR, CAP_EXCEEDED = 0, 1, 2, 3


def _rational_arg(text):
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(doc, out):
    text = dumps(doc)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(msg, code):
    print(f"error: {msg}", file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# rounding


def cmd_ssuf_round(args) -> int:
    inst = parse_instance(load_document(args.instance))
    if not isinstance(inst, SsufDocument):
        raise ParseError("ssuf-round needs an instance of kind 'ssuf'")
    net, x = inst.network, inst.fractional
    if args.min_cost_x:
        sol = min_cost_flow_bounded(net, ArcBounds.unbounded(net))
        if not sol.optimal:
            raise Infeasible("no fractional flow routes the demands")
        x = sol.point
    if x is None:
        raise ParseError("instance has no fractional solution; pass --min-cost-x to compute one")
    if find_cycle(net, support(x)) is not None:
        x = eliminate_cycle_flow(net, x)
    body = None if args.radius is None else BoxErrorBody.symmetric(net.arc_ids, args.radius)
    cap = args.cap if args.cap is not None else DEFAULT_ASSIGNMENT_CAP
    kwargs = {"strict": args.strict}
    if args.fpra == "brute":
        kwargs.update(body=body, assignment_cap=cap)
    fpra = make_ssuf_fpra(args.fpra, **kwargs)
    try:
        solution, cert = round_with_cost(net, x, fpra, body=body, lam=args.lam, strict=False)
    except NoSolutionInBody as exc:
        doc = {
            "kind": "ssuf-counterexample",
            "instance": ssuf_to_doc(net, x),
            "message": str(exc),
            "y_star": qmap(exc.context.get("y_star", {})),
            "assignments_tried": len(exc.enumeration),
        }
        _emit(doc, args.out)
        return _fail(str(exc), FAILED)
    report = ssuf_report(net, x, solution, cert, args.fpra)
    verdict = verify_report(report)
    report["verification"] = verdict.to_doc()
    _emit(report, args.out)
    if not cert.ok or not verdict.verdict:
        return _fail(f"certificate checks failed: {cert.failed() + verdict.failed()}", FAILED)
    return OK


def cmd_ring_round(args) -> int:
    inst = parse_instance(load_document(args.instance))
    if not isinstance(inst, RingDocument):
        raise ParseError("ring-round needs an instance of kind 'ring'")
    if inst.fractional is None:
        raise ParseError("ring instance has no fractional splits")
    cap = args.cap if args.cap is not None else DEFAULT_RING_CAP
    fpra = RING_FPRAS[args.fpra](strict=args.strict, cap=cap)
    try:
        choice, cert = ring_round_with_cost(inst.ring, inst.fractional, fpra, alpha=args.alpha, lam=args.lam,
                                            strict=False)
    except NoSolutionInBody as exc:
        _emit({"kind": "ring-counterexample", "instance": ring_to_doc(inst.ring, inst.fractional),
               "message": str(exc)}, args.out)
        return _fail(str(exc), FAILED)
    report = ring_report(inst.ring, inst.fractional, choice, cert, args.fpra)
    verdict = verify_report(report)
    report["verification"] = verdict.to_doc()
    _emit(report, args.out)
    if not cert.ok or not verdict.verdict:
        return _fail(f"certificate checks failed: {cert.failed() + verdict.failed()}", FAILED)
    return OK


# ---------------------------------------------------------------------------
# generation, verification


def cmd_generate(args) -> int:
    if args.kind == "ssuf":
        doc = random_ssuf(args.seed, nodes=args.nodes, arcs=args.arcs, terminals=args.terminals)
        _emit(ssuf_to_doc(doc.network, doc.fractional), args.out)
    elif args.kind == "ring":
        doc = random_ring(args.seed, nodes=args.nodes, commodities=args.commodities, capacities=args.capacities)
        _emit(ring_to_doc(doc.ring, doc.fractional), args.out)
    else:
        doc = random_crossing_ring(args.seed, commodities=args.commodities)
        _emit(ring_to_doc(doc.ring, doc.fractional), args.out)
    return OK


def cmd_verify(args) -> int:
    rep = verify_report(load_document(args.report))
    _emit(rep.to_doc(), args.out)
    return OK if rep.verdict else FAILED


# ---------------------------------------------------------------------------
# oracle campaign


def oracle_campaign(count: int, seed: int = 0, inject_fault: bool = False):
    """Cross-check solvers against vertex enumeration and the uniform
    reduction round trip on ``count`` random instances per family.

    Returns ``(summary, disagreements)`` where each disagreement is a dict
    holding the family, index and the offending instance.
    """
    summary = {"mincostflow": 0, "ring-simplex": 0, "uniform-round-trip": 0}
    bad = []
    fault = Fraction(1) if inject_fault else Fraction(0)
    for i in range(count):
        s = seed * 100_003 + i
        doc = random_ssuf(s, nodes=4, arcs=5 + i % 2, terminals=1 + i % 3)
        net, x = doc.network, doc.fractional
        lam = (Fraction(1, 4), Fraction(1, 2), Fraction(1))[i % 3]
        body = BoxErrorBody.symmetric(net.arc_ids, net.d_max)
        bounds = restricted_bounds(net, x, body, lam)
        got = min_cost_flow_bounded(net, bounds)
        want = lp_oracle_enumerate(ssuf_linear_program(net, bounds))
        if got.status != want.status or (got.optimal and got.objective + fault != want.objective):
            bad.append({"family": "mincostflow", "index": i, "instance": ssuf_to_doc(net, x)})
        summary["mincostflow"] += 1

        rd = random_ring(s, nodes=3 + i % 3, commodities=1 + i % 4, unsplit_share=Fraction(0))
        ring, split = rd.ring, rd.fractional
        radius = ring.d_max * Fraction(13, 10)
        got = ring_restricted_min_cost(ring, split, radius, lam)
        ref = lp_oracle_enumerate(ring_linear_program_by_evaluation(ring, split, radius, lam))
        pt = [ref.point[j] for j in range(ring.k)]
        ref_cost = ring.cost_of(ring_fractional_load(ring, pt))
        if got.objective + fault != ref_cost:
            bad.append({"family": "ring-simplex", "index": i, "instance": ring_to_doc(ring, split)})
        summary["ring-simplex"] += 1

        cd = random_ring(s, nodes=3 + i % 4, commodities=1 + i % 4, capacities=True)
        if fault or not uniform_round_trip(cd.ring, random.Random(s)):
            bad.append({"family": "uniform-round-trip", "index": i, "instance": ring_to_doc(cd.ring, cd.fractional)})
        summary["uniform-round-trip"] += 1
    return summary, bad


def uniform_round_trip(ring, rng) -> bool:
    """Embed a random original solution and strip a random uniform one.

    The embedding must keep every edge's violation exactly; stripping may
    only lower it.
    """
    red = nonuniform_to_uniform(ring)
    choice = tuple(rng.choice((1, 2)) for _ in range(ring.k))
    oviol = violation(ring_induced_load(ring, choice), [e.capacity for e in ring.edges])
    uviol = violation(ring_induced_load(red.uniform, embed_solution(red, choice)), [red.u_unif] * red.uniform.n)
    if tuple(max(uviol[h] for h in img) for img in red.images) != oviol:
        return False
    uchoice = tuple(rng.choice((1, 2)) for _ in range(red.uniform.k))
    return strip_artificials(red, uchoice)[1].ok


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fprakit", description="Cost-aware rounding with exact certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--lambda", dest="lam", type=_rational_arg, default=Fraction(1), help="tradeoff in (0, 1]")
        mode = sp.add_mutually_exclusive_group()
        mode.add_argument("--strict", dest="strict", action="store_true", default=True,
                          help="FPRA must land inside its error body (default)")
        mode.add_argument("--report", dest="strict", action="store_false",
                          help="return the best solution even outside the body and report it")
        sp.add_argument("--cap", type=int, default=None, help="enumeration cap")
        sp.add_argument("--out", default=None, help="write the report here instead of stdout")

    sp = sub.add_parser("ssuf-round", help="round a fractional single-source flow")
    sp.add_argument("instance")
    sp.add_argument("--fpra", choices=sorted(SSUF_FPRAS), default="brute")
    sp.add_argument("--radius", type=_rational_arg, default=None, help="box radius (default d_max)")
    sp.add_argument("--min-cost-x", action="store_true", help="start from a min-cost fractional flow")
    common(sp)
    sp.set_defaults(func=cmd_ssuf_round)

    sp = sub.add_parser("ring-round", help="round a fractional ring loading")
    sp.add_argument("instance")
    sp.add_argument("--fpra", choices=sorted(RING_FPRAS), default="brute")
    sp.add_argument("--alpha", type=_rational_arg, default=Fraction(13, 10))
    common(sp)
    sp.set_defaults(func=cmd_ring_round)

    sp = sub.add_parser("generate", help="write a random instance")
    sp.add_argument("kind", choices=["ssuf", "ring", "crossing-ring"])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--nodes", type=int, default=5)
    sp.add_argument("--arcs", type=int, default=None)
    sp.add_argument("--terminals", type=int, default=2)
    sp.add_argument("--commodities", type=int, default=3)
    sp.add_argument("--capacities", action="store_true")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("oracle-compare", help="cross-check solvers against vertex enumeration")
    sp.add_argument("--count", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_oracle_compare)

    sp = sub.add_parser("verify", help="re-check a report without any solver")
    sp.add_argument("report")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_verify)
    return p


def cmd_oracle_compare(args) -> int:
    summary, bad = oracle_campaign(args.count, args.seed, args.inject_fault)
    lines = [f"{'family':<20}{'runs':>6}{'disagree':>10}"]
    for fam, runs in summary.items():
        lines.append(f"{fam:<20}{runs:>6}{sum(b['family'] == fam for b in bad):>10}")
    print("\n".join(lines))
    if bad:
        _emit({"kind": "oracle-disagreements", "disagreements": bad}, args.out or None)
        return FAILED
    return OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TooLarge as exc:
        return _fail(str(exc), CAP_EXCEEDED)
    except CertificateViolation as exc:
        return _fail(str(exc), FAILED)
    except (ParseError, BadLambda, Infeasible, CyclicSupport, UnsatisfiableParams, ValueError) as exc:
        return _fail(str(exc), INPUT_ERROR)
    except FprakitError as exc:
        return _fail(str(exc), FAILED)


if __name__ == "__main__":
    sys.exit(main())
