"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Bounds are recomputed here from the instance and the returned paths or
choices with the helpers in ``oracles``; the package's own certificate is
only consulted where a criterion names it (proof points, verification).
"""
from __future__ import annotations

import functools
import itertools
import random
import time
from fractions import Fraction

import pytest

from corruptions import RING, SSUF, corrupt, rejected
from oracles import any_within, ring_choice_load, ring_load
from fprakit.cli import oracle_campaign
from fprakit.errors import NoSolutionInBody
from fprakit.fpra import BruteForceSsufFpra, recheck_no_solution
from fprakit.generate import random_crossing_ring, random_ring, random_ssuf
from fprakit.io import ring_report, ssuf_report
from fprakit.meta import round_with_cost, verify_proof_points
from fprakit.model import BoxErrorBody
from fprakit.ring import embed_solution, nonuniform_to_uniform, ring_round_with_cost, strip_artificials
from fprakit.verify import verify_report

Q = Fraction
SSUF_COUNT = 1000
RING_COUNT = 500
CAPACITATED_COUNT = 200
ORACLE_COUNT = 200
LAMBDAS = (Q(1, 4), Q(1, 2), Q(1))
ALPHA = Q(13, 10)


def announce(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {number} [{title}]: {'PASS' if ok else 'FAIL'} ({detail})")


# ---------------------------------------------------------------------------
# shared runs


def ssuf_instance(i):
    rng = random.Random(i)
    nodes = rng.randint(2, 6)
    arcs = rng.randint(nodes - 1, 10)
    terminals = rng.randint(1, min(4, nodes - 1))
    return random_ssuf(i, nodes=nodes, arcs=arcs, terminals=terminals)


def z_load(net, paths):
    load = {a.id: Q(0) for a in net.arcs}
    for t, p in zip(net.terminals, paths):
        for a in p:
            load[a] += t.demand
    return load


@functools.lru_cache(maxsize=None)
def ssuf_runs():
    """Every instance at every lambda: (index, doc, lam, outcome, seconds)."""
    runs = []
    for i in range(SSUF_COUNT):
        doc = ssuf_instance(i)
        for lam in LAMBDAS:
            start = time.perf_counter()
            try:
                sol, cert = round_with_cost(doc.network, doc.fractional, BruteForceSsufFpra(), lam=lam, strict=False)
                outcome = (sol, cert)
            except NoSolutionInBody as exc:
                outcome = exc
            runs.append((i, doc, lam, outcome, time.perf_counter() - start))
    return runs


def ring_instance(i):
    k = 1 + i % 6
    if i % 5 < 3:
        return random_ring(i, nodes=3 + i % 6, commodities=k)
    return random_crossing_ring(i, commodities=k, extra_nodes=i % 3)


@functools.lru_cache(maxsize=None)
def ring_runs():
    runs = []
    for i in range(RING_COUNT):
        doc = ring_instance(i)
        for lam in (Q(1), Q(1, 2)):
            choice, cert = ring_round_with_cost(doc.ring, doc.fractional, alpha=ALPHA, lam=lam, strict=False)
            runs.append((i, doc, lam, choice, cert))
    return runs


def ssuf_bounds_hold(doc, lam, sol):
    net, x = doc.network, doc.fractional
    z = z_load(net, sol.paths)
    cost = {a.id: a.cost for a in net.arcs}
    cz = sum(cost[a] * z[a] for a in z)
    cx = sum(cost[a] * x[a] for a in x)
    dev_ok = all(abs(z[a] - x[a]) <= (1 + lam) * net.d_max for a in z)
    return lam * cz <= cx and dev_ok


# ---------------------------------------------------------------------------


def test_criterion_1_lambda_one(capsys):
    start = time.perf_counter()
    runs = [r for r in ssuf_runs() if r[2] == 1]
    elapsed = sum(r[4] for r in runs)
    bad = [i for i, doc, lam, out, _ in runs if isinstance(out, Exception) or not ssuf_bounds_hold(doc, lam, out[0])]
    shapes_ok = all(len(d.network.nodes) <= 6 and len(d.network.arcs) <= 10 and len(d.network.terminals) <= 4
                    for _, d, *_ in runs)
    ok = len(runs) >= 1000 and not bad and shapes_ok and elapsed < 120
    announce(capsys, 1, "lambda=1 cost and 2*d_max deviation", ok,
             f"{len(runs)} instances, {len(bad)} violations, {elapsed:.1f}s pipeline time, "
             f"{time.perf_counter() - start:.1f}s including setup")
    assert ok, bad[:10]


def test_criterion_2_lambda_sweep(capsys):
    runs = ssuf_runs()
    bad = []
    for i, doc, lam, out, _ in runs:
        if isinstance(out, Exception):
            bad.append((i, lam, "no solution"))
            continue
        sol, cert = out
        if not ssuf_bounds_hold(doc, lam, sol):
            bad.append((i, lam, "bound"))
            continue
        body = BoxErrorBody.symmetric(doc.network.arc_ids, doc.network.d_max)
        checks = verify_proof_points(doc.network, doc.fractional, cert.y_star, z_load(doc.network, sol.paths),
                                     body, lam)
        if not all(checks.values()):
            bad.append((i, lam, "proof points"))
    ok = len(runs) >= 3 * 1000 and not bad
    announce(capsys, 2, "lambda in {1/4, 1/2, 1} with proof points", ok, f"{len(runs)} runs, {len(bad)} failures")
    assert ok, bad[:10]


def test_criterion_3_brute_force_soundness(capsys):
    found, confirmed, unconfirmed = 0, [], []
    for i, doc, lam, out, _ in ssuf_runs():
        net = doc.network
        if isinstance(out, NoSolutionInBody):
            y_star = out.context["y_star"]
            body = BoxErrorBody.symmetric(net.arc_ids, net.d_max)
            # two independent re-enumerations must agree that nothing fits
            if not any_within(net, y_star, net.d_max) and recheck_no_solution(net, y_star, body):
                confirmed.append((i, lam))
            else:
                unconfirmed.append((i, lam))
            continue
        sol, cert = out
        z = z_load(net, sol.paths)
        in_body = all(abs(z[a] - cert.y_star[a]) <= net.d_max for a in z)
        on_face = all(cert.y_star[a] > 0 for a in z if z[a] > 0)
        if in_body and on_face:
            found += 1
        else:
            unconfirmed.append((i, lam))
    ok = not confirmed and not unconfirmed
    announce(capsys, 3, "brute-force FPRA soundness", ok,
             f"{found} in-body solutions, {len(confirmed)} confirmed counterexamples, "
             f"{len(unconfirmed)} unconfirmed claims")
    assert not unconfirmed, unconfirmed[:10]
    assert not confirmed, f"confirmed counterexamples with nothing in the box: {confirmed[:10]}"


def test_criterion_4_ring_bounds(capsys):
    slack = {Q(1): Q(13, 5), Q(1, 2): Q(39, 20)}
    bad = []
    largest = 0
    for i, doc, lam, choice, cert in ring_runs():
        ring, split = doc.ring, doc.fractional
        largest = max(largest, ring.k)
        x = ring_load(ring, split)
        load = ring_choice_load(ring, choice)
        costs = [e.cost for e in ring.edges]
        cx = sum(c * v for c, v in zip(costs, x))
        cz = sum(c * v for c, v in zip(costs, load))
        d = max(c.demand for c in ring.commodities)
        if not (lam * cz <= cx and all(l <= xe + slack[lam] * d for l, xe in zip(load, x)) and cert.ok):
            bad.append((i, lam))
    n = len(ring_runs()) // 2
    ok = n >= 500 and largest <= 6 and not bad
    announce(capsys, 4, "ring cost and 13/5 resp. 39/20 load bounds", ok,
             f"{n} instances (k <= {largest}) at lambda 1 and 1/2, {len(bad)} violations")
    assert ok, bad[:10]


def test_criterion_5_opposing_edges(capsys):
    forms = {}
    for i, _, _, _, cert in ring_runs():
        if cert.form.ring is not None:
            forms[i] = cert.form.ring
    rng = random.Random(2024)
    checked, bad = 0, []
    for i, cring in forms.items():
        k = cring.k
        total = sum(c.demand for c in cring.commodities)
        loads = [ring_choice_load(cring, ch) for ch in itertools.product((1, 2), repeat=k)]
        loads += [ring_load(cring, [Q(rng.randint(0, 24), 24) for _ in range(k)]) for _ in range(100)]
        for load in loads:
            checked += 1
            if any(load[j] + load[k + j] != total for j in range(k)):
                bad.append(i)
                break
    ok = bool(forms) and not bad
    announce(capsys, 5, "opposing-edges identity", ok,
             f"{len(forms)} canonical forms, {checked} load vectors, {len(bad)} failures")
    assert ok, bad[:10]


def test_criterion_6_uniform_reduction(capsys):
    rng = random.Random(7)
    embeds = strips = 0
    bad = []
    for i in range(CAPACITATED_COUNT):
        doc = random_ring(10_000 + i, nodes=3 + i % 5, commodities=1 + i % 4, capacities=True)
        ring = doc.ring
        red = nonuniform_to_uniform(ring)
        ucaps = [red.u_unif] * red.uniform.n
        caps = [e.capacity for e in ring.edges]

        def viol(load, cap):
            return [max(Q(0), l - c) for l, c in zip(load, cap)]

        for choice in itertools.product((1, 2), repeat=ring.k):
            ov = viol(ring_choice_load(ring, choice), caps)
            uv = viol(ring_choice_load(red.uniform, embed_solution(red, choice)), ucaps)
            embeds += 1
            if [max(uv[h] for h in img) for img in red.images] != ov:
                bad.append((i, "embed", choice))
        for _ in range(20):
            uchoice = tuple(rng.choice((1, 2)) for _ in range(red.uniform.k))
            choice, _report = strip_artificials(red, uchoice)
            ov = viol(ring_choice_load(ring, choice), caps)
            uv = viol(ring_choice_load(red.uniform, uchoice), ucaps)
            strips += 1
            if any(ov[e] > max(uv[h] for h in img) for e, img in enumerate(red.images)):
                bad.append((i, "strip", uchoice))
    ok = not bad
    announce(capsys, 6, "uniform reduction round trip", ok,
             f"{CAPACITATED_COUNT} instances, {embeds} embeddings, {strips} strips, {len(bad)} failures")
    assert ok, bad[:10]


def test_criterion_7_solver_oracles(capsys):
    summary, bad = oracle_campaign(ORACLE_COUNT, seed=1)
    ok = summary["mincostflow"] >= 200 and summary["ring-simplex"] >= 200 and not bad
    announce(capsys, 7, "solvers agree with vertex enumeration", ok,
             f"{summary['mincostflow']} min-cost flows, {summary['ring-simplex']} ring LPs, {len(bad)} disagreements")
    assert ok, bad[:5]


def test_criterion_8_verification(capsys):
    failures = []
    reports = 0
    ssuf_docs, ring_docs = [], []
    for i, doc, lam, out, _ in ssuf_runs():
        if isinstance(out, Exception):
            continue
        rep = ssuf_report(doc.network, doc.fractional, out[0], out[1], "brute")
        reports += 1
        if not verify_report(rep).verdict:
            failures.append(("ssuf", i, lam))
        if len(ssuf_docs) < 20 and lam != 1 and out[1].epsilon is not None:
            ssuf_docs.append(rep)
    for i, doc, lam, choice, cert in ring_runs():
        rep = ring_report(doc.ring, doc.fractional, choice, cert, "brute")
        reports += 1
        if not verify_report(rep).verdict:
            failures.append(("ring", i, lam))
        if len(ring_docs) < 20 and cert.form.ring is not None and cert.form.k >= 2:
            ring_docs.append(rep)
    controls = missed = 0
    for docs, table in ((ssuf_docs, SSUF), (ring_docs, RING)):
        for rep in docs:
            for name, mutate in table:
                controls += 1
                if not rejected(corrupt(rep, mutate)):
                    missed += 1
                    failures.append(("control", name))
    kinds = len(SSUF) + len(RING)
    ok = not failures and kinds >= 10 and ssuf_docs and ring_docs
    announce(capsys, 8, "certificates verify and corruptions are rejected", ok,
             f"{reports} reports verified, {kinds} corruption kinds over {controls} controls, {missed} missed")
    assert ok, failures[:10]


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(pytest.main([__file__, "-v"]))
