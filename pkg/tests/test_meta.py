from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import diamond, parallel_arcs
from fprakit.errors import CertificateViolation, CyclicSupport, FaceViolation, Infeasible
from fprakit.fpra import BruteForceSsufFpra, GreedyPathStripFpra
from fprakit.generate import random_ssuf
from fprakit.meta import compute_epsilon, proof_points, round_with_cost, SsufRelaxation, verify_proof_points
from fprakit.model import BoxErrorBody, WeightedSsufNetwork

Q = Fraction


def _pair(d):
    return {"a1": Q(d[0]), "a2": Q(d[1])}


def test_round_parallel_lambda_one():
    net = parallel_arcs((0, 1))
    fpra = BruteForceSsufFpra(BoxErrorBody.symmetric(net.arc_ids, 1))
    sol, cert = round_with_cost(net, _pair((1, 1)), fpra, BoxErrorBody.symmetric(net.arc_ids, 1), 1)
    # derived: y* = (2, 0) and its support forces z = (2, 0)
    assert cert.y_star == _pair((2, 0))
    assert cert.z == _pair((2, 0))
    assert (cert.output_cost, cert.input_cost) == (0, 1)
    assert cert.deviation == _pair((1, -1))
    assert cert.body_R_minus_lambda_R == BoxErrorBody.symmetric(net.arc_ids, 2)
    assert cert.epsilon is None  # z == y*
    assert cert.ok


def test_round_parallel_lambda_half():
    net = parallel_arcs((0, 1))
    body = BoxErrorBody.symmetric(net.arc_ids, 1)
    sol, cert = round_with_cost(net, _pair((1, 1)), BruteForceSsufFpra(body), body, Q(1, 2))
    assert cert.y_star == _pair((Q(3, 2), Q(1, 2)))
    # derived: both candidates on y* deviate by 1/2; the first in path order is (2, 0)
    assert cert.z in (_pair((2, 0)), _pair((1, 1)))
    assert cert.output_cost <= 2 * cert.input_cost
    assert all(abs(v) <= Q(3, 2) for v in cert.deviation.values())
    assert cert.ok


def test_round_zero_cost():
    net = parallel_arcs((0, 0))
    sol, cert = round_with_cost(net, _pair((1, 1)), BruteForceSsufFpra())
    assert cert.output_cost == cert.input_cost == 0 and cert.ok


def test_epsilon_examples():
    net = parallel_arcs()
    assert compute_epsilon(net, _pair((1, 1)), _pair((2, 0))) == 1
    assert compute_epsilon(net, _pair((1, 1)), _pair((1, 1))) is None
    assert compute_epsilon(net, _pair((Q(3, 2), Q(1, 2))), _pair((2, 0))) == 3


def test_epsilon_rejects_face_violation():
    net = parallel_arcs()
    with pytest.raises(FaceViolation):
        compute_epsilon(net, _pair((2, 0)), _pair((1, 1)))


def test_proof_points_parallel_trace():
    net = parallel_arcs((0, 1))
    body = BoxErrorBody.symmetric(net.arc_ids, 1)
    x, y, z = _pair((1, 1)), _pair((Q(3, 2), Q(1, 2))), _pair((2, 0))
    pp = proof_points(SsufRelaxation(net), x, y, z, body, Q(1, 2))
    # derived: eps = (3/2)/(1/2) = 3, ybar = y + 3(y - z) = (0, 2), yhat = (6/7) x + (1/7) ybar
    assert pp.epsilon == 3
    assert pp.y_bar == _pair((0, 2))
    lam, e = Q(1, 2), Q(3)
    expect = {a: e / (lam + e) * x[a] + lam / (lam + e) * pp.y_bar[a] for a in x}
    assert pp.y_hat == expect == _pair((Q(6, 7), Q(8, 7)))
    assert all(pp.checks.values())


def test_proof_points_degenerate_when_z_is_y():
    net = parallel_arcs((0, 1))
    body = BoxErrorBody.symmetric(net.arc_ids, 1)
    checks = verify_proof_points(net, _pair((1, 1)), _pair((1, 1)), _pair((1, 1)), body, 1)
    assert all(checks.values())


def test_proof_points_detect_corrupted_z():
    net = parallel_arcs((0, 1))
    body = BoxErrorBody.symmetric(net.arc_ids, Q(1, 4))
    x = y = _pair((1, 1))
    # z far outside y + R: x - ybar leaves (lam + eps) R
    checks = verify_proof_points(net, x, y, _pair((2, 0)), body, 1)
    assert checks["ybar_in_x_minus_lam_plus_eps_R"] is False


def test_negative_costs_only_with_lambda_one():
    net = parallel_arcs((-1, 1))
    _, cert = round_with_cost(net, _pair((1, 1)), BruteForceSsufFpra(), lam=1)
    assert cert.ok and cert.output_cost <= cert.input_cost
    with pytest.raises(ValueError):
        round_with_cost(net, _pair((1, 1)), BruteForceSsufFpra(), lam=Q(1, 2))


def test_round_rejects_bad_input():
    net = parallel_arcs()
    with pytest.raises(Infeasible):
        round_with_cost(net, _pair((1, 0)), BruteForceSsufFpra())
    cyc = WeightedSsufNetwork.build(["s", "u", "v"], [("su", "s", "u", 0), ("uv", "u", "v", 0), ("vu", "v", "u", 0)],
                                    "s", [("u", 1)])
    with pytest.raises(CyclicSupport):
        round_with_cost(cyc, {"su": 1, "uv": 1, "vu": 1}, BruteForceSsufFpra())


def test_strict_mode_raises_on_failed_certificate():
    # greedy promises no body: y* stays within 1/8 of 1/2 on each path, so any single path deviates by >= 3/8
    net = diamond()
    x = {a: Q(1, 2) for a in net.arc_ids}
    body = BoxErrorBody.symmetric(net.arc_ids, Q(1, 8))
    with pytest.raises(CertificateViolation) as err:
        round_with_cost(net, x, GreedyPathStripFpra(), body)
    assert "fpra_error_in_R" in err.value.certificate.failed()
    _, cert = round_with_cost(net, x, GreedyPathStripFpra(), body, strict=False)
    assert not cert.ok


@given(seed=st.integers(0, 10**6), lam=st.sampled_from([Q(1, 4), Q(1, 3), Q(1, 2), Q(1)]))
def test_guarantees_hold(seed, lam):
    doc = random_ssuf(seed, nodes=5, arcs=8, terminals=3)
    net, x = doc.network, doc.fractional
    _, cert = round_with_cost(net, x, BruteForceSsufFpra(), lam=lam)
    assert lam * cert.output_cost <= cert.input_cost
    assert all(abs(v) <= (1 + lam) * net.d_max for v in cert.deviation.values())
    assert all(cert.checks.values())
