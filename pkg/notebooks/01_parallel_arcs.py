"""
Two parallel arcs
=================

Two unit demands from s to t over arcs a1 (cost 0) and a2 (cost 1).
The fractional flow splits evenly; watch where y* and z land as lambda moves.
"""
from fractions import Fraction as Q

from fprakit import BoxErrorBody, BruteForceSsufFpra, WeightedSsufNetwork, round_with_cost

net = WeightedSsufNetwork.build(["s", "t"], [("a1", "s", "t", 0), ("a2", "s", "t", 1)], "s", [("t", 1), ("t", 1)])
x = {"a1": Q(1), "a2": Q(1)}
body = BoxErrorBody.symmetric(net.arc_ids, 1)

for lam in (Q(1), Q(1, 2), Q(1, 4)):
    sol, cert = round_with_cost(net, x, BruteForceSsufFpra(body), body, lam)
    print(f"lambda={lam}")
    print("  y*   ", {a: str(v) for a, v in cert.y_star.items()})
    print("  z    ", {a: str(v) for a, v in cert.z.items()}, "paths", sol.paths)
    print("  cost ", cert.input_cost, "->", cert.output_cost, " eps", cert.epsilon)

# lambda = 1 pushes everything onto the free arc; smaller lambda keeps z closer to x
