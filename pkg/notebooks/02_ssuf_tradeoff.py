"""
Cost against deviation on random SSUF instances
===============================================
"""
from fractions import Fraction as Q

from fprakit import BruteForceSsufFpra, random_ssuf, round_with_cost

rows = []
for seed in range(200):
    doc = random_ssuf(seed, nodes=6, arcs=10, terminals=3)
    net, x = doc.network, doc.fractional
    for lam in (Q(1, 4), Q(1, 2), Q(1)):
        _, cert = round_with_cost(net, x, BruteForceSsufFpra(), lam=lam)
        ratio = cert.output_cost / cert.input_cost if cert.input_cost else Q(1)
        dev = max((abs(v) for v in cert.deviation.values()), default=Q(0)) / net.d_max
        rows.append((lam, ratio, dev))

print(f"{'lambda':>7} {'max cost ratio':>15} {'1/lambda':>9} {'max dev/d_max':>14} {'1+lambda':>9}")
for lam in (Q(1, 4), Q(1, 2), Q(1)):
    sel = [r for r in rows if r[0] == lam]
    print(f"{str(lam):>7} {float(max(r[1] for r in sel)):>15.3f} {float(1 / lam):>9.3f} "
          f"{float(max(r[2] for r in sel)):>14.3f} {float(1 + lam):>9.3f}")
