"""
Ring pipeline, step by step
===========================
"""
from fractions import Fraction as Q

from fprakit import random_crossing_ring, random_ring, ring_round_with_cost
from fprakit.model import ring_fractional_load, ring_induced_load
from fprakit.ring import canonicalize_crossing, preprocess

# a general instance first; most commodities get fixed or merged away
doc = random_ring(12, nodes=8, commodities=5)
state = preprocess(doc.ring, doc.fractional)
print("general instance keeps", len(state.active), "of", doc.ring.k, "commodities")

doc = random_crossing_ring(12, commodities=4, extra_nodes=3)
ring, split = doc.ring, doc.fractional
print("commodities", [(c.source, c.sink, str(c.demand)) for c in ring.commodities])
print("splits     ", [str(s) for s in split])

state = preprocess(ring, split)
form = canonicalize_crossing(state)
print("fixed after preprocessing", state.fixed)
print("canonical commodities   ", form.commodity_map, "k' =", form.k)
if form.ring is not None:
    load = ring_fractional_load(form.ring, form.xbar)
    total = form.ring.total_demand
    # opposite canonical edges always carry the whole demand between them
    print("opposing sums", [str(load[i] + load[form.k + i]) for i in range(form.k)], "total", total)

for lam in (Q(1), Q(1, 2)):
    choice, cert = ring_round_with_cost(ring, split, lam=lam)
    print(f"lambda={lam} choice={choice} cost {cert.input_cost} -> {cert.output_cost}")
    print("  load  ", [str(v) for v in ring_induced_load(ring, choice)])
    print("  margin", [str(v) for v in cert.load_margin])
