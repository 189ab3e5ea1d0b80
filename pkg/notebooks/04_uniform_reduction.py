"""
Uniform capacities by subdivision
=================================
"""
import itertools

from fprakit import RingInstance
from fprakit.model import ring_induced_load
from fprakit.ring import embed_solution, nonuniform_to_uniform, strip_artificials, violation

# tight capacities so some routings overload an edge
ring = RingInstance.build([0, 1, 2, 3, 4], [(1, 4), (1, 2), (2, 3), (1, 5), (0, 3)],
                          [(0, 2, 2), (1, 3, 1), (3, 0, 2)])
red = nonuniform_to_uniform(ring)
print("capacities", [str(e.capacity) for e in ring.edges], "-> u_unif", red.u_unif)
print("subdivided", red.r, "artificial commodities", len(red.artificial))

caps = [e.capacity for e in ring.edges]
for choice in itertools.product((1, 2), repeat=ring.k):
    ov = violation(ring_induced_load(ring, choice), caps)
    uv = violation(ring_induced_load(red.uniform, embed_solution(red, choice)), [red.u_unif] * red.uniform.n)
    per_edge = tuple(max(uv[h] for h in img) for img in red.images)
    print(choice, [str(v) for v in ov], "same" if per_edge == ov else "DIFFERENT")

uchoice = (2,) * red.uniform.k
choice, rep = strip_artificials(red, uchoice)
print("stripped", choice, "ok" if rep.ok else "violation grew")
