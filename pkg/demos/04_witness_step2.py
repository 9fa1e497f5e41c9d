"""
A hole-free set that still fails: holes of F ∪ D(0, 1) running off to infinity
==============================================================================

The channel comb has no holes, but sealing the corridors with the unit disk
leaves pockets at growing heights, the last one leaving the window. A
Weierstrass product puts one zero in each pocket; its log on F is glued with
a collar branch near the unit circle, and the winding around the pocket
with the shortest arc trace is certified directly.
"""

import json

from arakelian import corpus_scene, witness_step2

s = corpus_scene("channel_comb").grid()
rep = witness_step2(s, n0=1)

print("zeros             ", [complex(round(z.real, 3), round(z.imag, 3)) for z in rep.zetas])
print("genera            ", rep.f.genera, " tail bound", rep.f.tail_bound)
print("min |f| on F      ", rep.min_abs_f_on_set)
print("arc measures      ", {k: round(float(v), 4) for k, v in rep.arcs.hole_measures.items()})
print("total arc measure ", rep.arcs.total_hole_measure, "<= 2 pi")
print("chosen hole       ", rep.hole_label, " winding", rep.winding)
print("glued residual    ", rep.glued_residual)
print("seams             ", json.dumps(rep.to_dict()["seams"]))
print(rep.conclusion)
for note in rep.notes:
    print("note:", note)
