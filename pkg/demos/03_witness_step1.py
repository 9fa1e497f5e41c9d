"""
A set with a hole has no logarithm of z - zeta
==============================================

Pick zeta inside the hole, trace a curve near the outer boundary of the
hole's filling, and count how often z - zeta winds along it.
"""

from arakelian import components, corpus_scene, witness_step1

s = corpus_scene("thick_circle").grid()
(hole,) = components(s).holes
rep = witness_step1(s, hole.label)

print("zeta         ", rep.zeta)
print("curve points ", len(rep.gamma), " length", round(rep.gamma.length, 4))
print("curve in tube", rep.gamma_in_tube, " radius", rep.tube_radius)
print("winding      ", rep.winding)
print(rep.conclusion)
