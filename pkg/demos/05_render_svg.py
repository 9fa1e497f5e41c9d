"""
Drawing a witness
=================

Every SVG element carries a data-ref attribute naming the report field it
shows, so a figure can be checked against the JSON it came from.
"""

import sys

from arakelian import corpus_scene, witness_step2
from arakelian.svg import render
from arakelian.topology import components
from arakelian.geometry import closed_disk

out = sys.argv[1] if len(sys.argv) > 1 else "channel_comb_witness.svg"

s = corpus_scene("channel_comb").grid()
rep = witness_step2(s, n0=1)
lab = components(s | closed_disk(s.window, 1))
svg = render(s, lab, holes=rep.holes, holes_ref="witness.holes",
             curves=[("witness.gamma", rep.gamma)], arcs=rep.arcs, arcs_ref="witness.arcs",
             points=[(f"witness.zetas[{k}]", z) for k, z in enumerate(rep.zetas)])
with open(out, "w") as fh:
    fh.write(svg)
print("wrote", out, f"({len(svg)} bytes)")
