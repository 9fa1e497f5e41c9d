"""
Winding numbers and branches of log f
=====================================

Winding numbers come from two independent sums that must agree: the total
change of arg f and the contour integral of f'/f. On a grid set a branch of
log f either exists or some cycle of cells carries a nonzero winding.
"""

import numpy as np

from arakelian import (LinearFactor, LogGrid, Polynomial, PolyPath, corpus_scene, log_on_path,
                       log_on_set, winding_details)

# three roots, two of them inside the unit circle
f = Polynomial.from_roots([0.3j, -0.5, 2.0 + 1.0j])
res = winding_details(f, PolyPath.circle(0j, 1.0, 64))
print("winding", res.winding, " arg turns", res.arg_turns, " integral turns", res.integral_turns)

# a continuous argument along an open path
lp = log_on_path(LinearFactor(0j), PolyPath(np.exp(1j * np.linspace(0, np.pi, 50))))
print("log z along the upper semicircle ends at", lp.g[-1])

# the half plane Im z >= 0 has no holes: a branch exists for any f without zeros there
s = corpus_scene("half_plane").grid()
g = log_on_set(Polynomial.from_roots([-1j, -2 - 3j]), s)
print("half plane:", type(g).__name__, "residual", g.max_residual)

# the annulus has a hole; z - zeta with zeta in the hole gives an obstruction
s = corpus_scene("thick_annulus").grid()
obs = log_on_set(LinearFactor(0j), s)
print("annulus:", type(obs).__name__, "winding", obs.winding, "cycle length", len(obs.cycle))
assert isinstance(g, LogGrid)
