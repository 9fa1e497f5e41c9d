"""
Classifying the bundled scenes
==============================

Each corpus scene is rasterized on its own window and handed to the
tri-state classifier. Holes decide the first condition; for the second we
look for holes of F ∪ D(0, n) that reach the margin ring of the window.
"""

from arakelian import components, corpus_names, corpus_scene, is_arakelian

for name in corpus_names():
    sc = corpus_scene(name)
    s = sc.grid()
    rep = is_arakelian(s, sc.expected["nMax"])
    mark = "ok " if rep.verdict == sc.expected["verdict"] else "!! "
    print(f"{mark}{name:24s} {s.window.shape}  {rep.verdict:22s} {rep.reason}")

# a closer look at one hole
s = corpus_scene("thick_circle").grid()
(hole,) = components(s).holes
print("\nthick_circle hole:", hole.to_dict())
