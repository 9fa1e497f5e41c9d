"""Counterexample constructions for sets that fail the Arakelian conditions.

``witness_step1`` handles a set with a hole: the linear factor vanishing at
a point of the hole winds once along a curve hugging the hole's outer
boundary. ``witness_step2`` handles a hole-free set whose holes after
adding a closed disk run out to the window margin: a Weierstrass product
vanishing in those holes has a branch of log on the set, yet that branch
jumps by a full turn across a short arc of the circle, and it winds along
a curve around the hole with the smallest arc trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import ndimage

from . import analysis as an
from ._plain import plain
from .errors import (ConstructionError, DomainError, GluingError, PreconditionError,
                     ResolutionError)
from .geometry import GridSet, border_mask, closed_disk, dilate, distance_transform, grid_edges
from .topology import (EIGHT, MARGIN_CELLS, ArcSet, PolyPath, RegionLabeling, check_radius_fits,
                       circle_arcs, components, enclosing_curve, filling)

SMALL_ARC_FACTOR = 1e-3
MIN_CIRCLE_SAMPLES = 512


def glue_log_domains(g1: an.LogGrid, g2: an.LogGrid, overlap: GridSet,
                     tol: float = 1e-6) -> an.LogGrid:
    """Union of two branches of the same logarithm, matching them on the overlap.

    On each 8-component of the overlap, ``g2`` is shifted by the integer
    multiple of 2πi that makes it agree with ``g1``. A component of
    ``g2``'s domain must receive a single shift.
    """
    w = g1.domain.window
    if g2.domain.window != w or overlap.window != w:
        raise DomainError("branches live on different windows")
    d1, d2 = g1.domain.mask, g2.domain.mask
    ov = overlap.mask
    if np.any(ov & ~(d1 & d2)):
        raise DomainError("overlap must lie in both domains")

    ov_lab, n_ov = ndimage.label(ov, structure=EIGHT)
    dom_lab, n_dom = ndimage.label(d2, structure=EIGHT)
    shift_of_dom = {}
    shifts = []
    for c in range(1, n_ov + 1):
        cells = ov_lab == c
        diff = g1.g[cells] - g2.g[cells]
        k = int(np.rint(np.mean(diff.imag) / an.TWO_PI))
        err = max(float(np.max(np.abs(diff.imag - an.TWO_PI * k))),
                  float(np.max(np.abs(diff.real))))
        if err > tol:
            raise GluingError(f"overlap component {c}: branches differ by a non-integer "
                              f"multiple of 2πi (residual {err:.3g})")
        owner = int(dom_lab[cells][0])
        if shift_of_dom.setdefault(owner, k) != k:
            raise GluingError(
                f"component {owner} of the second domain needs shifts "
                f"{shift_of_dom[owner]} and {k}: the glued branch is multi-valued")
        shifts.append((c, k))

    shift = np.zeros(w.shape, dtype=np.int64)
    for owner, k in shift_of_dom.items():
        shift[dom_lab == owner] = k
    union = d1 | d2
    g = np.full(w.shape, np.nan + 0j)
    g[d2] = g2.g[d2] + 2j * math.pi * shift[d2]
    g[d1] = g1.g[d1]

    a, b = grid_edges(union, 8)
    if a.size:
        flat1, flat2 = d1.ravel(), d2.ravel()
        jump = np.abs(g.ravel()[b].imag - g.ravel()[a].imag)
        if n_ov == 0:
            # independent branches: only edges inside one source domain must be continuous
            same = (flat1[a] & flat1[b]) | (flat2[a] & flat2[b])
            jump = jump[same]
        if jump.size and float(np.max(jump)) >= an.PHASE_STEP:
            raise GluingError("glued branch jumps across an adjacency")
    return an.LogGrid(GridSet(w, union), g, max(g1.max_residual, g2.max_residual),
                      tuple(shifts))


@dataclass
class WitnessReport:
    mode: str
    f: an.AnalyticFn
    hole_label: int
    zetas: list
    gamma: PolyPath
    winding: int
    path_log: an.LogPath
    epsilon: float
    tube_radius: float
    gamma_in_tube: bool
    conclusion: str
    n0: Optional[int] = None
    arcs: Optional[ArcSet] = None
    chosen_measure: Optional[float] = None
    delta: Optional[float] = None
    extension_radius: Optional[float] = None
    glued: Optional[an.LogGrid] = None
    glued_residual: Optional[float] = None
    boundary_covered: Optional[bool] = None
    small_arc_bound_met: Optional[bool] = None
    seams: list = field(default_factory=list)
    zero_values: list = field(default_factory=list)
    min_abs_f_on_set: Optional[float] = None
    holes: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def zeta(self) -> complex:
        return self.zetas[0]

    def to_dict(self) -> dict:
        d = {
            "mode": self.mode,
            "function": self.f.to_dict(),
            "functionDescription": self.f.describe(),
            "holeLabel": self.hole_label,
            "gamma": {"points": self.gamma.to_list(), "closed": True,
                      "length": self.gamma.length},
            "epsilon": self.epsilon,
            "gammaDomain": {"kind": "tube", "radius": self.tube_radius,
                            "contains": self.gamma_in_tube},
            "winding": self.winding,
            "pathLog": self.path_log.to_dict(),
            "conclusion": self.conclusion,
            "notes": list(self.notes),
        }
        if self.mode == "step1":
            d["zeta"] = [self.zeta.real, self.zeta.imag]
        else:
            d.update({
                "zetas": [[z.real, z.imag] for z in self.zetas],
                "holes": [r.to_dict() for r in self.holes],
                "zeroValues": self.zero_values,
                "minAbsFOnSet": self.min_abs_f_on_set,
                "n0": self.n0,
                "arcs": self.arcs.to_dict(),
                "chosenHole": self.hole_label,
                "chosenMeasure": self.chosen_measure,
                "delta": self.delta,
                "smallArcThreshold": SMALL_ARC_FACTOR * self.delta,
                "smallArcRatio": self.chosen_measure / (SMALL_ARC_FACTOR * self.delta),
                "smallArcBoundMet": self.small_arc_bound_met,
                "extensionRadius": self.extension_radius,
                "glued": self.glued.to_dict(),
                "gluedResidual": self.glued_residual,
                "boundaryCovered": self.boundary_covered,
                "seams": self.seams,
            })
        return plain(d)


def _choose_epsilon(v: GridSet, zeta: complex, epsilon: Optional[float]) -> float:
    h = v.window.h
    d = distance_transform(v)
    i, j = v.window.index_of(zeta)
    room = float(d[i, j])
    if epsilon is not None:
        return epsilon
    if room <= 2 * h:
        raise ResolutionError(
            f"hole is too thin for curve extraction (depth {room:.3g} <= 2h = {2 * h})")
    return max(2 * h, min(4 * h, room / 2))


def _tube_check(s: GridSet, gamma: PolyPath, radius: float) -> bool:
    tube = dilate(s, radius)
    inside = gamma.points[s.window.contains(gamma.points)]
    if inside.size != gamma.points.size:
        return False
    i, j = s.window.index_of(inside)
    return bool(np.all(tube.mask[i, j]))


def _curve_and_winding(f, labeling: RegionLabeling, label: int, zeta: complex,
                       epsilon: Optional[float], tol_zero: float):
    v = filling(labeling, label)
    eps = _choose_epsilon(v, zeta, epsilon)
    gamma = enclosing_curve(v, zeta, eps)
    winding = an.winding_number(f, gamma, tol_zero)
    path_log = an.log_on_path(f, gamma, tol_zero=tol_zero)
    return gamma, eps, winding, path_log


def witness_step1(s: GridSet, hole_label: int, epsilon: Optional[float] = None,
                  tol_zero: float = an.TOL_ZERO) -> WitnessReport:
    lab = components(s)
    if not lab.holes:
        raise DomainError("the set has no holes; nothing to witness")
    region = lab.region(hole_label)
    if not region.bounded:
        raise DomainError(f"component {hole_label} is not a hole (it reaches the window edge)")
    zeta = region.representative
    f = an.LinearFactor(zeta)
    gamma, eps, winding, path_log = _curve_and_winding(f, lab, hole_label, zeta, epsilon,
                                                       tol_zero)
    if winding < 1:
        raise ConstructionError(f"curve around the hole has winding {winding}")
    tube = eps + s.window.h
    conclusion = (
        f"f(z) = z - zeta with zeta in hole {hole_label} winds {winding} time(s) along a "
        f"closed curve within {tube:.4g} of the set, so no continuous branch of log f "
        f"exists near the hole's boundary: there is no g in A(F) with exp(g) = f on F.")
    return WitnessReport("step1", f, hole_label, [zeta], gamma, winding, path_log, eps,
                         tube, _tube_check(s, gamma, tube), conclusion)


def _seam(f, g: an.LogGrid, s: GridSet, arcs: ArcSet, arc, tol_zero) -> dict:
    """Branch jump of g between the set cells at the two ends of an arc."""
    w = s.window
    _, (ni, nj) = ndimage.distance_transform_edt(~s.mask, return_indices=True)
    n0, step = arcs.n0, arcs.step
    t0, t1 = arc.theta_start - step / 2, arc.theta_end + step / 2
    ends = []
    for t in (t0, t1):
        i, j = w.index_of(n0 * np.exp(1j * t))
        ci, cj = int(ni[i, j]), int(nj[i, j])
        ends.append((w.center(ci, cj), complex(g.g[ci, cj])))
    (za, ga), (zb, gb) = ends
    k = max(2, math.ceil((t1 - t0) * n0 / (w.h / 4)))
    arc_pts = n0 * np.exp(1j * np.linspace(t0, t1, k + 1))
    route = PolyPath(np.concatenate([[za], arc_pts, [zb]]))
    along = an.log_on_path(f, route, tol_zero=tol_zero).total_phase
    jump = gb.imag - ga.imag - along
    return {"holeLabel": arc.label, "from": [za.real, za.imag], "to": [zb.real, zb.imag],
            "chord": abs(zb - za), "routeLength": route.length,
            "branchJump": jump, "turns": int(round(jump / an.TWO_PI))}


def witness_step2(s: GridSet, n0: int, samples_per_unit: Optional[int] = None,
                  epsilon: Optional[float] = None, tol_zero: float = an.TOL_ZERO,
                  margin_cells: int = MARGIN_CELLS) -> WitnessReport:
    w = s.window
    h = w.h
    check_radius_fits(w, n0, margin_cells)
    if components(s).holes:
        raise PreconditionError("the set has holes; condition 1 already fails, use witness1")

    disk = closed_disk(w, n0)
    lab = components(s | disk)
    hs = lab.holes
    margin = border_mask(w, margin_cells)
    if not hs or not np.isin(lab.labels[margin], [r.label for r in hs]).any():
        raise PreconditionError(
            f"no hole of F ∪ D(0, {n0}) reaches the window margin; condition 2 does not "
            "fail at this radius inside the window")
    hs = sorted(hs, key=lambda r: (r.max_modulus, r.label))
    for r in hs:
        if r.rep_distance < 2 * h:
            raise ConstructionError(f"hole {r.label} is too thin to hold a zero")
    zetas = [r.representative for r in hs]

    f = an.weierstrass_build(sorted(zetas, key=abs), w.radius)
    zero_vals = [abs(complex(v)) for v in f.value(np.array(zetas))]
    cells_z = s.points()
    fv = f.value(cells_z)
    scale = max(1.0, float(np.max(np.abs(fv))))
    min_abs = float(np.min(np.abs(fv)))
    if not min_abs > tol_zero * scale:
        raise ConstructionError(f"the Weierstrass product nearly vanishes on F (min |f| = "
                                f"{min_abs:.3g})")

    g = an.log_on_set(f, s, tol_zero=tol_zero)
    if isinstance(g, an.Obstruction):
        raise ConstructionError("no branch of log f on the hole-free set; grid too coarse")

    k_tilde = s & closed_disk(w, n0 + 1)
    ring = np.abs(np.abs(w.centers()) - n0) <= h
    k_band = GridSet(w, s.mask & ring)
    if not k_band.mask.any():
        raise ConstructionError(f"F does not meet the circle |z| = {n0}")

    ext, radius = None, 0.0
    r = 1.0
    while r >= h:
        cand, conflicts = an.extend_log(f, g, k_tilde, r, tol_zero)
        if conflicts == 0:
            ext, radius = cand, r
            break
        r /= 2
    if ext is None:
        ext, _ = an.extend_log(f, g, k_tilde, 0.0, tol_zero)
    dist_k = float(np.min(distance_transform(ext.domain)[k_band.mask]))
    delta = min(dist_k, 1.0) / 2
    collar = dilate(k_band, delta)
    g_collar = an.LogGrid(collar, np.where(collar.mask, ext.g, np.nan + 0j), ext.max_residual)
    glued = glue_log_domains(g, g_collar, s & collar)
    gz = w.centers()[glued.domain.mask]
    gvals = f.value(gz)
    glued_res = float(np.max(np.abs(np.exp(glued.g[glued.domain.mask]) - gvals) / np.abs(gvals)))

    if samples_per_unit is None:
        samples_per_unit = max(math.ceil(1 / h), math.ceil(MIN_CIRCLE_SAMPLES / (2 * math.pi * n0)))
    arcs = circle_arcs(s, lab, n0, samples_per_unit)
    measures = arcs.hole_measures
    pool = [r for r in hs if measures.get(r.label, 0.0) > 0] or hs
    chosen = min(pool, key=lambda r: (measures.get(r.label, 0.0), r.label))
    lam = measures.get(chosen.label, 0.0)

    hole_mask = lab.labels == chosen.label
    rim = ndimage.binary_dilation(hole_mask, structure=EIGHT) & ~hole_mask
    covered = bool(np.all((s.mask | collar.mask)[rim]))

    gamma, eps, winding, path_log = _curve_and_winding(
        f, lab, chosen.label, chosen.representative, epsilon, tol_zero)
    if winding < 1:
        raise ConstructionError(f"curve around hole {chosen.label} has winding {winding}")
    tube = eps + h
    seams = [_seam(f, g, s, arcs, a, tol_zero) for a in arcs.arcs if a.label == chosen.label]

    notes = [f"Only the {len(zetas)} hole(s) visible in the window carry zeros; "
             "the sequence of zeros tending to infinity is truncated at the window."]
    met = lam < SMALL_ARC_FACTOR * delta
    if not met:
        notes.append(
            f"Smallest arc trace {lam:.4g} is not below delta/1000 = "
            f"{SMALL_ARC_FACTOR * delta:.3g} at this resolution; the winding is certified "
            "directly instead.")
    jumps = [sd["turns"] for sd in seams]
    if covered:
        conclusion = (
            f"The boundary of hole {chosen.label} lies in F ∪ collar where the glued "
            f"branch lives, yet f winds {winding} time(s) along a curve near that boundary: "
            "the glued branch cannot extend, so no g in A(F) with exp(g) = f exists.")
    else:
        conclusion = (
            f"f winds {winding} time(s) around hole {chosen.label}. The branch of log f on "
            f"the grid set jumps by {jumps} turn(s) across the hole's arc trace of length "
            f"{lam:.4g}, so it is not uniformly continuous at that scale; with the trace "
            f"longer than the collar width 2*delta = {2 * delta:.3g} the argument closes only "
            "for holes farther out than the window shows.")
    return WitnessReport(
        "step2", f, chosen.label, zetas, gamma, winding, path_log, eps, tube,
        _tube_check(s | disk, gamma, tube), conclusion, n0=n0, arcs=arcs,
        chosen_measure=lam, delta=delta, extension_radius=radius, glued=glued,
        glued_residual=glued_res, boundary_covered=covered, small_arc_bound_met=met,
        seams=seams, zero_values=zero_vals, min_abs_f_on_set=min_abs, holes=hs, notes=notes)
