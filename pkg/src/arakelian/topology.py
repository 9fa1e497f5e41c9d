"""Complement components, holes, the Arakelian test, fillings and enclosing curves.

Connectivity follows the usual digital-topology pairing: marked cells are
8-connected, unmarked cells are 4-connected. "Bounded" always means "does
not touch the window edge", so every verdict here is relative to the window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import ndimage
from skimage import measure

from ._plain import plain
from .errors import ConfigurationError, DomainError, ResolutionError
from .geometry import GridSet, Window, border_mask, closed_disk, distance_transform

FOUR = ndimage.generate_binary_structure(2, 1)
EIGHT = ndimage.generate_binary_structure(2, 2)

MARGIN_CELLS = 4

WINDOW_CAVEAT = (
    "Boundedness is judged relative to the computational window: a component is "
    "treated as unbounded iff it reaches the window edge, and holes reaching the "
    "{m}-cell margin ring are taken as evidence of unbounded growth. Structure "
    "outside the window is not seen.")


@dataclass(frozen=True)
class Region:
    label: int
    cell_count: int
    bbox: tuple  # (imin, imax, jmin, jmax), inclusive
    touches_border: bool
    representative: complex
    rep_index: tuple
    rep_distance: float
    max_modulus: float

    @property
    def bounded(self) -> bool:
        return not self.touches_border

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "cellCount": self.cell_count,
            "boundingBox": list(self.bbox),
            "touchesBorder": self.touches_border,
            "representative": [self.representative.real, self.representative.imag],
            "representativeDistance": self.rep_distance,
            "maxModulus": self.max_modulus,
        }


@dataclass(frozen=True, eq=False)
class RegionLabeling:
    """Labels of the unmarked cells of a grid set (0 on marked cells)."""
    window: Window
    labels: np.ndarray = field(repr=False)
    regions: tuple = ()

    def region(self, label: int) -> Region:
        if not 1 <= label <= len(self.regions):
            raise DomainError(f"no component with label {label}")
        return self.regions[label - 1]

    def mask_of(self, label: int) -> np.ndarray:
        self.region(label)
        return self.labels == label

    @property
    def holes(self) -> list[Region]:
        return [r for r in self.regions if r.bounded]

    def __len__(self):
        return len(self.regions)


def components(s: GridSet) -> RegionLabeling:
    """Label the 4-connected components of the complement of ``s``.

    Labels are 1, 2, ... in raster order of each component's first cell.
    """
    w = s.window
    free = ~s.mask
    labels, n = ndimage.label(free, structure=FOUR)
    if n == 0:
        return RegionLabeling(w, labels, ())

    if s.mask.any():
        dist = ndimage.distance_transform_edt(free) * w.h
    else:
        dist = np.full(w.shape, np.inf)
    flat_lab = labels.ravel()
    cells = np.flatnonzero(flat_lab)
    lab = flat_lab[cells]
    dvals = dist.ravel()[cells]
    # representative: max distance to the set, ties to the first cell in raster order
    order = np.lexsort((cells, -dvals, lab))
    first = np.ones(order.size, dtype=bool)
    first[1:] = lab[order][1:] != lab[order][:-1]
    rep_cells = cells[order][first]

    index = np.arange(1, n + 1)
    counts = np.bincount(lab, minlength=n + 1)[1:]
    modulus = np.abs(w.centers())
    max_mod = ndimage.maximum(modulus, labels, index)
    edge = np.unique(labels[border_mask(w)])
    edge = set(edge[edge > 0].tolist())
    slices = ndimage.find_objects(labels)

    regions = []
    for k in range(n):
        i, j = divmod(int(rep_cells[k]), w.nx)
        sl = slices[k]
        regions.append(Region(
            label=k + 1,
            cell_count=int(counts[k]),
            bbox=(sl[0].start, sl[0].stop - 1, sl[1].start, sl[1].stop - 1),
            touches_border=(k + 1) in edge,
            representative=w.center(i, j),
            rep_index=(i, j),
            rep_distance=float(dist[i, j]),
            max_modulus=float(max_mod[k]),
        ))
    return RegionLabeling(w, labels, tuple(regions))


def holes(s: GridSet) -> list[Region]:
    """Bounded components of the complement of ``s``."""
    return components(s).holes


# ---------------------------------------------------------------------------
# Arakelian classification


@dataclass
class RadiusCheck:
    n: int
    hole_count: int
    hole_union_max_modulus: float
    any_hole_touches_margin: bool
    border_split: bool

    def to_dict(self) -> dict:
        return {"n": self.n, "holeCount": self.hole_count,
                "holeUnionMaxModulus": self.hole_union_max_modulus,
                "anyHoleTouchesMargin": self.any_hole_touches_margin,
                "borderSplit": self.border_split}


@dataclass
class ArakelianReport:
    holes: list
    condition1: bool
    per_radius: list
    condition2: Optional[bool]
    verdict: str
    reason: str
    window_caveat: str

    def to_dict(self) -> dict:
        return plain({
            "holes": [r.to_dict() for r in self.holes],
            "condition1": self.condition1,
            "perRadius": [c.to_dict() for c in self.per_radius],
            "condition2": self.condition2,
            "verdict": self.verdict,
            "reason": self.reason,
            "windowCaveat": self.window_caveat,
        })


def check_radius_fits(window: Window, n: int, margin_cells: int = MARGIN_CELLS):
    if n < 1:
        raise ConfigurationError("radius must be >= 1")
    room = window.inner_radius - margin_cells * window.h
    if n > room + 1e-12:
        raise ConfigurationError(
            f"disk of radius {n} plus a {margin_cells}-cell margin ring does not fit "
            f"in the window (room {room:.4g})")


def is_arakelian(s: GridSet, n_max: int, margin_cells: int = MARGIN_CELLS) -> ArakelianReport:
    """Test both Arakelian conditions on the grid, with closed disks D̄_0(n), n <= n_max.

    Condition 2 is judged per radius: a hole of ``s ∪ D̄_0(n)`` reaching the
    margin ring counts as unbounded growth; a window-edge component of the
    complement that the disk splits into several edge-touching pieces makes
    the outcome undecidable inside the window.
    """
    w = s.window
    check_radius_fits(w, n_max, margin_cells)
    margin = border_mask(w, margin_cells)

    base = components(s)
    own_holes = base.holes
    condition1 = not own_holes

    checks = []
    for n in range(1, n_max + 1):
        lab = components(s | closed_disk(w, n))
        hs = lab.holes
        hole_labels = np.array([r.label for r in hs], dtype=int)
        touching = bool(hs) and bool(np.isin(lab.labels[margin], hole_labels).any())
        union_max = max((r.max_modulus for r in hs), default=0.0)

        # edge-touching pieces of (s ∪ D)^c grouped by the component of s^c holding them
        parents = {}
        for r in lab.regions:
            if r.touches_border:
                parent = int(base.labels[r.rep_index])
                parents[parent] = parents.get(parent, 0) + 1
        split = any(c > 1 for c in parents.values())
        checks.append(RadiusCheck(n, len(hs), union_max, touching, split))

    if any(c.any_hole_touches_margin for c in checks):
        condition2 = False
    elif any(c.border_split for c in checks):
        condition2 = None
    else:
        condition2 = True

    if not condition1:
        verdict, reason = "notArakelian", "hole"
    elif condition2 is False:
        n = next(c.n for c in checks if c.any_hole_touches_margin)
        verdict, reason = "notArakelian", f"holeUnionReachesMargin:n={n}"
    elif condition2 is None:
        n = next(c.n for c in checks if c.border_split)
        verdict, reason = "inconclusiveInWindow", f"borderSplit:n={n}"
    else:
        verdict, reason = "arakelian", "bothConditionsHold"
    return ArakelianReport(own_holes, condition1, checks, condition2, verdict, reason,
                           WINDOW_CAVEAT.format(m=margin_cells))


# ---------------------------------------------------------------------------
# filling and outer boundary


def boundary_cells(mask: np.ndarray) -> np.ndarray:
    """Cells of ``mask`` with an 8-neighbour outside it (the window exterior counts as outside)."""
    padded = np.pad(mask, 1, constant_values=False)
    interior = ndimage.binary_erosion(padded, structure=EIGHT, border_value=0)[1:-1, 1:-1]
    return mask & ~interior


def filling(region: RegionLabeling, label: int) -> GridSet:
    """U together with every bounded component of its complement.

    U is a 4-connected complement region, so its own complement is split
    with 8-connectivity.
    """
    r = region.region(label)
    if not r.bounded:
        raise DomainError(f"component {label} touches the window edge; it has no filling")
    u = region.labels == label
    outside, _ = ndimage.label(~u, structure=EIGHT)
    edge = np.unique(outside[border_mask(region.window)])
    edge = edge[edge > 0]
    return GridSet(region.window, ~np.isin(outside, edge))


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True, eq=False)
class PolyPath:
    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        if pts.size < 2:
            raise ConfigurationError("a path needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise ConfigurationError("path points must be finite")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.size

    def vertices(self) -> np.ndarray:
        """Points in traversal order, repeating the first one at the end when closed."""
        if self.closed:
            return np.append(self.points, self.points[0])
        return self.points

    def steps(self) -> np.ndarray:
        return np.abs(np.diff(self.vertices()))

    @property
    def length(self) -> float:
        return float(self.steps().sum())

    def signed_area(self) -> float:
        z = self.points
        return 0.5 * float(np.sum((np.conj(z) * np.roll(z, -1)).imag))

    def reversed(self) -> "PolyPath":
        return PolyPath(self.points[::-1], self.closed)

    def densified(self, max_step: float) -> "PolyPath":
        v = self.vertices()
        out = [v[:1]]
        for a, b in zip(v[:-1], v[1:]):
            k = max(1, math.ceil(abs(b - a) / max_step - 1e-12))
            out.append(a + (b - a) * np.arange(1, k + 1) / k)
        pts = np.concatenate(out)
        if self.closed:
            pts = pts[:-1]
        return PolyPath(pts, self.closed)

    def index_around(self, point: complex) -> int:
        """Winding number of the closed path around ``point`` (geometric angle sum)."""
        v = self.vertices() if self.closed else np.append(self.points, self.points[0])
        w = v - point
        if np.any(w == 0):
            raise DomainError("point lies on the path")
        total = np.angle(w[1:] / w[:-1]).sum()
        return int(round(total / (2 * math.pi)))

    def to_list(self) -> list:
        return [[z.real, z.imag] for z in self.points]

    @classmethod
    def circle(cls, center: complex, radius: float, n: int = 256) -> "PolyPath":
        t = 2 * np.pi * np.arange(n) / n
        return cls(center + radius * np.exp(1j * t), closed=True)


def enclosing_curve(v: GridSet, zeta: complex, epsilon: float) -> PolyPath:
    """Closed counter-clockwise polyline in V within ``epsilon`` of its edge, around ``zeta``.

    The curve is the marching-squares level set of the interior distance
    field at ``epsilon - 0.75 h``; linear interpolation then keeps every
    vertex at distance in ``(0, epsilon)`` from the unmarked cell centres.
    """
    w = v.window
    h = w.h
    if epsilon < 2 * h - 1e-12:
        raise ResolutionError(f"epsilon {epsilon} is below 2h = {2 * h}")
    if zeta not in v:
        raise DomainError("zeta is not inside V")
    d = distance_transform(v)
    i, j = w.index_of(zeta)
    if not d[i, j] > epsilon:
        raise ResolutionError(
            f"zeta is within {d[i, j]:.4g} of the edge of V; need more than epsilon={epsilon}")
    level = epsilon - 0.75 * h
    field_ = np.pad(np.where(np.isfinite(d), d, 0.0), 1)
    best, best_area = None, 0.0
    for c in measure.find_contours(field_, level, fully_connected="high"):
        if c.shape[0] < 4 or not np.allclose(c[0], c[-1]):
            continue
        z = (w.xmin + (c[:-1, 1] - 0.5) * h) + 1j * (w.ymin + (c[:-1, 0] - 0.5) * h)
        path = PolyPath(z, closed=True)
        if abs(path.index_around(zeta)) != 1:
            continue
        area = abs(path.signed_area())
        if area > best_area:
            best, best_area = path, area
    if best is None:
        raise ResolutionError("no level curve separates zeta from the edge of V")
    if best.signed_area() < 0:
        best = best.reversed()
    return best.densified(h)


# ---------------------------------------------------------------------------
# arcs of hole boundaries on a circle


@dataclass(frozen=True)
class Arc:
    theta_start: float
    theta_end: float
    label: int
    bounded: bool
    samples: int

    def measure(self, n0: float) -> float:
        return n0 * (self.theta_end - self.theta_start)

    def to_dict(self, n0: float) -> dict:
        return {"thetaStart": self.theta_start, "thetaEnd": self.theta_end,
                "holeLabel": self.label, "bounded": self.bounded,
                "samples": self.samples, "measure": self.measure(n0)}


@dataclass
class ArcSet:
    n0: int
    step: float
    arcs: list
    sample_labels: np.ndarray = field(repr=False)

    @property
    def hole_measures(self) -> dict:
        out = {}
        for a in self.arcs:
            if a.bounded:
                out[a.label] = out.get(a.label, 0.0) + a.measure(self.n0)
        return out

    @property
    def total_hole_measure(self) -> float:
        return float(sum(self.hole_measures.values()))

    @property
    def slack(self) -> float:
        """Length of one angular sample on the circle."""
        return self.n0 * self.step

    def to_dict(self) -> dict:
        return {"n0": self.n0, "angularStep": self.step,
                "arcs": [a.to_dict(self.n0) for a in self.arcs],
                "holeMeasures": {str(k): v for k, v in sorted(self.hole_measures.items())},
                "totalHoleMeasure": self.total_hole_measure}


def circle_arcs(s: GridSet, labeling: RegionLabeling, n0: int,
                samples_per_unit: int) -> ArcSet:
    """Sample the circle |z| = n0 and group samples outside ``s`` into arcs.

    ``labeling`` must be ``components(s ∪ D̄_0(n0))``. Each sample not in
    ``s`` takes the label of the complement component met when stepping
    radially outward; samples whose outward neighbour lies in ``s`` get
    label 0 and belong to no arc.
    """
    w = s.window
    h = w.h
    if n0 + 2 * h > w.inner_radius:
        raise ConfigurationError(f"circle of radius {n0} does not fit in the window")
    count = math.ceil(2 * math.pi * n0 * samples_per_unit)
    step = 2 * math.pi / count
    if n0 * step > h + 1e-12:
        raise ResolutionError(
            f"circle sampling step {n0 * step:.4g} exceeds the cell size {h}")
    theta = step * np.arange(count)
    ray = np.exp(1j * theta)
    ci, cj = w.index_of(n0 * ray)
    lab = np.zeros(count, dtype=int)
    pending = ~s.mask[ci, cj]
    for t in (0.0, 0.5, 1.0, 1.5, 2.0):
        if not pending.any():
            break
        qi, qj = w.index_of((n0 + t * h) * ray)
        hit_set = pending & s.mask[qi, qj]
        found = pending & ~s.mask[qi, qj] & (labeling.labels[qi, qj] > 0)
        lab[found] = labeling.labels[qi, qj][found]
        pending &= ~(hit_set | found)

    arcs = []
    if lab.any():
        if np.all(lab == lab[0]):
            runs = [(0, count)]
        else:
            shift = int(np.flatnonzero(lab != np.roll(lab, 1))[0])
            rolled = np.roll(lab, -shift)
            cuts = np.flatnonzero(rolled[1:] != rolled[:-1]) + 1
            bounds = np.concatenate(([0], cuts, [count]))
            runs = [(shift + a, b - a) for a, b in zip(bounds[:-1], bounds[1:])]
        for start, length in runs:
            label = int(lab[start % count])
            if label == 0:
                continue
            t0 = (start * step - step / 2) % (2 * math.pi)
            arcs.append(Arc(t0, t0 + length * step, label,
                            labeling.region(label).bounded, length))
        arcs.sort(key=lambda a: a.theta_start)
    return ArcSet(n0, step, arcs, lab)
