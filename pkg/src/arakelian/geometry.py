"""Scenes, rasterization and grid measures.

A closed planar set is represented by a boolean mask over a rectangular
window of square cells; a cell belongs to the set iff its center does.
Row index ``i`` grows with the imaginary part, column index ``j`` with the
real part, so ``mask[i, j]`` is the cell centred at
``xmin + (j + 0.5) h + 1j * (ymin + (i + 0.5) h)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy import ndimage

from .errors import ConfigurationError, ResolutionError, ResourceError, SchemaError

MAX_CELLS_PER_SIDE = 8192
MAX_CELLS = 1 << 24

# membership slack for cell centres sitting on a shape boundary
_EPS = 1e-12


@dataclass(frozen=True)
class Window:
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    h: float

    def __post_init__(self):
        vals = (self.xmin, self.xmax, self.ymin, self.ymax, self.h)
        if not all(math.isfinite(v) for v in vals):
            raise ConfigurationError("window bounds must be finite")
        if self.xmax <= self.xmin or self.ymax <= self.ymin:
            raise ConfigurationError("window must have xmax > xmin and ymax > ymin")
        if self.h <= 0:
            raise ConfigurationError("cell size h must be positive")
        nx, ny = self.nx, self.ny
        if nx > MAX_CELLS_PER_SIDE or ny > MAX_CELLS_PER_SIDE or nx * ny > MAX_CELLS:
            raise ResourceError(
                f"window needs {ny}x{nx} cells; limits are {MAX_CELLS_PER_SIDE} per side "
                f"and {MAX_CELLS} total")

    @property
    def nx(self) -> int:
        return max(1, math.ceil((self.xmax - self.xmin) / self.h - 1e-9))

    @property
    def ny(self) -> int:
        return max(1, math.ceil((self.ymax - self.ymin) / self.h - 1e-9))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def radius(self) -> float:
        """Largest modulus of a point of the window."""
        return max(math.hypot(x, y) for x in (self.xmin, self.xmax) for y in (self.ymin, self.ymax))

    @property
    def inner_radius(self) -> float:
        """Radius of the largest origin-centred disk contained in the window."""
        return min(-self.xmin, self.xmax, -self.ymin, self.ymax)

    def xs(self) -> np.ndarray:
        return self.xmin + (np.arange(self.nx) + 0.5) * self.h

    def ys(self) -> np.ndarray:
        return self.ymin + (np.arange(self.ny) + 0.5) * self.h

    def centers(self) -> np.ndarray:
        """Complex array of cell centres with shape ``(ny, nx)``."""
        return self.xs()[None, :] + 1j * self.ys()[:, None]

    def center(self, i: int, j: int) -> complex:
        return complex(self.xmin + (j + 0.5) * self.h, self.ymin + (i + 0.5) * self.h)

    def index_of(self, z) -> tuple[np.ndarray, np.ndarray]:
        """Row/column of the cell containing ``z`` (clipped to the window)."""
        z = np.asarray(z, dtype=complex)
        j = np.clip(np.floor((z.real - self.xmin) / self.h).astype(int), 0, self.nx - 1)
        i = np.clip(np.floor((z.imag - self.ymin) / self.h).astype(int), 0, self.ny - 1)
        return i, j

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return ((z.real >= self.xmin) & (z.real <= self.xmax)
                & (z.imag >= self.ymin) & (z.imag <= self.ymax))

    def with_h(self, h: float) -> "Window":
        return Window(self.xmin, self.xmax, self.ymin, self.ymax, h)

    def to_dict(self) -> dict:
        return {"xmin": self.xmin, "xmax": self.xmax, "ymin": self.ymin,
                "ymax": self.ymax, "h": self.h}

    @classmethod
    def from_dict(cls, d: dict) -> "Window":
        try:
            return cls(*(float(d[k]) for k in ("xmin", "xmax", "ymin", "ymax", "h")))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad window: {exc}") from exc


# ---------------------------------------------------------------------------
# shapes


def _pt(v) -> complex:
    if isinstance(v, complex):
        return v
    if isinstance(v, (int, float)):
        return complex(v)
    re, im = v
    return complex(float(re), float(im))


def _positive(name, value):
    if not value > 0:
        raise ConfigurationError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float
    kind = "disk"

    def __post_init__(self):
        _positive("radius", self.radius)

    def contains(self, z):
        return np.abs(z - self.center) <= self.radius * (1 + _EPS) + _EPS

    def params(self):
        return {"center": [self.center.real, self.center.imag], "radius": self.radius}


@dataclass(frozen=True)
class Annulus:
    center: complex
    inner: float
    outer: float
    kind = "annulus"

    def __post_init__(self):
        _positive("inner", self.inner)
        if not self.outer > self.inner:
            raise ConfigurationError("annulus needs outer > inner")

    def contains(self, z):
        r = np.abs(z - self.center)
        return (r >= self.inner * (1 - _EPS) - _EPS) & (r <= self.outer * (1 + _EPS) + _EPS)

    def params(self):
        return {"center": [self.center.real, self.center.imag],
                "inner": self.inner, "outer": self.outer}


@dataclass(frozen=True)
class Rectangle:
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    kind = "rectangle"

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ConfigurationError("rectangle needs xmax > xmin and ymax > ymin")

    def contains(self, z):
        return ((z.real >= self.xmin - _EPS) & (z.real <= self.xmax + _EPS)
                & (z.imag >= self.ymin - _EPS) & (z.imag <= self.ymax + _EPS))

    def params(self):
        return {"xmin": self.xmin, "xmax": self.xmax, "ymin": self.ymin, "ymax": self.ymax}


@dataclass(frozen=True)
class HalfPlane:
    """Closed half-plane ``a*x + b*y >= offset`` with ``normal = (a, b)``."""
    normal: complex
    offset: float = 0.0
    kind = "half-plane"

    def __post_init__(self):
        if self.normal == 0:
            raise ConfigurationError("half-plane normal must be non-zero")

    def contains(self, z):
        n = self.normal / abs(self.normal)
        return z.real * n.real + z.imag * n.imag >= self.offset / abs(self.normal) - _EPS

    def params(self):
        return {"normal": [self.normal.real, self.normal.imag], "offset": self.offset}


def _segment_distance(z, a: complex, b: complex):
    d = b - a
    t = np.clip(((z - a) * np.conj(d)).real / (abs(d) ** 2), 0.0, 1.0)
    return np.abs(z - (a + t * d))


@dataclass(frozen=True)
class Polygon:
    vertices: tuple
    kind = "polygon"

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ConfigurationError("polygon needs at least 3 vertices")

    def contains(self, z):
        vs = self.vertices
        inside = np.zeros(np.shape(z), dtype=bool)
        near = np.zeros(np.shape(z), dtype=bool)
        x, y = z.real, z.imag
        for a, b in zip(vs, vs[1:] + vs[:1]):
            crosses = (a.imag > y) != (b.imag > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xc = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
            inside ^= crosses & (x < xc)
            near |= _segment_distance(z, a, b) <= _EPS
        return inside | near

    def params(self):
        return {"vertices": [[v.real, v.imag] for v in self.vertices]}


@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex
    thickness: float
    kind = "segment"

    def __post_init__(self):
        _positive("thickness", self.thickness)
        if self.start == self.end:
            raise ConfigurationError("segment endpoints coincide")

    def contains(self, z):
        return _segment_distance(z, self.start, self.end) <= self.thickness / 2 + _EPS

    def params(self):
        return {"start": [self.start.real, self.start.imag],
                "end": [self.end.real, self.end.imag], "thickness": self.thickness}


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float
    thickness: float
    kind = "circle"

    def __post_init__(self):
        _positive("radius", self.radius)
        _positive("thickness", self.thickness)

    def contains(self, z):
        return np.abs(np.abs(z - self.center) - self.radius) <= self.thickness / 2 + _EPS

    def params(self):
        return {"center": [self.center.real, self.center.imag], "radius": self.radius,
                "thickness": self.thickness}


def shape_from_dict(d: dict):
    try:
        kind, p = d["kind"], d.get("params", {})
        if kind == "disk":
            return Disk(_pt(p["center"]), float(p["radius"]))
        if kind == "annulus":
            return Annulus(_pt(p["center"]), float(p["inner"]), float(p["outer"]))
        if kind == "rectangle":
            return Rectangle(*(float(p[k]) for k in ("xmin", "xmax", "ymin", "ymax")))
        if kind == "half-plane":
            return HalfPlane(_pt(p["normal"]), float(p.get("offset", 0.0)))
        if kind == "polygon":
            return Polygon(tuple(_pt(v) for v in p["vertices"]))
        if kind == "segment":
            return Segment(_pt(p["start"]), _pt(p["end"]), float(p["thickness"]))
        if kind == "circle":
            return Circle(_pt(p["center"]), float(p["radius"]), float(p["thickness"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise SchemaError(f"bad shape {d!r}: {exc}") from exc
    raise SchemaError(f"unknown shape kind {d.get('kind')!r}")


@dataclass(frozen=True)
class Scene:
    """Ordered list of ``(shape, op)`` with ``op`` in {"union", "difference"}."""
    items: tuple = ()

    def __post_init__(self):
        for _, op in self.items:
            if op not in ("union", "difference"):
                raise SchemaError(f"unknown op {op!r}")

    def union(self, shape) -> "Scene":
        return Scene(self.items + ((shape, "union"),))

    def difference(self, shape) -> "Scene":
        return Scene(self.items + ((shape, "difference"),))

    def to_list(self) -> list:
        return [{"kind": s.kind, "params": s.params(), "op": op} for s, op in self.items]

    @classmethod
    def from_list(cls, shapes: Iterable[dict]) -> "Scene":
        items = []
        for d in shapes:
            if not isinstance(d, dict):
                raise SchemaError(f"shape entry must be an object, got {d!r}")
            items.append((shape_from_dict(d), d.get("op", "union")))
        return cls(tuple(items))


# ---------------------------------------------------------------------------
# grid sets


@dataclass(frozen=True, eq=False)
class GridSet:
    window: Window
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != self.window.shape:
            raise ConfigurationError(
                f"mask shape {mask.shape} does not match window {self.window.shape}")
        mask = mask.copy()
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)

    @classmethod
    def empty(cls, window: Window) -> "GridSet":
        return cls(window, np.zeros(window.shape, dtype=bool))

    @classmethod
    def full(cls, window: Window) -> "GridSet":
        return cls(window, np.ones(window.shape, dtype=bool))

    def _check(self, other: "GridSet"):
        if other.window != self.window:
            raise ConfigurationError("grid sets live on different windows")

    def __or__(self, other: "GridSet") -> "GridSet":
        self._check(other)
        return GridSet(self.window, self.mask | other.mask)

    def __and__(self, other: "GridSet") -> "GridSet":
        self._check(other)
        return GridSet(self.window, self.mask & other.mask)

    def __sub__(self, other: "GridSet") -> "GridSet":
        self._check(other)
        return GridSet(self.window, self.mask & ~other.mask)

    def __invert__(self) -> "GridSet":
        return GridSet(self.window, ~self.mask)

    def __eq__(self, other):
        return (isinstance(other, GridSet) and other.window == self.window
                and np.array_equal(other.mask, self.mask))

    __hash__ = None

    def __contains__(self, z) -> bool:
        if not self.window.contains(z):
            return False
        i, j = self.window.index_of(z)
        return bool(self.mask[i, j])

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    @property
    def area(self) -> float:
        return self.count * self.window.h ** 2

    def points(self) -> np.ndarray:
        """Centres of the marked cells, raster order."""
        return self.window.centers()[self.mask]


def rasterize(scene: Scene, window: Window) -> GridSet:
    z = window.centers()
    mask = np.zeros(window.shape, dtype=bool)
    for shape, op in scene.items:
        t = getattr(shape, "thickness", None)
        if t is not None and t < 2 * window.h - 1e-12:
            raise ResolutionError(
                f"{shape.kind} thickness {t} is below 2h = {2 * window.h}")
        inside = shape.contains(z)
        if op == "union":
            mask |= inside
        else:
            mask &= ~inside
    return GridSet(window, mask)


def closed_disk(window: Window, radius: float, center: complex = 0j) -> GridSet:
    """Rasterized closed disk, the grid form of D̄_center(radius)."""
    return GridSet(window, Disk(_pt(center), radius).contains(window.centers()))


def distance_transform(s: GridSet) -> np.ndarray:
    """Per-cell distance to the nearest unmarked cell centre (0 on unmarked cells).

    Returns +inf everywhere when no cell is unmarked.
    """
    if s.mask.all():
        return np.full(s.window.shape, np.inf)
    return ndimage.distance_transform_edt(s.mask) * s.window.h


def dilate(s: GridSet, radius: float) -> GridSet:
    """Cells within Euclidean distance ``radius`` of some marked cell centre."""
    if radius < 0:
        raise ConfigurationError("dilation radius must be non-negative")
    if radius == 0 or not s.mask.any():
        return s
    d = ndimage.distance_transform_edt(~s.mask)
    return GridSet(s.window, d <= radius / s.window.h + 1e-9)


def border_mask(window: Window, width: int = 1) -> np.ndarray:
    """Cells whose index distance to the window edge is below ``width``."""
    m = np.zeros(window.shape, dtype=bool)
    w = max(1, int(width))
    m[:w, :] = m[-w:, :] = True
    m[:, :w] = m[:, -w:] = True
    return m


EDGE_OFFSETS = {4: ((0, 1), (1, 0)), 8: ((0, 1), (1, 0), (1, 1), (1, -1))}


def grid_edges(mask: np.ndarray, connectivity: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Undirected adjacencies between marked cells as flat-index pairs ``(a, b)``.

    Every edge appears once with ``a < b``; edges are sorted by ``a`` and then
    by direction (right, up, up-right, up-left), which is the canonical scan
    order used wherever a "first" edge is reported.
    """
    ny, nx = mask.shape
    idx = np.arange(ny * nx).reshape(ny, nx)
    a_parts, b_parts, d_parts = [], [], []
    for d, (di, dj) in enumerate(EDGE_OFFSETS[connectivity]):
        i0, i1 = 0, ny - di
        j0, j1 = max(0, -dj), nx - max(0, dj)
        src = mask[i0:i1, j0:j1] & mask[i0 + di:i1 + di, j0 + dj:j1 + dj]
        a = idx[i0:i1, j0:j1][src]
        a_parts.append(a)
        b_parts.append(a + di * nx + dj)
        d_parts.append(np.full(a.size, d))
    a = np.concatenate(a_parts)
    b = np.concatenate(b_parts)
    order = np.lexsort((np.concatenate(d_parts), a))
    return a[order], b[order]
