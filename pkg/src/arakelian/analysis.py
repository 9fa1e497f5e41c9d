"""Holomorphic test functions, winding numbers and logarithm branches.

Every function object evaluates to ``(value, derivative)`` on scalars or
numpy arrays. Logarithm branches are stored as ``log|f| + i(Arg f + 2πk)``
with an integer branch index ``k`` per sample, so ``exp(g) = f`` holds to
rounding and all branch bookkeeping is integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import (ConstructionError, DomainError, NonconvergenceError, PolicyError,
                     ScaledRepresentationError, SchemaError, ZeroOnContourError)
from .geometry import GridSet, dilate, grid_edges
from .topology import PolyPath, components

TOL_ZERO = 1e-12
PHASE_STEP = math.pi / 2
MAX_POINTS = 1 << 21
_LOG_MAX = 700.0

TWO_PI = 2 * math.pi


def _c(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _pair(z: complex) -> list:
    return [z.real, z.imag]


def _prefix_suffix(vals: np.ndarray):
    """Products of all entries before / after each index along the last axis."""
    ones = np.ones(vals.shape[:-1] + (1,), dtype=complex)
    pre = np.cumprod(np.concatenate([ones, vals[..., :-1]], axis=-1), axis=-1)
    suf = np.cumprod(np.concatenate([ones, vals[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
    return pre, suf


class AnalyticFn:
    kind = "abstract"

    def evaluate(self, z):
        raise NotImplementedError

    def __call__(self, z):
        return self.evaluate(z)

    def value(self, z):
        return self.evaluate(z)[0]

    def to_dict(self) -> dict:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class LinearFactor(AnalyticFn):
    zeta: complex
    kind = "linear"

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        return z - self.zeta, np.ones_like(z)

    def to_dict(self):
        return {"kind": self.kind, "params": {"zeta": _pair(self.zeta)}, "children": []}

    def describe(self):
        return f"z - ({self.zeta.real:.6g}{self.zeta.imag:+.6g}j)"


@dataclass(frozen=True)
class Polynomial(AnalyticFn):
    """Coefficients in ascending powers: ``coeffs[k]`` multiplies ``z**k``."""
    coeffs: tuple
    kind = "polynomial"

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise DomainError("polynomial needs at least one coefficient")

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lead: complex = 1.0) -> "Polynomial":
        c = np.polynomial.polynomial.polyfromroots(list(roots)) * lead
        return cls(tuple(complex(x) for x in c))

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        c = np.asarray(self.coeffs, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            v = np.polynomial.polynomial.polyval(z, c)
            d = np.polynomial.polynomial.polyval(z, np.polynomial.polynomial.polyder(c))
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(d))):
            raise ScaledRepresentationError("polynomial evaluation overflowed")
        return v, d

    def to_dict(self):
        return {"kind": self.kind, "params": {"coeffs": [_pair(c) for c in self.coeffs]},
                "children": []}

    def describe(self):
        return f"polynomial of degree {len(self.coeffs) - 1}"


@dataclass(frozen=True)
class WeierstrassProduct(AnalyticFn):
    """Finite product of elementary factors E_p(z/ζ) = (1 - w) exp(w + w²/2 + ... + w^p/p)."""
    zeros: tuple
    genera: tuple
    eval_radius: Optional[float] = None
    tail_bound: float = 0.0
    kind = "weierstrass"

    def __post_init__(self):
        if not self.zeros:
            raise DomainError("Weierstrass product needs at least one zero")
        if len(self.genera) != len(self.zeros):
            raise DomainError("one genus per zero is required")
        if any(p < 0 for p in self.genera):
            raise DomainError("genera must be non-negative")
        if len(set(self.zeros)) != len(self.zeros):
            raise DomainError("zeros must be distinct")
        if any(zeta == 0 for zeta in self.zeros):
            raise DomainError("a zero at the origin is not an elementary factor")

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        zeros = np.asarray(self.zeros, dtype=complex)
        w = z[..., None] / zeros
        expo = np.zeros_like(w)
        wp = np.ones_like(w)
        gen = np.asarray(self.genera)
        for k in range(1, int(gen.max()) + 1):
            wp = wp * w
            expo = expo + np.where(gen >= k, wp / k, 0)
        wpow = w ** gen
        with np.errstate(divide="ignore"):
            logmag = np.log(np.abs(1 - w)).sum(axis=-1) + expo.real.sum(axis=-1)
        if np.any(logmag > _LOG_MAX) or np.any(np.abs(expo.real) > _LOG_MAX):
            raise ScaledRepresentationError(
                f"Weierstrass product magnitude exceeds e^{_LOG_MAX:.0f} "
                f"(max log|f| = {float(np.max(logmag)):.4g})")
        e = np.exp(expo)
        factors = (1 - w) * e
        dfactors = -wpow * e / zeros
        pre, suf = _prefix_suffix(factors)
        value = pre[..., -1] * factors[..., -1]
        deriv = (dfactors * pre * suf).sum(axis=-1)
        return value, deriv

    def to_dict(self):
        params = {"zeros": [_pair(z) for z in self.zeros], "genera": list(self.genera)}
        if self.eval_radius is not None:
            params["evalRadius"] = self.eval_radius
            params["tailBound"] = self.tail_bound
        return {"kind": self.kind, "params": params, "children": []}

    def describe(self):
        return f"Weierstrass product with {len(self.zeros)} zeros, genera {list(self.genera)}"


@dataclass(frozen=True)
class Product(AnalyticFn):
    factors: tuple
    kind = "product"

    def __post_init__(self):
        if not self.factors:
            raise DomainError("product needs at least one factor")

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        vals, ders = zip(*(f.evaluate(z) for f in self.factors))
        v = np.stack(vals, axis=-1)
        d = np.stack(ders, axis=-1)
        pre, suf = _prefix_suffix(v)
        value = pre[..., -1] * v[..., -1]
        with np.errstate(over="ignore", invalid="ignore"):
            deriv = (d * pre * suf).sum(axis=-1)
        if not (np.all(np.isfinite(value)) and np.all(np.isfinite(deriv))):
            raise ScaledRepresentationError("product evaluation overflowed")
        return value, deriv

    def to_dict(self):
        return {"kind": self.kind, "params": {}, "children": [f.to_dict() for f in self.factors]}

    def describe(self):
        return " * ".join(f"({f.describe()})" for f in self.factors)


@dataclass(frozen=True)
class ExpOf(AnalyticFn):
    inner: AnalyticFn
    kind = "exp"

    def evaluate(self, z):
        v, d = self.inner.evaluate(z)
        if np.any(np.real(v) > _LOG_MAX):
            raise ScaledRepresentationError("exp argument too large to represent")
        e = np.exp(v)
        return e, e * d

    def to_dict(self):
        return {"kind": self.kind, "params": {}, "children": [self.inner.to_dict()]}

    def describe(self):
        return f"exp({self.inner.describe()})"


def evaluate(f: AnalyticFn, z):
    """Value and derivative of ``f`` at ``z`` (scalar or array)."""
    v, d = f.evaluate(z)
    if np.ndim(v) == 0:
        return complex(v), complex(d)
    return v, d


def fn_from_dict(d: dict) -> AnalyticFn:
    if not isinstance(d, dict) or "kind" not in d:
        raise SchemaError(f"function spec must be an object with a kind: {d!r}")
    kind = d["kind"]
    p = d.get("params", {}) or {}
    children = [fn_from_dict(c) for c in d.get("children", []) or []]
    try:
        if kind == "linear":
            return LinearFactor(_c(p["zeta"]))
        if kind == "polynomial":
            return Polynomial(tuple(_c(c) for c in p["coeffs"]))
        if kind == "weierstrass":
            zeros = [_c(z) for z in p["zeros"]]
            if "genera" in p:
                return WeierstrassProduct(tuple(zeros), tuple(int(g) for g in p["genera"]),
                                          p.get("evalRadius"), float(p.get("tailBound", 0.0)))
            return weierstrass_build(zeros, float(p["evalRadius"]))
        if kind == "product":
            return Product(tuple(children))
        if kind == "exp":
            if len(children) != 1:
                raise SchemaError("exp takes exactly one child")
            return ExpOf(children[0])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (SchemaError, DomainError)):
            raise
        raise SchemaError(f"bad {kind} spec: {exc}") from exc
    raise SchemaError(f"unknown function kind {kind!r}")


# ---------------------------------------------------------------------------
# Weierstrass construction


def far_genus(zeta: complex, n: int, eval_radius: float) -> int:
    """Smallest p with (R/|ζ_n|)^(p+1) <= 2^-n, for a zero beyond the radius R."""
    r = abs(zeta)
    if r <= eval_radius:
        raise PolicyError(
            f"zero {zeta} has modulus {r:.4g} <= evalRadius {eval_radius}; not a far zero")
    q = eval_radius / r
    if q == 0:
        return 0
    p = max(0, math.ceil(n * math.log(2) / -math.log(q) - 1 - 1e-12))
    while q ** (p + 1) > 2.0 ** -n:
        p += 1
    return p


def weierstrass_build(zeros: Sequence[complex], eval_radius: float) -> WeierstrassProduct:
    """Entire function with simple zeros exactly at ``zeros``.

    Zeros beyond ``eval_radius`` get the smallest genus making their log-factor
    summable on |z| <= eval_radius with weight 2^-n; the certified bound
    sum |w|^(p+1)/(1-|w|) is stored as ``tail_bound``. Zeros inside the
    radius keep genus 0: their factors are evaluated exactly.
    """
    zeros = [complex(z) for z in zeros]
    if not zeros:
        raise DomainError("empty zero list")
    if len(set(zeros)) != len(zeros):
        raise DomainError("zeros must be distinct")
    if any(z == 0 for z in zeros):
        raise DomainError("zero at the origin is not supported")
    mods = [abs(z) for z in zeros]
    if any(b < a for a, b in zip(mods, mods[1:])):
        raise DomainError("zeros must be sorted by non-decreasing modulus")
    genera = []
    tail = 0.0
    for n, z in enumerate(zeros, start=1):
        if abs(z) > eval_radius:
            p = far_genus(z, n, eval_radius)
            q = eval_radius / abs(z)
            tail += q ** (p + 1) / (1 - q)
        else:
            p = 0
        genera.append(p)
    return WeierstrassProduct(tuple(zeros), tuple(genera), float(eval_radius), tail)


# ---------------------------------------------------------------------------
# winding numbers


@dataclass
class WindingResult:
    winding: int
    arg_turns: float
    integral_turns: complex
    samples: int

    @property
    def integrality_error(self) -> float:
        return abs(self.integral_turns - self.winding)


def _check_zero(v, scale, tol_zero, what="contour"):
    if np.any(np.abs(v) <= tol_zero * scale):
        raise ZeroOnContourError(f"|f| falls below tolZero*scale on the {what}")


def winding_many(f: AnalyticFn, cycles: Sequence[PolyPath], tol_zero: float = TOL_ZERO,
                 integral_tol: float = 1e-7, max_points: int = MAX_POINTS) -> list[WindingResult]:
    """Winding numbers of f along several closed paths, refined together.

    Segments are bisected until both half-step argument increments and the
    linearized change |dz|·|f'/f| are below π/2 and the error estimate of the halved trapezoid rule meets the
    per-length share of ``integral_tol`` (in turns); the accepted integral
    is the Richardson-extrapolated trapezoid sum. The argument count and the
    integral must agree to 1e-6.
    """
    za, zb, owner, lengths, scales = [], [], [], [], []
    for c, gamma in enumerate(cycles):
        if not gamma.closed:
            raise DomainError("winding number needs a closed path")
        v = gamma.vertices()
        za.append(v[:-1])
        zb.append(v[1:])
        owner.append(np.full(v.size - 1, c))
        lengths.append(max(gamma.length, 1e-300))
    if not za:
        return []
    za, zb, owner = np.concatenate(za), np.concatenate(zb), np.concatenate(owner)
    lengths = np.asarray(lengths)
    fa, da = f.evaluate(za)
    fb, db = f.evaluate(zb)
    scales = np.zeros(len(cycles))
    np.maximum.at(scales, owner, np.abs(fa))
    if not np.all(scales > 0):
        raise ZeroOnContourError("f vanishes on the contour")
    _check_zero(fa / scales[owner], 1.0, tol_zero)
    tol = integral_tol * TWO_PI

    arg_sum = np.zeros(len(cycles))
    integral = np.zeros(len(cycles), dtype=complex)
    used = 2 * za.size
    while za.size:
        zm = 0.5 * (za + zb)
        fm, dm = f.evaluate(zm)
        _check_zero(fm / scales[owner], 1.0, tol_zero)
        used += zm.size
        dz = zb - za
        qa, qm, qb = da / fa, dm / fm, db / fb
        t1 = 0.5 * dz * (qa + qb)
        t2 = 0.25 * dz * (qa + 2 * qm + qb)
        i1 = np.angle(fm / fa)
        i2 = np.angle(fb / fm)
        lin = 0.5 * np.abs(dz) * np.maximum(np.maximum(np.abs(qa), np.abs(qb)), np.abs(qm))
        ok = ((np.abs(i1) < PHASE_STEP) & (np.abs(i2) < PHASE_STEP) & (lin < PHASE_STEP)
              & (np.abs(t2 - t1) <= 3 * tol * np.abs(dz) / lengths[owner]))
        np.add.at(arg_sum, owner[ok], i1[ok] + i2[ok])
        np.add.at(integral, owner[ok], (4 * t2[ok] - t1[ok]) / 3)
        bad = ~ok
        if not bad.any():
            break
        if used > max_points * max(1, len(cycles)):
            raise NonconvergenceError(f"winding refinement exceeded {max_points} samples")
        za = np.concatenate([za[bad], zm[bad]])
        zb = np.concatenate([zm[bad], zb[bad]])
        fa = np.concatenate([fa[bad], fm[bad]])
        fb = np.concatenate([fm[bad], fb[bad]])
        da = np.concatenate([da[bad], dm[bad]])
        db = np.concatenate([dm[bad], db[bad]])
        owner = np.concatenate([owner[bad], owner[bad]])

    out = []
    for c in range(len(cycles)):
        turns = float(arg_sum[c] / TWO_PI)
        n = int(round(turns))
        estimate = complex(integral[c] / (TWO_PI * 1j))
        if abs(estimate - n) >= 1e-6:
            raise NonconvergenceError(
                f"argument count {n} and contour integral {estimate:.8g} disagree")
        out.append(WindingResult(n, turns, estimate, used))
    return out


def winding_details(f: AnalyticFn, gamma: PolyPath, tol_zero: float = TOL_ZERO,
                    integral_tol: float = 1e-7, max_points: int = MAX_POINTS) -> WindingResult:
    """Winding of f along a closed path, by argument increments and by the integral of f'/f."""
    return winding_many(f, [gamma], tol_zero, integral_tol, max_points)[0]


def winding_number(f: AnalyticFn, gamma: PolyPath, tol_zero: float = TOL_ZERO) -> int:
    return winding_details(f, gamma, tol_zero).winding


# ---------------------------------------------------------------------------
# logarithms along paths


def refine_phase(f: AnalyticFn, pts: np.ndarray, max_step: float = PHASE_STEP,
                 tol_zero: float = TOL_ZERO, max_points: int = MAX_POINTS):
    """Insert midpoints until every step has a small argument change.

    A step is accepted when its principal argument increment is below
    ``max_step`` and the linearized change |dz|·|f'/f| at both ends is too;
    the second test stops coarse samples from skipping whole turns.
    """
    z = np.asarray(pts, dtype=complex)
    vals, der = f.evaluate(z)
    scale = float(np.max(np.abs(vals)))
    if not scale > 0:
        raise ZeroOnContourError("f vanishes on the path")
    _check_zero(vals, scale, tol_zero, "path")
    while True:
        inc = np.angle(vals[1:] / vals[:-1])
        q = np.abs(der / vals)
        lin = np.abs(np.diff(z)) * np.maximum(q[1:], q[:-1])
        bad = np.flatnonzero((np.abs(inc) >= max_step) | (lin >= max_step))
        if bad.size == 0:
            return z, vals, inc
        if z.size + bad.size > max_points:
            raise NonconvergenceError(f"phase refinement exceeded {max_points} samples")
        mid = 0.5 * (z[bad] + z[bad + 1])
        mv, md = f.evaluate(mid)
        _check_zero(mv, scale, tol_zero, "path")
        z = np.insert(z, bad + 1, mid)
        vals = np.insert(vals, bad + 1, mv)
        der = np.insert(der, bad + 1, md)


@dataclass
class LogPath:
    path: PolyPath
    z: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)
    max_residual: float
    closing_jump: Optional[complex] = None

    @property
    def total_phase(self) -> float:
        return float(self.g[-1].imag - self.g[0].imag)

    def to_dict(self) -> dict:
        return {"samples": int(self.z.size), "maxResidual": self.max_residual,
                "start": _pair(complex(self.g[0])), "end": _pair(complex(self.g[-1])),
                "closingJump": None if self.closing_jump is None else _pair(self.closing_jump)}


def _residual(g, vals) -> float:
    return float(np.max(np.abs(np.exp(g) - vals) / np.abs(vals)))


def log_on_path(f: AnalyticFn, path: PolyPath, basepoint_log: Optional[complex] = None,
                tol_zero: float = TOL_ZERO, max_step: float = PHASE_STEP) -> LogPath:
    """Continue a branch of log f along the path from its first vertex.

    For a closed path the samples run back to the first vertex and the
    difference of the two end values is reported as ``closing_jump``
    (2πi times the winding number).
    """
    z, vals, inc = refine_phase(f, path.vertices(), max_step, tol_zero)
    v0 = vals[0]
    if basepoint_log is None:
        phase0 = float(np.angle(v0))
    else:
        b = complex(basepoint_log)
        if abs(np.exp(b) - v0) > 1e-9 * abs(v0):
            raise DomainError("basepoint log is not a logarithm of f at the first vertex")
        phase0 = b.imag
    phase = phase0 + np.concatenate([[0.0], np.cumsum(inc)])
    g = np.log(np.abs(vals)) + 1j * phase
    if basepoint_log is not None:
        g[0] = complex(basepoint_log)
    jump = complex(g[-1] - g[0]) if path.closed else None
    return LogPath(path, z, g, _residual(g, vals), jump)


def segment_phase(f: AnalyticFn, a: complex, b: complex, tol_zero: float = TOL_ZERO) -> float:
    """Continuous change of arg f along the straight segment from a to b."""
    _, _, inc = refine_phase(f, np.array([a, b]), PHASE_STEP, tol_zero)
    return float(inc.sum())


# ---------------------------------------------------------------------------
# logarithms on grid sets


@dataclass
class LogGrid:
    domain: GridSet
    g: np.ndarray = field(repr=False)
    max_residual: float
    shifts: tuple = ()

    def at(self, z: complex) -> complex:
        i, j = self.domain.window.index_of(z)
        return complex(self.g[i, j])

    def max_adjacent_jump(self) -> float:
        a, b = grid_edges(self.domain.mask, 8)
        if a.size == 0:
            return 0.0
        gi = self.g.ravel().imag
        return float(np.max(np.abs(gi[b] - gi[a])))

    def to_dict(self) -> dict:
        return {"cells": self.domain.count, "maxResidual": self.max_residual,
                "maxAdjacentPhaseJump": self.max_adjacent_jump(),
                "shifts": [list(s) for s in self.shifts]}


@dataclass
class Obstruction:
    cycle: PolyPath
    winding: int
    hole_label: Optional[int]
    edge: tuple

    def to_dict(self) -> dict:
        return {"winding": self.winding, "holeLabel": self.hole_label,
                "cycleLength": len(self.cycle), "edge": [list(p) for p in self.edge],
                "cycle": self.cycle.to_list()}


def edge_branch_steps(f: AnalyticFn, z: np.ndarray, vals: np.ndarray, a: np.ndarray,
                      b: np.ndarray, tol_zero: float = TOL_ZERO) -> np.ndarray:
    """Integer m with (continuous arg change along a→b) = Arg f(b) - Arg f(a) + 2πm."""
    direct = np.angle(vals[b] / vals[a])
    arg = np.angle(vals)
    steps = np.rint((direct - (arg[b] - arg[a])) / TWO_PI).astype(np.int64)
    q = np.abs(f.evaluate(z)[1] / vals)
    lin = np.abs(z[b] - z[a]) * np.maximum(q[a], q[b])
    for e in np.flatnonzero((np.abs(direct) >= PHASE_STEP) | (lin >= PHASE_STEP)):
        inc = segment_phase(f, z[a[e]], z[b[e]], tol_zero)
        steps[e] = int(round((inc - (arg[b[e]] - arg[a[e]])) / TWO_PI))
    return steps


def _grid_values(f: AnalyticFn, s: GridSet, tol_zero: float):
    cells = np.flatnonzero(s.mask)
    z = s.window.centers().ravel()[cells]
    vals = f.evaluate(z)[0]
    scale = float(np.max(np.abs(vals))) if vals.size else 1.0
    bad = np.abs(vals) <= tol_zero * scale
    if np.any(bad):
        raise ConstructionError(
            f"f nearly vanishes on the set at {z[bad][0]} (|f| <= tolZero*scale)")
    return cells, z, vals


def log_on_set(f: AnalyticFn, s: GridSet, basepoint_log: Optional[complex] = None,
               tol_zero: float = TOL_ZERO) -> Union[LogGrid, Obstruction]:
    """Build a continuous branch of log f on the 8-connected grid set, or explain why none exists.

    Branches are propagated along a breadth-first spanning forest rooted at
    the first cell (raster order) of each component; every non-tree
    adjacency is then checked. The first inconsistent adjacency in scan
    order closes a tree cycle that is returned as the obstruction,
    oriented so that its winding number is positive.
    """
    w = s.window
    if not s.mask.any():
        return LogGrid(s, np.full(w.shape, np.nan + 0j), 0.0)
    cells, z, vals = _grid_values(f, s, tol_zero)
    pos = np.full(s.mask.size, -1, dtype=np.int64)
    pos[cells] = np.arange(cells.size)
    ea, eb = grid_edges(s.mask, 8)
    a, b = pos[ea], pos[eb]
    m = edge_branch_steps(f, z, vals, a, b, tol_zero)

    n = cells.size
    adj = sparse.coo_matrix((np.ones(a.size), (a, b)), shape=(n, n)).tocsr()
    ncomp, comp = csgraph.connected_components(adj, directed=False)
    _, roots = np.unique(comp, return_index=True)
    roots = np.sort(roots)
    # a virtual super-root joins the forest into one breadth-first search
    sup = n
    rows = np.concatenate([a, np.full(roots.size, sup)])
    cols = np.concatenate([b, roots])
    eid = np.concatenate([np.arange(1, a.size + 1), np.zeros(roots.size, dtype=int)])
    graph = sparse.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n + 1, n + 1)).tocsr()
    order, pred = csgraph.breadth_first_order(graph, sup, directed=False,
                                              return_predecessors=True)
    edge_id = sparse.coo_matrix((eid.astype(float) + 0.0, (rows, cols)),
                                shape=(n + 1, n + 1)).tocsr()
    edge_id = edge_id + edge_id.T

    k = np.zeros(n + 1, dtype=np.int64)
    arg = np.angle(vals)
    if basepoint_log is not None:
        r0 = roots[0]
        bp = complex(basepoint_log)
        if abs(np.exp(bp) - vals[r0]) > 1e-9 * abs(vals[r0]):
            raise DomainError("basepoint log is not a logarithm of f at the basepoint cell")
        k[r0] = int(round((bp.imag - arg[r0]) / TWO_PI))

    nodes = order[1:]
    parents = pred[nodes]
    tree_eid = np.asarray(edge_id[parents, nodes]).ravel().astype(np.int64) - 1
    step = np.zeros(nodes.size, dtype=np.int64)
    real_edge = tree_eid >= 0
    te = tree_eid[real_edge]
    sign = np.where(a[te] == parents[real_edge], 1, -1)
    step[real_edge] = sign * m[te]
    kl = k.tolist()
    for v, p, st in zip(nodes.tolist(), parents.tolist(), step.tolist()):
        if p != sup:
            kl[v] = kl[p] + st
    k = np.asarray(kl[:n], dtype=np.int64)

    disc = k[b] - k[a] - m
    bad = np.flatnonzero(disc != 0)
    if bad.size == 0:
        g = np.full(w.shape, np.nan + 0j)
        gv = np.log(np.abs(vals)) + 1j * (arg + TWO_PI * k)
        if basepoint_log is not None:
            gv[roots[0]] = complex(basepoint_log)
        g.ravel()[cells] = gv
        return LogGrid(s, g, _residual(gv, vals))

    e = int(bad[0])
    ia, ib = int(a[e]), int(b[e])

    def to_root(v):
        out = [v]
        while pred[out[-1]] != sup:
            out.append(int(pred[out[-1]]))
        return out

    pa, pb = to_root(ia), to_root(ib)
    common = set(pa) & set(pb)
    pa = pa[: next(i for i, v in enumerate(pa) if v in common) + 1]
    pb = pb[: next(i for i, v in enumerate(pb) if v in common)]
    nodes_cycle = pa[::-1] + pb
    winding = int(-disc[e])
    cycle = PolyPath(z[nodes_cycle], closed=True)
    if winding < 0:
        cycle = cycle.reversed()
        winding = -winding

    hole_label = None
    for r in components(s).holes:
        if cycle.index_around(r.representative) != 0:
            hole_label = r.label
            break
    edge = (divmod(int(cells[ia]), w.nx), divmod(int(cells[ib]), w.nx))
    return Obstruction(cycle, winding, hole_label, edge)


def extend_log(f: AnalyticFn, log: LogGrid, source: GridSet, radius: float,
               tol_zero: float = TOL_ZERO) -> tuple[LogGrid, int]:
    """Carry the branch of ``log`` on ``source`` to every cell within ``radius`` of it.

    Each new cell takes the argument branch closest to the value at its
    nearest source cell. Returns the extended grid and the number of
    adjacencies in the extended domain where the branches disagree (0
    means the extension is a single-valued continuous branch).
    """
    from scipy import ndimage

    if not np.all(log.domain.mask[source.mask]):
        raise DomainError("source cells must lie in the domain of the given branch")
    w = source.window
    target = dilate(source, radius)
    _, (ni, nj) = ndimage.distance_transform_edt(~source.mask, return_indices=True)
    cells, z, vals = _grid_values(f, target, tol_zero)
    near = log.g[ni.ravel()[cells], nj.ravel()[cells]].imag
    arg = np.angle(vals)
    k = np.rint((near - arg) / TWO_PI).astype(np.int64)
    src = source.mask.ravel()[cells]
    k[src] = np.rint((log.g.ravel()[cells[src]].imag - arg[src]) / TWO_PI).astype(np.int64)
    gv = np.log(np.abs(vals)) + 1j * (arg + TWO_PI * k)
    gv[src] = log.g.ravel()[cells[src]]

    pos = np.full(target.mask.size, -1, dtype=np.int64)
    pos[cells] = np.arange(cells.size)
    ea, eb = grid_edges(target.mask, 8)
    a, b = pos[ea], pos[eb]
    m = edge_branch_steps(f, z, vals, a, b, tol_zero)
    conflicts = int(np.count_nonzero(k[b] - k[a] - m))
    g = np.full(w.shape, np.nan + 0j)
    g.ravel()[cells] = gv
    return LogGrid(target, g, _residual(gv, vals)), conflicts
