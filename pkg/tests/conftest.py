"""Shared fixtures and brute-force oracles.

The oracles here deliberately avoid the package's own labeling, distance and
winding code: plain breadth-first search, pairwise distances and direct
root counting.
"""

from __future__ import annotations

from collections import deque

import numpy as np
import pytest

from arakelian import Window

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


# ---------------------------------------------------------------------------
# oracles


def flood_fill(free: np.ndarray, diagonal: bool = False) -> np.ndarray:
    """Label connected True cells by breadth-first search (4- or 8-neighbourhood)."""
    steps = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    if diagonal:
        steps += [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    ny, nx = free.shape
    out = np.zeros(free.shape, dtype=int)
    nxt = 0
    for i0 in range(ny):
        for j0 in range(nx):
            if not free[i0, j0] or out[i0, j0]:
                continue
            nxt += 1
            out[i0, j0] = nxt
            q = deque([(i0, j0)])
            while q:
                i, j = q.popleft()
                for di, dj in steps:
                    a, b = i + di, j + dj
                    if 0 <= a < ny and 0 <= b < nx and free[a, b] and not out[a, b]:
                        out[a, b] = nxt
                        q.append((a, b))
    return out


def border_labels(labels: np.ndarray) -> set:
    edge = np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])
    return set(int(v) for v in edge if v)


def same_partition(a: np.ndarray, b: np.ndarray) -> bool:
    """True if two label arrays induce the same partition (0 = unlabeled in both)."""
    if not np.array_equal(a > 0, b > 0):
        return False
    pairs = set(zip(a[a > 0].tolist(), b[b > 0].tolist()))
    return (len(pairs) == len(set(p[0] for p in pairs)) == len(set(p[1] for p in pairs)))


def brute_distance(mask: np.ndarray, h: float) -> np.ndarray:
    """Distance from each cell centre to the nearest unmarked centre, all pairs."""
    ii, jj = np.indices(mask.shape)
    free = np.stack([ii[~mask], jj[~mask]], axis=1).astype(float)
    out = np.zeros(mask.shape)
    if free.size == 0:
        return np.full(mask.shape, np.inf)
    marked = np.stack([ii[mask], jj[mask]], axis=1).astype(float)
    for start in range(0, len(marked), 512):
        chunk = marked[start:start + 512]
        d2 = ((chunk[:, None, :] - free[None, :, :]) ** 2).sum(-1)
        out[tuple(chunk.astype(int).T)] = np.sqrt(d2.min(axis=1)) * h
    return out


def boundary_cells_oracle(mask: np.ndarray) -> np.ndarray:
    """Marked cells with an unmarked 8-neighbour or lying on the window edge."""
    ny, nx = mask.shape
    out = np.zeros_like(mask)
    for i in range(ny):
        for j in range(nx):
            if not mask[i, j]:
                continue
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    a, b = i + di, j + dj
                    if not (0 <= a < ny and 0 <= b < nx) or not mask[a, b]:
                        out[i, j] = True
    return out


def roots_inside_polygon(roots, poly: np.ndarray) -> int:
    """Even-odd ray casting count of roots inside a simple polygon."""
    count = 0
    x, y = poly.real, poly.imag
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    for r in roots:
        crosses = ((y > r.imag) != (y2 > r.imag)) & (
            r.real < x + (r.imag - y) * (x2 - x) / np.where(y2 == y, 1, y2 - y))
        count += int(np.count_nonzero(crosses) % 2)
    return count


@pytest.fixture
def small_window():
    return Window(-2.0, 2.0, -2.0, 2.0, 1 / 16)
