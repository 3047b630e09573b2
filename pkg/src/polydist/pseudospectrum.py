"""Pseudospectra ``{z : sigma_min(P(z)) <= eps}`` on rectangular grids, and
marching-squares level curves of the gridded values."""

import csv
from dataclasses import dataclass

import numpy as np

from .linalg_core import singular_values

__all__ = ["Region", "PseudospectrumGrid", "grid_sigma_min", "sigma_min_at", "contour_extract",
           "write_grid_csv", "read_grid_csv"]


@dataclass(frozen=True)
class Region:
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError(f"invalid region bounds {self}")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("region needs nx, ny >= 2")
        if not all(np.isfinite([self.xmin, self.xmax, self.ymin, self.ymax])):
            raise ValueError("region bounds must be finite")

    @property
    def xs(self):
        return np.linspace(self.xmin, self.xmax, self.nx)

    @property
    def ys(self):
        return np.linspace(self.ymin, self.ymax, self.ny)

    def contains(self, x, y):
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax


@dataclass(frozen=True)
class PseudospectrumGrid:
    """``values[i, j] = sigma_min(P(xs[i] + 1j * ys[j]))``."""

    region: Region
    values: np.ndarray

    def indicator(self, eps):
        return self.values <= eps


def sigma_min_at(P, z):
    """Smallest singular value of ``P(z)``; ``z`` scalar or array."""
    return singular_values(P.eval(z))[..., -1]


def grid_sigma_min(P, region):
    X, Y = np.meshgrid(region.xs, region.ys, indexing="ij")
    return PseudospectrumGrid(region=region, values=sigma_min_at(P, X + 1j * Y))


def write_grid_csv(grid, path):
    """Header ``x,y,sigma_min``; rows with y outer, x inner; 17 significant digits."""
    xs, ys = grid.region.xs, grid.region.ys
    with open(path, "w", newline="") as fh:
        fh.write("x,y,sigma_min\n")
        for j, y in enumerate(ys):
            for i, x in enumerate(xs):
                fh.write(f"{x:.17g},{y:.17g},{grid.values[i, j]:.17g}\n")


def read_grid_csv(path):
    """Rows of ``(x, y, sigma_min)`` as a float array."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["x", "y", "sigma_min"]:
        raise ValueError(f"unexpected CSV header {rows[0]}")
    return np.array([[float(v) for v in row] for row in rows[1:]])


# Cell corners counter-clockwise from (i, j); edge e joins corner e and e+1.
_CORNERS = ((0, 0), (1, 0), (1, 1), (0, 1))


def _edge_key(i, j, e):
    # canonical ids shared by neighbouring cells
    if e == 0:
        return ("h", i, j)
    if e == 1:
        return ("v", i + 1, j)
    if e == 2:
        return ("h", i, j + 1)
    return ("v", i, j)


def contour_extract(grid, eps):
    """Polylines where the gridded values cross ``eps``.

    Marching squares with linear interpolation along cell edges. Saddle
    cells are resolved by comparing the mean of the four corners against
    ``eps``. Closed curves repeat their first vertex at the end. Each
    polyline is an ``(k, 2)`` array of ``(x, y)``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    f = grid.values
    xs, ys = grid.region.xs, grid.region.ys
    nx, ny = f.shape
    inside = f < eps

    points = {}

    def point(key):
        if key not in points:
            kind, i, j = key
            if kind == "h":
                a, b = f[i, j], f[i + 1, j]
                t = (eps - a) / (b - a)
                points[key] = (xs[i] + t * (xs[i + 1] - xs[i]), ys[j])
            else:
                a, b = f[i, j], f[i, j + 1]
                t = (eps - a) / (b - a)
                points[key] = (xs[i], ys[j] + t * (ys[j + 1] - ys[j]))
        return points[key]

    adj = {}

    def link(a, b):
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    for i in range(nx - 1):
        for j in range(ny - 1):
            st = [bool(inside[i + di, j + dj]) for di, dj in _CORNERS]
            if all(st) or not any(st):
                continue
            crossing = [e for e in range(4) if st[e] != st[(e + 1) % 4]]
            keys = {e: _edge_key(i, j, e) for e in crossing}
            for e in crossing:
                point(keys[e])
            if len(crossing) == 2:
                link(keys[crossing[0]], keys[crossing[1]])
                continue
            center_inside = np.mean([f[i + di, j + dj] for di, dj in _CORNERS]) < eps
            # isolate the two corners whose state differs from the centre
            for c in range(4):
                if st[c] != center_inside:
                    link(keys[(c - 1) % 4], keys[c])

    lines = []
    visited = set()

    # every edge point has at most two neighbours: chains and cycles only
    def walk(start):
        path = [start]
        visited.add(start)
        cur = start
        while True:
            nxt = [k for k in adj[cur] if k not in visited]
            if not nxt:
                if len(path) > 2 and start in adj[cur]:
                    path.append(start)
                return path
            cur = nxt[0]
            path.append(cur)
            visited.add(cur)

    keys = sorted(adj)
    for k in keys:
        if k not in visited and len(adj[k]) == 1:
            lines.append(walk(k))
    for k in keys:
        if k not in visited:
            lines.append(walk(k))
    return [np.array([points[k] for k in path]) for path in lines]
