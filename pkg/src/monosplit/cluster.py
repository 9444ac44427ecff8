"""Density-based clustering over class encodings: DBSCAN, flat-kernel mean
shift and boosted mean shift (BMSC)."""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .model import HyperParams

log = logging.getLogger(__name__)

NOISE_LABEL = -1

# (row, col) offsets of each neighborhood structure, the cell itself included
_OFFSETS = {
    "linear5": [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)],
    "linear9": [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1),
                (-2, 0), (2, 0), (0, -2), (0, 2)],
    "compact9": [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1)],
    "compact13": [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1)]
    + [(-2, 0), (2, 0), (0, -2), (0, 2)],
}


@dataclass
class ClusterResult:
    labels: np.ndarray
    modes: np.ndarray | None = None
    iterations: int = 0
    converged: bool = True
    history: list[int] = field(default_factory=list)

    @property
    def n_clusters(self) -> int:
        return int(self.labels.max()) + 1 if len(self.labels) and self.labels.max() >= 0 else 0

    @property
    def n_noise(self) -> int:
        return int(np.sum(self.labels == NOISE_LABEL))


def _as_points(points) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    if p.ndim == 1:
        p = p[:, None]
    if not np.all(np.isfinite(p)):
        raise ValueError("points must be finite")
    return p


def pairwise_distances(a: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    b = a if b is None else b
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def relabel(labels) -> np.ndarray:
    """Renumber clusters 0.. in order of first appearance; noise stays -1."""
    mapping: dict[int, int] = {}
    out = np.full(len(labels), NOISE_LABEL, dtype=int)
    for i, lab in enumerate(labels):
        if lab < 0:
            continue
        out[i] = mapping.setdefault(int(lab), len(mapping))
    return out


def dbscan(points, eps: float, min_pts: int) -> ClusterResult:
    """Density-based clustering with Euclidean distance.

    A point is core when at least ``min_pts`` points (itself included) lie
    within ``eps``. Clusters grow from core points in index order, so a
    border point reachable from several clusters joins the lowest id.
    """
    if not eps > 0:
        raise ValueError("eps must be > 0")
    if min_pts < 1:
        raise ValueError("min_pts must be >= 1")
    p = _as_points(points)
    n = len(p)
    labels = np.full(n, NOISE_LABEL, dtype=int)
    if n == 0:
        return ClusterResult(labels)
    near = pairwise_distances(p) <= eps
    neighbors = [np.flatnonzero(row) for row in near]
    core = np.array([len(nb) >= min_pts for nb in neighbors])
    cluster = 0
    for i in range(n):
        if labels[i] != NOISE_LABEL or not core[i]:
            continue
        labels[i] = cluster
        queue = deque([i])
        while queue:
            q = queue.popleft()
            if not core[q]:
                continue
            for r in neighbors[q]:
                if labels[r] == NOISE_LABEL:
                    labels[r] = cluster
                    queue.append(r)
        cluster += 1
    return ClusterResult(labels)


def estimate_bandwidth(points) -> float:
    """Median of all pairwise Euclidean distances."""
    p = _as_points(points)
    n = len(p)
    if n < 2:
        raise ValueError("bandwidth estimation needs at least 2 distinct points")
    d = pairwise_distances(p)[np.triu_indices(n, k=1)]
    if not np.any(d > 0):
        raise ValueError("bandwidth estimation needs at least 2 distinct points")
    return float(np.median(d))


def mean_shift(points, bandwidth: float, tol: float = 1e-4,
               max_iter: int = 300) -> ClusterResult:
    """Flat-kernel mean shift seeded from every point.

    Each window moves to the mean of the points within ``bandwidth`` until
    it shifts less than ``tol * bandwidth``. Converged centers closer than
    ``bandwidth / 2`` merge (more populated window wins, then lower seed
    index); points take the label of their nearest mode.
    """
    if not bandwidth > 0:
        raise ValueError("bandwidth must be > 0")
    p = _as_points(points)
    n = len(p)
    if n == 0:
        return ClusterResult(np.zeros(0, dtype=int), np.zeros((0, p.shape[1])))
    centers = np.empty_like(p)
    population = np.zeros(n, dtype=int)
    iterations = 0
    for s in range(n):
        c = p[s].copy()
        for it in range(1, max_iter + 1):
            inside = np.sqrt(((p - c) ** 2).sum(axis=1)) <= bandwidth
            new = p[inside].mean(axis=0)
            shift = np.sqrt(((new - c) ** 2).sum())
            c = new
            if shift < tol * bandwidth:
                break
        iterations = max(iterations, it)
        centers[s] = c
        population[s] = int(inside.sum())
    order = sorted(range(n), key=lambda s: (-population[s], s))
    kept: list[int] = []
    for s in order:
        if all(np.sqrt(((centers[s] - centers[k]) ** 2).sum()) >= bandwidth / 2 for k in kept):
            kept.append(s)
    modes = centers[kept]
    labels = np.argmin(pairwise_distances(p, modes), axis=1)
    return ClusterResult(labels.astype(int), modes, iterations)


def neighborhood(cell: tuple[int, int], structure: str, rows: int, cols: int) -> list[tuple[int, int]]:
    """Cells around ``cell`` under a neighborhood structure, clipped at the borders."""
    try:
        offsets = _OFFSETS[structure]
    except KeyError:
        raise ValueError(f"unknown neighborhood structure {structure!r}") from None
    r, c = cell
    return [(r + dr, c + dc) for dr, dc in offsets
            if 0 <= r + dr < rows and 0 <= c + dc < cols]


@dataclass
class Grid:
    rows: int
    cols: int
    structure: str
    cells: list[list[int]]

    @classmethod
    def distribute(cls, n: int, rows: int, cols: int, structure: str, rng) -> "Grid":
        """Shuffle point indices and deal them round-robin into the cells."""
        k = rows * cols
        perm = rng.permutation(n)
        cells = [sorted(int(i) for i in perm[c::k]) for c in range(k)]
        return cls(rows, cols, structure, cells)

    def coords(self, k: int) -> tuple[int, int]:
        return divmod(k, self.cols)

    def neighbors(self, k: int) -> list[int]:
        return [r * self.cols + c for r, c in
                neighborhood(self.coords(k), self.structure, self.rows, self.cols)]


def _cell_modes(p: np.ndarray, members: list[int], bandwidth: float | None,
                fallback: float) -> np.ndarray:
    sub = p[members]
    bw = bandwidth
    if bw is None:
        try:
            bw = estimate_bandwidth(sub)
        except ValueError:
            bw = fallback
    return mean_shift(sub, bw).modes


def _resample(grid: Grid, p: np.ndarray, cell_modes: list[np.ndarray]) -> list[list[int]]:
    """Refill every cell, keeping its size, with the closest points to its
    iModes drawn from its own and neighboring cells.

    Runs as one greedy capacitated assignment over (distance, point, cell)
    so the cells stay a partition of the points.
    """
    k = len(grid.cells)
    capacity = [len(members) for members in grid.cells]
    owner = {i: c for c, members in enumerate(grid.cells) for i in members}
    dist_to = []
    for c in range(k):
        if len(cell_modes[c]):
            dist_to.append(pairwise_distances(p, cell_modes[c]).min(axis=1))
        else:
            dist_to.append(np.full(len(p), np.inf))
    candidates = []
    for c in range(k):
        if not capacity[c]:
            continue
        pool = [i for nb in grid.neighbors(c) for i in grid.cells[nb]]
        candidates.extend((dist_to[c][i], i, c) for i in pool)
    candidates.sort()
    new = [[] for _ in range(k)]
    placed = set()
    for _, i, c in candidates:
        if i not in placed and len(new[c]) < capacity[c]:
            new[c].append(i)
            placed.add(i)
    # points no reachable cell had room for go to the nearest cell with room
    for i in sorted(set(owner) - placed):
        open_cells = [c for c in range(k) if len(new[c]) < capacity[c]]
        c = min(open_cells, key=lambda c: (dist_to[c][i], c))
        new[c].append(i)
    return [sorted(members) for members in new]


def bmsc(points, params: HyperParams | None = None) -> ClusterResult:
    """Boosted mean shift clustering.

    Points are dealt into a grid; each round runs mean shift per cell to get
    intermediate modes (iModes), resamples the cells around those modes,
    groups the iModes with DBSCAN and labels each point by its nearest
    iMode. Stops once the cluster count is unchanged for three consecutive
    rounds, or after ``params.max_bmsc_iters`` rounds.
    """
    params = params or HyperParams()
    p = _as_points(points)
    n = len(p)
    if n == 0:
        raise ValueError("bmsc needs at least one point")
    k = params.grid_rows * params.grid_cols
    if k > n:
        log.warning("grid has %d cells for %d points; some cells stay empty", k, n)
    rng = np.random.default_rng(params.seed % 2**64)
    grid = Grid.distribute(n, params.grid_rows, params.grid_cols, params.neighborhood, rng)
    try:
        fallback = estimate_bandwidth(p)
    except ValueError:
        fallback = 1.0
    history: list[int] = []
    labels = np.zeros(n, dtype=int)
    imodes = p[:0]
    converged = False
    for _ in range(params.max_bmsc_iters):
        cell_modes = [
            _cell_modes(p, members, params.bandwidth, fallback) if members
            else np.zeros((0, p.shape[1]))
            for members in grid.cells
        ]
        grid.cells = _resample(grid, p, cell_modes)
        imodes = np.vstack(cell_modes)
        mode_labels = dbscan(imodes, params.eps, params.min_pts_imodes).labels
        nearest = np.argmin(pairwise_distances(p, imodes), axis=1)
        labels = relabel(mode_labels[nearest])
        history.append(int(labels.max()) + 1 if labels.max() >= 0 else 0)
        if len(history) >= 3 and len(set(history[-3:])) == 1:
            converged = True
            break
    return ClusterResult(labels, imodes, len(history), converged, history)


def cluster_points(points, algorithm: str, params: HyperParams) -> ClusterResult:
    if algorithm == "dbscan":
        return dbscan(points, params.eps, params.min_pts)
    if algorithm == "meanshift":
        bw = params.bandwidth
        if bw is None:
            try:
                bw = estimate_bandwidth(points)
            except ValueError:
                bw = 1.0
        return mean_shift(points, bw)
    if algorithm == "bmsc":
        return bmsc(points, params)
    raise ValueError(f"unknown point clustering algorithm {algorithm!r}")
