"""Weighted class-similarity graphs and community detection."""
from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import networkx as nx

from .model import NOISE, Decomposition, InputError, SimilarityMatrix


@dataclass(frozen=True)
class SimilarityGraph:
    """Undirected graph over classes; ``edges`` maps (i, j), i < j, to weight."""

    names: tuple[str, ...]
    edges: dict

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def total_weight(self) -> float:
        return sum(self.edges.values())

    def adjacency(self) -> list[dict[int, float]]:
        adj: list[dict[int, float]] = [{} for _ in self.names]
        for (i, j), w in self.edges.items():
            adj[i][j] = w
            adj[j][i] = w
        return adj

    def sorted_edges(self) -> list[tuple[int, int, float]]:
        return [(i, j, self.edges[i, j]) for i, j in sorted(self.edges)]


def build_graph(cs: SimilarityMatrix, threshold: float = 0.0) -> SimilarityGraph:
    """Keep every pair whose similarity is strictly above ``threshold``."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    n = cs.n
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            w = float(cs.sim[i, j])
            if w > threshold:
                edges[i, j] = w
    return SimilarityGraph(cs.names, edges)


def _communities(g: SimilarityGraph, d: Decomposition) -> list[list[int]]:
    index = {name: i for i, name in enumerate(g.names)}
    out = []
    seen = set()
    for members in d.scored.values():
        comm = []
        for name in members:
            if name not in index:
                raise InputError(f"class {name!r} is not in the graph")
            if name in seen:
                raise InputError(f"class {name!r} appears in more than one community")
            seen.add(name)
            comm.append(index[name])
        out.append(comm)
    # anything unassigned (e.g. noise) sits in its own community
    out.extend([i] for i in range(g.n) if g.names[i] not in seen)
    return out


def modularity(g: SimilarityGraph, d: Decomposition, resolution: float = 1.0) -> float:
    """Weighted Newman modularity; 0 for an edgeless graph."""
    m = g.total_weight
    if m == 0:
        return 0.0
    comm_of = {}
    for c, members in enumerate(_communities(g, d)):
        for i in members:
            comm_of[i] = c
    inside = defaultdict(float)
    degree = defaultdict(float)
    for i, j, w in g.sorted_edges():
        degree[comm_of[i]] += w
        degree[comm_of[j]] += w
        if comm_of[i] == comm_of[j]:
            inside[comm_of[i]] += w
    q = 0.0
    for c in sorted(degree):
        q += inside[c] / m - resolution * (degree[c] / (2 * m)) ** 2
    return q


def _decomposition(names: Sequence[str], groups: list[list[int]]) -> Decomposition:
    groups = sorted((sorted(gr) for gr in groups if gr), key=lambda gr: gr[0])
    return Decomposition({f"service_{k}": frozenset(names[i] for i in gr)
                          for k, gr in enumerate(groups)})


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))
        self.count = n

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)
            self.count -= 1

    def groups(self):
        out = defaultdict(list)
        for i in range(len(self.parent)):
            out[self.find(i)].append(i)
        return list(out.values())


@dataclass
class Dendrogram:
    levels: list[Decomposition]
    modularities: list[float]
    best: int

    @property
    def recommended(self) -> Decomposition:
        return self.levels[self.best]


def _components(n: int, edges) -> list[list[int]]:
    ds = _DisjointSet(n)
    for i, j in edges:
        ds.union(i, j)
    return ds.groups()


def _literal_levels(g: SimilarityGraph) -> list[list[list[int]]]:
    # removing edges in ascending weight order, replayed backwards as unions
    order = sorted(g.edges, key=lambda e: (g.edges[e], e[0], e[1]))
    ds = _DisjointSet(g.n)
    snapshots = [ds.groups()]
    counts = [ds.count]
    for i, j in reversed(order):
        ds.union(i, j)
        if ds.count != counts[-1]:
            snapshots.append(ds.groups())
            counts.append(ds.count)
    return snapshots[::-1]


def _edge_betweenness(n: int, edges: dict) -> dict:
    h = nx.Graph()
    h.add_nodes_from(range(n))
    for (i, j), w in edges.items():
        h.add_edge(i, j, length=1.0 / w)
    bc = nx.edge_betweenness_centrality(h, weight="length", normalized=False)
    return {(min(e), max(e)): v for e, v in bc.items()}


def _betweenness_levels(g: SimilarityGraph) -> list[list[list[int]]]:
    edges = dict(g.edges)
    levels = [_components(g.n, edges)]
    while edges:
        bc = _edge_betweenness(g.n, edges)
        top = max(bc.values())
        # ties within float noise go to the lowest (i, j)
        victim = min(e for e, v in bc.items() if v >= top - 1e-9 * max(1.0, top))
        del edges[victim]
        comps = _components(g.n, edges)
        if len(comps) != len(levels[-1]):
            levels.append(comps)
    return levels


def girvan_newman(g: SimilarityGraph, mode: str = "paper_literal") -> Dendrogram:
    """Divisive community detection by repeated edge removal.

    ``paper_literal`` drops the weakest-similarity edge first;
    ``betweenness`` drops the edge with the highest weighted edge
    betweenness (edge length 1/w). A level is recorded whenever the number
    of connected components changes, down to all singletons. The level with
    the highest modularity on the full graph is the recommendation.
    """
    if g.n == 0:
        raise InputError("graph has no nodes")
    if mode == "paper_literal":
        raw = _literal_levels(g)
    elif mode == "betweenness":
        raw = _betweenness_levels(g)
    else:
        raise ValueError(f"unknown Girvan-Newman mode {mode!r}")
    levels = [_decomposition(g.names, groups) for groups in raw]
    scores = [modularity(g, d) for d in levels]
    best = max(range(len(scores)), key=lambda k: (scores[k], -k))
    return Dendrogram(levels, scores, best)


def louvain(g: SimilarityGraph, seed: int = 0, resolution: float = 1.0) -> Decomposition:
    """Multi-level Louvain modularity optimisation.

    Nodes are visited in a seeded shuffled order at each level; a node moves
    to the neighboring community with the largest strictly positive gain.
    """
    if g.n == 0:
        raise InputError("graph has no nodes")
    m = g.total_weight
    members = [[i] for i in range(g.n)]
    if m == 0:
        return _decomposition(g.names, members)
    rng = random.Random(seed)
    adj = g.adjacency()
    loops = [0.0] * g.n
    while True:
        size = len(adj)
        degree = [sum(adj[i].values()) + 2 * loops[i] for i in range(size)]
        comm = list(range(size))
        tot = list(degree)
        order = list(range(size))
        rng.shuffle(order)
        improved = False
        moved = True
        while moved:
            moved = False
            for i in order:
                ci = comm[i]
                links = defaultdict(float)
                for j, w in adj[i].items():
                    links[comm[j]] += w
                tot[ci] -= degree[i]
                k_over = resolution * degree[i] / (2 * m)
                best, best_gain = ci, links.get(ci, 0.0) - tot[ci] * k_over
                for c in sorted(links):
                    gain = links[c] - tot[c] * k_over
                    if gain > best_gain + 1e-12:
                        best, best_gain = c, gain
                tot[best] += degree[i]
                if best != ci:
                    comm[i] = best
                    moved = improved = True
        if not improved:
            break
        # aggregate communities into super-nodes
        renum: dict[int, int] = {}
        for i in range(size):
            renum.setdefault(comm[i], len(renum))
        new_members = [[] for _ in renum]
        new_loops = [0.0] * len(renum)
        new_adj: list[dict[int, float]] = [defaultdict(float) for _ in renum]
        for i in range(size):
            ci = renum[comm[i]]
            new_members[ci].extend(members[i])
            new_loops[ci] += loops[i]
            for j, w in adj[i].items():
                cj = renum[comm[j]]
                if ci == cj:
                    if i < j:
                        new_loops[ci] += w
                else:
                    new_adj[ci][cj] += w
        members = new_members
        loops = new_loops
        adj = [dict(d) for d in new_adj]
    return _decomposition(g.names, members)


_PALETTE = ("#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4",
            "#f032e6", "#bfef45", "#fabed4", "#469990", "#dcbeff", "#9a6324",
            "#fffac8", "#800000", "#aaffc3", "#808000", "#ffd8b1", "#000075")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: SimilarityGraph, d: Decomposition | None = None, name: str = "monolith") -> str:
    """Graphviz text; with a decomposition, nodes carry ``group`` and a fill color."""
    group = {}
    color = {}
    if d is not None:
        for k, (svc, cls) in enumerate(d.scored.items()):
            for c in cls:
                group[c] = svc
                color[c] = _PALETTE[k % len(_PALETTE)]
        for c in d.noise:
            group[c] = NOISE
            color[c] = "#ffffff"
    lines = [f"graph {name} {{", "  node [shape=box];"]
    for cls in g.names:
        attrs = [f"label={_quote(cls)}"]
        if cls in group:
            attrs += [f"group={_quote(group[cls])}", "style=filled",
                      f"fillcolor={_quote(color[cls])}"]
        lines.append(f"  {_quote(cls)} [{', '.join(attrs)}];")
    for i, j, w in g.sorted_edges():
        lines.append(f"  {_quote(g.names[i])} -- {_quote(g.names[j])} [weight={w!r}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
