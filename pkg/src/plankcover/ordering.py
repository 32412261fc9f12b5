"""Angle graph on plank normals and the chunked processing order.

Planks whose normals are within a threshold angle are joined by an edge.
The order is built by repeatedly taking a vertex of at least average
degree together with its neighbours, then deleting that chunk.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree


def compute_alpha(beta: float) -> float:
    """Angle exponent balancing the two volume bounds: 1/6 + beta/3."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    return 1.0 / 6.0 + beta / 3.0


def infer_beta(k: int, epsilon: float, lo: float = 1.0, hi: float = 2.0) -> float:
    """Exponent with k = epsilon**(-beta), clamped to [lo, hi]."""
    if epsilon >= 1.0 or k <= 1:
        return lo
    beta = math.log(k) / math.log(1.0 / epsilon)
    return min(hi, max(lo, beta))


def default_threshold(k: int, epsilon: float) -> float:
    return epsilon ** compute_alpha(infer_beta(k, epsilon))


@dataclass(frozen=True)
class AngleGraph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]
    threshold: float

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=int)

    def edges(self) -> set[tuple[int, int]]:
        return {(u, v) for u, nb in enumerate(self.adjacency) for v in nb if u < v}


@dataclass(frozen=True)
class Chunk:
    indices: tuple[int, ...]

    @property
    def center(self) -> int:
        return self.indices[0]


def _angles(U, V):
    return np.arccos(np.clip(np.einsum("ij,ij->i", U, V), -1.0, 1.0))


def _as_normals(normals) -> np.ndarray:
    arr = np.array([getattr(v, "as_list", lambda v=v: v)() for v in normals], dtype=float)
    return arr.reshape(-1, 3)


def build_angle_graph(normals, theta: float, method: str = "auto") -> AngleGraph:
    """Graph joining planks whose normals differ by less than ``theta``.

    ``method="dense"`` compares all pairs; ``"tree"`` first gathers candidate
    pairs with a k-d tree on chord length and then applies the same angular
    predicate, so both produce the same edge set.
    """
    if not 0 < theta < math.pi:
        raise ValueError("theta must be in (0, pi)")
    N = _as_normals(normals)
    k = len(N)
    if method == "auto":
        method = "dense" if k <= 2000 else "tree"
    if method == "dense":
        iu, ju = np.triu_indices(k, 1)
    elif method == "tree":
        chord = 2.0 * math.sin(min(theta, math.pi - 1e-9) / 2.0)
        pairs = cKDTree(N).query_pairs(chord * (1 + 1e-9) + 1e-12, output_type="ndarray")
        if len(pairs) == 0:
            pairs = np.zeros((0, 2), dtype=int)
        pairs = np.sort(pairs, axis=1)
        iu, ju = pairs[:, 0], pairs[:, 1]
    else:
        raise ValueError(f"unknown method {method!r}")
    keep = _angles(N[iu], N[ju]) < theta
    iu, ju = iu[keep], ju[keep]
    adj = [[] for _ in range(k)]
    for u, v in zip(iu.tolist(), ju.tolist()):
        adj[u].append(v)
        adj[v].append(u)
    return AngleGraph(k, tuple(tuple(sorted(a)) for a in adj), float(theta))


def extract_order(G: AngleGraph, trace: list | None = None):
    """Chunked ordering of the graph's vertices.

    Each round picks the maximum-degree vertex of the remaining graph (lowest
    index on ties; its degree is therefore at least the average), emits it
    followed by its remaining neighbours in index order, and deletes them.
    When ``trace`` is a list, (vertex, degree, average degree) is appended to
    it for every round.

    Returns
    -------
    ordering : list of int
    chunks : list of Chunk
    """
    alive = np.ones(G.n, dtype=bool)
    deg = G.degrees.copy()
    nbrs = [set(a) for a in G.adjacency]
    ordering: list[int] = []
    chunks: list[Chunk] = []
    remaining = G.n
    while remaining:
        live_deg = np.where(alive, deg, -1)
        v = int(np.argmax(live_deg))
        avg = float(deg[alive].sum()) / remaining
        if trace is not None:
            trace.append((v, int(deg[v]), avg))
        members = [v] + sorted(nbrs[v])
        for u in members:
            alive[u] = False
        for u in members:
            for x in nbrs[u]:
                if alive[x]:
                    nbrs[x].discard(u)
                    deg[x] -= 1
            nbrs[u] = set()
            deg[u] = 0
        remaining -= len(members)
        ordering.extend(members)
        chunks.append(Chunk(tuple(members)))
    return ordering, chunks
