"""Finite simple graphs and a seeded random regular graph generator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .config import DEFAULT_SEED


@dataclass(frozen=True)
class FiniteGraph:
    """Undirected simple graph on vertices ``0..n-1``.

    Edges are stored as sorted pairs ``(u, v)`` with ``u < v`` in
    lexicographic order.
    """

    n: int
    edges: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a graph needs at least one vertex")
        clean = set()
        for e in self.edges:
            u, v = (int(a) for a in e)
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {(u, v)} out of range for n={self.n}")
            pair = (min(u, v), max(u, v))
            if pair in clean:
                raise ValueError(f"repeated edge {pair}")
            clean.add(pair)
        object.__setattr__(self, "edges", tuple(sorted(clean)))

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteGraph":
        return cls(int(data["n"]), tuple(tuple(e) for e in data.get("edges", [])))

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.edges else 0

    def n_components(self) -> int:
        if not self.edges:
            return self.n
        e = np.array(self.edges)
        adj = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(self.n, self.n))
        return int(connected_components(adj, directed=False)[0])

    def is_connected(self) -> bool:
        return self.n_components() == 1


def cycle_graph(n: int) -> FiniteGraph:
    if n < 3:
        raise ValueError("cycles need n >= 3")
    return FiniteGraph(n, tuple((i, (i + 1) % n) for i in range(n)))


def complete_graph(n: int) -> FiniteGraph:
    return FiniteGraph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def path_graph(n: int) -> FiniteGraph:
    return FiniteGraph(n, tuple((i, i + 1) for i in range(n - 1)))


def random_regular_graph(n: int, d: int = 3, seed: int = DEFAULT_SEED,
                         max_tries: int = 10_000) -> FiniteGraph:
    """Connected d-regular simple graph from the pairing model.

    Pairings with loops, repeated edges or a disconnected result are rejected
    and redrawn from the same generator, so the output depends only on
    ``(n, d, seed)``.
    """
    if (n * d) % 2 or d >= n:
        raise ValueError(f"no simple {d}-regular graph on {n} vertices")
    rng = np.random.default_rng(seed)
    points = np.repeat(np.arange(n), d)
    for _ in range(max_tries):
        perm = rng.permutation(points)
        pairs = perm.reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        canon = np.sort(pairs, axis=1)
        if len(np.unique(canon, axis=0)) < len(canon):
            continue
        g = FiniteGraph(n, tuple(map(tuple, canon.tolist())))
        if g.is_connected():
            return g
    raise RuntimeError(f"pairing model failed after {max_tries} tries")
