"""Graph Laplacians, matching decompositions and expander gap profiles.

A graph on ``n`` vertices sits inside the pair groupoid ``P_n``, whose
convolution algebra is the matrix algebra ``M_n``: the coefficient of the
arrow ``(i, j)`` is the matrix entry ``[i, j]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix

from .algebra import AlgebraElement, adjoint, convolve, is_bisection_supported, psi
from .config import DEFAULT, Tolerances, pmap
from .graphs import FiniteGraph
from .groupoid import FiniteGroupoid, build_pair
from .kazhdan import laplacian_gap
from .spectral import eigvalsh, operator_norm, spectral_projection, spectral_report


class DecompositionError(AssertionError):
    pass


def graph_laplacian(g: FiniteGraph) -> np.ndarray:
    """Degree on the diagonal, -1 on adjacent pairs (integer matrix)."""
    L = np.zeros((g.n, g.n), dtype=np.int64)
    for u, v in g.edges:
        L[u, v] -= 1
        L[v, u] -= 1
        L[u, u] += 1
        L[v, v] += 1
    return L


def sparse_laplacian(g: FiniteGraph) -> csr_matrix:
    e = np.array(g.edges, dtype=np.int64).reshape(-1, 2)
    rows = np.concatenate([e[:, 0], e[:, 1], np.arange(g.n)])
    cols = np.concatenate([e[:, 1], e[:, 0], np.arange(g.n)])
    vals = np.concatenate([-np.ones(2 * len(e)), g.degrees.astype(float)])
    return csr_matrix((vals, (rows, cols)), shape=(g.n, g.n))


@dataclass(frozen=True)
class PartialMatching:
    """Vertex-disjoint edges oriented ``(source, target)`` with the lower vertex as source."""

    edges: tuple

    def __post_init__(self):
        seen = set()
        for s, t in self.edges:
            if s in seen or t in seen:
                raise ValueError(f"vertex repeated in matching {self.edges}")
            seen.update((s, t))

    def arrows(self, n: int) -> list[int]:
        # the arrow from s to t in P_n is (t, s): range t, source s
        return [t * n + s for s, t in self.edges]

    def element(self, G: FiniteGroupoid, n: int) -> AlgebraElement:
        c = np.zeros(G.n_arrows, dtype=np.int64)
        c[self.arrows(n)] = 1
        return AlgebraElement(G, c)


def edge_color(g: FiniteGraph) -> list[PartialMatching]:
    """Greedy proper edge colouring in canonical edge order; at most ``2 maxdeg - 1`` colours."""
    used: list[set] = [set() for _ in range(g.n)]
    classes: list[list] = []
    for u, v in g.edges:
        c = 0
        while c in used[u] or c in used[v]:
            c += 1
        if c == len(classes):
            classes.append([])
        classes[c].append((u, v))
        used[u].add(c)
        used[v].add(c)
    return [PartialMatching(tuple(cl)) for cl in classes]


@dataclass
class Decomposition:
    graph: FiniteGraph
    groupoid: FiniteGroupoid
    matchings: list
    isometries: list
    terms: list
    laplacian: AlgebraElement
    residual: int

    @property
    def n_terms(self) -> int:
        return len(self.terms)


def laplacian_decomposition(g: FiniteGraph, G: FiniteGroupoid | None = None) -> Decomposition:
    """``Delta = sum_i (v_i v_i* - v_i)* (v_i v_i* - v_i)`` checked exactly over the integers.

    Also checks ``v_i v_i* = Psi(v_i)`` and bisection support of each ``v_i``.
    """
    n = g.n
    G = build_pair(n) if G is None else G
    matchings = edge_color(g)
    vs, terms = [], []
    total = AlgebraElement(G, np.zeros(G.n_arrows, dtype=np.int64))
    for m in matchings:
        v = m.element(G, n)
        if not is_bisection_supported(v):
            raise DecompositionError(f"matching {m.edges} is not bisection supported")
        vv = convolve(v, adjoint(v))
        if not vv.equals(psi(v)):
            raise DecompositionError(f"v v* != Psi(v) for matching {m.edges}")
        d = vv - v
        t = convolve(adjoint(d), d)
        vs.append(v)
        terms.append(t)
        total = total + t
    target = AlgebraElement(G, graph_laplacian(g).reshape(-1))
    residual = int(np.max(np.abs(total.coeffs - target.coeffs), initial=0))
    if residual != 0:
        raise DecompositionError(f"decomposition residual {residual}")
    return Decomposition(g, G, matchings, vs, terms, target, residual)


def graph_gap(g: FiniteGraph, tol: Tolerances = DEFAULT) -> float:
    """Second smallest Laplacian eigenvalue; 0 for disconnected graphs, inf for one vertex."""
    if g.n == 1:
        return math.inf
    if not g.is_connected():
        return 0.0
    return laplacian_gap(sparse_laplacian(g), tol)


def graph_report(g: FiniteGraph, tol: Tolerances = DEFAULT):
    return spectral_report(eigvalsh(graph_laplacian(g).astype(float)), tol.tau_zero)


@dataclass(frozen=True)
class ExpanderRow:
    index: int
    size: int
    gap: float
    running_min: float


def expander_gap_profile(graphs, tol: Tolerances = DEFAULT) -> list[ExpanderRow]:
    graphs = list(graphs)
    gaps = pmap(lambda g: graph_gap(g, tol), graphs)
    rows, run = [], math.inf
    for i, (g, lam) in enumerate(zip(graphs, gaps), start=1):
        run = min(run, lam)
        rows.append(ExpanderRow(i, g.n, lam, run))
    return rows


@dataclass
class BlockProjection:
    index: int
    size: int
    matrix: np.ndarray
    closed_form_error: float
    idempotent: float
    selfadjoint: float
    norm: float
    entry_sup: float


def block_kazhdan_projection(graphs, tol: Tolerances = DEFAULT) -> list[BlockProjection]:
    """Projection onto constants of each component of ``l^2(X)``.

    The closed form ``ones / |X_n|`` is compared with the spectral projection
    of the graph Laplacian below ``lambda_1 / 2``.
    """
    out = []
    for i, g in enumerate(graphs, start=1):
        if not g.is_connected():
            raise ValueError(f"graph {i} is not connected")
        n = g.n
        closed = np.ones((n, n)) / n
        if n == 1:
            spec = np.ones((1, 1))
        else:
            L = graph_laplacian(g).astype(float)
            spec = np.real(spectral_projection(L, graph_gap(g, tol) / 2))
        out.append(BlockProjection(
            i, n, spec,
            closed_form_error=float(np.max(np.abs(spec - closed))),
            idempotent=float(np.max(np.abs(spec @ spec - spec))),
            selfadjoint=float(np.max(np.abs(spec - spec.conj().T))),
            norm=operator_norm(spec),
            entry_sup=float(np.max(np.abs(spec))),
        ))
    return out
