"""Independent reference computations used to derive and freeze test constants.

Nothing here imports the gpdt spectral or algebra code: groups are closed by
plain tuple arithmetic and spectra come from ``numpy.linalg.eigvalsh``.
Running this file prints the tables frozen in ``frozen.py``.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

SEED = 0x5EED


def sl2_elements(p: int):
    """SL(2, Z/p) closed from S = [[0,-1],[1,0]] and T = [[1,1],[0,1]] by BFS on 4-tuples."""
    def mul(a, b):
        return ((a[0] * b[0] + a[1] * b[2]) % p, (a[0] * b[1] + a[1] * b[3]) % p,
                (a[2] * b[0] + a[3] * b[2]) % p, (a[2] * b[1] + a[3] * b[3]) % p)
    S = (0, (-1) % p, 1, 0)
    T = (1, 1 % p, 0, 1)
    e = (1, 0, 0, 1)
    seen = {e: 0}
    order = [e]
    q = deque([e])
    while q:
        g = q.popleft()
        for s in (S, T):
            h = mul(s, g)
            if h not in seen:
                seen[h] = len(order)
                order.append(h)
                q.append(h)
    return order, seen, mul, (S, T)


def sl2_cayley_laplacian(p: int) -> np.ndarray:
    order, index, mul, gens = sl2_elements(p)
    n = len(order)
    L = np.zeros((n, n))
    for s in gens:
        for j, g in enumerate(order):
            i = index[mul(s, g)]
            # 2 - U - U^T with U e_j = e_i
            L[j, j] += 2
            L[i, j] -= 1
            L[j, i] -= 1
    return L


def second_eigenvalue(L: np.ndarray, tol: float = 1e-9) -> float:
    w = np.linalg.eigvalsh(L)
    return float(w[w > tol][0])


def sl2_gap(p: int) -> float:
    return second_eigenvalue(sl2_cayley_laplacian(p))


def cyclic_gap(n: int) -> float:
    """Closed form for Z/n with one generator: 2 - 2 cos(2 pi / n)."""
    return 2.0 - 2.0 * math.cos(2.0 * math.pi / n)


def edge_laplacian(n: int, edges) -> np.ndarray:
    L = np.zeros((n, n))
    for u, v in edges:
        L[u, v] -= 1
        L[v, u] -= 1
        L[u, u] += 1
        L[v, v] += 1
    return L


def brute_convolution(arrows, compose, f: dict, g: dict) -> dict:
    """``(f g)(a) = sum_{h k = a} f(h) g(k)`` by a double loop over labels."""
    out: dict = {}
    for h, fh in f.items():
        for k, gk in g.items():
            a = compose(h, k)
            if a is not None:
                out[a] = out.get(a, 0) + fh * gk
    return out


# the seeded expander regression family
EXPANDER_SIZES = (16, 24, 32, 48, 64, 96, 128, 160)


def expander_family():
    from gpdt.graphs import random_regular_graph
    return [random_regular_graph(n, 3, seed=SEED + i) for i, n in enumerate(EXPANDER_SIZES)]


def acceptance_graph_family():
    """50 seeded random 3-regular graphs with even orders spread over 10..100."""
    from gpdt.graphs import random_regular_graph
    sizes = [10 + 2 * ((i * 45) // 49) for i in range(50)]
    return [random_regular_graph(n, 3, seed=SEED + i) for i, n in enumerate(sizes)]


if __name__ == "__main__":
    print("SL2_GAPS = {")
    for p in (3, 5, 7, 11, 13):
        print(f"    {p}: {sl2_gap(p)!r},")
    print("}")
    print("EXPANDER_GAPS = {")
    for n, g in zip(EXPANDER_SIZES, expander_family()):
        print(f"    {n}: {second_eigenvalue(edge_laplacian(g.n, g.edges))!r},")
    print("}")
    print("Z_POW2_10_LAST =", repr(cyclic_gap(1024)))
