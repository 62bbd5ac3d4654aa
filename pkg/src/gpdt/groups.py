"""Finite groups given by generators: breadth-first closure and Cayley data.

Elements are stored as integer rows (permutation images, or the four entries
of a 2x2 matrix over Z/m).  Labels are the row tuples, and the element list is
kept in lexicographic label order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class ClosureCapExceeded(ValueError):
    """The breadth-first closure produced more elements than allowed."""

    def __init__(self, cap: int):
        super().__init__(f"group closure exceeds cap of {cap} elements")
        self.cap = cap


def _perm_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # (a*b)(i) = a(b(i)): apply b first
    return np.take_along_axis(a, b, axis=-1)


def _mat_mul(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    a0, a1, a2, a3 = (a[..., i] for i in range(4))
    b0, b1, b2, b3 = (b[..., i] for i in range(4))
    out = np.stack(
        [a0 * b0 + a1 * b2, a0 * b1 + a1 * b3, a2 * b0 + a3 * b2, a2 * b1 + a3 * b3],
        axis=-1,
    )
    return out % m


@dataclass
class FiniteGroup:
    """A finite group with elements in canonical order.

    Attributes:
        rows: (order, width) integer array, one row per element, sorted.
        kind: ``"perm"``, ``"matrix"`` or ``"cyclic"``.
        modulus: modulus for matrix and cyclic groups, else 0.
        generators: mapping from generator name to element index.
    """

    rows: np.ndarray
    kind: str
    modulus: int = 0
    generators: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.rows)

    @cached_property
    def labels(self) -> list:
        return [tuple(int(v) for v in r) for r in self.rows]

    @cached_property
    def _base(self) -> int:
        if self.kind == "perm":
            return max(self.rows.shape[1], 1)
        return max(self.modulus, 1)

    @cached_property
    def _codes(self) -> np.ndarray | None:
        width = self.rows.shape[1]
        if width * np.log2(self._base + 1) > 62:
            return None
        return self._encode(self.rows)

    def _encode(self, rows: np.ndarray) -> np.ndarray:
        code = np.zeros(rows.shape[:-1], dtype=np.int64)
        for i in range(rows.shape[-1]):
            code = code * self._base + rows[..., i]
        return code

    @cached_property
    def _row_dict(self) -> dict:
        return {r.tobytes(): i for i, r in enumerate(self.rows)}

    def index_of(self, rows: np.ndarray) -> np.ndarray:
        """Element indices of the given rows (any leading shape)."""
        rows = np.asarray(rows, dtype=np.int64)
        if self._codes is not None:
            codes = self._encode(rows)
            idx = np.searchsorted(self._codes, codes)
            idx = np.minimum(idx, self.order - 1)
            if not np.array_equal(self._codes[idx], codes):
                raise KeyError("row is not an element of the group")
            return idx
        flat = rows.reshape(-1, rows.shape[-1])
        out = np.array([self._row_dict[r.tobytes()] for r in flat], dtype=np.int64)
        return out.reshape(rows.shape[:-1])

    def multiply_rows(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.kind == "perm":
            return _perm_mul(a, b)
        if self.kind == "matrix":
            return _mat_mul(a, b, self.modulus)
        return (a + b) % max(self.modulus, 1)

    @cached_property
    def identity(self) -> int:
        if self.kind == "perm":
            e = np.arange(self.rows.shape[1])
        elif self.kind == "matrix":
            e = np.array([1, 0, 0, 1]) % max(self.modulus, 1)
        else:
            e = np.array([0])
        return int(self.index_of(e))

    def left_mult(self, s: int) -> np.ndarray:
        """Permutation ``g -> s*g`` of element indices."""
        prod = self.multiply_rows(np.broadcast_to(self.rows[s], self.rows.shape), self.rows)
        return self.index_of(prod)

    @cached_property
    def table(self) -> np.ndarray:
        """Cayley table ``table[i, j] = index(g_i * g_j)`` (order x order)."""
        n = self.order
        out = np.empty((n, n), dtype=np.int64)
        chunk = max(1, 2_000_000 // max(n * self.rows.shape[1], 1))
        for start in range(0, n, chunk):
            a = self.rows[start:start + chunk, None, :]
            prod = self.multiply_rows(np.broadcast_to(a, (a.shape[0], n, a.shape[2])),
                                      np.broadcast_to(self.rows[None], (a.shape[0], n, a.shape[2])))
            out[start:start + chunk] = self.index_of(prod)
        return out

    @cached_property
    def inverse(self) -> np.ndarray:
        rows, cols = np.nonzero(self.table == self.identity)
        inv = np.empty(self.order, dtype=np.int64)
        inv[rows] = cols
        return inv


def _closure(gens: list[np.ndarray], identity: np.ndarray, mul, cap: int) -> np.ndarray:
    seen = {identity.tobytes(): identity}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = mul(g, s)
            key = h.tobytes()
            if key not in seen:
                seen[key] = h
                if len(seen) > cap:
                    raise ClosureCapExceeded(cap)
                queue.append(h)
    rows = np.array(list(seen.values()), dtype=np.int64)
    order = np.lexsort(rows.T[::-1])
    return rows[order]


def _name_generators(group: FiniteGroup, gens: list[np.ndarray], names) -> FiniteGroup:
    if names is None:
        names = [f"g{i}" for i in range(len(gens))]
    group.generators = {str(nm): int(group.index_of(g)) for nm, g in zip(names, gens)}
    return group


def perm_group(generators, cap: int = 20_000, names=None) -> FiniteGroup:
    """Group generated by permutations given as image lists on ``0..d-1``."""
    gens = [np.asarray(g, dtype=np.int64) for g in generators]
    if not gens:
        raise ValueError("at least one generator is required")
    d = len(gens[0])
    for g in gens:
        if len(g) != d:
            raise ValueError("generators must act on a common domain")
        if sorted(g.tolist()) != list(range(d)):
            raise ValueError(f"not a permutation: {g.tolist()}")
    rows = _closure(gens, np.arange(d, dtype=np.int64), _perm_mul, cap)
    return _name_generators(FiniteGroup(rows, "perm"), gens, names)


def matrix_group(generators, modulus: int, cap: int = 20_000, names=None) -> FiniteGroup:
    """Group generated by invertible 2x2 integer matrices reduced mod ``modulus``."""
    if modulus < 1:
        raise ValueError("modulus must be positive")
    gens = []
    for g in generators:
        a = np.asarray(g, dtype=np.int64).reshape(-1)
        if a.size != 4:
            raise ValueError("only 2x2 matrices are supported")
        a = a % modulus
        det = int(a[0] * a[3] - a[1] * a[2]) % modulus
        if modulus > 1 and np.gcd(det, modulus) != 1:
            raise ValueError(f"matrix {a.reshape(2, 2).tolist()} is not invertible mod {modulus}")
        gens.append(a)
    identity = np.array([1, 0, 0, 1], dtype=np.int64) % modulus
    rows = _closure(gens, identity, lambda x, y: _mat_mul(x, y, modulus), cap)
    return _name_generators(FiniteGroup(rows, "matrix", modulus), gens, names)


def cyclic_group(m: int, cap: int = 20_000) -> FiniteGroup:
    """Z/m with generator ``1`` (named ``"1"``)."""
    if m < 1:
        raise ValueError("m must be positive")
    if m > cap:
        raise ClosureCapExceeded(cap)
    rows = np.arange(m, dtype=np.int64)[:, None]
    group = FiniteGroup(rows, "cyclic", m)
    group.generators = {"1": 1 % m}
    return group


SL2_S = ((0, -1), (1, 0))
SL2_T = ((1, 1), (0, 1))


def sl2_mod(m: int, cap: int = 20_000) -> FiniteGroup:
    """SL(2, Z/m) as the image of SL(2, Z) under reduction, generated by S and T."""
    return matrix_group([SL2_S, SL2_T], m, cap=cap, names=["S", "T"])
