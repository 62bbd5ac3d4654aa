"""Finite groupoid models.

Finite groupoids carry the discrete topology, so every subset is open and a
bisection is simply a set of arrows on which source and range are injective.
Arrows are indexed ``0..N-1`` in lexicographic order of their labels; every
matrix basis in the package is built from that order.

Composition is stored as a vectorised *composer*: a callable taking index
arrays ``h, k`` of composable pairs and returning the indices of ``hk``
(``-1`` where a table has no entry).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .config import DEFAULT
from .graphs import FiniteGraph
from .groups import FiniteGroup, cyclic_group, matrix_group, perm_group, sl2_mod

log = logging.getLogger(__name__)


def label_str(label) -> str:
    """Compact, whitespace-free text form of an arrow label."""
    if isinstance(label, str):
        return label
    return str(label).replace(" ", "").replace("'", "")


# ---------------------------------------------------------------------------
# composers


class TableComposer:
    def __init__(self, table: np.ndarray):
        self.table = table

    def __call__(self, h, k):
        return self.table[h, k]


class PairComposer:
    """Pair groupoid on ``n`` points, arrow ``(i, j)`` at index ``i*n + j``."""

    def __init__(self, n: int):
        self.n = n

    def __call__(self, h, k):
        return (np.asarray(h) // self.n) * self.n + np.asarray(k) % self.n


class TransformationComposer:
    def __init__(self, group_table, arrow_of, g_of, x_of):
        self.group_table = group_table
        self.arrow_of = arrow_of
        self.g_of = g_of
        self.x_of = x_of

    def __call__(self, h, k):
        gh = self.group_table[self.g_of[h], self.g_of[k]]
        return self.arrow_of[gh, self.x_of[k]]


class UnionComposer:
    def __init__(self, parts: Sequence[Callable], offsets: np.ndarray):
        self.parts = list(parts)
        self.offsets = np.asarray(offsets, dtype=np.int64)

    def __call__(self, h, k):
        h = np.atleast_1d(np.asarray(h, dtype=np.int64))
        k = np.atleast_1d(np.asarray(k, dtype=np.int64))
        which = np.searchsorted(self.offsets, h, side="right") - 1
        out = np.full(h.shape, -1, dtype=np.int64)
        for p in np.unique(which):
            sel = which == p
            off = self.offsets[p]
            local = self.parts[p](h[sel] - off, k[sel] - off)
            out[sel] = np.where(local >= 0, local + off, -1)
        return out


# ---------------------------------------------------------------------------
# core types


@dataclass
class FiniteGroupoid:
    """A finite groupoid on arrows ``0..N-1``.

    Attributes:
        labels: arrow labels, sorted.
        src, rng: arrow -> arrow index of its source / range unit.
        inv: arrow -> inverse arrow.
        composer: vectorised composition on composable pairs.
        generators: named arrows that generate the groupoid (builder supplied).
        kind: short description of the construction.
        mul_entries: raw product triples for explicitly tabulated groupoids;
            only used to report composability violations.
    """

    labels: list
    src: np.ndarray
    rng: np.ndarray
    inv: np.ndarray
    composer: Callable
    generators: dict = field(default_factory=dict)
    kind: str = "groupoid"
    mul_entries: list | None = None

    def __post_init__(self):
        self.src = np.asarray(self.src, dtype=np.int64)
        self.rng = np.asarray(self.rng, dtype=np.int64)
        self.inv = np.asarray(self.inv, dtype=np.int64)
        n = len(self.labels)
        if not (len(self.src) == len(self.rng) == len(self.inv) == n):
            raise ValueError("labels, source, range and inverse must have equal length")
        if any(self.labels[i] > self.labels[i + 1] for i in range(n - 1)):
            raise ValueError("arrow labels must be in canonical (sorted) order")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_arrows(self) -> int:
        return len(self.labels)

    @cached_property
    def units(self) -> np.ndarray:
        return np.unique(np.concatenate([self.src, self.rng]))

    @property
    def n_units(self) -> int:
        return len(self.units)

    @cached_property
    def unit_pos(self) -> np.ndarray:
        """Arrow index -> position in ``units`` (``-1`` for non-units)."""
        pos = np.full(self.n_arrows, -1, dtype=np.int64)
        pos[self.units] = np.arange(len(self.units))
        return pos

    @cached_property
    def is_unit(self) -> np.ndarray:
        return self.unit_pos >= 0

    @cached_property
    def _index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def _str_index(self) -> dict:
        return {label_str(lab): i for i, lab in enumerate(self.labels)}

    def index(self, label) -> int:
        """Arrow index of a label (or of its text form)."""
        try:
            return self._index[label]
        except (KeyError, TypeError):
            pass
        key = label_str(label)
        if key in self._str_index:
            return self._str_index[key]
        # cyclic-group labels are 1-tuples; accept "3" for "(3,)"
        if f"({key},)" in self._str_index:
            return self._str_index[f"({key},)"]
        raise KeyError(f"unknown arrow {label!r}")

    def label_of(self, i: int) -> str:
        return label_str(self.labels[i])

    def range_fibre(self, x: int) -> np.ndarray:
        """Arrows with range ``x`` (the fibre G^x)."""
        return np.flatnonzero(self.rng == x)

    def source_fibre(self, x: int) -> np.ndarray:
        """Arrows with source ``x`` (the fibre G_x)."""
        return np.flatnonzero(self.src == x)

    def compose(self, h: int, k: int) -> int | None:
        """Index of ``hk``, or ``None`` when the pair is not composable."""
        if self.src[h] != self.rng[k]:
            return None
        out = int(np.atleast_1d(self.composer(np.array([h]), np.array([k])))[0])
        return None if out < 0 else out

    def compose_many(self, h, k) -> np.ndarray:
        h = np.asarray(h, dtype=np.int64)
        k = np.asarray(k, dtype=np.int64)
        if h.size == 0:
            return np.zeros(0, dtype=np.int64)
        return np.asarray(self.composer(h, k), dtype=np.int64)

    def generated_by(self, arrows) -> np.ndarray:
        """Boolean mask of the wide subgroupoid generated by ``arrows``.

        Grows words ``s_1 ... s_k x`` by left multiplication with the
        generators and their inverses, starting from the units.
        """
        gens = np.unique(np.asarray(list(arrows), dtype=np.int64))
        if gens.size:
            gens = np.unique(np.concatenate([gens, self.inv[gens]]))
            gens = gens[~self.is_unit[gens]]
        mask = self.is_unit.copy()
        frontier = np.flatnonzero(mask)
        while frontier.size and gens.size:
            h, k = _composable(self, gens, frontier)
            prods = np.unique(self.compose_many(h, k))
            prods = prods[prods >= 0]
            frontier = prods[~mask[prods]]
            mask[frontier] = True
        return mask

    def generates(self, arrows) -> bool:
        return bool(self.generated_by(arrows).all())

    @cached_property
    def group_table(self) -> np.ndarray:
        """Full multiplication table; only for groupoids with one unit."""
        if self.n_units != 1:
            raise ValueError("group_table requires a groupoid with a single unit")
        n = self.n_arrows
        h, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        return self.compose_many(h.ravel(), k.ravel()).reshape(n, n)


def _composable(G: FiniteGroupoid, hs: np.ndarray, ks: np.ndarray):
    """All pairs ``(h, k)`` with ``h in hs``, ``k in ks`` and ``s(h) = r(k)``."""
    hs = np.asarray(hs, dtype=np.int64)
    ks = np.asarray(ks, dtype=np.int64)
    if hs.size == 0 or ks.size == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    order = np.argsort(G.rng[ks], kind="stable")
    ks_sorted = ks[order]
    keys = G.rng[ks_sorted]
    lo = np.searchsorted(keys, G.src[hs], side="left")
    hi = np.searchsorted(keys, G.src[hs], side="right")
    counts = hi - lo
    h_out = np.repeat(hs, counts)
    starts = np.repeat(lo, counts)
    within = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    k_out = ks_sorted[starts + within]
    return h_out, k_out


composable_pairs = _composable


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Diagnostic:
    axiom: str
    arrows: tuple
    message: str

    def __str__(self) -> str:
        return f"[{self.axiom}] {self.message}"


def validate(G: FiniteGroupoid, max_triples: int = 5_000_000, seed: int = DEFAULT.seed) -> list[Diagnostic]:
    """Check the groupoid axioms; one diagnostic per violation.

    Associativity is checked on every composable triple when there are at
    most ``max_triples`` of them, otherwise on a seeded sample of that size.
    """
    out: list[Diagnostic] = []
    L = G.label_of
    n = G.n_arrows
    if n == 0:
        return [Diagnostic("units", (), "groupoid has no arrows")]
    for i in range(n):
        if not (0 <= G.src[i] < n and 0 <= G.rng[i] < n and 0 <= G.inv[i] < n):
            out.append(Diagnostic("structure", (L(i),), f"arrow {L(i)} has an out-of-range image"))
    if out:
        return out
    for lab in getattr(G, "unit_mismatch", []):
        out.append(Diagnostic("units", (lab,), f"declared units disagree with source/range at {lab}"))
    for u in G.units:
        if G.src[u] != u or G.rng[u] != u:
            out.append(Diagnostic("units", (L(u),), f"unit {L(u)} is not its own source and range"))

    if G.mul_entries is not None:
        for g, h, gh in G.mul_entries:
            if G.src[g] != G.rng[h]:
                out.append(Diagnostic(
                    "composability", (L(g), L(h)),
                    f"compose({L(g)}, {L(h)}) is defined but source({L(g)}) != range({L(h)})"))

    h, k = _composable(G, np.arange(n), np.arange(n))
    hk = G.compose_many(h, k)
    for i in np.flatnonzero(hk < 0)[:50]:
        out.append(Diagnostic("closure", (L(h[i]), L(k[i])),
                              f"composable pair ({L(h[i])}, {L(k[i])}) has no product"))
    ok = hk >= 0
    bad = ok & ((G.rng[np.where(ok, hk, 0)] != G.rng[h]) | (G.src[np.where(ok, hk, 0)] != G.src[k]))
    for i in np.flatnonzero(bad)[:50]:
        out.append(Diagnostic("endpoints", (L(h[i]), L(k[i])),
                              f"product of ({L(h[i])}, {L(k[i])}) has wrong source or range"))
    if out:
        return out

    ar = np.arange(n)
    left = G.compose_many(G.rng, ar)
    right = G.compose_many(ar, G.src)
    for i in np.flatnonzero((left != ar) | (right != ar)):
        out.append(Diagnostic("identity", (L(i),), f"units do not act as identities on {L(i)}"))
    inv = G.inv
    if np.any(G.src[inv] != G.rng) or np.any(G.rng[inv] != G.src):
        for i in np.flatnonzero((G.src[inv] != G.rng) | (G.rng[inv] != G.src)):
            out.append(Diagnostic("inverse", (L(i),), f"inverse of {L(i)} has wrong endpoints"))
        return out
    a = G.compose_many(ar, inv)
    b = G.compose_many(inv, ar)
    for i in np.flatnonzero((a != G.rng) | (b != G.src)):
        out.append(Diagnostic("inverse", (L(i),), f"{L(i)} times its inverse is not a unit"))
    if out:
        return out

    out.extend(_check_associativity(G, h, k, hk, max_triples, seed))
    return out


def _check_associativity(G, h, k, hk, max_triples, seed):
    L = G.label_of
    # triple (a, b, c) with (a, b) = (h, k) and c in G^{s(b)}
    fibre_sizes = np.bincount(G.rng, minlength=G.n_arrows)
    per_pair = fibre_sizes[G.src[k]]
    total = int(per_pair.sum())
    rng = np.random.default_rng(seed)
    out = []
    if total <= max_triples:
        idx = np.repeat(np.arange(len(k)), per_pair)
        c = _expand_fibres(G, G.src[k], per_pair)
    else:
        log.warning("associativity sampled on %d of %d triples", max_triples, total)
        idx = rng.integers(0, len(h), size=max_triples)
        order = np.argsort(G.rng, kind="stable")
        starts = np.searchsorted(G.rng[order], G.src[k[idx]], side="left")
        c = order[starts + (rng.random(max_triples) * per_pair[idx]).astype(np.int64)]
    a, b, ab = h[idx], k[idx], hk[idx]
    bc = G.compose_many(b, c)
    lhs = G.compose_many(ab, c)
    rhs = G.compose_many(a, bc)
    for i in np.flatnonzero(lhs != rhs)[:50]:
        trip = (L(a[i]), L(b[i]), L(c[i]))
        out.append(Diagnostic("associativity", trip,
                              f"(gh)k != g(hk) for (g, h, k) = {trip}"))
    return out


def _expand_fibres(G, units, counts):
    order = np.argsort(G.rng, kind="stable")
    starts = np.searchsorted(G.rng[order], units, side="left")
    rep = np.repeat(starts, counts)
    within = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    return order[rep + within]


# ---------------------------------------------------------------------------
# orbits


@dataclass(frozen=True)
class OrbitDecomposition:
    """Partition of the units into orbits.

    ``orbits`` holds arrays of unit arrow indices ordered by their smallest
    member; ``orbit_of`` maps a unit arrow index to its orbit number.
    """

    orbits: tuple
    orbit_of: dict

    def __len__(self) -> int:
        return len(self.orbits)

    @property
    def sizes(self) -> list[int]:
        return [len(o) for o in self.orbits]


def orbits(G: FiniteGroupoid) -> OrbitDecomposition:
    u = G.units
    pos = G.unit_pos
    m = len(u)
    adj = coo_matrix((np.ones(G.n_arrows), (pos[G.rng], pos[G.src])), shape=(m, m))
    _, comp = connected_components(adj, directed=True, connection="weak")
    groups: dict[int, list] = {}
    for i, c in enumerate(comp):
        groups.setdefault(int(c), []).append(int(u[i]))
    ordered = sorted(groups.values(), key=lambda o: o[0])
    orbs = tuple(np.array(o, dtype=np.int64) for o in ordered)
    orbit_of = {int(x): j for j, o in enumerate(orbs) for x in o}
    return OrbitDecomposition(orbs, orbit_of)


# ---------------------------------------------------------------------------
# builders


def build_pair(n: int) -> FiniteGroupoid:
    """Pair groupoid on ``{0..n-1}``: arrows ``(i, j)`` with range i, source j."""
    if n < 1:
        raise ValueError("pair groupoid needs n >= 1")
    i, j = np.divmod(np.arange(n * n), n)
    labels = [(int(a), int(b)) for a, b in zip(i, j)]
    gens = {f"({a},{a + 1})": a * n + a + 1 for a in range(n - 1)}
    gens.update({f"({a + 1},{a})": (a + 1) * n + a for a in range(n - 1)})
    return FiniteGroupoid(labels, src=j * n + j, rng=i * n + i, inv=j * n + i,
                          composer=PairComposer(n), generators=gens, kind=f"pair({n})")


def groupoid_from_group(group: FiniteGroup, kind: str | None = None) -> FiniteGroupoid:
    n = group.order
    e = group.identity
    G = FiniteGroupoid(group.labels, src=np.full(n, e), rng=np.full(n, e), inv=group.inverse,
                       composer=TableComposer(group.table), generators=dict(group.generators),
                       kind=kind or f"group(order {n})")
    G.group = group
    return G


def build_group(generators=None, *, modulus: int | None = None, cap: int = DEFAULT.cap,
                names=None) -> FiniteGroupoid:
    """Group (one unit) generated by permutations, or by 2x2 matrices mod ``modulus``.

    ``generators`` may also be a ready :class:`FiniteGroup`.  The returned
    groupoid's ``generators`` attribute maps generator names to arrows.
    """
    if isinstance(generators, FiniteGroup):
        group = generators
    elif modulus is None:
        group = perm_group(generators, cap=cap, names=names)
    else:
        group = matrix_group(generators, modulus, cap=cap, names=names)
    return groupoid_from_group(group)


class ActionError(ValueError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


def build_transformation(group: FiniteGroupoid, points: int, action) -> FiniteGroupoid:
    """Transformation groupoid of a group acting on ``{0..points-1}``.

    ``action`` is either a callable ``(element index, point) -> point`` or an
    integer array of shape ``(|group|, points)``.  Arrows are triples
    ``(gx, g, x)`` labelled by ``(gx, label(g), x)``.
    """
    if group.n_units != 1:
        raise ValueError("the acting groupoid must have exactly one unit")
    if points < 1:
        raise ValueError("need at least one point")
    m = group.n_arrows
    if callable(action):
        act = np.array([[action(g, x) for x in range(points)] for g in range(m)], dtype=np.int64)
    else:
        act = np.asarray(action, dtype=np.int64)
    if act.shape != (m, points):
        raise ActionError(f"action table must have shape {(m, points)}")
    if act.min() < 0 or act.max() >= points:
        raise ActionError("action maps a point outside the point set")
    table = group.group_table
    e = int(group.units[0])
    moved = np.flatnonzero(act[e] != np.arange(points))
    if moved.size:
        raise ActionError(f"identity moves point {int(moved[0])}", (group.label_of(e), group.label_of(e)))
    # act[gh, x] == act[g, act[h, x]]
    lhs = act[table]                      # (g, h, x)
    rhs = act[np.arange(m)[:, None, None], act[None, :, :]]
    bad = np.argwhere(lhs != rhs)
    if bad.size:
        g, h, x = (int(v) for v in bad[0])
        raise ActionError(f"action not compatible with multiplication at g={group.label_of(g)}, "
                          f"h={group.label_of(h)}, x={x}", (group.label_of(g), group.label_of(h)))
    gg, xx = np.meshgrid(np.arange(m), np.arange(points), indexing="ij")
    gg, xx = gg.ravel(), xx.ravel()
    gx = act[gg, xx]
    order = np.lexsort((xx, gg, gx))
    gg, xx, gx = gg[order], xx[order], gx[order]
    arrow_of = np.empty((m, points), dtype=np.int64)
    arrow_of[gg, xx] = np.arange(m * points)
    labels = [(int(a), group.labels[g], int(x)) for a, g, x in zip(gx, gg, xx)]
    ginv = group.inv
    G = FiniteGroupoid(
        labels,
        src=arrow_of[e, xx], rng=arrow_of[e, gx], inv=arrow_of[ginv[gg], gx],
        composer=TransformationComposer(table, arrow_of, gg, xx),
        kind=f"transformation({m} on {points})",
    )
    G.generators = {
        f"{name}@{x}": int(arrow_of[a, x])
        for name, a in group.generators.items() for x in range(points)
    }
    G.arrow_of = arrow_of
    return G


def disjoint_union(*parts: FiniteGroupoid, tags=None) -> FiniteGroupoid:
    """Tagged union; arrow ``g`` of part ``t`` becomes ``(t, label(g))``."""
    if len(parts) == 1 and isinstance(parts[0], (list, tuple)):
        parts = tuple(parts[0])
    if not parts:
        raise ValueError("need at least one part")
    tags = list(range(len(parts))) if tags is None else list(tags)
    if tags != sorted(tags):
        raise ValueError("tags must be increasing")
    sizes = [p.n_arrows for p in parts]
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
    labels, src, rng, inv, gens = [], [], [], [], {}
    for t, p, off in zip(tags, parts, offsets):
        labels.extend((t, lab) for lab in p.labels)
        src.append(p.src + off)
        rng.append(p.rng + off)
        inv.append(p.inv + off)
        gens.update({f"{t}:{nm}": int(a + off) for nm, a in p.generators.items()})
    return FiniteGroupoid(labels, np.concatenate(src), np.concatenate(rng), np.concatenate(inv),
                          composer=UnionComposer([p.composer for p in parts], offsets),
                          generators=gens,
                          kind=" + ".join(p.kind for p in parts))


def build_explicit(arrows, units, source: dict, range_: dict, mul, inv: dict) -> FiniteGroupoid:
    """Groupoid from explicit tables keyed by string labels.

    The tables are taken as given; :func:`validate` reports any axiom they
    break.  Unknown labels raise ``KeyError``.
    """
    labels = sorted(str(a) for a in arrows)
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate arrow labels")
    idx = {a: i for i, a in enumerate(labels)}
    n = len(labels)
    unit_set = {str(u) for u in units}
    for u in unit_set:
        if u not in idx:
            raise KeyError(f"unit {u!r} is not an arrow")
    src = np.array([idx[str(source[a])] for a in labels], dtype=np.int64)
    rng = np.array([idx[str(range_[a])] for a in labels], dtype=np.int64)
    inverse = np.array([idx[str(inv[a])] for a in labels], dtype=np.int64)
    table = np.full((n, n), -1, dtype=np.int64)
    entries = []
    for g, h, gh in mul:
        i, j, k = idx[str(g)], idx[str(h)], idx[str(gh)]
        table[i, j] = k
        entries.append((i, j, k))
    G = FiniteGroupoid(labels, src, rng, inverse, TableComposer(table),
                       generators={a: idx[a] for a in labels if a not in unit_set},
                       kind="explicit", mul_entries=entries)
    declared = np.array(sorted(idx[u] for u in unit_set), dtype=np.int64)
    if not np.array_equal(declared, G.units):
        extra = sorted(set(G.units.tolist()) ^ set(declared.tolist()))
        G.unit_mismatch = [labels[i] for i in extra]
    return G


# ---------------------------------------------------------------------------
# HLS and coarse truncations


@dataclass
class Fiber:
    n: int
    kernel: int
    group: FiniteGroup
    unit: int
    arrows: np.ndarray
    generator_arrows: dict


@dataclass
class HLSTruncation:
    """First ``N`` fibres ``{n} x Gamma_n`` of an HLS groupoid (fibre at infinity omitted)."""

    groupoid: FiniteGroupoid
    parent: str
    kernels: tuple
    fibers: list

    @property
    def depth(self) -> int:
        return len(self.fibers)


PARENTS = ("Z", "SL2Z")


def check_nested(parent: str, kernels: Sequence[int]) -> None:
    """Kernels ``m Z`` (or level-``m`` congruence subgroups) are nested iff each level divides the next."""
    if parent not in PARENTS:
        raise ValueError(f"unknown parent group {parent!r}; expected one of {PARENTS}")
    for a in kernels:
        if int(a) < 1:
            raise ValueError(f"kernel level must be positive, got {a}")
    for a, b in zip(kernels, kernels[1:]):
        if int(b) % int(a):
            raise ValueError(f"quotient chain is not nested: level {b} kernel is not contained "
                             f"in level {a} kernel")


def quotient_group(parent: str, level: int, cap: int = DEFAULT.cap) -> FiniteGroup:
    if parent == "Z":
        return cyclic_group(level, cap=cap)
    if parent == "SL2Z":
        return sl2_mod(level, cap=cap)
    raise ValueError(f"unknown parent group {parent!r}")


def build_hls_truncation(parent: str, kernels: Sequence[int], depth: int | None = None,
                         cap: int = DEFAULT.cap) -> HLSTruncation:
    """Bundle of groups ``{n} x Gamma/K_n`` for ``n = 1..depth``.

    ``parent`` is ``"Z"`` (kernels ``mZ`` given by ``m``) or ``"SL2Z"``
    (principal congruence subgroups given by their level).
    """
    kernels = [int(k) for k in kernels]
    depth = len(kernels) if depth is None else int(depth)
    if depth < 1 or depth > len(kernels):
        raise ValueError(f"depth must lie in 1..{len(kernels)}")
    kernels = kernels[:depth]
    check_nested(parent, kernels)
    groups = [quotient_group(parent, m, cap=cap) for m in kernels]
    parts = [groupoid_from_group(g, kind=f"{parent}/{m}") for g, m in zip(groups, kernels)]
    G = disjoint_union(parts, tags=list(range(1, depth + 1)))
    G.kind = f"hls({parent}, {kernels})"
    offsets = np.concatenate([[0], np.cumsum([g.order for g in groups])[:-1]])
    fibers = []
    for n, (g, m, off) in enumerate(zip(groups, kernels, offsets), start=1):
        fibers.append(Fiber(n, m, g, int(off + g.identity), np.arange(off, off + g.order),
                            {nm: int(off + a) for nm, a in g.generators.items()}))
    return HLSTruncation(G, parent, tuple(kernels), fibers)


@dataclass
class CoarseTruncation:
    """Disjoint union of pair groupoids over the vertex sets of finitely many graphs.

    ``entourage`` marks the units and both orientations of every edge.
    """

    groupoid: FiniteGroupoid
    graphs: list
    entourage: np.ndarray
    blocks: list


def build_coarse_truncation(graphs: Sequence[FiniteGraph]) -> CoarseTruncation:
    graphs = list(graphs)
    if not graphs:
        raise ValueError("need at least one graph")
    for i, g in enumerate(graphs, start=1):
        if not g.is_connected():
            raise ValueError(f"graph {i} is not connected")
    parts = [build_pair(g.n) for g in graphs]
    G = disjoint_union(parts, tags=list(range(1, len(graphs) + 1)))
    G.kind = f"coarse({[g.n for g in graphs]})"
    ent, blocks, gens = [], [], {}
    off = 0
    for t, g in enumerate(graphs, start=1):
        n = g.n
        blocks.append(np.arange(off, off + n * n))
        ent.extend(off + i * n + i for i in range(n))
        for u, v in g.edges:
            ent.extend([off + u * n + v, off + v * n + u])
            gens[f"{t}:({v},{u})"] = off + v * n + u
            gens[f"{t}:({u},{v})"] = off + u * n + v
        off += n * n
    G.generators = gens
    return CoarseTruncation(G, graphs, np.array(sorted(ent), dtype=np.int64), blocks)
