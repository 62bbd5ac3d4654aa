"""Finite-dimensional *-representations of the convolution algebra.

Regular and trivial representations are stored as sparse patterns, so
realizing an element costs one pass over its support.  The GNS
representation works on the quotient of C_c(G) by the null space of the
Gram form, in a Gram-orthonormal basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix

from .algebra import (AlgebraElement, KernelFunction, check_positive_type, composable_pairs,
                      laplacian_element, psi)
from .config import DEFAULT, pmap
from .groupoid import FiniteGroupoid, orbits
from .spectral import eigh, operator_norm


class MeasureError(ValueError):
    def __init__(self, message, arrow=None):
        super().__init__(message)
        self.arrow = arrow


class NotGeneratingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# invariant measures


@dataclass
class InvariantMeasure:
    """Probability weights on the units, listed in the order of ``groupoid.units``."""

    groupoid: FiniteGroupoid
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.groupoid.n_units,):
            raise ValueError("one weight per unit expected")
        if np.any(w < 0):
            raise MeasureError("weights must be nonnegative")
        s = w.sum()
        if not abs(s - 1) <= 1e-9:
            raise MeasureError(f"weights must sum to 1, got {s!r}")
        self.weights = w

    @classmethod
    def uniform(cls, G, units=None):
        """Normalized counting measure on ``units`` (all units by default)."""
        w = np.zeros(G.n_units)
        pos = G.unit_pos[G.units if units is None else np.asarray(units)]
        w[pos] = 1.0 / len(pos)
        return cls(G, w)

    def at(self, unit: int) -> float:
        return float(self.weights[self.groupoid.unit_pos[unit]])

    @property
    def arrow_weights(self) -> np.ndarray:
        """Weight of each arrow's range (r*mu evaluated arrowwise)."""
        return self.weights[self.groupoid.unit_pos[self.groupoid.rng]]

    def violation(self, tol: float = 1e-12):
        return invariance_violation(self.groupoid, self.weights, tol)

    def is_invariant(self, tol: float = 1e-12) -> bool:
        return self.violation(tol) is None


def invariance_violation(G: FiniteGroupoid, weights, tol: float = 1e-9):
    """First arrow ``g`` with ``|w(r(g)) - w(s(g))| > tol`` (label), or None."""
    w = np.asarray(weights, dtype=float)
    d = np.abs(w[G.unit_pos[G.rng]] - w[G.unit_pos[G.src]])
    bad = np.flatnonzero(d > tol)
    return None if bad.size == 0 else G.label_of(int(bad[0]))


def invariant_measures(G: FiniteGroupoid) -> list[InvariantMeasure]:
    """Extreme invariant probability measures: uniform on one orbit each."""
    return [InvariantMeasure.uniform(G, o) for o in orbits(G).orbits]


# ---------------------------------------------------------------------------
# representations


class MatrixRepresentation:
    """A *-representation realized on ``C^dim`` with labelled basis."""

    kind = "representation"

    def __init__(self, groupoid: FiniteGroupoid, basis_labels: list):
        self.groupoid = groupoid
        self.basis_labels = list(basis_labels)

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    def realize(self, f: AlgebraElement) -> np.ndarray:
        raise NotImplementedError

    def realize_sparse(self, f: AlgebraElement):
        return csr_matrix(self.realize(f))

    def __call__(self, f: AlgebraElement) -> np.ndarray:
        return self.realize(f)

    def _check_groupoid(self, f):
        if f.groupoid is not self.groupoid:
            raise ValueError("element and representation live on different groupoids")

    def __repr__(self) -> str:
        return f"<{self.kind} representation, dim {self.dim}>"


class PatternRepresentation(MatrixRepresentation):
    """``realize(f)[i, j] = sum of weight * f(arrow)`` over stored ``(i, j, arrow, weight)`` patterns.

    Subclasses supply ``_pattern(arrows)`` returning the entries generated by
    the given arrows only.
    """

    def _pattern(self, arrows):
        raise NotImplementedError

    def _entries(self, f):
        self._check_groupoid(f)
        rows, cols, arr, wts = self._pattern(f.support)
        vals = f.coeffs[arr].astype(np.complex128) * wts
        return rows, cols, vals

    def realize(self, f: AlgebraElement) -> np.ndarray:
        rows, cols, vals = self._entries(f)
        d = self.dim
        flat = rows * d + cols
        out = (np.bincount(flat, weights=vals.real, minlength=d * d)
               + 1j * np.bincount(flat, weights=vals.imag, minlength=d * d))
        return out.reshape(d, d)

    def realize_sparse(self, f: AlgebraElement):
        rows, cols, vals = self._entries(f)
        return csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))


class RegularRepresentation(PatternRepresentation):
    """``pi_x`` on l^2(G_x): ``(pi_x(f) xi)(g) = sum_h f(g h^-1) xi(h)``."""

    kind = "regular"

    def __init__(self, G: FiniteGroupoid, x: int):
        if not G.is_unit[x]:
            raise ValueError(f"{G.label_of(x)} is not a unit")
        self.unit = int(x)
        self.fibre = G.source_fibre(x)
        super().__init__(G, [G.labels[i] for i in self.fibre])
        self._pos = np.full(G.n_arrows, -1, dtype=np.int64)
        self._pos[self.fibre] = np.arange(len(self.fibre))

    def _pattern(self, arrows):
        G = self.groupoid
        k, h = composable_pairs(G, arrows, self.fibre)
        g = G.compose_many(k, h)
        return self._pos[g], self._pos[h], k, np.ones(len(k))

    def position(self, arrow: int) -> int:
        return int(self._pos[arrow])


class TrivialRepresentation(PatternRepresentation):
    """``tau_mu`` on l^2(supp mu, mu) written in the orthonormal basis ``sqrt(mu(x)) delta_x``."""

    kind = "trivial"

    def __init__(self, G: FiniteGroupoid, mu: InvariantMeasure):
        bad = mu.violation(1e-12)
        if bad is not None:
            raise MeasureError(f"measure is not invariant at arrow {bad}", bad)
        self.measure = mu
        supported = G.units[mu.weights > 0]
        super().__init__(G, [G.labels[u] for u in supported])
        self._pos = np.full(G.n_arrows, -1, dtype=np.int64)
        self._pos[supported] = np.arange(len(supported))
        self._sqrt = np.sqrt(mu.weights[G.unit_pos[supported]])

    def _pattern(self, arrows):
        G = self.groupoid
        arrows = np.asarray(arrows, dtype=np.int64)
        i, j = self._pos[G.rng[arrows]], self._pos[G.src[arrows]]
        keep = (i >= 0) & (j >= 0)
        i, j, arrows = i[keep], j[keep], arrows[keep]
        return i, j, arrows, self._sqrt[i] / self._sqrt[j]


class ArrowRepresentation(MatrixRepresentation):
    """Representation given by one matrix per arrow (for small ad hoc examples)."""

    kind = "explicit"

    def __init__(self, G: FiniteGroupoid, images: np.ndarray, basis_labels=None, kind=None):
        images = np.asarray(images, dtype=np.complex128)
        if images.ndim != 3 or images.shape[0] != G.n_arrows or images.shape[1] != images.shape[2]:
            raise ValueError("images must have shape (arrows, d, d)")
        d = images.shape[1]
        super().__init__(G, basis_labels if basis_labels is not None else list(range(d)))
        self.images = images
        if kind:
            self.kind = kind

    def realize(self, f):
        self._check_groupoid(f)
        return np.tensordot(f.coeffs.astype(np.complex128), self.images, axes=1)


class DirectSum(MatrixRepresentation):
    kind = "direct_sum"

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise ValueError("empty direct sum")
        G = parts[0].groupoid
        if any(p.groupoid is not G for p in parts):
            raise ValueError("summands must share a groupoid")
        labels = [(i, lab) for i, p in enumerate(parts) for lab in p.basis_labels]
        super().__init__(G, labels)
        self.parts = parts
        self.offsets = np.concatenate([[0], np.cumsum([p.dim for p in parts])])

    def realize(self, f):
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for p, a, b in zip(self.parts, self.offsets[:-1], self.offsets[1:]):
            out[a:b, a:b] = p.realize(f)
        return out

    def realize_sparse(self, f):
        from scipy.sparse import block_diag
        return csr_matrix(block_diag([p.realize_sparse(f) for p in self.parts]))


class GNSRepresentation(MatrixRepresentation):
    """Left convolution on C_c(G) completed for the inner product

    ``<d_a, d_b> = mu(r(a)) phi(a^-1 b)`` when ``r(a) = r(b)``, else 0.
    Gram eigenvalues below ``tau_psd`` are quotiented out and the rest are
    whitened, so realized matrices are in an orthonormal basis.
    """

    kind = "gns"

    def __init__(self, G: FiniteGroupoid, phi: KernelFunction, mu: InvariantMeasure,
                 tau_psd: float = DEFAULT.tau_psd, check: bool = True):
        if check:
            res = check_positive_type(phi, tau_psd)
            if not res:
                raise ValueError(f"kernel is not of positive type: {res.summary()}")
        bad = mu.violation(1e-12)
        if bad is not None:
            raise MeasureError(f"measure is not invariant at arrow {bad}", bad)
        self.phi, self.measure = phi, mu
        self.gram = gns_gram(G, phi, mu)
        w, U = eigh(self.gram)
        keep = w > tau_psd
        self.gram_eigenvalues = w
        self._W = U[:, keep] / np.sqrt(w[keep])
        self._KW = self.gram @ self._W
        super().__init__(G, [f"e{j}" for j in range(int(keep.sum()))])

    def left_convolution(self, f: AlgebraElement) -> np.ndarray:
        """Matrix of ``xi -> f * xi`` on the delta basis of C_c(G)."""
        G = self.groupoid
        n = G.n_arrows
        k, b = composable_pairs(G, f.support, np.arange(n))
        c = G.compose_many(k, b)
        L = np.zeros((n, n), dtype=np.complex128)
        np.add.at(L, (c, b), f.coeffs[k].astype(np.complex128))
        return L

    def realize(self, f):
        self._check_groupoid(f)
        return self._KW.conj().T @ self.left_convolution(f) @ self._W


def gns_gram(G: FiniteGroupoid, phi: KernelFunction, mu: InvariantMeasure) -> np.ndarray:
    n = G.n_arrows
    a, b = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    same = G.rng[a] == G.rng[b]
    a, b = a[same], b[same]
    K = np.zeros((n, n), dtype=np.complex128)
    K[a, b] = mu.arrow_weights[a] * phi.values[G.compose_many(G.inv[a], b)]
    return K


def regular_rep(G, x) -> RegularRepresentation:
    return RegularRepresentation(G, x)


def regular_reps(G) -> list[RegularRepresentation]:
    return [RegularRepresentation(G, int(x)) for x in G.units]


def trivial_rep(G, mu: InvariantMeasure | None = None) -> TrivialRepresentation:
    return TrivialRepresentation(G, InvariantMeasure.uniform(G) if mu is None else mu)


def gns_rep(G, phi, mu: InvariantMeasure | None = None, tau_psd: float = DEFAULT.tau_psd):
    return GNSRepresentation(G, phi, InvariantMeasure.uniform(G) if mu is None else mu, tau_psd)


def direct_sum(*parts) -> DirectSum:
    if len(parts) == 1 and isinstance(parts[0], (list, tuple)):
        parts = parts[0]
    return DirectSum(parts)


# ---------------------------------------------------------------------------
# constant vectors


def _require_generating(family):
    family = list(family)
    if not family:
        raise NotGeneratingError("empty family")
    G = family[0].groupoid
    supp = np.unique(np.concatenate([f.support for f in family]))
    if not G.generates(supp):
        raise NotGeneratingError("the supports of the family do not generate the groupoid")
    return family


def constant_vectors(rep: MatrixRepresentation, family, tau_zero: float = DEFAULT.tau_zero) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of ``realize(Delta)`` for the family's Laplacian."""
    family = _require_generating(family)
    w, V = eigh(rep.realize(laplacian_element(family)))
    return V[:, w < tau_zero]


def constant_subspace_by_definition(rep: MatrixRepresentation, family, rtol: float = 1e-9) -> np.ndarray:
    """Common solutions of ``realize(f) xi = realize(Psi(f)) xi`` over the family.

    Computed from the stacked system by singular value decomposition, with no
    reference to the Laplacian.
    """
    from scipy.linalg import null_space
    family = list(family)
    if rep.dim == 0:
        return np.zeros((0, 0))
    M = np.vstack([rep.realize(f) - rep.realize(psi(f)) for f in family])
    if not np.any(M):
        return np.eye(rep.dim)
    return null_space(M, rcond=rtol)


def subspace_distance(U: np.ndarray, V: np.ndarray) -> float:
    """Operator-norm distance between the orthogonal projections onto two column spans."""
    U = np.asarray(U).reshape(U.shape[0], -1)
    V = np.asarray(V).reshape(V.shape[0], -1)
    if U.shape[0] != V.shape[0]:
        raise ValueError("subspaces live in different dimensions")
    P = U @ U.conj().T - V @ V.conj().T
    return operator_norm(P)


def induced_measure(rep: MatrixRepresentation, xi: np.ndarray) -> np.ndarray:
    """``x -> <xi, realize(delta_x) xi>`` over the units, in unit order."""
    G = rep.groupoid
    xi = np.asarray(xi, dtype=np.complex128)
    vals = [np.vdot(xi, rep.realize(AlgebraElement.delta(G, int(x))) @ xi) for x in G.units]
    return np.real(np.array(vals))


# ---------------------------------------------------------------------------
# reduced norm and conditional expectation


def reduced_norm(f: AlgebraElement) -> float:
    """``max_x || pi_x(f) ||``."""
    G = f.groupoid
    return max(pmap(lambda x: operator_norm(RegularRepresentation(G, int(x)).realize(f)), G.units))


def expectation_from_regular(f: AlgebraElement) -> np.ndarray:
    """``<delta_x, pi_x(f) delta_x>`` for each unit, in unit order."""
    G = f.groupoid
    out = []
    for x in G.units:
        rep = RegularRepresentation(G, int(x))
        j = rep.position(int(x))
        out.append(rep.realize(f)[j, j])
    return np.array(out)


def star_homomorphism_defect(rep: MatrixRepresentation, rng=None, trials: int = 10,
                             density: float = 0.5) -> dict:
    """Largest deviations from linearity, multiplicativity and adjoint compatibility."""
    rng = np.random.default_rng(rng)
    G = rep.groupoid
    lin = mul = adj = 0.0
    for _ in range(trials):
        f = AlgebraElement.random(G, rng, density)
        g = AlgebraElement.random(G, rng, density)
        a = complex(rng.standard_normal(), rng.standard_normal())
        Rf, Rg = rep.realize(f), rep.realize(g)
        lin = max(lin, float(np.max(np.abs(rep.realize(f * a + g) - (a * Rf + Rg)), initial=0)))
        mul = max(mul, float(np.max(np.abs(rep.realize(f @ g) - Rf @ Rg), initial=0)))
        adj = max(adj, float(np.max(np.abs(rep.realize(f.star) - Rf.conj().T), initial=0)))
    return {"linear": lin, "multiplicative": mul, "adjoint": adj}
