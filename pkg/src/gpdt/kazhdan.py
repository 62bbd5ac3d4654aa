"""Laplacians of bisection families, Kazhdan constants and Kazhdan projections.

For a family ``phi_1..phi_n`` of [0,1]-valued functions supported on
bisections, ``Delta = sum_i (phi_i - Psi(phi_i))* (phi_i - Psi(phi_i))``.
Its kernel in any representation is the space of constant vectors, and the
projection onto that kernel is realized inside the algebra as a polynomial in
``Delta``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix, identity as sp_identity

from .algebra import (AlgebraElement, adjoint, conditional_expectation, convolve, i_norm,
                      is_bisection_supported, laplacian_element, max_abs, psi)
from .config import DEFAULT, Tolerances, pmap
from .groupoid import FiniteGroupoid, HLSTruncation
from .groups import FiniteGroup
from .representations import (MatrixRepresentation, RegularRepresentation, expectation_from_regular,
                              regular_reps)
from .spectral import eigh, eigvalsh, operator_norm, smallest_nonzero_eig


class InvalidFamily(ValueError):
    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class InsufficientGap(ValueError):
    def __init__(self, lam1: float, needed: float):
        super().__init__(f"spectral gap {lam1:.6g} is below the required {needed:.3g}")
        self.lam1 = lam1


# ---------------------------------------------------------------------------
# families and Laplacians


@dataclass
class BisectionFamily:
    """Bisection-supported functions with values in [0, 1] whose supports generate G."""

    groupoid: FiniteGroupoid
    members: list
    names: list = field(default_factory=list)

    def __post_init__(self):
        if not self.names:
            self.names = [f"phi{i}" for i in range(len(self.members))]
        self.validate()

    def validate(self):
        G = self.groupoid
        if not self.members:
            raise InvalidFamily("generation", "empty family")
        for nm, f in zip(self.names, self.members):
            if f.groupoid is not G:
                raise InvalidFamily("groupoid", f"{nm} lives on another groupoid")
            c = f.coeffs.astype(np.complex128)
            if np.any(np.abs(c.imag) > 0) or np.any(c.real < 0) or np.any(c.real > 1):
                raise InvalidFamily("values in [0,1]", f"{nm} takes a value outside [0, 1]")
            if not is_bisection_supported(f):
                raise InvalidFamily("bisection support", f"{nm} is not supported on a bisection")
            if i_norm(f) > 1 + 1e-12:
                raise InvalidFamily("I-norm <= 1", f"{nm} has I-norm {i_norm(f)}")
        supp = np.unique(np.concatenate([f.support for f in self.members]))
        if not G.generates(supp):
            raise InvalidFamily("generation", "the supports do not generate the groupoid")

    def __len__(self) -> int:
        return len(self.members)

    @property
    def n(self) -> int:
        """Members that move something; unit-supported members add nothing to ``Delta``."""
        return sum(1 for f in self.members if not f.is_unit_supported())

    @property
    def support(self) -> np.ndarray:
        return np.unique(np.concatenate([f.support for f in self.members]))


def _arrow_indices(G, arrows) -> list[int]:
    out = []
    for a in arrows:
        out.append(int(a) if isinstance(a, (int, np.integer)) else G.index(a))
    return out


def singleton_family(G: FiniteGroupoid, arrows, include_units: bool = False) -> BisectionFamily:
    """``{delta_g : g in arrows}`` (integer coefficients, so Laplacians are exact)."""
    idx = sorted(set(_arrow_indices(G, arrows)))
    members = [AlgebraElement.delta(G, i, 1, dtype=np.int64) for i in idx]
    names = [G.label_of(i) for i in idx]
    if include_units:
        members.append(AlgebraElement.unit(G, dtype=np.int64))
        names.append("units")
    return BisectionFamily(G, members, names)


def canonical_family(G: FiniteGroupoid, generators=None) -> BisectionFamily:
    """Singletons over ``generators`` and their inverses (units dropped), plus the unit indicator."""
    gens = G.generators.values() if generators is None else generators
    idx = _arrow_indices(G, gens)
    full = set(idx) | {int(G.inv[i]) for i in idx}
    full = [i for i in sorted(full) if not G.is_unit[i]]
    members = [AlgebraElement.delta(G, i, 1, dtype=np.int64) for i in full]
    names = [G.label_of(i) for i in full]
    members.append(AlgebraElement.unit(G, dtype=np.int64))
    names.append("units")
    return BisectionFamily(G, members, names)


def generator_family(G: FiniteGroupoid, generators=None) -> BisectionFamily:
    """Singletons over the given generators only (no inverses added)."""
    gens = G.generators.values() if generators is None else generators
    idx = [i for i in _arrow_indices(G, gens) if not G.is_unit[i]]
    if not idx:
        return singleton_family(G, [], include_units=True)
    return singleton_family(G, idx)


@dataclass
class LaplacianElement:
    element: AlgebraElement
    family: BisectionFamily

    @property
    def groupoid(self):
        return self.element.groupoid


def laplacian(G: FiniteGroupoid, family: BisectionFamily) -> LaplacianElement:
    if family.groupoid is not G:
        raise InvalidFamily("groupoid", "family lives on another groupoid")
    family.validate()
    return LaplacianElement(laplacian_element(family.members), family)


def _delta(G, family_or_laplacian) -> tuple[AlgebraElement, BisectionFamily]:
    if isinstance(family_or_laplacian, LaplacianElement):
        return family_or_laplacian.element, family_or_laplacian.family
    return laplacian(G, family_or_laplacian).element, family_or_laplacian


# ---------------------------------------------------------------------------
# Kazhdan constants


@dataclass
class RepGap:
    kind: str
    dim: int
    kernel_dim: int
    gap: float
    method: str

    @property
    def vacuous(self) -> bool:
        return math.isinf(self.gap)


@dataclass
class KazhdanCertificate:
    family: BisectionFamily
    gap: float
    constant: float
    n: int
    per_rep: list
    rep_family: str
    checks: int = 0
    worst_margin: float = math.inf

    @property
    def verified(self) -> bool:
        return self.worst_margin >= -1e-7

    @property
    def vacuous(self) -> bool:
        return math.isinf(self.gap)


def _rep_tag(reps) -> str:
    kinds = sorted({r.kind for r in reps})
    return kinds[0] if len(kinds) == 1 else "mixed(" + ",".join(kinds) + ")"


def rep_gap(rep: MatrixRepresentation, delta: AlgebraElement, tol: Tolerances = DEFAULT):
    """Gap of ``realize(Delta)`` off its kernel, and an orthonormal kernel basis."""
    d = rep.dim
    if d == 0:
        return RepGap(rep.kind, 0, 0, math.inf, "empty"), np.zeros((0, 0))
    if d <= tol.dense_limit or not isinstance(rep, RegularRepresentation):
        w, V = eigh(rep.realize(delta))
        ker = w < tol.tau_zero
        gap = float(w[~ker][0]) if np.any(~ker) else math.inf
        return RepGap(rep.kind, d, int(ker.sum()), gap, "jacobi"), V[:, ker]
    # regular representations of generating families have exactly the constants as kernel
    M = rep.realize_sparse(delta)
    K = np.ones((d, 1)) / np.sqrt(d)
    if np.linalg.norm(M @ K) > tol.tau_zero:
        raise ValueError("constant vector is not in the kernel; family does not generate")
    if d == 1:
        return RepGap(rep.kind, 1, 1, math.inf, "lanczos"), K
    lam = smallest_nonzero_eig(lambda v: M @ v, d, K, max_iter=tol.max_iter, seed=tol.seed)
    return RepGap(rep.kind, d, 1, lam, "lanczos"), K


def kazhdan_constant(G: FiniteGroupoid, family, reps=None, checks: int = 50,
                     tol: Tolerances = DEFAULT, seed: int | None = None) -> KazhdanCertificate:
    """Certified pair: ``c = sqrt(lambda_1 / n)`` over the given representations.

    Each representation is probed with ``checks`` random unit vectors
    orthogonal to its constants; ``worst_margin`` records the smallest value of
    ``max_i ||(phi_i - Psi(phi_i)) xi|| - c``.
    """
    delta, fam = _delta(G, family)
    reps = regular_reps(G) if reps is None else list(reps)
    results = pmap(lambda r: rep_gap(r, delta, tol), reps)
    gaps = [g for g, _ in results]
    live = [g.gap for g in gaps if not g.vacuous]
    lam1 = min(live) if live else math.inf
    n = max(fam.n, 1)
    c = math.sqrt(lam1 / n) if live else math.inf
    cert = KazhdanCertificate(fam, lam1, c, fam.n, gaps, _rep_tag(reps))
    if live and checks:
        rng = np.random.default_rng(tol.seed if seed is None else seed)
        moves = [f - psi(f) for f in fam.members if not f.is_unit_supported()]
        worst = math.inf
        for rep, (g, K) in zip(reps, results):
            if g.vacuous:
                continue
            mats = [rep.realize_sparse(m) for m in moves]
            for _ in range(checks):
                xi = rng.standard_normal(rep.dim) + 1j * rng.standard_normal(rep.dim)
                xi = xi - K @ (K.conj().T @ xi)
                xi = xi - K @ (K.conj().T @ xi)
                xi /= np.linalg.norm(xi)
                worst = min(worst, max(np.linalg.norm(A @ xi) for A in mats) - c)
        cert.checks = checks
        cert.worst_margin = worst
    return cert


# ---------------------------------------------------------------------------
# Kazhdan projections


def leja_order(points) -> list[float]:
    """Greedy Leja ordering: start from the largest point, then maximize the product of distances."""
    pts = sorted(float(p) for p in points)
    if not pts:
        return []
    out = [max(pts, key=abs)]
    rest = [p for p in pts if p != out[0]]
    logd = np.zeros(len(rest))
    arr = np.array(rest)
    while rest:
        logd = logd + np.log(np.abs(arr - out[-1]))
        j = int(np.argmax(logd))
        out.append(rest.pop(j))
        arr = np.delete(arr, j)
        logd = np.delete(logd, j)
    return out


def cluster(values, tol: float) -> list[float]:
    """Merge sorted values closer than ``tol`` (relative above 1), keeping cluster means."""
    vals = sorted(float(v) for v in values)
    groups: list[list[float]] = []
    for v in vals:
        if groups and abs(v - groups[-1][-1]) <= tol * max(1.0, abs(v)):
            groups[-1].append(v)
        else:
            groups.append([v])
    return [float(np.mean(g)) for g in groups]


def regular_spectrum(G: FiniteGroupoid, delta: AlgebraElement) -> np.ndarray:
    """Eigenvalues of ``Delta`` over the direct sum of all regular representations."""
    parts = pmap(lambda r: eigvalsh(r.realize(delta)), regular_reps(G))
    return np.sort(np.concatenate(parts))


def _mcweeny(p: AlgebraElement, steps: int = 6) -> AlgebraElement:
    best = p
    defect = max_abs(convolve(p, p) - p)
    for _ in range(steps):
        if defect <= 1e-15:
            break
        p2 = convolve(best, best)
        q = 3 * p2 - 2 * convolve(p2, best)
        q = (q + adjoint(q)) * 0.5
        d = max_abs(convolve(q, q) - q)
        if d >= defect:
            break
        best, defect = q, d
    return best


def kazhdan_projection(G: FiniteGroupoid, family=None, tol: Tolerances = DEFAULT,
                       refine: bool = True) -> AlgebraElement:
    """``p = chi_{0}(Delta)`` as the Lagrange polynomial ``prod_j (1 - Delta / lambda_j)``.

    The ``lambda_j`` are the distinct nonzero eigenvalues of ``Delta`` across
    all regular representations, applied in Leja order; a few purification
    steps ``p -> 3p^2 - 2p^3`` then remove rounding drift.
    """
    if family is None:
        family = canonical_family(G)
    delta, _ = _delta(G, family)
    delta = delta.astype(np.complex128)
    spec = regular_spectrum(G, delta)
    nonzero = spec[spec >= tol.tau_zero]
    if nonzero.size:
        lam1 = float(nonzero[0])
        if lam1 < 10 * tol.tau_zero:
            raise InsufficientGap(lam1, 10 * tol.tau_zero)
    p = AlgebraElement.unit(G)
    for lam in leja_order(cluster(nonzero, tol.cluster_tol)):
        p = p - convolve(p, delta) / lam
    p = (p + adjoint(p)) * 0.5
    return _mcweeny(p) if refine else p


def projection_from_regular_reps(G: FiniteGroupoid, family=None, tol: Tolerances = DEFAULT) -> AlgebraElement:
    """Independent route: ``p(g) = <delta_g, P_x delta_x>`` with ``P_x`` the kernel projection of ``pi_x(Delta)``."""
    if family is None:
        family = canonical_family(G)
    delta, _ = _delta(G, family)
    c = np.zeros(G.n_arrows, dtype=np.complex128)
    for rep in regular_reps(G):
        w, V = eigh(rep.realize(delta))
        K = V[:, w < tol.tau_zero]
        P = K @ K.conj().T
        j = rep.position(rep.unit)
        c[rep.fibre] = P[:, j]
    return AlgebraElement(G, c)


def projection_defects(G: FiniteGroupoid, p: AlgebraElement, family=None) -> dict:
    """Coefficient idempotence and self-adjointness, and the worst regular-rep distance to constants."""
    if family is None:
        family = canonical_family(G)
    rep_err = 0.0
    for rep in regular_reps(G):
        d = rep.dim
        target = np.ones((d, d)) / d
        rep_err = max(rep_err, float(np.max(np.abs(rep.realize(p) - target))))
    return {
        "idempotent": max_abs(convolve(p, p) - p),
        "selfadjoint": max_abs(p - adjoint(p)),
        "regular": rep_err,
    }


@dataclass
class ExpectationReport:
    units: list
    values: np.ndarray
    expected: np.ndarray
    max_deviation: float
    cross_check: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= 1e-7

    def to_dict(self) -> dict:
        return {
            "units": [str(u) for u in self.units],
            "values": [float(v) for v in self.values],
            "expected": [float(v) for v in self.expected],
            "max_deviation": self.max_deviation,
            "passed": self.passed,
        }


def expectation_law_check(G: FiniteGroupoid, p: AlgebraElement) -> ExpectationReport:
    """Compare ``E(p)(x)`` with ``1/|G_x|`` at every unit."""
    E = conditional_expectation(p).coeffs[G.units]
    sizes = np.bincount(G.src, minlength=G.n_arrows)[G.units]
    expected = 1.0 / sizes
    diag = expectation_from_regular(p)
    dev = float(np.max(np.abs(E - expected)))
    cross = float(np.max(np.abs(diag - E)))
    return ExpectationReport([G.label_of(int(u)) for u in G.units], np.real(E), expected, dev, cross)


# ---------------------------------------------------------------------------
# HLS truncations


def exact_projection_norm(p: AlgebraElement, arrows, tol: float = 1e-9) -> float | None:
    """Norm of the restriction of ``p`` to ``arrows`` when it rounds to an exact projection.

    The coefficients are rounded to rationals with a common denominator ``D``
    and ``Q = D q`` is checked over the integers: ``Q* = Q`` and ``Q Q = D Q``.
    A nonzero self-adjoint idempotent has norm exactly 1 in any faithful
    representation, so the result is ``1.0`` or ``0.0``. Returns ``None`` when
    rounding moves a coefficient by more than ``tol``.
    """
    G = p.groupoid
    arrows = np.asarray(arrows, dtype=np.int64)
    vals = np.asarray(p.coeffs[arrows])
    if np.max(np.abs(np.imag(vals)), initial=0) > tol:
        return None
    fr = [Fraction(float(v)).limit_denominator(10**6) for v in np.real(vals)]
    D = math.lcm(*(f.denominator for f in fr)) if fr else 1
    ints = [int(f * D) for f in fr]
    if np.max(np.abs(np.array(ints, dtype=float) / D - np.real(vals)), initial=0) > tol:
        return None
    big = D * D * max(len(arrows), 1) * max((abs(i) for i in ints), default=1) >= 2**62
    Q = AlgebraElement(G, np.zeros(G.n_arrows, dtype=object if big else np.int64))
    for a, v in zip(arrows.tolist(), ints):
        Q.coeffs[a] = v
    if not Q.star.equals(Q) or not (Q @ Q).equals(Q * D):
        return None
    return 1.0 if any(ints) else 0.0


def fiber_block_norms(hls: HLSTruncation, p: AlgebraElement, exact: bool = True) -> list[float]:
    """``||pi_{x_n}(p)||`` per fibre; exact (0 or 1) when each block rounds to a projection."""
    G = hls.groupoid
    out = []
    for fb in hls.fibers:
        val = exact_projection_norm(p, fb.arrows) if exact else None
        if val is None:
            val = operator_norm(RegularRepresentation(G, fb.unit).realize(p))
        out.append(val)
    return out


def exactness_witness(hls: HLSTruncation, m: int, p: AlgebraElement | None = None) -> float:
    """``max_{m < n <= N} ||pi_{x_n}(p)||``: the distance from ``p`` to elements living on fibres ``<= m``."""
    N = hls.depth
    if not 0 <= m <= N:
        raise ValueError(f"cutoff m must lie in 0..{N}")
    if m == N:
        return 0.0
    if p is None:
        p = kazhdan_projection(hls.groupoid)
    return max(fiber_block_norms(hls, p)[m:])


def witness_profile(hls: HLSTruncation, p: AlgebraElement | None = None) -> list[float]:
    if p is None:
        p = kazhdan_projection(hls.groupoid)
    norms = fiber_block_norms(hls, p)
    return [max(norms[m:]) if m < len(norms) else 0.0 for m in range(len(norms) + 1)]


def cayley_laplacian(group: FiniteGroup, generators=None) -> csr_matrix:
    """``sum_s (2 - u_s - u_s*)`` with ``u_s`` left multiplication by ``s``, sparse."""
    gens = list(group.generators.values()) if generators is None else list(generators)
    n = group.order
    L = csr_matrix((n, n))
    I = sp_identity(n, format="csr")
    for s in gens:
        perm = group.left_mult(int(s))
        U = csr_matrix((np.ones(n), (perm, np.arange(n))), shape=(n, n))
        L = L + 2 * I - U - U.T
    return csr_matrix(L)


def laplacian_gap(L, tol: Tolerances = DEFAULT, kernel=None) -> float:
    """Smallest nonzero eigenvalue of a PSD matrix whose kernel is the constants (or ``kernel``)."""
    n = L.shape[0]
    if n == 1:
        return math.inf
    if n <= tol.dense_limit:
        A = L.toarray() if hasattr(L, "toarray") else np.asarray(L)
        w = eigvalsh(A)
        nz = w[w >= tol.tau_zero]
        return float(nz[0]) if nz.size else math.inf
    K = np.ones((n, 1)) / np.sqrt(n) if kernel is None else kernel
    return smallest_nonzero_eig(lambda v: L @ v, n, K, max_iter=tol.max_iter, seed=tol.seed)


@dataclass(frozen=True)
class GapRow:
    fiber: int
    size: int
    gap: float


def cayley_gap_profile(groups, tol: Tolerances = DEFAULT, start: int = 1) -> list[GapRow]:
    """Rows ``(index, |Gamma_n|, lambda_1)`` of the Cayley Laplacians of the given groups."""
    groups = list(groups)
    gaps = pmap(lambda g: laplacian_gap(cayley_laplacian(g), tol), groups)
    return [GapRow(i, g.order, lam) for i, (g, lam) in enumerate(zip(groups, gaps), start=start)]


def hls_gap_profile(parent: str, kernels, depth: int | None = None, tol: Tolerances = DEFAULT) -> list[GapRow]:
    """Per-fibre Cayley gaps of an HLS truncation (nestedness enforced)."""
    from .groupoid import build_hls_truncation
    hls = build_hls_truncation(parent, kernels, depth, cap=tol.cap)
    return cayley_gap_profile([fb.group for fb in hls.fibers], tol)


def sl2_prime_profile(primes=(3, 5, 7, 11, 13), tol: Tolerances = DEFAULT) -> list[GapRow]:
    """Cayley gaps of SL(2, Z/p) for S, T; these quotients need not form a nested chain."""
    from .groups import sl2_mod
    rows = cayley_gap_profile([sl2_mod(p, cap=tol.cap) for p in primes], tol)
    return [GapRow(p, r.size, r.gap) for p, r in zip(primes, rows)]


def pow2_chain(N: int) -> list[int]:
    return [2 ** n for n in range(1, N + 1)]
