"""The convolution *-algebra of a finite groupoid.

An element is a dense coefficient vector indexed by arrows.  Complex floats
are the default; integer (and ``object``/Fraction) coefficient arrays take an
exact path through every operation here, which the expander decomposition
relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import DEFAULT, pmap
from .groupoid import FiniteGroupoid, composable_pairs
from .spectral import eigvalsh


class GroupoidMismatch(ValueError):
    pass


def _exact(dtype) -> bool:
    return np.issubdtype(dtype, np.integer) or dtype == object


class AlgebraElement:
    """A function on the arrows of ``groupoid``; absent arrows carry 0."""

    __slots__ = ("groupoid", "coeffs")
    __array_priority__ = 100

    def __init__(self, groupoid: FiniteGroupoid, coeffs=None, dtype=None):
        self.groupoid = groupoid
        n = groupoid.n_arrows
        if coeffs is None:
            coeffs = np.zeros(n, dtype=dtype or np.complex128)
        c = np.asarray(coeffs, dtype=dtype) if dtype is not None else np.asarray(coeffs)
        if c.dtype.kind in "fb":
            c = c.astype(np.complex128)
        if c.shape != (n,):
            raise ValueError(f"coefficient vector must have length {n}, got shape {c.shape}")
        self.coeffs = c

    # constructors

    @classmethod
    def zero(cls, G, dtype=np.complex128):
        return cls(G, np.zeros(G.n_arrows, dtype=dtype))

    @classmethod
    def delta(cls, G, arrow, value=1, dtype=np.complex128):
        i = arrow if isinstance(arrow, (int, np.integer)) else G.index(arrow)
        c = np.zeros(G.n_arrows, dtype=dtype)
        c[int(i)] = value
        return cls(G, c)

    @classmethod
    def indicator(cls, G, arrows=None, dtype=np.complex128):
        c = np.zeros(G.n_arrows, dtype=dtype)
        if arrows is None:
            c[:] = 1
        else:
            arrows = np.asarray(arrows)
            if arrows.dtype == bool:
                c[arrows] = 1
            else:
                c[np.asarray(arrows, dtype=np.int64)] = 1
        return cls(G, c)

    @classmethod
    def unit(cls, G, dtype=np.complex128):
        """The identity element: indicator of the unit space."""
        return cls.indicator(G, G.units, dtype)

    @classmethod
    def from_dict(cls, G, values: dict, dtype=np.complex128):
        c = np.zeros(G.n_arrows, dtype=dtype)
        for lab, v in values.items():
            c[G.index(lab)] += v
        return cls(G, c)

    @classmethod
    def random(cls, G, rng=None, density: float = 0.5, real: bool = False, scale: float = 1.0):
        rng = np.random.default_rng(rng)
        n = G.n_arrows
        c = rng.standard_normal(n) if real else rng.standard_normal(n) + 1j * rng.standard_normal(n)
        c = c * (rng.random(n) < density) * scale
        return cls(G, c.astype(np.complex128))

    # basic data

    @property
    def dtype(self):
        return self.coeffs.dtype

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.coeffs != 0)

    def __call__(self, label):
        i = label if isinstance(label, (int, np.integer)) else self.groupoid.index(label)
        return self.coeffs[int(i)]

    def to_dict(self) -> dict:
        G = self.groupoid
        return {G.label_of(int(i)): self.coeffs[i] for i in self.support}

    def __repr__(self) -> str:
        terms = ", ".join(f"{k}: {v}" for k, v in self.to_dict().items())
        return f"AlgebraElement({{{terms}}})"

    def is_unit_supported(self) -> bool:
        return bool(np.all(self.groupoid.is_unit[self.support]))

    def astype(self, dtype) -> "AlgebraElement":
        return AlgebraElement(self.groupoid, self.coeffs.astype(dtype))

    # arithmetic

    def _check(self, other):
        if not isinstance(other, AlgebraElement):
            raise TypeError("expected an AlgebraElement")
        if other.groupoid is not self.groupoid:
            raise GroupoidMismatch("elements live on different groupoids")

    def __add__(self, other):
        if isinstance(other, AlgebraElement):
            self._check(other)
            return AlgebraElement(self.groupoid, self.coeffs + other.coeffs)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, AlgebraElement):
            self._check(other)
            return AlgebraElement(self.groupoid, self.coeffs - other.coeffs)
        return NotImplemented

    def __neg__(self):
        return AlgebraElement(self.groupoid, -self.coeffs)

    def __mul__(self, scalar):
        if isinstance(scalar, AlgebraElement):
            return NotImplemented
        return AlgebraElement(self.groupoid, self.coeffs * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return AlgebraElement(self.groupoid, self.coeffs / scalar)

    def __matmul__(self, other):
        return convolve(self, other)

    @property
    def star(self) -> "AlgebraElement":
        return adjoint(self)

    def equals(self, other) -> bool:
        """Exact coefficient equality."""
        self._check(other)
        return bool(np.all(self.coeffs == other.coeffs))

    def allclose(self, other, tol: float = 1e-12) -> bool:
        self._check(other)
        return max_abs(self - other) <= tol


def max_abs(f: AlgebraElement) -> float:
    return float(np.max(np.abs(f.coeffs.astype(np.complex128)))) if f.coeffs.size else 0.0


def _accumulate(n: int, idx: np.ndarray, vals: np.ndarray, dtype) -> np.ndarray:
    if _exact(dtype):
        out = np.zeros(n, dtype=dtype)
        np.add.at(out, idx, vals)
        return out
    if np.iscomplexobj(vals):
        return (np.bincount(idx, weights=vals.real, minlength=n)
                + 1j * np.bincount(idx, weights=vals.imag, minlength=n))
    return np.bincount(idx, weights=vals, minlength=n).astype(dtype)


def convolve(f1: AlgebraElement, f2: AlgebraElement) -> AlgebraElement:
    """``(f1 f2)(g) = sum over g = hk of f1(h) f2(k)``."""
    if not isinstance(f1, AlgebraElement) or not isinstance(f2, AlgebraElement):
        raise TypeError("convolve expects two AlgebraElements")
    if f1.groupoid is not f2.groupoid:
        raise GroupoidMismatch("cannot convolve elements of different groupoids")
    G = f1.groupoid
    dtype = np.result_type(f1.coeffs, f2.coeffs)
    h, k = composable_pairs(G, f1.support, f2.support)
    if h.size == 0:
        return AlgebraElement(G, np.zeros(G.n_arrows, dtype=dtype))
    hk = G.compose_many(h, k)
    vals = f1.coeffs[h] * f2.coeffs[k]
    return AlgebraElement(G, _accumulate(G.n_arrows, hk, vals, dtype))


def adjoint(f: AlgebraElement) -> AlgebraElement:
    """``f*(g) = conj(f(g^-1))``."""
    G = f.groupoid
    c = f.coeffs[G.inv]
    if np.iscomplexobj(c):
        c = np.conj(c)
    return AlgebraElement(G, c)


def psi(f: AlgebraElement) -> AlgebraElement:
    """Range-fibre sums placed on the units: ``Psi(f)(x) = sum_{g in G^x} f(g)``."""
    G = f.groupoid
    return AlgebraElement(G, _accumulate(G.n_arrows, G.rng, f.coeffs, f.coeffs.dtype))


def i_norm(f: AlgebraElement) -> float:
    G = f.groupoid
    a = np.abs(f.coeffs.astype(np.complex128))
    by_range = np.bincount(G.rng, weights=a, minlength=G.n_arrows)
    by_source = np.bincount(G.src, weights=a, minlength=G.n_arrows)
    return float(max(by_range.max(initial=0.0), by_source.max(initial=0.0)))


def is_bisection_supported(f: AlgebraElement) -> bool:
    G = f.groupoid
    s = f.support
    return len(np.unique(G.src[s])) == s.size and len(np.unique(G.rng[s])) == s.size


def conditional_expectation(f: AlgebraElement) -> AlgebraElement:
    """Restriction to the unit space."""
    c = np.zeros_like(f.coeffs)
    u = f.groupoid.units
    c[u] = f.coeffs[u]
    return AlgebraElement(f.groupoid, c)


def to_fractions(f: AlgebraElement) -> AlgebraElement:
    """Exact copy with ``Fraction`` coefficients (real parts of integral or rational data)."""
    c = np.array([Fraction(v).limit_denominator() if not isinstance(v, Fraction) else v
                  for v in np.real(f.coeffs).tolist()], dtype=object)
    return AlgebraElement(f.groupoid, c)


# ---------------------------------------------------------------------------
# positive and negative type


@dataclass
class KernelFunction:
    """A function defined on every arrow; candidate positive-type ``phi`` or negative-type ``F``."""

    groupoid: FiniteGroupoid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.groupoid.n_arrows,):
            raise ValueError("a kernel function must be defined on every arrow")
        self.values = v

    @classmethod
    def constant(cls, G, value=1.0):
        return cls(G, np.full(G.n_arrows, value, dtype=float))

    @classmethod
    def unit_indicator(cls, G):
        return cls(G, G.is_unit.astype(float))

    @classmethod
    def from_dict(cls, G, values: dict, default=None):
        out = np.full(G.n_arrows, np.nan if default is None else default, dtype=complex)
        for lab, v in values.items():
            out[G.index(lab)] = v
        if np.any(np.isnan(out)):
            missing = G.label_of(int(np.flatnonzero(np.isnan(out))[0]))
            raise ValueError(f"kernel function undefined at arrow {missing}")
        if not np.any(out.imag):
            out = out.real
        return cls(G, out)

    def __call__(self, label):
        i = label if isinstance(label, (int, np.integer)) else self.groupoid.index(label)
        return self.values[int(i)]


@dataclass(frozen=True)
class KernelCheck:
    """Outcome of a positive/negative type check.

    On failure ``condition`` names the violated requirement and ``unit`` (or
    ``arrow``) locates it; ``extreme`` is the offending eigenvalue for the
    Gram condition.
    """

    ok: bool
    kind: str
    condition: str | None = None
    unit: str | None = None
    arrow: str | None = None
    extreme: float | None = None

    def __bool__(self) -> bool:
        return self.ok

    def summary(self) -> str:
        if self.ok:
            return f"{self.kind}: PASS"
        where = self.unit if self.unit is not None else self.arrow
        extra = f" (eigenvalue {self.extreme:.6g})" if self.extreme is not None else ""
        return f"{self.kind}: FAIL {self.condition} at {where}{extra}"


def fibre_kernel_matrix(phi: KernelFunction, x: int) -> np.ndarray:
    """``[phi(g_i^-1 g_j)]`` over the range fibre ``G^x`` in canonical order."""
    G = phi.groupoid
    fib = G.range_fibre(x)
    a, b = np.meshgrid(fib, fib, indexing="ij")
    prod = G.compose_many(G.inv[a.ravel()], b.ravel()).reshape(a.shape)
    return phi.values[prod]


def _first_bad(mask, G):
    i = int(np.flatnonzero(mask)[0])
    return G.label_of(i)


def check_positive_type(phi: KernelFunction, tau_psd: float = DEFAULT.tau_psd,
                        tol: float = 1e-12) -> KernelCheck:
    G = phi.groupoid
    v = phi.values
    units = G.units
    bad = np.abs(v[units] - 1) > tol
    if np.any(bad):
        return KernelCheck(False, "positive-type", "phi = 1 on units", arrow=_first_bad(
            np.isin(np.arange(G.n_arrows), units[bad]), G))
    bad = np.abs(v[G.inv] - np.conj(v)) > tol
    if np.any(bad):
        return KernelCheck(False, "positive-type", "phi(g^-1) = conj phi(g)", arrow=_first_bad(bad, G))

    def lowest(x):
        return float(eigvalsh(fibre_kernel_matrix(phi, x))[0])

    for x, lo in zip(units, pmap(lowest, units)):
        if lo < -tau_psd:
            return KernelCheck(False, "positive-type", "Gram matrix positive semidefinite",
                               unit=G.label_of(int(x)), extreme=lo)
    return KernelCheck(True, "positive-type")


def _zero_sum_basis(k: int) -> np.ndarray:
    # orthonormal basis of {a : sum a = 0}, Helmert style
    Q = np.zeros((k, max(k - 1, 0)))
    for j in range(1, k):
        Q[:j, j - 1] = 1.0
        Q[j, j - 1] = -j
        Q[:, j - 1] /= np.sqrt(j * (j + 1))
    return Q


def check_negative_type(F: KernelFunction, tau_psd: float = DEFAULT.tau_psd,
                        tol: float = 1e-12) -> KernelCheck:
    G = F.groupoid
    v = F.values
    if np.iscomplexobj(v) and np.any(np.abs(v.imag) > tol):
        return KernelCheck(False, "negative-type", "F real-valued", arrow=_first_bad(np.abs(v.imag) > tol, G))
    v = np.real(v)
    if np.any(v < -tol):
        return KernelCheck(False, "negative-type", "F nonnegative", arrow=_first_bad(v < -tol, G))
    units = G.units
    bad = np.abs(v[units]) > tol
    if np.any(bad):
        return KernelCheck(False, "negative-type", "F vanishes on units", arrow=_first_bad(
            np.isin(np.arange(G.n_arrows), units[bad]), G))
    bad = np.abs(v[G.inv] - v) > tol
    if np.any(bad):
        return KernelCheck(False, "negative-type", "F(g^-1) = F(g)", arrow=_first_bad(bad, G))
    R = KernelFunction(G, v)

    def highest(x):
        M = fibre_kernel_matrix(R, x)
        Q = _zero_sum_basis(M.shape[0])
        if Q.shape[1] == 0:
            return 0.0
        return float(eigvalsh(Q.T @ M @ Q)[-1])

    for x, hi in zip(units, pmap(highest, units)):
        if hi > tau_psd:
            return KernelCheck(False, "negative-type", "conditionally negative semidefinite",
                               unit=G.label_of(int(x)), extreme=hi)
    return KernelCheck(True, "negative-type")


def schoenberg_transform(F: KernelFunction, t: float) -> KernelFunction:
    """``phi_t(g) = exp(-t F(g))``."""
    if not t > 0:
        raise ValueError("t must be positive")
    return KernelFunction(F.groupoid, np.exp(-t * np.real(F.values)))


def laplacian_element(family) -> AlgebraElement:
    """``sum_i (phi_i - Psi(phi_i))* (phi_i - Psi(phi_i))``; exact for integer or rational data."""
    family = list(family)
    if not family:
        raise ValueError("empty family")
    G = family[0].groupoid
    total = None
    for phi in family:
        if phi.groupoid is not G:
            raise GroupoidMismatch("family members live on different groupoids")
        d = phi - psi(phi)
        term = convolve(adjoint(d), d)
        total = term if total is None else total + term
    return total
