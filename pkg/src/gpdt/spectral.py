"""Hermitian spectral kernel.

``eigh`` is a cyclic Jacobi method.  Rotations are scheduled in round-robin
order so that each round applies ``n/2`` disjoint rotations at once; the order
is fixed, so results are bit-reproducible.  ``smallest_nonzero_eig`` is a
Lanczos iteration deflated against a known kernel, for operators too large
for the dense path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .config import DEFAULT


class NotHermitianError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class ThresholdTooCloseError(ValueError):
    def __init__(self, eigenvalue: float, threshold: float):
        super().__init__(f"eigenvalue {eigenvalue!r} lies within gap safety of threshold {threshold!r}")
        self.eigenvalue = eigenvalue
        self.threshold = threshold


def hermitian_defect(A: np.ndarray) -> float:
    return float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0


def check_hermitian(A, tol: float = 1e-12) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    d = hermitian_defect(A)
    if d > tol * scale:
        raise NotHermitianError(f"matrix is not Hermitian (defect {d:.3e})")
    return A


def _round_robin(n: int):
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        rounds.append((np.array([p for p, _ in pairs], dtype=np.int64),
                       np.array([q for _, q in pairs], dtype=np.int64)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _off(A: np.ndarray) -> float:
    B = A.copy()
    np.fill_diagonal(B, 0)
    return float(np.linalg.norm(B))


def eigh(A, tol: float = 1e-12, max_sweeps: int = DEFAULT.max_sweeps,
         max_dim: int = DEFAULT.jacobi_max_dim):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * ||A||_F``.  Raises :class:`ConvergenceError` when that
    does not happen within ``max_sweeps`` or the reconstruction residual
    exceeds ``1e-9 ||A||_F``.
    """
    A0 = check_hermitian(A)
    n = A0.shape[0]
    if n > max_dim:
        raise ValueError(f"dense Jacobi is capped at dimension {max_dim}, got {n}")
    real = not np.iscomplexobj(A0) or not np.any(np.imag(A0))
    dtype = np.float64 if real else np.complex128
    A = np.real(A0) if real else A0
    A = ((A + A.conj().T) / 2).astype(dtype)
    Vt = np.eye(n, dtype=dtype)             # rows of Vt are eigenvector columns
    if n == 0:
        return np.zeros(0), Vt
    norm = float(np.linalg.norm(A))
    target = tol * norm
    rounds = _round_robin(n)
    off = _off(A)
    sweeps = 0
    while off > target:
        if sweeps >= max_sweeps:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps", off)
        for P, Q in rounds:
            if P.size:
                A = _rotate(A, Vt, P, Q, real)
        A = (A + A.conj().T) / 2
        sweeps += 1
        off = _off(A)
    V = Vt.T
    w = np.real(np.diag(A)).copy()
    order = np.argsort(w, kind="stable")
    w, V = w[order], V[:, order]
    resid = float(np.linalg.norm(A0 @ V - V * w))
    if resid > 1e-9 * norm:
        raise ConvergenceError("eigendecomposition residual too large", resid)
    return w, V


def _rotate(A, Vt, P, Q, real):
    # J* A J computed as J* (J* A)^H, valid for Hermitian A; only row
    # operations, which touch contiguous memory
    app = np.real(A[P, P])
    aqq = np.real(A[Q, Q])
    apq = A[P, Q]
    mag = np.abs(apq)
    active = mag > 1e-300
    if not np.any(active):
        return A
    P, Q, app, aqq, apq, mag = P[active], Q[active], app[active], aqq[active], apq[active], mag[active]
    theta = (aqq - app) / (2.0 * mag)
    t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    phase = np.sign(apq) if real else apq / mag      # e^{i alpha}
    jpp, jpq = c[:, None], s[:, None]
    jqp, jqq = (-s * np.conj(phase))[:, None], (c * np.conj(phase))[:, None]
    for _ in range(2):
        rp, rq = A[P], A[Q]
        A[P] = np.conj(jpp) * rp + np.conj(jqp) * rq
        A[Q] = np.conj(jpq) * rp + np.conj(jqq) * rq
        A = np.ascontiguousarray(A.conj().T)
    A[P, Q] = 0
    A[Q, P] = 0
    vp, vq = Vt[P], Vt[Q]
    Vt[P] = jpp * vp + jqp * vq
    Vt[Q] = jpq * vp + jqq * vq
    return A


def tridiagonalize(A) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction of a Hermitian matrix to real symmetric tridiagonal form.

    Returns the diagonal and the moduli of the off-diagonal; a diagonal
    unitary similarity makes the off-diagonal real, so the spectrum is kept.
    """
    A = np.array(A, dtype=np.complex128 if np.iscomplexobj(A) else np.float64)
    check_hermitian(A)
    n = A.shape[0]
    e = np.zeros(max(n - 1, 0))
    for k in range(n - 2):
        x = A[k + 1:, k]
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        alpha = -phase * nx
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        B = A[k + 1:, k + 1:]
        p = B @ v
        K = np.vdot(v, p).real
        w = p - K * v
        B -= 2 * (np.outer(v, w.conj()) + np.outer(w, v.conj()))
        e[k] = nx
    d = np.real(np.diagonal(A)).copy()
    if n >= 2:
        e[n - 2] = abs(A[n - 1, n - 2])
    return d, e


def eigvalsh(A, method: str = "auto", values_limit: int = DEFAULT.values_limit, **kw) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix.

    ``"jacobi"`` uses :func:`eigh`; ``"tridiagonal"`` a Householder reduction
    followed by a tridiagonal eigenvalue solve, which is what ``"auto"``
    picks above ``values_limit`` since no eigenvectors are needed.
    """
    A = np.asarray(A)
    if method == "auto":
        method = "jacobi" if A.shape[0] <= values_limit else "tridiagonal"
    if method == "jacobi":
        return eigh(A, **kw)[0]
    if method != "tridiagonal":
        raise ValueError(f"unknown method {method!r}")
    if A.shape[0] == 0:
        return np.zeros(0)
    d, e = tridiagonalize(A)
    if d.size == 1:
        return d
    return eigh_tridiagonal(d, e, eigvals_only=True)


@dataclass(frozen=True)
class SpectralReport:
    """Sorted eigenvalues with kernel dimension and the first eigenvalue above ``tau_zero``."""

    eigenvalues: np.ndarray
    kernel_dim: int
    gap: float

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)


def spectral_report(eigenvalues, tau_zero: float = DEFAULT.tau_zero) -> SpectralReport:
    w = np.sort(np.asarray(eigenvalues, dtype=float))
    kdim = int(np.sum(w < tau_zero))
    gap = float(w[kdim]) if kdim < len(w) else 0.0
    return SpectralReport(w, kdim, gap)


def report(A, tau_zero: float = DEFAULT.tau_zero) -> SpectralReport:
    return spectral_report(eigvalsh(A), tau_zero)


def _orthonormal(basis, dim: int) -> np.ndarray:
    if basis is None:
        return np.zeros((dim, 0))
    K = np.asarray(basis)
    if K.ndim == 1:
        K = K[:, None]
    if K.shape[0] != dim and K.shape[1] == dim:
        K = K.T
    if K.shape[1] == 0:
        return K
    q, _ = np.linalg.qr(K)
    return q


def smallest_nonzero_eig(apply: Callable, dim: int, kernel_basis=None, tol: float = 1e-10,
                         max_iter: int = DEFAULT.max_iter, seed: int = DEFAULT.seed,
                         check_every: int = 10) -> float:
    """Smallest eigenvalue of a PSD operator on the complement of its kernel.

    Lanczos with full reorthogonalisation, deflated against ``kernel_basis``
    (which must span the nullspace).  Converged when the Ritz residual is at
    most ``tol`` times the Ritz value.
    """
    K = _orthonormal(kernel_basis, dim)
    rest = dim - K.shape[1]
    if rest <= 0:
        raise ValueError("kernel basis spans the whole space")
    rng = np.random.default_rng(seed)
    probe = np.asarray(apply(np.zeros(dim)))
    cplx = np.iscomplexobj(probe) or np.iscomplexobj(K)
    v = rng.standard_normal(dim)
    if cplx:
        v = v + 1j * rng.standard_normal(dim)

    def deflate(x):
        if K.shape[1]:
            x = x - K @ (K.conj().T @ x)
        return x

    v = deflate(deflate(v))
    v /= np.linalg.norm(v)
    steps = min(rest, max_iter)
    Qm = np.zeros((dim, steps), dtype=np.complex128 if cplx else np.float64)
    alphas, betas = [], []
    prev, beta = None, 0.0
    theta, resid = np.nan, np.inf
    for j in range(steps):
        Qm[:, j] = v
        w = deflate(np.asarray(apply(v)))
        alpha = float(np.real(np.vdot(v, w)))
        w = w - alpha * v
        if prev is not None:
            w = w - beta * prev
        for _ in range(2):
            w = w - Qm[:, :j + 1] @ (Qm[:, :j + 1].conj().T @ w)
            w = deflate(w)
        alphas.append(alpha)
        beta = float(np.linalg.norm(w))
        last = j + 1 == steps
        breakdown = beta <= 1e-13 * max(1.0, abs(alpha))
        if breakdown or last or (j + 1) % check_every == 0:
            vals, vecs = eigh_tridiagonal(np.array(alphas), np.array(betas),
                                          select="i", select_range=(0, 0))
            theta = float(vals[0])
            resid = abs(beta * vecs[-1, 0])
            if breakdown or last or resid <= tol * max(abs(theta), 1e-300):
                return theta
        betas.append(beta)
        prev, v = v, w / beta
    raise ConvergenceError(f"Lanczos did not converge in {steps} steps", resid)


def spectral_projection(A, threshold: float, gap_safety: float = 1e-9) -> np.ndarray:
    """Orthogonal projection onto the eigenvectors with eigenvalue below ``threshold``."""
    w, V = eigh(A)
    close = np.abs(w - threshold) <= gap_safety
    if np.any(close):
        raise ThresholdTooCloseError(float(w[close][0]), threshold)
    U = V[:, w < threshold]
    return U @ U.conj().T


def operator_norm(M) -> float:
    """Largest singular value.

    Hermitian input uses its own eigenvalues; otherwise the eigensolver runs
    on ``M* M``.
    """
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    if M.shape[0] == M.shape[1] and hermitian_defect(M) <= 1e-14 * max(1.0, float(np.max(np.abs(M)))):
        w = eigvalsh(M)
        return float(max(abs(w[0]), abs(w[-1])))
    H = M.conj().T @ M
    return float(np.sqrt(max(eigvalsh(H)[-1], 0.0)))
