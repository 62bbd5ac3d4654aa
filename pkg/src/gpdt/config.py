"""Shared numerical tolerances and run limits."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

DEFAULT_SEED = 0x5EED


@dataclass(frozen=True)
class Tolerances:
    """One record shared by the spectral, representation and Kazhdan layers.

    ``tau_zero`` decides kernel membership of eigenvalues, ``tau_psd`` the
    truncation of Gram matrices and the slack of positive/negative type checks.
    """

    tau_zero: float = 1e-9
    tau_psd: float = 1e-9
    cap: int = 20_000
    seed: int = DEFAULT_SEED
    dense_limit: int = 600
    values_limit: int = 256
    jacobi_max_dim: int = 4096
    max_sweeps: int = 100
    max_iter: int = 50_000
    cluster_tol: float = 1e-7

    def __post_init__(self):
        for name in ("tau_zero", "tau_psd", "cluster_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.cap < 1:
            raise ValueError("cap must be positive")

    def with_(self, **changes) -> "Tolerances":
        return replace(self, **changes)


DEFAULT = Tolerances()


def thread_count() -> int:
    """Worker bound from ``GPDT_THREADS`` (default 1, i.e. serial)."""
    raw = os.environ.get("GPDT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn, items) -> list:
    """``list(map(fn, items))``, threaded when ``GPDT_THREADS > 1``; order is preserved."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
