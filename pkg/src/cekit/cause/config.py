from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class SolverConfig:
    """Knobs shared by the causal-effect solvers.

    ``tol`` is the see-saw stall threshold on the objective; ``rank_splits``
    selects which positive-part ranks seed the CE_min search (``"all"`` or an
    explicit list).
    """

    restarts: int = 32
    max_iters: int = 500
    tol: float = 1e-9
    p_grid: int = 101
    rank_splits: object = "all"
    seed: int = 0
    workers: int | None = None

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.p_grid < 2:
            raise ValueError("p_grid needs at least two points")

    def with_(self, **kw) -> "SolverConfig":
        return replace(self, **kw)

    def restart_seeds(self) -> list[np.random.SeedSequence]:
        return np.random.SeedSequence(self.seed).spawn(self.restarts)


def worker_count(cfg_workers: int | None = None) -> int:
    if cfg_workers is not None:
        return max(1, int(cfg_workers))
    env = os.environ.get("CEKIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def pmap(fn, items, workers: int | None = None) -> list:
    """Order-preserving map, threaded when more than one worker is allowed."""
    items = list(items)
    n = worker_count(workers)
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
