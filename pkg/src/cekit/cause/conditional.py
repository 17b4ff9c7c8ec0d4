"""Causal effects of A on B conditioned on the state of a second input K.

A mode ``"x|y"`` applies ``x`` to the inner search over input pairs on A
and ``y`` to the outer search over states of K, e.g. ``"max|min"`` is
``inf_sigma CE_max(N_sigma)``.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from ..channels import BipartiteChannel, ClassicalBipartite, conditional_slice
from ..numkit import dag, haar_state
from .classical import classical_ace, classical_ce_min
from .config import SolverConfig
from .solvers import ce_max, ce_min

MODES = ("max|max", "min|max", "max|min", "min|min")


def _parse_mode(mode: str) -> tuple[str, str]:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    inner, outer = mode.split("|")
    return inner, outer


def _quantum_sigma(x: np.ndarray, k: int) -> np.ndarray:
    a = (x[:k * k] + 1j * x[k * k:]).reshape(k, k)
    s = a @ dag(a)
    return s / np.trace(s).real


def _softmax(x: np.ndarray) -> np.ndarray:
    e = np.exp(x - x.max())
    return e / e.sum()


def conditional_ce(bip, mode: str, cfg: SolverConfig | None = None) -> float:
    """Outer optimum over states of K of the inner causal effect of the slice.

    ``bip`` is a :class:`BipartiteChannel` (quantum) or a
    :class:`ClassicalBipartite` (classical theory, distributions on K).
    The outer search scores basis states, the uniform state and random
    states, then refines the best one with Nelder-Mead.
    """
    cfg = cfg or SolverConfig()
    inner, outer = _parse_mode(mode)
    sgn = 1.0 if outer == "max" else -1.0
    rng = np.random.default_rng(cfg.seed)
    n_random = max(2, cfg.restarts // 8)

    if isinstance(bip, ClassicalBipartite):
        k = bip.n_k
        fn = classical_ace if inner == "max" else (lambda q: classical_ce_min(q).value)

        def value(s):
            return fn(bip.slice(s))

        cands = [np.eye(k)[i] for i in range(k)] + [np.full(k, 1 / k)]
        cands += [rng.dirichlet(np.ones(k)) for _ in range(n_random)]
        to_x = lambda s: np.log(np.clip(s, 1e-12, None))
        from_x = _softmax
    elif isinstance(bip, BipartiteChannel):
        k = bip.dim_k
        inner_cfg = cfg.with_(restarts=max(4, cfg.restarts // 4))
        solver = ce_max if inner == "max" else ce_min

        def value(s):
            return solver(conditional_slice(bip, s), inner_cfg).value

        cands = [np.diag(np.eye(k)[i]).astype(complex) for i in range(k)]
        cands.append(np.eye(k, dtype=complex) / k)
        cands += [np.outer(v, v.conj()) for v in (haar_state(k, rng) for _ in range(n_random))]

        def to_x(s):
            w, v = np.linalg.eigh(s)
            a = v * np.sqrt(np.clip(w, 0, None))
            return np.concatenate([a.real.ravel(), a.imag.ravel()])

        from_x = lambda x: _quantum_sigma(x, k)
    else:
        raise TypeError("expected a BipartiteChannel or ClassicalBipartite")

    if k == 1:
        return float(value(cands[0]))
    scores = [value(s) for s in cands]
    best_i = int(np.argmax(sgn * np.array(scores)))
    best = scores[best_i]
    extreme = 1.0 if outer == "max" else 0.0
    if abs(best - extreme) < 1e-12:
        return float(best)

    def obj(x):
        return -sgn * value(from_x(x))

    res = minimize(obj, to_x(cands[best_i]), method="Nelder-Mead",
                   options={"maxiter": 60 * k * k, "xatol": 1e-8, "fatol": 1e-10})
    v = -sgn * res.fun
    if sgn * v > sgn * best:
        best = v
    return float(min(max(best, 0.0), 1.0))
