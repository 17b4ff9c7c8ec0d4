"""Petz recovery and the correctability / distinguishability checks."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..channels import KrausChannel, compose
from ..numkit import check_density, dag, haar_state, hermitize
from .config import SolverConfig, pmap
from .solvers import ce_min, dp_min_search

PINV_CUTOFF = 1e-10


class SingularOutputWarning(UserWarning):
    """The channel maps the reference state to a rank-deficient output."""


def _herm_pow(m: np.ndarray, power: float, cutoff: float = PINV_CUTOFF):
    w, v = np.linalg.eigh(hermitize(m))
    keep = w > cutoff
    wp = np.zeros_like(w)
    wp[keep] = w[keep] ** power
    return (v * wp) @ dag(v), v[:, ~keep]


def petz_recovery(ch: KrausChannel, reference=None) -> KrausChannel:
    """Petz map ``X -> s^1/2 N^dag(N(s)^-1/2 X N(s)^-1/2) s^1/2``.

    ``reference`` defaults to the maximally mixed state.  If ``N(s)`` is
    singular the inverse square root is a pseudo-inverse and the kernel of
    ``N(s)`` is sent to the reference state, so the result stays CPTP.
    """
    d = ch.dim_in
    sigma = np.eye(d, dtype=complex) / d if reference is None else check_density(reference)
    if np.linalg.eigvalsh(hermitize(sigma))[0] <= PINV_CUTOFF:
        raise ValueError("reference state must be full rank")
    s_half, _ = _herm_pow(sigma, 0.5)
    out_inv, ker = _herm_pow(ch.apply_op(sigma), -0.5)
    ks = [s_half @ dag(k) @ out_inv for k in ch.kraus]
    if ker.shape[1]:
        warnings.warn("N(reference) is singular; using a pseudo-inverse", SingularOutputWarning,
                      stacklevel=2)
        w, v = np.linalg.eigh(hermitize(sigma))
        for j in range(d):
            for l in range(ker.shape[1]):
                ks.append(np.sqrt(w[j]) * np.outer(v[:, j], ker[:, l].conj()))
    return KrausChannel(np.array(ks))


def _worst_state_error(rn: KrausChannel, starts, cfg: SolverConfig) -> float:
    """max over pure states of ``||RN(psi) - psi||_1`` by see-saw."""

    def diff(x):
        return rn.apply_op(x) - x

    def run(psi):
        best = 0.0
        for _ in range(cfg.max_iters):
            rho = np.outer(psi, psi.conj())
            w, v = np.linalg.eigh(hermitize(diff(rho)))
            val = float(np.abs(w).sum())
            if val - best < cfg.tol:
                best = max(best, val)
                break
            best = val
            s = (v * np.where(w >= 0, 1.0, -1.0)) @ dag(v)
            m = hermitize(rn.adjoint_op(s) - s)
            psi = np.linalg.eigh(m)[1][:, -1]
        return best

    return max(pmap(run, starts, cfg.workers))


def recovery_error(ch: KrausChannel, recovery: KrausChannel, cfg: SolverConfig | None = None) -> float:
    """Worst-case ``||R N(rho) - rho||_1`` over Haar-sampled and basis starts."""
    cfg = cfg or SolverConfig()
    rn = compose(recovery, ch)
    d = ch.dim_in
    rng = np.random.default_rng(cfg.seed)
    starts = [np.eye(d, dtype=complex)[i] for i in range(d)]
    starts += [haar_state(d, rng) for _ in range(cfg.restarts)]
    return _worst_state_error(rn, starts, cfg)


def theorem_bound(dp: float, d: int) -> float:
    """Right-hand side of the recovery bound in terms of DP_min."""
    return 4 * math.sqrt(math.log(2)) * math.sqrt(max(1 - dp, 0.0) / 2) \
        * math.sqrt(d / 2 + math.log(d + 1))


@dataclass
class Correctability:
    ce_min: float
    dp_min: float
    recovery_error: float
    bound_rhs: float
    converse_ok: bool
    theorem_ok: bool
    singular_output: bool


def correctability_check(ch: KrausChannel, cfg: SolverConfig | None = None,
                         reference=None) -> Correctability:
    """Compare Petz recovery error against the DP_min-based bounds.

    ``converse_ok``: ``dp_min >= 1 - 2 * recovery_error`` (within 1e-6).
    ``theorem_ok``: recovery error within the existence bound; a False here is
    a finding about the plain Petz map, not an exception.
    """
    cfg = cfg or SolverConfig()
    rep = ce_min(ch, cfg)
    dp = dp_min_search(ch, cfg, rep).value
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SingularOutputWarning)
        rec = petz_recovery(ch, reference)
    singular = any(issubclass(w.category, SingularOutputWarning) for w in caught)
    err = recovery_error(ch, rec, cfg)
    rhs = theorem_bound(dp, ch.dim_in)
    return Correctability(
        ce_min=rep.value,
        dp_min=dp,
        recovery_error=err,
        bound_rhs=rhs,
        converse_ok=dp >= 1 - 2 * err - 1e-6,
        theorem_ok=err <= rhs + 1e-9,
        singular_output=singular,
    )
