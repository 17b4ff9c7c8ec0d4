"""Duality between a channel and its complement, and diamond-norm bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..channels import KrausChannel, complementary
from ..numkit import DimensionError, dag, haar_state, hermitize
from .config import SolverConfig, pmap
from .solvers import ce_max, ce_min

DUALITY_SLACK = 2e-3


def _f(eps: float, d: int) -> float:
    return 8 * d * math.sqrt(max(eps, 0.0) * math.log(2)) * math.sqrt(d / 2 + math.log(d + 1))


@dataclass
class DualityRecord:
    ce_max_N: float
    ce_min_Nc: float
    ce_min_N: float
    ce_max_Nc: float
    stmt1_bound: float
    stmt2_bound: float
    stmt1_ok: bool
    stmt2_ok: bool


def duality_check(ch: KrausChannel, cfg: SolverConfig | None = None,
                  slack: float = DUALITY_SLACK) -> DualityRecord:
    """Check both directions of the channel / complement trade-off.

    stmt1: small CE_max(N) forces CE_min(N^c) >= 1 - 4 sqrt(d eps1).
    stmt2: CE_min(N) close to one forces CE_max(N^c) <= 2 sqrt(f(eps2, d)).
    """
    cfg = cfg or SolverConfig()
    d = ch.dim_in
    comp = complementary(ch)
    mx, mn = ce_max(ch, cfg).value, ce_min(ch, cfg).value
    mx_c, mn_c = ce_max(comp, cfg).value, ce_min(comp, cfg).value
    b1 = 1 - 4 * math.sqrt(d * mx)
    b2 = 2 * math.sqrt(_f(1 - mn, d))
    return DualityRecord(mx, mn_c, mn, mx_c, b1, b2, mn_c >= b1 - slack, mx_c <= b2 + slack)


# --- diamond norm bounds ----------------------------------------------------------


def _ext_apply(kraus: np.ndarray, x: np.ndarray, d_env: int) -> np.ndarray:
    """``(K (x) I) X (K (x) I)^dag`` summed over Kraus operators."""
    r, dout, din = kraus.shape
    xt = x.reshape(din, d_env, din, d_env)
    y = np.einsum("kab,bicj,kdc->aidj", kraus, xt, kraus.conj(), optimize=True)
    return y.reshape(dout * d_env, dout * d_env)


def _ext_adjoint(kraus: np.ndarray, y: np.ndarray, d_env: int) -> np.ndarray:
    r, dout, din = kraus.shape
    yt = y.reshape(dout, d_env, dout, d_env)
    x = np.einsum("kab,aicj,kcd->bidj", kraus.conj(), yt, kraus, optimize=True)
    return x.reshape(din * d_env, din * d_env)


def _seesaw_norm(fwd, adj, starts, cfg: SolverConfig) -> float:
    """max over unit vectors of ``||D(psi psi^dag)||_1`` for Hermitian-preserving D."""

    def run(psi):
        best = 0.0
        for _ in range(cfg.max_iters):
            w, v = np.linalg.eigh(hermitize(fwd(np.outer(psi, psi.conj()))))
            val = float(np.abs(w).sum())
            if val - best < cfg.tol:
                best = max(best, val)
                break
            best = val
            s = (v * np.where(w >= 0, 1.0, -1.0)) @ dag(v)
            psi = np.linalg.eigh(hermitize(adj(s)))[1][:, -1]
        return best

    return max(pmap(run, starts, cfg.workers))


@dataclass
class DiamondBounds:
    lower: float
    upper: float


def diamond_bounds(a: KrausChannel, b: KrausChannel, cfg: SolverConfig | None = None) -> DiamondBounds:
    """Lower and upper bounds on ``||a - b||_diamond``.

    The lower bound optimizes entangled pure inputs (starting from the
    maximally entangled one); the upper bound is ``2 d_A max_rho ||(a-b)(rho)||_1``.
    """
    cfg = cfg or SolverConfig()
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        raise DimensionError("channels must have matching dimensions")
    d = a.dim_in
    rng = np.random.default_rng(cfg.seed)
    ka, kb = a.kraus, b.kraus

    def fwd2(x):
        return _ext_apply(ka, x, d) - _ext_apply(kb, x, d)

    def adj2(y):
        return _ext_adjoint(ka, y, d) - _ext_adjoint(kb, y, d)

    bell = np.eye(d, dtype=complex).reshape(-1) / math.sqrt(d)
    starts = [bell] + [haar_state(d * d, rng) for _ in range(cfg.restarts)]
    lower = _seesaw_norm(fwd2, adj2, starts, cfg)

    starts1 = [np.eye(d, dtype=complex)[i] for i in range(d)]
    starts1 += [haar_state(d, rng) for _ in range(cfg.restarts)]
    inner = _seesaw_norm(lambda x: a.apply_op(x) - b.apply_op(x),
                         lambda y: a.adjoint_op(y) - b.adjoint_op(y), starts1, cfg)
    return DiamondBounds(lower, 2 * d * inner)
