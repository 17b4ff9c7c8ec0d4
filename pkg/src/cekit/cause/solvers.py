"""CE_max, CE_min, DP_min and their weighted / averaged variants.

CE_max is found by a see-saw: for a fixed orthogonal pair the optimal
two-outcome observable is the sign of the output difference, and for a fixed
observable ``S`` the optimal pair is the top/bottom eigenvector pair of
``N^dag(S)``.  Each half-step is exact, so the objective never decreases.

CE_min and DP_min minimize ``||N(H)||_1 / ||H||_1`` over Hermitian ``H``
(traceless for CE_min) with L-BFGS and the subgradient
``N^dag(sgn N(H))``.  The positive and negative parts of the optimal ``H``
give the witness pair, which therefore has orthogonal supports.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from ..channels import KrausChannel
from ..numkit import DimensionError, dag, haar_unitary, hermitize, random_density
from .config import SolverConfig, pmap

log = logging.getLogger(__name__)

KERNEL_TOL = 1e-11


@dataclass
class CEReport:
    """Outcome of a causal-effect search.

    ``value`` is recomputed from ``witness_pair``; ``certificate`` is the
    two-outcome observable ``2P - I`` that attains it on the output.
    For CE_max the value is a certified lower bound, for CE_min an upper bound.
    """

    value: float
    witness_pair: tuple[np.ndarray, np.ndarray]
    certificate: np.ndarray
    restarts: int
    iterations_per_restart: list[int]
    converged: bool
    seed: int
    kind: str = "max"
    trace: list[float] = field(default_factory=list)


class DPResult(NamedTuple):
    value: float
    p: float
    witness_pair: tuple[np.ndarray, np.ndarray]


def _check_input(ch: KrausChannel):
    if ch.dim_in < 2:
        raise DimensionError("causal effects need an input of dimension >= 2")


def _sign(m: np.ndarray) -> tuple[np.ndarray, float]:
    w, v = np.linalg.eigh(hermitize(m))
    return (v * np.where(w >= 0, 1.0, -1.0)) @ dag(v), float(np.sum(np.abs(w)))


def pair_value(ch: KrausChannel, rho, rho2) -> float:
    """Half the trace distance between the outputs of two states."""
    _, n = _sign(ch.apply_op(np.asarray(rho) - np.asarray(rho2)))
    return n / 2


def _as_dm(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    return np.outer(x, x.conj()) if x.ndim == 1 else x


def _report(ch, rho, rho2, kind, cfg, iters, converged, trace) -> CEReport:
    s, n = _sign(ch.apply_op(rho - rho2))
    return CEReport(
        value=min(max(n / 2, 0.0), 1.0),
        witness_pair=(rho, rho2),
        certificate=s,
        restarts=cfg.restarts,
        iterations_per_restart=list(iters),
        converged=converged,
        seed=cfg.seed,
        kind=kind,
        trace=list(trace),
    )


# --- Hermitian parametrization ------------------------------------------------


class _HermBasis:
    """Real coordinates for (optionally traceless) Hermitian d x d matrices."""

    def __init__(self, d: int, traceless: bool):
        self.d = d
        self.traceless = traceless
        self.iu = np.triu_indices(d, 1)
        self.n_off = len(self.iu[0])
        self.size = d + 2 * self.n_off

    def to_matrix(self, x: np.ndarray) -> np.ndarray:
        d = self.d
        h = np.zeros((d, d), dtype=complex)
        h[self.iu] = x[d:d + self.n_off] + 1j * x[d + self.n_off:]
        h = h + dag(h)
        h[np.diag_indices(d)] = x[:d]
        if self.traceless:
            h[np.diag_indices(d)] -= np.sum(x[:d]) / d
        return h

    def to_coords(self, h: np.ndarray) -> np.ndarray:
        return np.concatenate([np.diag(h).real, h[self.iu].real, h[self.iu].imag])

    def grad_coords(self, g: np.ndarray) -> np.ndarray:
        """Pull back a Hermitian gradient (w.r.t. the Frobenius product)."""
        gd = np.diag(g).real
        if self.traceless:
            gd = gd - gd.mean()
        return np.concatenate([gd, 2 * g[self.iu].real, 2 * g[self.iu].imag])


def _ratio_objective(ch: KrausChannel, basis: _HermBasis):
    t = ch.transfer
    ta = dag(t)
    din, dout = ch.dim_in, ch.dim_out

    def f(x):
        h = basis.to_matrix(x)
        sh, nh = _sign(h)
        if nh < 1e-300:
            return 1.0, np.zeros_like(x)
        y = (t @ h.reshape(-1)).reshape(dout, dout)
        sy, ny = _sign(y)
        m = (ta @ sy.reshape(-1)).reshape(din, din)
        g = (m * nh - ny * sh) / nh**2
        return ny / nh, basis.grad_coords(hermitize(g))

    return f


def hermitian_kernel(ch: KrausChannel, traceless: bool = True) -> np.ndarray | None:
    """A non-zero Hermitian ``H`` with ``N(H) = 0`` (traceless if asked), or None."""
    d = ch.dim_in
    basis = _HermBasis(d, traceless)
    cols = []
    idx = range(basis.size) if not traceless else [i for i in range(basis.size) if i != d - 1]
    mats = []
    for i in idx:
        e = np.zeros(basis.size)
        e[i] = 1.0
        h = basis.to_matrix(e)
        mats.append(h)
        y = ch.apply_op(h).reshape(-1)
        cols.append(np.concatenate([y.real, y.imag]))
    a = np.array(cols).T
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    scale = max(1.0, s[0] if s.size else 1.0)
    rank = int(np.sum(s > KERNEL_TOL * scale))
    if rank >= len(mats):
        return None
    c = vt[rank]
    h = sum(ci * m for ci, m in zip(c, mats))
    return hermitize(h)


def _split(h: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Positive and negative parts of ``h`` as unit-trace states, and p = Tr h+/||h||."""
    w, v = np.linalg.eigh(hermitize(h))
    pos, neg = w > 0, w < 0
    a, b = w[pos].sum(), -w[neg].sum()
    if a <= 0 or b <= 0:
        raise ValueError("operator is semidefinite; no pair can be extracted")
    rho = (v[:, pos] * (w[pos] / a)) @ dag(v[:, pos])
    rho2 = (v[:, neg] * (-w[neg] / b)) @ dag(v[:, neg])
    return hermitize(rho), hermitize(rho2), a / (a + b)


def _rank_choices(cfg: SolverConfig, d: int) -> list[int]:
    if cfg.rank_splits == "all" or cfg.rank_splits is None:
        return list(range(1, d))
    ks = [int(k) for k in cfg.rank_splits if 1 <= int(k) < d]
    if not ks:
        raise ValueError(f"no usable rank split for dimension {d}")
    return ks


def _split_start(d: int, k: int, rng, p: float = 0.5) -> np.ndarray:
    u = haar_unitary(d, rng)
    a, b = u[:, :k], u[:, k:]
    r1 = random_density(k, rng, rank=1 if rng.random() < 0.5 else None)
    r2 = random_density(d - k, rng, rank=1 if rng.random() < 0.5 else None)
    return p * a @ r1 @ dag(a) - (1 - p) * b @ r2 @ dag(b)


# --- CE_max -------------------------------------------------------------------


def is_constant_channel(ch: KrausChannel, tol: float = 1e-12) -> bool:
    """True when the output does not depend on the input (discard-and-reprepare)."""
    out0 = ch.apply_op(np.diag(np.eye(ch.dim_in)[0]).astype(complex))
    d = ch.dim_in
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1
            ref = out0 if i == j else 0
            if np.max(np.abs(ch.apply_op(e) - ref)) > tol:
                return False
    return True


def _pick(vecs: np.ndarray, w: np.ndarray, idx: np.ndarray, prev: np.ndarray) -> np.ndarray:
    """Eigenvector from a (possibly degenerate) eigenspace closest to ``prev``."""
    sub = vecs[:, idx]
    if sub.shape[1] == 1:
        return sub[:, 0]
    c = dag(sub) @ prev
    nrm = np.linalg.norm(c)
    if nrm < 1e-12:
        return sub[:, 0]
    return sub @ (c / nrm)


def _seesaw_max(ch: KrausChannel, psi: np.ndarray, phi: np.ndarray, cfg: SolverConfig):
    trace = []
    converged = False
    degen = 1e-10
    for it in range(cfg.max_iters):
        s, n = _sign(ch.apply_op(np.outer(psi, psi.conj()) - np.outer(phi, phi.conj())))
        trace.append(n / 2)
        if it > 0 and trace[-1] - trace[-2] < cfg.tol:
            converged = True
            break
        m = hermitize(ch.adjoint_op(s))
        w, v = np.linalg.eigh(m)
        if w[-1] - w[0] < 2 * degen:
            converged = True
            break
        psi = _pick(v, w, np.nonzero(w >= w[-1] - degen)[0], psi)
        phi = _pick(v, w, np.nonzero(w <= w[0] + degen)[0], phi)
    return trace[-1], psi, phi, trace, len(trace), converged


def ce_max(ch: KrausChannel, cfg: SolverConfig | None = None, initial_pairs=()) -> CEReport:
    """Maximum causal effect: best see-saw value over Haar-random restarts.

    ``initial_pairs`` adds extra starting pairs of orthonormal vectors.
    """
    cfg = cfg or SolverConfig()
    _check_input(ch)
    d = ch.dim_in
    if is_constant_channel(ch):
        e0, e1 = np.eye(d, dtype=complex)[0], np.eye(d, dtype=complex)[1]
        return _report(ch, np.outer(e0, e0), np.outer(e1, e1), "max", cfg, [0], True, [0.0])

    starts = []
    for ss in cfg.restart_seeds():
        u = haar_unitary(d, np.random.default_rng(ss))
        starts.append((u[:, 0], u[:, 1]))
    starts.extend((np.asarray(a, complex), np.asarray(b, complex)) for a, b in initial_pairs)
    results = pmap(lambda st: _seesaw_max(ch, st[0], st[1], cfg), starts, cfg.workers)
    best = max(range(len(results)), key=lambda i: (results[i][0], -i))
    val, psi, phi, trace, _, conv = results[best]
    log.debug("ce_max best restart %d value %.12f", best, val)
    return _report(ch, np.outer(psi, psi.conj()), np.outer(phi, phi.conj()), "max", cfg,
                   [r[4] for r in results], conv, trace)


# --- CE_min / DP_min ------------------------------------------------------------


def _minimize_ratio(ch, basis, starts, cfg):
    f = _ratio_objective(ch, basis)

    def run(h0):
        res = minimize(f, basis.to_coords(h0), jac=True, method="L-BFGS-B",
                       options={"maxiter": cfg.max_iters, "ftol": 1e-15, "gtol": 1e-12})
        return float(res.fun), res.x, int(res.nit), bool(res.success or res.nit < cfg.max_iters)

    results = pmap(run, starts, cfg.workers)
    best = min(range(len(results)), key=lambda i: (results[i][0], i))
    return results, best


def ce_min(ch: KrausChannel, cfg: SolverConfig | None = None, initial_pairs=()) -> CEReport:
    """Minimum causal effect over orthogonal-support pairs (an upper bound)."""
    cfg = cfg or SolverConfig()
    _check_input(ch)
    d = ch.dim_in
    kern = hermitian_kernel(ch, traceless=True)
    if kern is not None:
        rho, rho2, _ = _split(kern)
        return _report(ch, rho, rho2, "min", cfg, [0], True, [0.0])

    ranks = _rank_choices(cfg, d)
    starts = []
    for i, ss in enumerate(cfg.restart_seeds()):
        starts.append(_split_start(d, ranks[i % len(ranks)], np.random.default_rng(ss)))
    starts.extend(_as_dm(a) - _as_dm(b) for a, b in initial_pairs)
    basis = _HermBasis(d, traceless=True)
    results, best = _minimize_ratio(ch, basis, starts, cfg)
    h = basis.to_matrix(results[best][1])
    rho, rho2, _ = _split(h)
    return _report(ch, rho, rho2, "min", cfg, [r[2] for r in results], results[best][3],
                   [results[best][0]])


def dp_min_search(ch: KrausChannel, cfg: SolverConfig | None = None,
                  ce_report: CEReport | None = None) -> DPResult:
    """Minimum distinguishability preservation with its optimal prior and pair.

    Minimizes ``||N(H)||_1/||H||_1`` over all Hermitian ``H``; the optimal
    prior is ``p = Tr H_+ / ||H||_1``.  The CE_min witness (p = 1/2) is always
    among the candidates.
    """
    cfg = cfg or SolverConfig()
    _check_input(ch)
    d = ch.dim_in
    if ce_report is None:
        ce_report = ce_min(ch, cfg)
    rho_c, rho2_c = ce_report.witness_pair
    cand_val, cand_pair, cand_p = ce_report.value, (rho_c, rho2_c), 0.5
    if cand_val == 0.0:
        return DPResult(0.0, 0.5, cand_pair)

    ranks = _rank_choices(cfg, d)
    ps = np.linspace(0, 1, cfg.p_grid)[1:-1]
    starts = [rho_c - rho2_c]
    for i, ss in enumerate(cfg.restart_seeds()):
        rng = np.random.default_rng(ss)
        p = ps[(i * 7919) % len(ps)] if len(ps) else 0.5
        starts.append(_split_start(d, ranks[i % len(ranks)], rng, p=p))
    basis = _HermBasis(d, traceless=False)
    results, best = _minimize_ratio(ch, basis, starts, cfg)
    h = basis.to_matrix(results[best][1])
    try:
        rho, rho2, p = _split(h)
    except ValueError:
        return DPResult(cand_val, cand_p, cand_pair)
    val = float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(ch.apply_op(p * rho - (1 - p) * rho2))))))
    if val < cand_val:
        return DPResult(min(max(val, 0.0), 1.0), p, (rho, rho2))
    return DPResult(cand_val, cand_p, cand_pair)


def dp_min(ch: KrausChannel, cfg: SolverConfig | None = None) -> float:
    return dp_min_search(ch, cfg).value


# --- weighted variants ------------------------------------------------------------


def _pair_objective(ch: KrausChannel, p: float, sign: float):
    t = ch.transfer
    ta = dag(t)
    d, dout = ch.dim_in, ch.dim_out
    n = d * d

    def unpack(x):
        a = (x[:n] + 1j * x[n:2 * n]).reshape(d, d)
        b = (x[2 * n:3 * n] + 1j * x[3 * n:]).reshape(d, d)
        return a, b

    def f(x):
        a, b = unpack(x)
        ta_, tb_ = np.trace(a @ dag(a)).real, np.trace(b @ dag(b)).real
        rho, rho2 = a @ dag(a) / ta_, b @ dag(b) / tb_
        h = p * rho - (1 - p) * rho2
        sh, nh = _sign(h)
        if nh < 1e-14:
            return -sign * 1.0, np.zeros_like(x)
        sy, ny = _sign((t @ h.reshape(-1)).reshape(dout, dout))
        m = hermitize((ta @ sy.reshape(-1)).reshape(d, d))
        g = (m * nh - ny * sh) / nh**2
        ga = 2 * p * (g @ a - np.trace(g @ rho).real * a) / ta_
        gb = -2 * (1 - p) * (g @ b - np.trace(g @ rho2).real * b) / tb_
        grad = np.concatenate([ga.real.ravel(), ga.imag.ravel(), gb.real.ravel(), gb.imag.ravel()])
        return sign * ny / nh, sign * grad

    def pack(rho, rho2):
        def fac(r):
            w, v = np.linalg.eigh(hermitize(r))
            return v * np.sqrt(np.clip(w, 0, None))
        a, b = fac(rho), fac(rho2)
        return np.concatenate([a.real.ravel(), a.imag.ravel(), b.real.ravel(), b.imag.ravel()])

    def ratio(rho, rho2):
        h = p * rho - (1 - p) * rho2
        nh = np.sum(np.abs(np.linalg.eigvalsh(hermitize(h))))
        ny = np.sum(np.abs(np.linalg.eigvalsh(hermitize(ch.apply_op(h)))))
        return ny / nh if nh > 1e-14 else 1.0

    return f, pack, unpack, ratio


def _weighted(ch, p, cfg, maximize: bool) -> float:
    cfg = cfg or SolverConfig()
    _check_input(ch)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if p in (0.0, 1.0):
        return 1.0
    sign = -1.0 if maximize else 1.0
    f, pack, unpack, ratio = _pair_objective(ch, p, sign)
    seed_rep = ce_max(ch, cfg) if maximize else ce_min(ch, cfg)
    d = ch.dim_in
    starts = [seed_rep.witness_pair]
    for ss in cfg.restart_seeds():
        rng = np.random.default_rng(ss)
        starts.append((random_density(d, rng), random_density(d, rng)))
    best = ratio(*seed_rep.witness_pair)

    def run(st):
        res = minimize(f, pack(*st), jac=True, method="L-BFGS-B",
                       options={"maxiter": cfg.max_iters, "ftol": 1e-15, "gtol": 1e-12})
        a, b = unpack(res.x)
        return ratio(a @ dag(a) / np.trace(a @ dag(a)).real, b @ dag(b) / np.trace(b @ dag(b)).real)

    vals = pmap(run, starts, cfg.workers)
    vals.append(best)
    return float(max(vals) if maximize else min(vals))


def ce_weighted_max(ch: KrausChannel, p: float, cfg: SolverConfig | None = None) -> float:
    """sup over pairs of ``||pN(rho)-(1-p)N(rho')||_1 / ||p rho-(1-p) rho'||_1``."""
    return _weighted(ch, p, cfg, True)


def ce_weighted_min(ch: KrausChannel, p: float, cfg: SolverConfig | None = None) -> float:
    """inf over pairs of the same weighted ratio."""
    return _weighted(ch, p, cfg, False)


# --- averaged -------------------------------------------------------------------


class PiAverage(NamedTuple):
    mean: float
    stderr: float
    samples: int


def ce_pi_average(ch: KrausChannel, samples: int = 1000, seed: int = 0) -> PiAverage:
    """Monte Carlo average of the half trace distance over Haar-random orthogonal pure pairs."""
    _check_input(ch)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    vals = np.empty(samples)
    for i in range(samples):
        u = haar_unitary(ch.dim_in, rng)
        vals[i] = pair_value(ch, np.outer(u[:, 0], u[:, 0].conj()), np.outer(u[:, 1], u[:, 1].conj()))
    se = float(vals.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return PiAverage(float(vals.mean()), se, samples)
