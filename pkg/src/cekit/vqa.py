"""Variational lower bound on CE_max with layered circuits.

A k-qubit circuit ``U(w1)`` prepares the orthogonal pair ``U|0..0>`` and
``U|1..1>``; a (m+1)-qubit circuit ``U(w2)`` followed by a computational
measurement of the last (ancilla) qubit realizes a binary POVM on the
m-qubit output.  Plain gradient ascent on the output bias
``Tr[P1 N(psi)] - Tr[P1 N(psi_perp)]`` tracks the best value seen.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .cause.config import pmap
from .channels import KrausChannel
from .numkit import DimensionError, dag, kron

TWO_PI = 2 * np.pi


@dataclass
class AnsatzParams:
    """Euler angles ``[layer][qubit][3]`` for the layered circuit."""

    qubits: int
    layers: int
    angles: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        if a.shape != (self.layers, self.qubits, 3):
            raise ValueError(f"angles must have shape ({self.layers}, {self.qubits}, 3), got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("angles must be finite")
        self.angles = a

    @classmethod
    def zeros(cls, qubits: int, layers: int) -> "AnsatzParams":
        return cls(qubits, layers, np.zeros((layers, qubits, 3)))

    @classmethod
    def random(cls, qubits: int, layers: int, rng) -> "AnsatzParams":
        rng = np.random.default_rng(rng)
        return cls(qubits, layers, rng.uniform(0, TWO_PI, (layers, qubits, 3)))


@dataclass
class VqaConfig:
    layers_state: int = 2
    layers_meas: int = 2
    learning_rate: float = 0.05
    stall_eps: float = 1e-5
    max_iters: int = 2000
    grad_mode: str = "central-difference"
    fd_step: float = 1e-4
    optimizer: str = "gd"
    seed: int = 0

    def __post_init__(self):
        if min(self.layers_state, self.layers_meas, self.max_iters) < 1:
            raise ValueError("layer counts and max_iters must be >= 1")
        if min(self.learning_rate, self.stall_eps, self.fd_step) <= 0:
            raise ValueError("learning_rate, stall_eps and fd_step must be positive")
        if self.grad_mode not in ("central-difference", "parameter-shift"):
            raise ValueError(f"unknown grad_mode {self.grad_mode!r}")
        if self.optimizer not in ("gd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


@dataclass
class VqaTrace:
    objective: list[float]
    w1: AnsatzParams
    w2: AnsatzParams
    estimate: float
    converged: bool
    wall_clock: float
    iterations: int = 0
    best: tuple = field(default=(None, None), repr=False)


# --- circuit -------------------------------------------------------------------


def _rz(t):
    return np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]])


def _ry(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def euler(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """``Rz(alpha) Ry(beta) Rz(gamma)``."""
    return _rz(alpha) @ _ry(beta) @ _rz(gamma)


@lru_cache(maxsize=None)
def cnot(k: int, control: int, target: int) -> np.ndarray:
    """CNOT on k qubits; qubit 0 is the most significant bit."""
    n = 2**k
    perm = np.arange(n)
    for x in range(n):
        if (x >> (k - 1 - control)) & 1:
            perm[x] = x ^ (1 << (k - 1 - target))
    m = np.zeros((n, n))
    m[perm, np.arange(n)] = 1
    m.flags.writeable = False
    return m


@lru_cache(maxsize=None)
def entangler(k: int, layer: int) -> np.ndarray:
    """CNOTs ``i -> i + layer (mod k)`` for ``i = 0..k-1``, applied in order."""
    m = np.eye(2**k)
    if k > 1:
        for i in range(k):
            t = (i + layer) % k
            if t != i:
                m = cnot(k, i, t) @ m
    m.flags.writeable = False
    return m


def ansatz_unitary(params: AnsatzParams) -> np.ndarray:
    k = params.qubits
    if k < 1:
        raise ValueError("need at least one qubit")
    u = np.eye(2**k, dtype=complex)
    for ell in range(params.layers):
        rot = kron(*[euler(*params.angles[ell, q]) for q in range(k)])
        u = entangler(k, ell + 1) @ rot @ u
    return u


def prepare_pair(w1: AnsatzParams) -> tuple[np.ndarray, np.ndarray]:
    u = ansatz_unitary(w1)
    return u[:, 0].copy(), u[:, -1].copy()


def naimark_measurement(w2: AnsatzParams) -> tuple[np.ndarray, np.ndarray]:
    """Binary POVM on the first ``k`` qubits from a (k+1)-qubit circuit, ancilla last."""
    u = ansatz_unitary(w2)
    n = 2 ** (w2.qubits - 1)
    iso = u.reshape(n, 2, n, 2)[:, :, :, 0]
    p = [dag(iso[:, j, :]) @ iso[:, j, :] for j in (0, 1)]
    return p[0], p[1]


def naimark_dilation(q0, q1) -> np.ndarray:
    """Unitary ``U`` on system (x) qubit with ``(I (x) <j|) U (I (x) |0>) = sqrt(Q_j)``.

    The isometry ``sqrt(Q0) (x) |0> + sqrt(Q1) (x) |1>`` is completed to a
    unitary by an orthonormal basis of its column complement.
    """
    q0, q1 = np.asarray(q0, dtype=complex), np.asarray(q1, dtype=complex)
    d = q0.shape[0]

    def sqrtm(m):
        w, v = np.linalg.eigh((m + dag(m)) / 2)
        return (v * np.sqrt(np.clip(w, 0, None))) @ dag(v)

    iso = np.zeros((d, 2, d), dtype=complex)
    iso[:, 0, :] = sqrtm(q0)
    iso[:, 1, :] = sqrtm(q1)
    iso = iso.reshape(2 * d, d)
    full, _ = np.linalg.qr(np.hstack([iso, np.eye(2 * d)]))
    comp = full[:, d:2 * d]
    comp = comp - iso @ (dag(iso) @ comp)
    comp, _ = np.linalg.qr(comp)
    u = np.zeros((d, 2, d, 2), dtype=complex)
    u[:, :, :, 0] = iso.reshape(d, 2, d)
    u[:, :, :, 1] = comp.reshape(d, 2, d)
    return u.reshape(2 * d, 2 * d)


# --- objective ------------------------------------------------------------------


def _qubits_for(dim: int) -> int:
    return max(1, int(np.ceil(np.log2(dim))))


def register_sizes(ch: KrausChannel) -> tuple[int, int]:
    """Qubits for the state circuit and for the measurement circuit (with ancilla)."""
    k = _qubits_for(ch.dim_in)
    if 2**k != ch.dim_in:
        raise DimensionError("input dimension must be a power of two")
    return k, _qubits_for(ch.dim_out) + 1


def _output_difference(ch: KrausChannel, w1: AnsatzParams) -> np.ndarray:
    psi, phi = prepare_pair(w1)
    delta = ch.apply_op(np.outer(psi, psi.conj()) - np.outer(phi, phi.conj()))
    m = _qubits_for(ch.dim_out)
    if 2**m != ch.dim_out:
        pad = np.zeros((2**m, 2**m), dtype=complex)
        pad[:ch.dim_out, :ch.dim_out] = delta
        delta = pad
    return delta


def _bias(delta: np.ndarray, w2: AnsatzParams) -> float:
    _, p1 = naimark_measurement(w2)
    return float(np.real(np.sum(p1 * delta.T)))


def objective(ch: KrausChannel, w1: AnsatzParams, w2: AnsatzParams) -> float:
    """``Tr[P1 N(psi)] - Tr[P1 N(psi_perp)]``."""
    k, m1 = register_sizes(ch)
    if w1.qubits != k or w2.qubits != m1:
        raise DimensionError(f"expected {k} state qubits and {m1} measurement qubits")
    return _bias(_output_difference(ch, w1), w2)


def _unpack(x, w1: AnsatzParams, w2: AnsatzParams):
    n1 = w1.angles.size
    return (AnsatzParams(w1.qubits, w1.layers, x[:n1].reshape(w1.angles.shape)),
            AnsatzParams(w2.qubits, w2.layers, x[n1:].reshape(w2.angles.shape)))


def gradient(ch: KrausChannel, w1: AnsatzParams, w2: AnsatzParams,
             mode: str = "central-difference", step: float = 1e-4) -> np.ndarray:
    """Gradient w.r.t. the flattened ``(w1, w2)`` angles."""
    x = np.concatenate([w1.angles.ravel(), w2.angles.ravel()])
    n1 = w1.angles.size
    h = np.pi / 2 if mode == "parameter-shift" else step
    scale = 0.5 if mode == "parameter-shift" else 1 / (2 * h)
    g = np.empty_like(x)
    delta0 = _output_difference(ch, w1)
    for i in range(x.size):
        vals = []
        for s in (h, -h):
            xs = x.copy()
            xs[i] += s
            a, b = _unpack(xs, w1, w2)
            vals.append(_bias(_output_difference(ch, a), b) if i < n1 else _bias(delta0, b))
        g[i] = (vals[0] - vals[1]) * scale
    return g


def run_vqa(ch: KrausChannel, cfg: VqaConfig | None = None, callback=None) -> VqaTrace:
    """Gradient ascent from uniform random angles; estimate is the best value seen."""
    cfg = cfg or VqaConfig()
    k, m1 = register_sizes(ch)
    rng = np.random.default_rng(cfg.seed)
    w1 = AnsatzParams.random(k, cfg.layers_state, rng)
    w2 = AnsatzParams.random(m1, cfg.layers_meas, rng)
    x = np.concatenate([w1.angles.ravel(), w2.angles.ravel()])
    t0 = time.perf_counter()
    hist = []
    best, best_x = -np.inf, x.copy()
    mom, vel = np.zeros_like(x), np.zeros_like(x)
    converged = False
    for it in range(cfg.max_iters):
        a, b = _unpack(x, w1, w2)
        c = objective(ch, a, b)
        hist.append(c)
        if callback is not None:
            callback(it, c)
        if c > best:
            best, best_x = c, x.copy()
        if it > 0 and abs(hist[-1] - hist[-2]) < cfg.stall_eps:
            converged = True
            break
        g = gradient(ch, a, b, cfg.grad_mode, cfg.fd_step)
        if cfg.optimizer == "adam":
            mom = 0.9 * mom + 0.1 * g
            vel = 0.999 * vel + 0.001 * g * g
            step = (mom / (1 - 0.9 ** (it + 1))) / (np.sqrt(vel / (1 - 0.999 ** (it + 1))) + 1e-8)
        else:
            step = g
        x = x + cfg.learning_rate * step
    a, b = _unpack(best_x, w1, w2)
    return VqaTrace(
        objective=hist,
        w1=a,
        w2=b,
        estimate=float(min(max(best, 0.0), 1.0)),
        converged=converged,
        wall_clock=time.perf_counter() - t0,
        iterations=len(hist),
        best=(a, b),
    )


def run_vqa_best(ch: KrausChannel, cfg: VqaConfig | None = None, restarts: int = 4,
                 workers: int | None = None) -> VqaTrace:
    """Best of several independently seeded runs (seeds spawned from ``cfg.seed``)."""
    cfg = cfg or VqaConfig()
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(cfg.seed).spawn(restarts)]
    runs = pmap(lambda sd: run_vqa(ch, replace(cfg, seed=sd)), seeds, workers)
    return max(runs, key=lambda t: t.estimate)
