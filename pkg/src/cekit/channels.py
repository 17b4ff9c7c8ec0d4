"""Quantum and classical channels and the constructions built from them.

Every channel is held as a :class:`KrausChannel`.  Kraus lists are
gauge-dependent, so equality between channels is decided on Choi matrices
(:func:`channels_equal`).  Vectorization is row-major throughout:
``vec(K X K^dag) = (K kron conj(K)) vec(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from .numkit import (
    DimensionError,
    PAULIS,
    as_matrix,
    basis,
    check_density,
    check_dim,
    dag,
    haar_unitary,
    hermitize,
    kron,
    partial_trace,
)

TP_TOL = 1e-8
STOCH_TOL = 1e-12
KRAUS_CUTOFF = 1e-12


class ChannelError(ValueError):
    """The operators do not define a valid (CPTP / stochastic) channel."""


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """CPTP map ``rho -> sum_i K_i rho K_i^dag``.

    ``kraus`` is stored as an array of shape ``(r, dim_out, dim_in)``.
    """

    kraus: np.ndarray
    dim_in: int = field(init=False)
    dim_out: int = field(init=False)

    def __post_init__(self):
        ks = np.asarray(self.kraus, dtype=complex)
        if ks.ndim == 2:
            ks = ks[None]
        if ks.ndim != 3 or ks.shape[0] == 0:
            raise ChannelError("Kraus list must be a non-empty sequence of matrices")
        r, dout, din = ks.shape
        check_dim(din)
        check_dim(dout)
        if not np.all(np.isfinite(ks)):
            raise ChannelError("Kraus operators have non-finite entries")
        gram = np.einsum("kba,kbc->ac", ks.conj(), ks)
        err = np.max(np.abs(gram - np.eye(din)))
        if err > TP_TOL:
            raise ChannelError(f"not trace-preserving: |sum K^dag K - I| = {err:.3g}")
        ks.setflags(write=False)
        object.__setattr__(self, "kraus", ks)
        object.__setattr__(self, "dim_in", din)
        object.__setattr__(self, "dim_out", dout)

    @property
    def rank(self) -> int:
        return self.kraus.shape[0]

    @cached_property
    def transfer(self) -> np.ndarray:
        """Superoperator matrix acting on row-major vectorized operators."""
        ks = self.kraus
        r, dout, din = ks.shape
        t = np.einsum("kab,kcd->acbd", ks, ks.conj())
        return t.reshape(dout * dout, din * din)

    def __call__(self, rho) -> np.ndarray:
        return self.apply_op(rho)

    def apply_op(self, m) -> np.ndarray:
        """Apply the channel to an arbitrary operator (linear extension)."""
        m = np.asarray(m, dtype=complex)
        if m.shape != (self.dim_in, self.dim_in):
            raise DimensionError(f"expected a {self.dim_in}x{self.dim_in} input, got {m.shape}")
        return (self.transfer @ m.reshape(-1)).reshape(self.dim_out, self.dim_out)

    def adjoint_op(self, y) -> np.ndarray:
        """Heisenberg-picture map ``Y -> sum_i K_i^dag Y K_i``."""
        y = np.asarray(y, dtype=complex)
        if y.shape != (self.dim_out, self.dim_out):
            raise DimensionError(f"expected a {self.dim_out}x{self.dim_out} input, got {y.shape}")
        return (dag(self.transfer) @ y.reshape(-1)).reshape(self.dim_in, self.dim_in)


def apply(ch: KrausChannel, rho) -> np.ndarray:
    """Output state ``N(rho)`` for a validated density matrix ``rho``."""
    rho = check_density(rho, tol=1e-9)
    if rho.shape[0] != ch.dim_in:
        raise DimensionError(f"channel expects dimension {ch.dim_in}, state has {rho.shape[0]}")
    return hermitize(ch.apply_op(rho))


# --- Choi / Stinespring ---------------------------------------------------------


def choi(ch: KrausChannel) -> np.ndarray:
    """Choi matrix ``sum_ij N(|i><j|) kron |i><j|`` (output factor first).

    Its trace is ``dim_in``; for the identity channel it is ``d`` times the
    projector on the maximally entangled state.
    """
    vecs = ch.kraus.reshape(ch.rank, -1)
    return vecs.T @ vecs.conj()


def from_choi(j, dim_in: int, dim_out: int, cutoff: float = KRAUS_CUTOFF) -> KrausChannel:
    """Kraus channel from a Choi matrix, dropping eigenvalues below ``cutoff``."""
    j = as_matrix(j)
    if j.shape != (dim_in * dim_out,) * 2:
        raise DimensionError("Choi matrix shape does not match dimensions")
    w, v = np.linalg.eigh(hermitize(j))
    if w[0] < -1e-8 * max(1.0, w[-1]):
        raise ChannelError(f"Choi matrix is not positive semidefinite (min eig {w[0]:.3g})")
    keep = w > cutoff
    if not np.any(keep):
        raise ChannelError("Choi matrix is zero")
    ks = (v[:, keep] * np.sqrt(w[keep])).T.reshape(-1, dim_out, dim_in)
    return KrausChannel(ks)


def apply_via_choi(j: np.ndarray, rho: np.ndarray, dim_in: int, dim_out: int) -> np.ndarray:
    """``N(rho) = Tr_in[J (I kron rho^T)]``."""
    return partial_trace(j @ np.kron(np.eye(dim_out), rho.T), (dim_out, dim_in), keep=0)


def channels_equal(a: KrausChannel, b: KrausChannel, tol: float = 1e-8) -> bool:
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        return False
    return float(np.max(np.abs(choi(a) - choi(b)))) < tol


def stinespring(ch: KrausChannel) -> np.ndarray:
    """Isometry ``V = sum_i K_i kron |i>`` into output kron environment."""
    return np.transpose(ch.kraus, (1, 0, 2)).reshape(ch.dim_out * ch.rank, ch.dim_in)


def complementary(ch: KrausChannel) -> KrausChannel:
    """Channel to the environment, ``rho -> sum_ij Tr[K_i rho K_j^dag] |i><j|``.

    The environment dimension is the number of Kraus operators supplied.
    """
    return KrausChannel(np.transpose(ch.kraus, (1, 0, 2)))


# --- combinators ----------------------------------------------------------------


def compose(after: KrausChannel, before: KrausChannel) -> KrausChannel:
    """``after o before``."""
    if after.dim_in != before.dim_out:
        raise DimensionError("composition dimensions do not match")
    ks = np.einsum("iab,jbc->ijac", after.kraus, before.kraus)
    return KrausChannel(ks.reshape(-1, after.dim_out, before.dim_in))


def tensor(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    ks = np.einsum("iab,jcd->ijacbd", a.kraus, b.kraus)
    return KrausChannel(ks.reshape(-1, a.dim_out * b.dim_out, a.dim_in * b.dim_in))


def mixture(channels, weights) -> KrausChannel:
    """Convex combination, realized by concatenating sqrt-weighted Kraus lists."""
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise ChannelError("mixture weights must be a probability vector")
    dims = {(c.dim_in, c.dim_out) for c in channels}
    if len(dims) != 1:
        raise DimensionError("mixed channels must share dimensions")
    ks = [np.sqrt(w) * c.kraus for c, w in zip(channels, weights) if w > 0]
    return KrausChannel(np.concatenate(ks))


def partial_trace_output(ch: KrausChannel, dims: tuple[int, int], keep: int = 0) -> KrausChannel:
    """Discard one factor of a bipartite output ``dims = (dB, dB')``."""
    db, dbp = dims
    if db * dbp != ch.dim_out:
        raise DimensionError("output dims do not factor the channel output")
    t = ch.kraus.reshape(ch.rank, db, dbp, ch.dim_in)
    if keep == 0:
        ks = np.transpose(t, (0, 2, 1, 3)).reshape(-1, db, ch.dim_in)
    else:
        ks = t.reshape(-1, dbp, ch.dim_in)
    return KrausChannel(ks)


# --- elementary channels --------------------------------------------------------


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel(np.eye(check_dim(d))[None])


def unitary_channel(u) -> KrausChannel:
    return KrausChannel(as_matrix(u)[None])


def weyl_operators(d: int) -> list[np.ndarray]:
    """Generalized Pauli (clock-and-shift) operators ``X^a Z^b``; Paulis for d=2."""
    if d == 2:
        return list(PAULIS)
    w = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(w ** np.arange(d))
    return [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            for a in range(d) for b in range(d)]


def depolarizing(d: int, lam: float) -> KrausChannel:
    """``rho -> lam rho + (1 - lam) Tr[rho] I/d``.

    Kraus operators are weighted Weyl operators; at ``d=2, lam=0`` they are the
    Paulis divided by two.  Valid for ``-1/(d^2-1) <= lam <= 1``.
    """
    d = check_dim(d)
    ops = weyl_operators(d)
    c0 = lam + (1 - lam) / d**2
    c = (1 - lam) / d**2
    if c0 < -1e-15 or c < -1e-15:
        raise ChannelError("depolarizing parameter out of the CP range")
    ws = [max(c0, 0.0)] + [max(c, 0.0)] * (len(ops) - 1)
    ks = [np.sqrt(wt) * op for wt, op in zip(ws, ops) if wt > 0]
    return KrausChannel(np.array(ks))


def discard_reprepare(d_in: int, sigma) -> KrausChannel:
    """Constant channel ``rho -> Tr[rho] sigma`` with rank-one Kraus operators."""
    sigma = check_density(sigma, tol=1e-9)
    d_in = check_dim(d_in)
    w, v = np.linalg.eigh(hermitize(sigma))
    ks = [np.sqrt(wj) * np.outer(v[:, j], basis(d_in, i))
          for j, wj in enumerate(w) if wj > KRAUS_CUTOFF for i in range(d_in)]
    return KrausChannel(np.array(ks))


def amplitude_damping(gamma: float) -> KrausChannel:
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel(np.array([k0, k1]))


def random_channel(d_in: int, d_out: int | None = None, seed=None, n_kraus: int | None = None) -> KrausChannel:
    """Random channel from a Haar-random Stinespring isometry."""
    d_out = d_in if d_out is None else d_out
    rng = np.random.default_rng(seed)
    r_min = -(-d_in // d_out)  # an isometry needs d_out * r >= d_in
    r = n_kraus if n_kraus is not None else int(rng.integers(r_min, d_in * d_out + 1))
    if r < r_min:
        raise DimensionError(f"{r} Kraus operators cannot map dimension {d_in} into {d_out} isometrically")
    u = haar_unitary(d_out * r, rng)
    v = u[:, :d_in]
    return KrausChannel(np.transpose(v.reshape(d_out, r, d_in), (1, 0, 2)))


def random_unitary_channel(d: int, seed=None) -> KrausChannel:
    return unitary_channel(haar_unitary(d, seed))


# --- classical processes --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StochasticChannel:
    """Column-stochastic matrix ``q[b, a] = q(b|a)``."""

    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.ndim != 2 or q.size == 0:
            raise ChannelError("stochastic matrix must be 2-D and non-empty")
        if np.any(q < 0):
            raise ChannelError("stochastic matrix has negative entries")
        sums = q.sum(axis=0)
        if np.max(np.abs(sums - 1)) > STOCH_TOL:
            raise ChannelError(
                f"columns must sum to one (trace preservation); got column sums {np.round(sums, 12).tolist()}"
            )
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def n_in(self) -> int:
        return self.q.shape[1]

    @property
    def n_out(self) -> int:
        return self.q.shape[0]

    def __call__(self, p) -> np.ndarray:
        return self.q @ np.asarray(p, dtype=float)


def binary_symmetric(flip: float) -> StochasticChannel:
    return StochasticChannel([[1 - flip, flip], [flip, 1 - flip]])


def embed_classical(q: StochasticChannel) -> KrausChannel:
    """Quantum channel ``rho -> sum_ab q(b|a) <a|rho|a> |b><b|``.

    Kraus set ``{sqrt(q(b|a)) |b><a|}`` restricted to non-zero entries.
    """
    ks = []
    for b, a in zip(*np.nonzero(q.q)):
        k = np.zeros((q.n_out, q.n_in), dtype=complex)
        k[b, a] = np.sqrt(q.q[b, a])
        ks.append(k)
    return KrausChannel(np.array(ks))


def classical_to_quantum(repreps) -> KrausChannel:
    """Measure in the computational basis, then prepare ``rho_a``."""
    repreps = [check_density(r, tol=1e-9) for r in repreps]
    if not repreps:
        raise ChannelError("need at least one output state")
    dims = {r.shape[0] for r in repreps}
    if len(dims) != 1:
        raise DimensionError("all prepared states must share a dimension")
    dout = dims.pop()
    din = len(repreps)
    ks = []
    for a, r in enumerate(repreps):
        w, v = np.linalg.eigh(hermitize(r))
        for j in range(dout):
            if w[j] > KRAUS_CUTOFF:
                ks.append(np.sqrt(w[j]) * np.outer(v[:, j], basis(din, a)))
    return KrausChannel(np.array(ks))


def ii_d_example() -> StochasticChannel:
    """Two input bits to one output bit; inputs ordered 00, 01, 10, 11.

    00 -> 0, 11 -> 1, 01 -> 0 w.p. 1/3, 10 -> 0 w.p. 2/3.
    """
    return StochasticChannel([[1, 1 / 3, 2 / 3, 0], [0, 2 / 3, 1 / 3, 1]])


# --- partial swap ---------------------------------------------------------------


def swap_operator(d: int) -> np.ndarray:
    s = np.zeros((d * d, d * d), dtype=complex)
    for i, j in product(range(d), repeat=2):
        s[j * d + i, i * d + j] = 1
    return s


def partial_swap_unitary(d: int, theta: float) -> np.ndarray:
    return np.cos(theta) * np.eye(d * d) + 1j * np.sin(theta) * swap_operator(d)


def sigma_lambda(d: int, p: float, phi=None) -> np.ndarray:
    """``(1-p) I/d + p |phi><phi|``; ``phi`` defaults to ``|0>``."""
    phi = basis(d, 0) if phi is None else np.asarray(phi, dtype=complex)
    return (1 - p) * np.eye(d) / d + p * np.outer(phi, phi.conj())


def partial_swap_channel(d: int, theta: float, sigma) -> KrausChannel:
    """``rho -> Tr_Lambda[U (rho kron sigma) U^dag]`` with ``U = cos I + i sin SWAP``.

    The output is read off the second tensor slot after the gate, so that
    ``theta=0`` prepares ``sigma`` and ``theta=pi/2`` transmits the input.
    Kraus operators come from the eigendecomposition of the Choi matrix built
    from the exact dilation.
    """
    d = check_dim(d)
    if not 0 <= theta < 2 * np.pi:
        raise ValueError("theta must lie in [0, 2 pi)")
    sigma = check_density(sigma, tol=1e-9)
    if sigma.shape[0] != d:
        raise DimensionError("sigma must have the same dimension as the system")
    u = partial_swap_unitary(d, theta)
    j = np.zeros((d * d, d * d), dtype=complex)
    for a, b in product(range(d), repeat=2):
        e = np.zeros((d, d), dtype=complex)
        e[a, b] = 1
        out = partial_trace(u @ np.kron(e, sigma) @ dag(u), (d, d), keep=1)
        j += np.kron(out, e)
    return from_choi(j, d, d)


def partial_swap_commutator_form(m, theta: float, sigma) -> np.ndarray:
    """Closed-form action on a generic matrix:
    ``cos^2 Tr[M] sigma + sin^2 M - i sin cos [sigma, M]``."""
    m = np.asarray(m, dtype=complex)
    c, s = np.cos(theta), np.sin(theta)
    return c * c * np.trace(m) * sigma + s * s * m - 1j * s * c * (sigma @ m - m @ sigma)


# --- superposition of paths -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class PathChannelSpec:
    """Channel ``base`` on each of ``k`` paths, vacuum amplitudes ``gammas``,
    path state ``sigma`` (``k x k``)."""

    base: KrausChannel
    gammas: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=complex).reshape(-1)
        if g.shape[0] != self.base.rank:
            raise DimensionError("need one vacuum amplitude per Kraus operator")
        if abs(np.sum(np.abs(g) ** 2) - 1) > 1e-10:
            raise ChannelError("vacuum amplitudes must have unit norm")
        sigma = check_density(self.sigma, tol=1e-9)
        if sigma.shape[0] < 2:
            raise DimensionError("need at least two paths")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "sigma", sigma)

    @property
    def k(self) -> int:
        return self.sigma.shape[0]

    @property
    def interference(self) -> np.ndarray:
        """``F = sum_i conj(gamma_i) C_i``."""
        return np.einsum("i,iab->ab", self.gammas.conj(), self.base.kraus)

    @property
    def sigma_diag(self) -> np.ndarray:
        return np.diag(np.diag(self.sigma))

    @property
    def sigma_offdiag(self) -> np.ndarray:
        return self.sigma - self.sigma_diag


def superposed_paths(spec: PathChannelSpec) -> KrausChannel:
    """``rho -> C(rho) kron sigma_diag + F rho F^dag kron sigma_offdiag``.

    Output ordering is internal system first, path second.
    """
    base = spec.base
    din, dout, k = base.dim_in, base.dim_out, spec.k
    f = spec.interference
    sd, so = spec.sigma_diag, spec.sigma_offdiag
    dtot = dout * k
    j = np.zeros((dtot * din, dtot * din), dtype=complex)
    for a, b in product(range(din), repeat=2):
        e = np.zeros((din, din), dtype=complex)
        e[a, b] = 1
        out = np.kron(base.apply_op(e), sd) + np.kron(f @ e @ dag(f), so)
        j += np.kron(out, e)
    return from_choi(j, din, dtot)


def uniform_gammas(r: int) -> np.ndarray:
    return np.full(r, 1 / np.sqrt(r), dtype=complex)


def maximally_coherent(k: int) -> np.ndarray:
    e = np.ones(k, dtype=complex) / np.sqrt(k)
    return np.outer(e, e.conj())


# --- bipartite (conditioned) channels ------------------------------------------


@dataclass(frozen=True, eq=False)
class BipartiteChannel:
    """Two-input channel ``St(A kron K) -> St(B)``."""

    inner: KrausChannel
    dim_a: int
    dim_k: int

    def __post_init__(self):
        if self.inner.dim_in != self.dim_a * self.dim_k:
            raise DimensionError("inner channel input must be dim_a * dim_k")

    @property
    def dim_b(self) -> int:
        return self.inner.dim_out


def conditional_slice(bip: BipartiteChannel, sigma) -> KrausChannel:
    """Effective channel ``rho -> N(rho kron sigma)`` for a fixed state of K."""
    sigma = check_density(sigma, tol=1e-9)
    if sigma.shape[0] != bip.dim_k:
        raise DimensionError("sigma must live on the conditioning system")
    w, v = np.linalg.eigh(hermitize(sigma))
    ks = []
    for j in range(bip.dim_k):
        if w[j] <= KRAUS_CUTOFF:
            continue
        iso = np.kron(np.eye(bip.dim_a), v[:, j].reshape(-1, 1))
        ks.extend(np.sqrt(w[j]) * (k @ iso) for k in bip.inner.kraus)
    return KrausChannel(np.array(ks))


@dataclass(frozen=True, eq=False)
class ClassicalBipartite:
    """Classical two-input process ``q(b|a,k)``; ``q[b, a*n_k + k]``."""

    chan: StochasticChannel
    n_a: int
    n_k: int

    def __post_init__(self):
        if self.chan.n_in != self.n_a * self.n_k:
            raise DimensionError("input alphabet must be n_a * n_k")

    def slice(self, sigma) -> StochasticChannel:
        sigma = np.asarray(sigma, dtype=float)
        q = self.chan.q.reshape(self.chan.n_out, self.n_a, self.n_k)
        return StochasticChannel(q @ sigma)


def one_time_pad() -> ClassicalBipartite:
    """``b = a XOR k`` on bits."""
    q = np.zeros((2, 4))
    for a, k in product(range(2), repeat=2):
        q[a ^ k, a * 2 + k] = 1
    return ClassicalBipartite(StochasticChannel(q), 2, 2)


def one_time_pad_quantum() -> BipartiteChannel:
    """Classical one-time pad embedded as a quantum channel (decoheres a and k)."""
    otp = one_time_pad()
    return BipartiteChannel(embed_classical(otp.chan), 2, 2)


def pauli_one_time_pad() -> BipartiteChannel:
    """Quantum one-time pad: a two-bit key selects the Pauli applied to the qubit."""
    ks = [np.kron(p, basis(4, kidx).reshape(1, -1)) for kidx, p in enumerate(PAULIS)]
    return BipartiteChannel(KrausChannel(np.array(ks)), 2, 4)
