"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype complex128.  A pure state is a
unit-norm 1-D array; a density matrix is a Hermitian, PSD, unit-trace 2-D
array.  Validation helpers raise :class:`DimensionError` or
:class:`SymmetryError` rather than silently repairing bad input.
"""

from __future__ import annotations

import numpy as np

MAX_DIM = 64
HERM_TOL = 1e-8
STATE_TOL = 1e-10


class DimensionError(ValueError):
    """Shapes are inconsistent or outside the supported range."""


class SymmetryError(ValueError):
    """A matrix expected to be Hermitian (or PSD) is not."""


def set_max_dim(dim: int) -> None:
    """Change the API-level dimension cap (default 64)."""
    global MAX_DIM
    if dim < 1:
        raise DimensionError("dimension cap must be positive")
    MAX_DIM = int(dim)


def check_dim(d: int) -> int:
    if int(d) != d or d < 1:
        raise DimensionError(f"dimension must be a positive integer, got {d!r}")
    if d > MAX_DIM:
        raise DimensionError(f"dimension {d} exceeds the cap {MAX_DIM}")
    return int(d)


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def as_square(m) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def dag(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(m, tol: float = HERM_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, dag(m), atol=tol, rtol=0)


def hermitize(m: np.ndarray) -> np.ndarray:
    return (m + dag(m)) / 2


def herm_eig(m, tol: float = HERM_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` in descending order and the
    matching orthonormal eigenvectors as the columns of ``v``.  The input is
    symmetrized before decomposition to absorb round-off.
    """
    m = as_square(m)
    if not is_hermitian(m, tol):
        raise SymmetryError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(hermitize(m))
    return w[::-1].copy(), v[:, ::-1].copy()


def eigvalsh(m: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix, no validation (hot path)."""
    return np.linalg.eigvalsh(hermitize(m))


def trace_norm(m) -> float:
    """Sum of singular values of a square matrix."""
    m = as_square(m)
    if is_hermitian(m, 1e-12):
        return float(np.sum(np.abs(eigvalsh(m))))
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def trace_norm_herm(m: np.ndarray) -> float:
    """Trace norm of a matrix known to be Hermitian (unchecked)."""
    return float(np.sum(np.abs(eigvalsh(m))))


def sign_herm(m: np.ndarray) -> np.ndarray:
    """Matrix sign of a Hermitian matrix: 2P - I with P the projector on the
    non-negative eigenspace.  Zero eigenvalues map to +1."""
    w, v = np.linalg.eigh(hermitize(m))
    s = np.where(w >= 0, 1.0, -1.0)
    return (v * s) @ dag(v)


def kron(*ms) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in ms:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def partial_trace(m, dims: tuple[int, int], keep: int = 0) -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    ``dims = (dA, dB)``; ``keep=0`` returns Tr_B[m], ``keep=1`` returns Tr_A[m].
    """
    m = as_square(m)
    da, db = dims
    if da * db != m.shape[0]:
        raise DimensionError(f"dims {dims} do not match matrix of size {m.shape[0]}")
    t = m.reshape(da, db, da, db)
    if keep == 0:
        return np.einsum("ijkj->ik", t)
    if keep == 1:
        return np.einsum("ijil->jl", t)
    raise ValueError("keep must be 0 or 1")


def haar_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix.

    ``seed`` may be an integer or a ``numpy.random.Generator``.
    """
    d = check_dim(d)
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def haar_state(d: int, seed=None) -> np.ndarray:
    """Haar-random pure state (unit vector)."""
    d = check_dim(d)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_density(d: int, seed=None, rank: int | None = None) -> np.ndarray:
    """Random density matrix from the induced (Hilbert-Schmidt for full rank) measure."""
    d = check_dim(d)
    rng = np.random.default_rng(seed)
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ dag(g)
    return rho / np.trace(rho).real


def proj(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())


def check_pure_state(psi, tol: float = STATE_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise DimensionError("pure state must be a 1-D amplitude vector")
    check_dim(psi.shape[0])
    if abs(np.linalg.norm(psi) - 1) > tol:
        raise ValueError("pure state is not normalized")
    return psi


def check_density(rho, tol: float = STATE_TOL) -> np.ndarray:
    """Validate a density matrix: Hermitian, PSD and unit trace within ``tol``."""
    rho = as_square(rho)
    check_dim(rho.shape[0])
    if not is_hermitian(rho, tol):
        raise SymmetryError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError("density matrix does not have unit trace")
    if eigvalsh(rho)[0] < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def basis(d: int, i: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[i] = 1
    return e


PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)
