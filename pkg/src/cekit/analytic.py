"""Closed-form values for the partial-swap and superposition-of-paths examples."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .channels import PathChannelSpec, partial_swap_channel, sigma_lambda
from .numkit import DimensionError, basis, herm_eig, trace_norm

F_GRID = 10_001


@dataclass(frozen=True)
class PartialSwapParams:
    """Partial swap on ``d``-dim systems with ``sigma = (1-p) I/d + p |phi><phi|``."""

    d: int
    theta: float
    p: float
    phi: np.ndarray | None = None

    def __post_init__(self):
        if self.d < 2:
            raise DimensionError("partial swap needs d >= 2")
        if not 0 <= self.p <= 1:
            raise ValueError("p must lie in [0, 1]")
        phi = basis(self.d, 0) if self.phi is None else np.asarray(self.phi, dtype=complex)
        if phi.shape != (self.d,) or abs(np.linalg.norm(phi) - 1) > 1e-10:
            raise ValueError("phi must be a unit vector of dimension d")
        object.__setattr__(self, "phi", phi)

    @property
    def a(self) -> float:
        return float(np.sin(self.theta) ** 2)

    @property
    def b(self) -> float:
        return float(self.p * np.sin(self.theta) * np.cos(self.theta))

    @property
    def sigma(self) -> np.ndarray:
        return sigma_lambda(self.d, self.p, self.phi)

    def channel(self):
        return partial_swap_channel(self.d, self.theta, self.sigma)


class PartialSwapValue(NamedTuple):
    value: float
    f_star: float


def _ps_objective(f, a, b):
    f = np.clip(f, 0.0, 1.0)
    base = a * a + f * b * b
    return (np.sqrt(base) + np.sqrt(base + 2 * abs(a * b) * np.sqrt(f * (1 - f)))) / 2


def partial_swap_ce_max(params: PartialSwapParams) -> PartialSwapValue:
    """Maximize the published closed form over ``F in [0, 1]``.

    Dense grid, then bounded Brent refinement around the best grid point.
    Note: this expression exceeds what the channel attains whenever
    ``0 < |b|`` and ``a > 0``; see :func:`partial_swap_ce_max_exact`.
    """
    a, b = params.a, params.b
    grid = np.linspace(0, 1, F_GRID)
    vals = _ps_objective(grid, a, b)
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, F_GRID - 1)]
    best_f, best_v = float(grid[i]), float(vals[i])
    if hi > lo:
        res = minimize_scalar(lambda f: -_ps_objective(f, a, b), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12})
        if -res.fun > best_v:
            best_f, best_v = float(res.x), float(-res.fun)
    return PartialSwapValue(best_v, best_f)


def partial_swap_ce_max_exact(params: PartialSwapParams) -> float:
    """CE_max the partial-swap channel actually attains: ``sqrt(a^2 + b^2)``.

    Follows from maximizing ``||a Z - i b [psi, Z]||_1 / 2`` over pure
    ``psi``; matches the see-saw solver on the dilated channel.
    """
    return float(np.hypot(params.a, params.b))


def partial_swap_achieving_pair(params: PartialSwapParams) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal pair from the published four-step construction.

    ``gamma`` lies in the plane of ``phi`` and a fixed fiducial vector
    orthogonal to it.
    """
    d = params.d
    if d < 3:
        raise DimensionError("the construction needs d >= 3")
    phi = params.phi
    f = partial_swap_ce_max(params).f_star
    c = np.sqrt(max(1 - f, 0.0))
    fid = _orth_basis([phi], d)
    e = fid[0]
    gamma = c * phi + np.sqrt(max(1 - c * c, 0.0)) * e
    if f > 1e-14:
        xi = (phi - c * gamma) / np.sqrt(f)
    else:
        xi = e
    xi = xi / np.linalg.norm(xi)
    xi_perp = _orth_basis([xi, phi], d)[0]
    psi = (xi + xi_perp) / np.sqrt(2)
    psi_perp = (xi - xi_perp) / np.sqrt(2)
    return psi, psi_perp


def _orth_basis(vecs, d: int) -> list[np.ndarray]:
    """Computational basis vectors Gram-Schmidt'ed against ``vecs``."""
    span = [v / np.linalg.norm(v) for v in vecs]
    q = []
    for v in span:
        w = v - sum(np.vdot(u, v) * u for u in q)
        n = np.linalg.norm(w)
        if n > 1e-12:
            q.append(w / n)
    out = []
    for i in range(d):
        w = basis(d, i) - sum(np.vdot(u, basis(d, i)) * u for u in q + out)
        n = np.linalg.norm(w)
        if n > 1e-8:
            out.append(w / n)
    return out


def partial_swap_ce_min_bound(theta: float) -> float:
    return float(np.sin(theta) ** 2)


# --- superposition of paths --------------------------------------------------------


def ky_fan_2(m, tol: float = 1e-9) -> float:
    """Sum of the two largest eigenvalues of a PSD matrix."""
    w, _ = herm_eig(m)
    if w[-1] < -tol:
        raise ValueError("matrix is not positive semidefinite")
    return float(w[0] + (w[1] if len(w) > 1 else 0.0))


def coherence_norm(sigma) -> float:
    """Trace norm of the off-diagonal part of ``sigma``."""
    sigma = np.asarray(sigma, dtype=complex)
    return trace_norm(sigma - np.diag(np.diag(sigma)))


def superposition_ce_max_bound(spec: PathChannelSpec, ce_max_base: float) -> float:
    f = spec.interference
    return ce_max_base + ky_fan_2(f.conj().T @ f) * coherence_norm(spec.sigma) / 2


def superposition_ce_min_bound(spec: PathChannelSpec, cfg=None) -> float:
    """``lambda_min(F^dag F) * ||sigma_offdiag||_1`` for a discard-and-reprepare base."""
    from .cause import SolverConfig, ce_max

    base_max = ce_max(spec.base, cfg or SolverConfig(restarts=8)).value
    if base_max >= 1e-8:
        raise ValueError(f"base channel is not discard-and-reprepare (CE_max = {base_max:.3g})")
    f = spec.interference
    w, _ = herm_eig(f.conj().T @ f)
    return float(max(w[-1], 0.0) * coherence_norm(spec.sigma))
