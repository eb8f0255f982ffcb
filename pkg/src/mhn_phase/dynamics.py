"""Reduced dynamics on the probability simplex.

For equidistant equal-norm patterns the softmax weights evolve on their own,
``p' = softmax(beta_eff * p)``, independent of d. This module holds that map,
its fixed-point iteration, its Jacobian in the N-1 free coordinates, the
network energy written as a function of ``p`` and the N=2 cobweb data.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels

DEFAULT_EPS = 1e-3
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITERS = 200_000
_SIMPLEX_TOL = 1e-9


def _as_prob(p, name="p"):
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty 1-D vector")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{name} contains NaN or Inf")
    if np.any(p < -_SIMPLEX_TOL) or np.any(p > 1 + _SIMPLEX_TOL) or abs(p.sum() - 1.0) > _SIMPLEX_TOL:
        raise ValueError(f"{name} is not on the probability simplex (sum={p.sum()!r})")
    return p


def _check_beta_eff(beta_eff):
    if not np.isfinite(beta_eff) or beta_eff < 0:
        raise ValueError(f"beta_eff must be finite and non-negative, got {beta_eff!r}")


def uniform(N: int) -> np.ndarray:
    return np.full(N, 1.0 / N)


def perturbed_one_hot(N: int, eps: float = DEFAULT_EPS, index: int = 0) -> np.ndarray:
    """``(1 - eps) * e_index + eps * uniform``: a start close to one stored pattern."""
    p = np.full(N, eps / N)
    p[index] += 1.0 - eps
    return p


@dataclass(frozen=True)
class PDynamicsConfig:
    N: int
    beta_eff: float
    tol: float = DEFAULT_TOL
    max_iters: int = DEFAULT_MAX_ITERS

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"N must be >= 2, got {self.N}")
        _check_beta_eff(self.beta_eff)
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class FixedPointResult:
    p_star: np.ndarray
    converged: bool
    iterations: int
    spectral_radius_estimate: float | None = None


def p_update(p, beta_eff: float) -> np.ndarray:
    p = _as_prob(p)
    _check_beta_eff(beta_eff)
    return _kernels.softmax(beta_eff * p)


def p_trajectory(p0, beta_eff: float, steps: int) -> np.ndarray:
    """``(steps + 1) x N`` array of successive iterates, starting with ``p0``."""
    p0 = _as_prob(p0, "p0")
    _check_beta_eff(beta_eff)
    return _kernels.p_trajectory(np.ascontiguousarray(p0), float(beta_eff), int(steps))


def find_fixed_point(p0, config: PDynamicsConfig) -> FixedPointResult:
    p0 = _as_prob(p0, "p0")
    if p0.shape[0] != config.N:
        raise ValueError(f"p0 has length {p0.shape[0]}, config.N={config.N}")
    p, iters, conv = _kernels.p_fixed_point(
        np.ascontiguousarray(p0), float(config.beta_eff), float(config.tol), int(config.max_iters)
    )
    rho = None
    if conv:
        rho = float(np.max(np.abs(np.linalg.eigvals(jacobian(p, config.beta_eff)))))
    return FixedPointResult(p, bool(conv), int(iters), rho)


def jacobian(p, beta_eff: float) -> np.ndarray:
    """Jacobian of the map in the free coordinates ``p_1 .. p_{N-1}``.

    With ``p_N = 1 - sum(p_1..p_{N-1})`` substituted and ``s = softmax(beta_eff p)``:

        d p'_i / d p_j = beta_eff * s_i * (delta_ij - s_j + s_N)
    """
    p = _as_prob(p)
    _check_beta_eff(beta_eff)
    N = p.shape[0]
    if N < 2:
        raise ValueError("jacobian needs N >= 2")
    s = _kernels.softmax(beta_eff * p)
    head = s[:-1]
    J = -np.outer(head, head) + np.outer(head, np.full(N - 1, s[-1]))
    J[np.diag_indices(N - 1)] += head
    return beta_eff * J


def energy_in_p(p, beta: float, cos_theta: float) -> float:
    """Network energy at ``xi = X p`` for unit-norm patterns with pairwise cosine ``cos_theta``.

    Uses ``x_i . X p = p_i + cos_theta * sum_{j != i} p_j`` and
    ``|X p|^2 = sum_i (p_i^2 + cos_theta * sum_{j != i} p_i p_j)``.
    """
    p = _as_prob(p)
    if not (np.isfinite(beta) and beta > 0):
        raise ValueError(f"beta must be positive, got {beta!r}")
    total = p.sum()
    overlap = p + cos_theta * (total - p)
    quad = np.sum(p * p + cos_theta * p * (total - p))
    return float(-_kernels.logsumexp(beta * overlap) / beta + 0.5 * quad)


def two_state_map(p, beta_eff: float):
    """N=2 scalar map ``f(p) = exp(beta p) / (exp(beta p) + exp(beta (1 - p)))``."""
    # logistic form avoids overflow at large beta_eff
    return 1.0 / (1.0 + np.exp(-beta_eff * (2.0 * np.asarray(p, dtype=np.float64) - 1.0)))


@dataclass(frozen=True)
class CobwebTrace:
    beta_eff: float
    orbit: list  # (p_k, f(p_k)) pairs along the iteration
    graph: np.ndarray  # shape (M, 2): sampled (p, f(p)) over [0, 1]

    def orbit_points(self) -> np.ndarray:
        return np.array([pt[0] for pt in self.orbit])


def cobweb_trace(p0: float, beta_eff: float, steps: int, grid_step: float = 1e-3) -> CobwebTrace:
    if not 0.0 <= p0 <= 1.0:
        raise ValueError(f"p0 must lie in [0, 1], got {p0!r}")
    _check_beta_eff(beta_eff)
    orbit = []
    p = float(p0)
    for _ in range(steps):
        fp = float(two_state_map(p, beta_eff))
        orbit.append((p, fp))
        p = fp
    grid = np.linspace(0.0, 1.0, int(round(1.0 / grid_step)) + 1)
    return CobwebTrace(beta_eff, orbit, np.column_stack([grid, two_state_map(grid, beta_eff)]))
