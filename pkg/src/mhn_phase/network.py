"""Modern Hopfield Network in the full d-dimensional state space.

Stored patterns are the columns of a ``d x N`` matrix ``X``. The energy is

    E(xi) = -(1/beta) * log(sum_i exp(beta * x_i . xi)) + 0.5 * xi . xi

and the concave-convex update ``xi' = X softmax(beta X^T xi)`` never increases it.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITERS = 10_000


class DimensionError(ValueError):
    """State and pattern dimensions do not agree."""


@dataclass(frozen=True)
class PatternSet:
    """Immutable ``d x N`` pattern matrix; columns are the stored patterns."""

    data: np.ndarray

    def __post_init__(self):
        X = np.array(self.data, dtype=np.float64, order="C", copy=True)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError(f"pattern matrix must be 2-D and non-empty, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ValueError("pattern matrix contains NaN or Inf")
        X.setflags(write=False)
        object.__setattr__(self, "data", X)
        XT = np.ascontiguousarray(X.T)
        XT.setflags(write=False)
        object.__setattr__(self, "_XT", XT)

    @classmethod
    def from_rows(cls, rows):
        """Build from an ``N x d`` array whose rows are patterns."""
        return cls(np.asarray(rows, dtype=np.float64).T)

    @property
    def d(self) -> int:
        return self.data.shape[0]

    @property
    def N(self) -> int:
        return self.data.shape[1]

    @property
    def T(self) -> np.ndarray:
        return self._XT

    def column(self, i: int) -> np.ndarray:
        return self.data[:, i].copy()

    def centroid(self) -> np.ndarray:
        return self.data.mean(axis=1)


@dataclass
class TrajectoryRecord:
    states: list = field(default_factory=list)
    energies: list = field(default_factory=list)
    p_history: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _check_beta(beta):
    if not np.isfinite(beta) or beta <= 0:
        raise ValueError(f"beta must be a positive finite number, got {beta!r}")


def _as_state(xi, patterns):
    xi = np.asarray(xi, dtype=np.float64)
    if xi.ndim != 1 or xi.shape[0] != patterns.d:
        raise DimensionError(
            f"state has shape {xi.shape}, patterns have dimension d={patterns.d}"
        )
    if not np.all(np.isfinite(xi)):
        raise ValueError("state contains NaN or Inf")
    return xi


def energy(xi, patterns: PatternSet, beta: float) -> float:
    _check_beta(beta)
    xi = _as_state(xi, patterns)
    z = beta * (patterns.T @ xi)
    return float(-_kernels.logsumexp(z) / beta + 0.5 * xi @ xi)


def softmax_probabilities(xi, patterns: PatternSet, beta: float) -> np.ndarray:
    """Softmax weights ``p_i`` of each stored pattern for state ``xi``."""
    _check_beta(beta)
    xi = _as_state(xi, patterns)
    return _kernels.softmax(beta * (patterns.T @ xi))


def update_state(xi, patterns: PatternSet, beta: float) -> np.ndarray:
    return patterns.data @ softmax_probabilities(xi, patterns, beta)


def iterate_to_fixed_point(
    xi0,
    patterns: PatternSet,
    beta: float,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> TrajectoryRecord:
    """Apply :func:`update_state` until the L2 step falls below ``tol``.

    Every visited state is recorded together with its energy and the softmax
    weights evaluated at that state, so all three histories have equal length.
    Hitting ``max_iters`` is not an error; ``converged`` is left False.
    """
    _check_beta(beta)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    xi = _as_state(xi0, patterns).copy()
    X = patterns.data
    rec = TrajectoryRecord()

    def record(state):
        z = beta * (patterns.T @ state)
        rec.states.append(state)
        rec.energies.append(float(-_kernels.logsumexp(z) / beta + 0.5 * state @ state))
        rec.p_history.append(_kernels.softmax(z))

    record(xi)
    for it in range(1, max_iters + 1):
        new = X @ rec.p_history[-1]
        step = float(np.linalg.norm(new - xi))
        xi = new
        record(xi)
        rec.iterations = it
        if step < tol:
            rec.converged = True
            break
    return rec


def converge(xi0, patterns: PatternSet, beta: float, tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS):
    """Fast endpoint-only variant of :func:`iterate_to_fixed_point`.

    Returns ``(xi, iterations, converged)`` without recording a history.
    """
    _check_beta(beta)
    xi = _as_state(xi0, patterns)
    return _kernels.xi_fixed_point(
        patterns.data, patterns.T, np.ascontiguousarray(xi), float(beta), float(tol), int(max_iters)
    )
