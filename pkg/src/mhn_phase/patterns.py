"""Equidistant, equal-norm pattern sets and their effective inverse temperature."""

from dataclasses import dataclass

import numpy as np

from .network import PatternSet

_FEAS_SLACK = 1e-12


class InfeasibleSpecError(ValueError):
    """No real d x N matrix has the requested Gram structure."""


@dataclass(frozen=True)
class EquidistantSpec:
    """N patterns in d dimensions, all of norm ``norm`` with pairwise cosine ``cos_theta``.

    The target Gram matrix is ``norm**2 * (cos_theta + (1 - cos_theta) * I)``.
    It is realisable iff ``-1/(N-1) <= cos_theta <= 1`` and its rank does not
    exceed ``d``; the rank is ``N - 1`` at the lower bound and ``N`` otherwise,
    so ``N <= d + 1`` always holds for a feasible spec.
    """

    d: int
    N: int
    norm: float = 1.0
    cos_theta: float = 0.0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise InfeasibleSpecError(f"d must be a positive integer, got {self.d!r}")
        if int(self.N) != self.N or self.N < 1:
            raise InfeasibleSpecError(f"N must be a positive integer, got {self.N!r}")
        if not (np.isfinite(self.norm) and self.norm > 0):
            raise InfeasibleSpecError(f"norm must be positive, got {self.norm!r}")
        c = self.cos_theta
        if not np.isfinite(c) or c > 1.0 + _FEAS_SLACK:
            raise InfeasibleSpecError(f"cos_theta must be <= 1, got {c!r}")
        if self.N > self.d + 1:
            raise InfeasibleSpecError(f"N={self.N} patterns cannot be equidistant in d={self.d} (need N <= d+1)")
        if self.N > 1:
            lower = -1.0 / (self.N - 1)
            if c < lower - _FEAS_SLACK:
                raise InfeasibleSpecError(
                    f"cos_theta={c} below {lower:.6g}; Gram matrix would not be positive semidefinite"
                )
            if self.rank > self.d:
                raise InfeasibleSpecError(
                    f"Gram matrix has rank {self.rank} > d={self.d}; "
                    f"use cos_theta={lower:.6g} (regular simplex) or d >= N"
                )

    @property
    def rank(self) -> int:
        if self.N == 1:
            return 1
        if abs(self.cos_theta + 1.0 / (self.N - 1)) <= _FEAS_SLACK:
            return self.N - 1
        if abs(self.cos_theta - 1.0) <= _FEAS_SLACK:
            return 1
        return self.N

    def gram(self) -> np.ndarray:
        c = self.cos_theta
        return self.norm**2 * (c * np.ones((self.N, self.N)) + (1.0 - c) * np.eye(self.N))

    @classmethod
    def orthonormal(cls, N: int, d: int | None = None):
        return cls(d=N if d is None else d, N=N, norm=1.0, cos_theta=0.0)

    @classmethod
    def simplex(cls, d: int, norm: float = 1.0):
        """``N = d + 1`` unit-norm patterns at the vertices of a regular simplex."""
        return cls(d=d, N=d + 1, norm=norm, cos_theta=-1.0 / d)


@dataclass(frozen=True)
class EffectiveTemperature:
    beta: float
    beta_eff: float


def effective_beta(beta: float, spec: EquidistantSpec) -> EffectiveTemperature:
    """``beta_eff = beta * norm**2 * (1 - cos_theta)``."""
    if not (np.isfinite(beta) and beta > 0):
        raise ValueError(f"beta must be positive, got {beta!r}")
    return EffectiveTemperature(beta, beta * spec.norm**2 * (1.0 - spec.cos_theta))


def build_equidistant(spec: EquidistantSpec) -> PatternSet:
    """Realise ``spec`` as an explicit ``d x N`` matrix.

    The Gram matrix has eigenvalue ``norm**2 * (1 + (N-1) cos_theta)`` along the
    all-ones direction and ``norm**2 * (1 - cos_theta)`` on its orthogonal
    complement. Scaling an orthonormal eigenbasis by the square roots of those
    eigenvalues gives an N-row factor; rows with zero eigenvalue are dropped and
    the rest are zero-padded to d. The result is one representative of a whole
    orbit under rotations of R^d.
    """
    N, d = spec.N, spec.d
    sq = spec.norm**2
    c = spec.cos_theta
    lam_mean = max(sq * (1.0 + (N - 1) * c), 0.0)
    lam_rest = max(sq * (1.0 - c), 0.0)

    basis = np.eye(N)
    basis[:, 0] = 1.0
    Q, _ = np.linalg.qr(basis)
    Q[:, 0] = 1.0 / np.sqrt(N)  # fix sign; QR may return -1/sqrt(N)
    scale = np.full(N, np.sqrt(lam_rest))
    scale[0] = np.sqrt(lam_mean)
    factor = scale[:, None] * Q.T  # rows are coordinates, columns are patterns

    factor = factor[scale > 0]
    X = np.zeros((d, N))
    X[: factor.shape[0]] = factor
    return PatternSet(X)


@dataclass(frozen=True)
class GramMetadata:
    norms: np.ndarray
    cosines: np.ndarray
    zero_norm: tuple = ()


def gram_metadata(patterns: PatternSet, zero_tol: float = 1e-300) -> GramMetadata:
    """Column norms and pairwise cosines.

    A zero-norm column has no direction; its cosine row and column are set to 0
    (diagonal 1) and its index is listed in ``zero_norm``.
    """
    X = patterns.data
    norms = np.linalg.norm(X, axis=0)
    zero = norms <= zero_tol
    safe = np.where(zero, 1.0, norms)
    cos = (X.T @ X) / np.outer(safe, safe)
    cos[zero, :] = 0.0
    cos[:, zero] = 0.0
    np.clip(cos, -1.0, 1.0, out=cos)
    np.fill_diagonal(cos, 1.0)
    return GramMetadata(norms, cos, tuple(int(i) for i in np.flatnonzero(zero)))
