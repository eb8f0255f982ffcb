"""Critical point of the reduced dynamics.

On the symmetric line ``p = (p, q, ..., q)`` with ``q = (1 - p) / (N - 1)`` the
map is one-dimensional. New fixed points appear where that map touches the
diagonal with unit slope, which gives

    p (1 + (N-1) exp((1 - N p) / (N p (1 - p)))) = 1
    beta_c = (N - 1) / (N p (1 - p))

``p = 1/N`` always solves the first line (a double root). For N = 2 it is the
pitchfork point; for N > 2 the relevant solution is the second root in (1/N, 1).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dynamics import DEFAULT_EPS

SCAN_POINTS = 10_000
BISECT_WIDTH = 1e-13
RESIDUAL_TOL = 1e-10


class BracketError(RuntimeError):
    """No sign change of the residual was found on the scan grid."""

    def __init__(self, N, message, grid=None, values=None):
        super().__init__(f"N={N}: {message}")
        self.N = N
        self.grid = grid
        self.values = values


@dataclass(frozen=True)
class CriticalPoint:
    N: int
    p_c: float
    beta_c: float

    @property
    def residual(self) -> float:
        return critical_residual(self.p_c, self.N) if self.N > 2 else 0.0


def _check_n(N):
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N!r}")


def critical_residual(p: float, N: int) -> float:
    """``p (1 + (N-1) exp((1 - N p)/(N p (1 - p)))) - 1``."""
    _check_n(N)
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
    return p * (1.0 + (N - 1) * math.exp((1.0 - N * p) / (N * p * (1.0 - p)))) - 1.0


def _residual_array(p, N):
    return p * (1.0 + (N - 1) * np.exp((1.0 - N * p) / (N * p * (1.0 - p)))) - 1.0


def beta_from_p(p: float, N: int) -> float:
    return (N - 1) / (N * p * (1.0 - p))


def marginal_slope(p: float, beta: float, N: int) -> float:
    """Slope of the symmetric-line map at a fixed point ``p``: ``beta [p - p^2 + p(1-p)/(N-1)]``."""
    return beta * (p - p * p + p * (1.0 - p) / (N - 1))


def _bisect(f, a, b, fa, width):
    # plain bisection: invariant sign(f(a)) == sign(fa) != sign(f(b))
    while b - a > width:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def solve_critical(N: int) -> CriticalPoint:
    _check_n(N)
    N = int(N)
    if N == 2:
        return CriticalPoint(2, 0.5, beta_from_p(0.5, 2))

    grid = np.linspace(1.0 / N + 1e-9, 1.0 - 1e-9, SCAN_POINTS)
    vals = _residual_array(grid, N)
    # near the double root at 1/N the residual is O(1e-16) noise; ignore those sign flips
    floor = 1e3 * np.finfo(float).eps
    flips = np.flatnonzero(
        (np.sign(vals[:-1]) != np.sign(vals[1:]))
        & (np.maximum(np.abs(vals[:-1]), np.abs(vals[1:])) > floor)
    )
    if flips.size == 0:
        raise BracketError(N, "residual has no sign change on (1/N, 1)", grid, vals)
    k = int(flips[-1])
    p_c = _bisect(lambda x: critical_residual(x, N), grid[k], grid[k + 1], vals[k], BISECT_WIDTH)
    res = critical_residual(p_c, N)
    if abs(res) >= RESIDUAL_TOL:
        raise BracketError(N, f"bisection ended with residual {res:.3e}", grid, vals)
    return CriticalPoint(N, p_c, beta_from_p(p_c, N))


class SweepItemError(Exception):
    """A single N of a sweep failed; ``index`` is its position in the input."""

    def __init__(self, index, N, cause):
        super().__init__(f"item {index} (N={N!r}): {cause}")
        self.index = index
        self.N = N
        self.cause = cause


def critical_sweep(N_values) -> list:
    out = []
    for idx, N in enumerate(N_values):
        try:
            out.append(solve_critical(N))
        except (ValueError, BracketError) as exc:
            raise SweepItemError(idx, N, exc) from exc
    return out


def bifurcation_scan(N: int, betas, eps: float = DEFAULT_EPS, tol: float = 1e-12,
                     max_iters: int = 1_000_000, margin: float = 1e-3):
    """Brute-force detection of non-uniform fixed points.

    For each ``beta_eff`` in ``betas`` the reduced map is iterated from a
    perturbed one-hot start. Returns ``(peak, nonuniform)`` where ``peak`` is the
    largest component reached and ``nonuniform`` marks runs that settled more
    than ``margin`` above ``1/N``.
    """
    _check_n(N)
    betas = np.ascontiguousarray(np.asarray(betas, dtype=np.float64))
    peak, _ = _kernels.branch_scan(int(N), betas, float(eps), float(tol), int(max_iters))
    return peak, peak > 1.0 / N + margin


def scan_onset(N: int, betas, **kwargs) -> float:
    """Smallest ``beta_eff`` in ``betas`` where the scan finds a non-uniform fixed point."""
    betas = np.sort(np.asarray(betas, dtype=np.float64))
    _, hit = bifurcation_scan(N, betas, **kwargs)
    if not hit.any():
        return math.nan
    return float(betas[np.argmax(hit)])
