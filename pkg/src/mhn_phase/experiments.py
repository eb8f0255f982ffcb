"""Experiment drivers: order-parameter sweeps, minima census, appendix tables."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from . import network
from .critical import solve_critical
from .dynamics import (
    DEFAULT_EPS,
    DEFAULT_MAX_ITERS,
    DEFAULT_TOL,
    PDynamicsConfig,
    energy_in_p,
    find_fixed_point,
    perturbed_one_hot,
)
from .network import PatternSet
from .patterns import EquidistantSpec, effective_beta

KL = "kl_divergence"
MINIMA = "minima_count"


@dataclass(frozen=True)
class SweepRecord:
    beta: float
    beta_eff: float | None  # None for free patterns, where no effective temperature is defined
    value: float
    converged: bool = True
    beta_over_beta_c: float | None = None
    excluded: int = 0


@dataclass
class SweepResult:
    records: list
    kind: str
    metadata: dict = field(default_factory=dict)
    normalization_constant: float = 1.0
    normalize_by_beta_c: bool = False

    @property
    def betas(self) -> np.ndarray:
        return np.array([r.beta for r in self.records])

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.records])

    def abscissa(self) -> np.ndarray:
        """beta, or beta_eff / beta_c when the sweep was normalised."""
        if self.normalize_by_beta_c:
            return np.array([r.beta_over_beta_c for r in self.records])
        return self.betas


def kl_to_uniform(p, normalization_constant: float = None) -> float:
    """KL divergence of ``p`` from the uniform distribution, divided by a constant.

    The default constant is ``log(N)``, the divergence of a one-hot vector, so
    the result lies in [0, 1].
    """
    p = np.asarray(p, dtype=np.float64)
    N = p.shape[0]
    if normalization_constant is None:
        normalization_constant = math.log(N) if N > 1 else 1.0
    if not normalization_constant > 0:
        raise ValueError("normalization_constant must be positive")
    nz = p[p > 0]
    kl = float(np.sum(nz * np.log(N * nz)))
    return max(kl, 0.0) / normalization_constant


def order_parameter_sweep(
    spec: EquidistantSpec,
    betas,
    normalize_by_beta_c: bool = False,
    *,
    eps: float = DEFAULT_EPS,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
    normalization_constant: float = None,
) -> SweepResult:
    """Normalised KL of the fixed point reached from a near one-hot start, per beta."""
    betas = sorted(float(b) for b in betas)
    if not betas:
        raise ValueError("betas must not be empty")
    N = spec.N
    beta_c = solve_critical(N).beta_c
    const = math.log(N) if normalization_constant is None else float(normalization_constant)
    p0 = perturbed_one_hot(N, eps)
    records = []
    for beta in betas:
        be = effective_beta(beta, spec).beta_eff
        res = find_fixed_point(p0, PDynamicsConfig(N, be, tol, max_iters))
        records.append(
            SweepRecord(beta, be, kl_to_uniform(res.p_star, const), res.converged, be / beta_c)
        )
    meta = {
        "d": spec.d,
        "N": N,
        "norm": spec.norm,
        "cos_theta": spec.cos_theta,
        "beta_c": beta_c,
        "eps": eps,
        "kl_normalization": "log(N)" if normalization_constant is None else "custom",
        "log_N": math.log(N),
        "log_d": math.log(spec.d) if spec.d > 1 else None,
    }
    return SweepResult(records, KL, meta, const, normalize_by_beta_c)


def transition_index(result: SweepResult, threshold: float = 1e-6):
    """Index of the first record above ``threshold`` for kl sweeps, or the first
    record from which the minima count stays above one for minima sweeps.
    ``None`` if the sweep never transitions."""
    vals = result.values
    if result.kind == KL:
        hits = np.flatnonzero(vals > threshold)
        return int(hits[0]) if hits.size else None
    above = vals > 1
    if not above[-1]:
        return None
    k = len(vals) - 1
    while k > 0 and above[k - 1]:
        k -= 1
    return k


@dataclass
class MinimaCensus:
    minima: list  # representative endpoint per cluster
    counts: list  # basin sizes, same order as minima
    beta: float
    excluded: int = 0
    threshold: float = 0.0

    @property
    def n_minima(self) -> int:
        return len(self.minima)


def default_noise_sigma(patterns: PatternSet) -> float:
    """``0.1 * mean pattern norm / sqrt(d)``: noise norm about a tenth of a pattern."""
    return 0.1 * float(np.linalg.norm(patterns.data, axis=0).mean()) / math.sqrt(patterns.d)


def _trial_rng(seed, i, t):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(i, t))))


def noisy_starts(patterns: PatternSet, noise_sigma: float, trials_per_pattern: int, seed: int) -> np.ndarray:
    """Start states, row ``i * trials_per_pattern + t`` for pattern ``i`` and trial ``t``."""
    n, d = patterns.N, patterns.d
    out = np.empty((n * trials_per_pattern, d))
    for i in range(n):
        x = patterns.data[:, i]
        for t in range(trials_per_pattern):
            noise = _trial_rng(seed, i, t).standard_normal(d) if noise_sigma > 0 else 0.0
            out[i * trials_per_pattern + t] = x + noise_sigma * noise
    return out


def cluster_endpoints(points: np.ndarray, threshold: float):
    """Single-linkage clusters; returns ``(labels, order)`` with labels numbered by first appearance."""
    if len(points) == 1:
        return np.zeros(1, dtype=int), [0]
    raw = fcluster(linkage(points, method="single"), t=threshold, criterion="distance")
    relabel = {}
    labels = np.empty(len(raw), dtype=int)
    for k, lab in enumerate(raw):
        labels[k] = relabel.setdefault(lab, len(relabel))
    return labels, sorted(relabel.values())


def count_minima(
    patterns: PatternSet,
    beta: float,
    noise_sigma: float = None,
    trials_per_pattern: int = 1,
    seed: int = 0,
    distinct_tol: float = 1e-3,
    *,
    tol: float = network.DEFAULT_TOL,
    max_iters: int = network.DEFAULT_MAX_ITERS,
    workers: int = 1,
) -> MinimaCensus:
    """Run the network from noisy copies of every stored pattern and cluster the endpoints.

    Endpoints closer than ``distinct_tol * sqrt(d)`` (single linkage) are the
    same minimum. Runs that hit ``max_iters`` are excluded and counted.
    """
    if trials_per_pattern < 1:
        raise ValueError("trials_per_pattern must be >= 1")
    if noise_sigma is None:
        noise_sigma = default_noise_sigma(patterns)
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    starts = noisy_starts(patterns, noise_sigma, trials_per_pattern, seed)

    def run(x0):
        return network.converge(x0, patterns, beta, tol, max_iters)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(x0) for x0 in starts]

    ends = np.array([xi for xi, _, ok in results if ok])
    excluded = len(results) - len(ends)
    threshold = distinct_tol * math.sqrt(patterns.d)
    if len(ends) == 0:
        return MinimaCensus([], [], beta, excluded, threshold)
    labels, order = cluster_endpoints(ends, threshold)
    minima = [ends[np.argmax(labels == lab)].copy() for lab in order]
    counts = [int(np.sum(labels == lab)) for lab in order]
    return MinimaCensus(minima, counts, beta, excluded, threshold)


def minima_count_sweep(
    patterns: PatternSet,
    betas,
    noise_sigma: float = None,
    trials_per_pattern: int = 1,
    seed: int = 0,
    distinct_tol: float = 1e-3,
    **kwargs,
) -> SweepResult:
    betas = sorted(float(b) for b in betas)
    if not betas:
        raise ValueError("betas must not be empty")
    sigma = default_noise_sigma(patterns) if noise_sigma is None else noise_sigma
    records = []
    for beta in betas:
        census = count_minima(patterns, beta, sigma, trials_per_pattern, seed, distinct_tol, **kwargs)
        records.append(
            SweepRecord(beta, None, float(census.n_minima), census.excluded == 0, excluded=census.excluded)
        )
    meta = {
        "d": patterns.d,
        "N": patterns.N,
        "noise_sigma": sigma,
        "trials_per_pattern": trials_per_pattern,
        "seed": seed,
        "distinct_tol": distinct_tol,
    }
    return SweepResult(records, MINIMA, meta)


@dataclass(frozen=True)
class AppendixBlock:
    beta: float
    p: np.ndarray
    f_of_p: np.ndarray
    energy: np.ndarray
    orbit: np.ndarray  # successive iterates of the map from p0


def symmetric_line_map(p, beta_eff: float, N: int = 2):
    """Map restricted to ``(p, q, ..., q)``, ``q = (1 - p)/(N - 1)``; the N=2 cobweb map."""
    p = np.asarray(p, dtype=np.float64)
    q = (1.0 - p) / (N - 1)
    # 1 / (1 + (N-1) exp(beta (q - p))), written to avoid overflow
    return 1.0 / (1.0 + (N - 1) * np.exp(beta_eff * (q - p)))


def appendix_figures_data(
    beta_values,
    N: int = 2,
    *,
    cos_theta: float = 0.0,
    p0: float = 0.6,
    steps: int = 40,
    grid_step: float = 1e-3,
) -> list:
    """Cobweb and energy tables along the symmetric line for each beta.

    Patterns are unit-norm with pairwise cosine ``cos_theta``; the map uses
    ``beta_eff = beta * (1 - cos_theta)``.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    grid = np.linspace(0.0, 1.0, int(round(1.0 / grid_step)) + 1)
    rest = (1.0 - grid) / (N - 1)
    blocks = []
    for beta in beta_values:
        beta = float(beta)
        be = beta * (1.0 - cos_theta)
        f = symmetric_line_map(grid, be, N)
        energy = np.array(
            [energy_in_p(np.concatenate(([g], np.full(N - 1, r))), beta, cos_theta) for g, r in zip(grid, rest)]
        )
        orbit = [float(p0)]
        for _ in range(steps):
            orbit.append(float(symmetric_line_map(orbit[-1], be, N)))
        blocks.append(AppendixBlock(beta, grid, f, energy, np.array(orbit)))
    return blocks


def local_minima(values) -> list:
    """Indices of strict local minima of a sampled curve, endpoints included.

    An endpoint counts when it is below its only neighbour: at large beta the
    true minima sit closer to p = 0 and p = 1 than one grid step.
    """
    v = np.asarray(values)
    n = len(v)
    if n < 2:
        return list(range(n))
    out = [0] if v[0] < v[1] else []
    out += [i for i in range(1, n - 1) if v[i] < v[i - 1] and v[i] < v[i + 1]]
    if v[-1] < v[-2]:
        out.append(n - 1)
    return out
