"""Hot numeric loops, compiled with numba when available.

Every kernel is written once as plain numpy code. When numba is importable and
``MHN_PHASE_NUMBA`` is not set to ``0``, the module-level names are bound to
``njit``-compiled versions; otherwise the pure-numpy functions are used as-is.
The uncompiled versions stay reachable as ``py_<name>`` so the two paths can be
compared side by side (see ``benchmarks/bench_kernels.py``).
"""

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("MHN_PHASE_NUMBA", "1").strip().lower() not in (
    "0",
    "false",
    "no",
    "off",
)


def py_softmax(z):
    m = np.max(z)
    e = np.exp(z - m)
    return e / np.sum(e)


def py_logsumexp(z):
    m = np.max(z)
    return m + np.log(np.sum(np.exp(z - m)))


def py_p_fixed_point(p0, beta_eff, tol, max_iters):
    """Iterate p -> softmax(beta_eff * p).

    Returns ``(p, iterations, converged)``. On convergence ``p`` is the iterate
    whose image moved less than ``tol`` in sup-norm.
    """
    p = p0.copy()
    for it in range(1, max_iters + 1):
        z = beta_eff * p
        m = np.max(z)
        e = np.exp(z - m)
        q = e / np.sum(e)
        step = np.max(np.abs(q - p))
        if step < tol:
            return p, it, True
        p = q
    return p, max_iters, False


def py_p_trajectory(p0, beta_eff, steps):
    out = np.empty((steps + 1, p0.shape[0]))
    out[0] = p0
    p = p0.copy()
    for t in range(steps):
        z = beta_eff * p
        m = np.max(z)
        e = np.exp(z - m)
        p = e / np.sum(e)
        out[t + 1] = p
    return out


def py_xi_fixed_point(X, XT, xi0, beta, tol, max_iters):
    """Iterate xi -> X softmax(beta X^T xi) until the L2 step drops below tol.

    ``XT`` is a C-contiguous copy of ``X.T``. Returns ``(xi, iterations, converged)``.
    """
    xi = xi0.copy()
    for it in range(1, max_iters + 1):
        z = beta * np.dot(XT, xi)
        m = np.max(z)
        e = np.exp(z - m)
        p = e / np.sum(e)
        new = np.dot(X, p)
        step = np.sqrt(np.sum((new - xi) ** 2))
        xi = new
        if step < tol:
            return xi, it, True
    return xi, max_iters, False


def py_branch_scan(n, betas, eps, tol, max_iters):
    """Largest fixed-point component reached from a perturbed one-hot start, per beta.

    The start is ``(1 - eps) e_1 + eps / n``. Entries for non-converged runs are
    still the last iterate; the matching flag in the second output is 0.
    """
    # numpy version iterates every beta at once; rows drop out as they converge
    nb = betas.shape[0]
    peak = np.empty(nb)
    ok = np.zeros(nb, dtype=np.int64)
    P = np.full((nb, n), eps / n)
    P[:, 0] += 1.0 - eps
    idx = np.arange(nb)
    b = np.asarray(betas, dtype=np.float64)[:, None]
    for _ in range(max_iters):
        z = b * P
        e = np.exp(z - z.max(axis=1, keepdims=True))
        Q = e / e.sum(axis=1, keepdims=True)
        done = np.abs(Q - P).max(axis=1) < tol
        if done.any():
            peak[idx[done]] = P[done].max(axis=1)
            ok[idx[done]] = 1
            keep = ~done
            idx, b, Q = idx[keep], b[keep], Q[keep]
            if idx.size == 0:
                return peak, ok
        P = Q
    peak[idx] = P.max(axis=1)
    return peak, ok


softmax = py_softmax
logsumexp = py_logsumexp
p_fixed_point = py_p_fixed_point
p_trajectory = py_p_trajectory
xi_fixed_point = py_xi_fixed_point
branch_scan = py_branch_scan

if USE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    softmax = _jit(py_softmax)
    logsumexp = _jit(py_logsumexp)
    p_fixed_point = _jit(py_p_fixed_point)
    p_trajectory = _jit(py_p_trajectory)
    xi_fixed_point = _jit(py_xi_fixed_point)

    @numba.njit(cache=True, nogil=True)
    def branch_scan(n, betas, eps, tol, max_iters):  # noqa: F811
        nb = betas.shape[0]
        peak = np.empty(nb)
        ok = np.zeros(nb, dtype=np.int64)
        p0 = np.full(n, eps / n)
        p0[0] += 1.0 - eps
        for k in range(nb):
            p, _, conv = p_fixed_point(p0, betas[k], tol, max_iters)
            peak[k] = np.max(p)
            if conv:
                ok[k] = 1
        return peak, ok


def backend():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"
