import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhn_phase.dynamics import (
    PDynamicsConfig,
    cobweb_trace,
    energy_in_p,
    find_fixed_point,
    jacobian,
    p_trajectory,
    p_update,
    perturbed_one_hot,
    uniform,
)
from mhn_phase.network import energy as full_energy
from mhn_phase.patterns import EquidistantSpec, build_equidistant

from .conftest import random_simplex


def scalar_bisect(g, lo, hi, iters=200):
    """Independent oracle: bisection for g(x) = 0 with g(lo), g(hi) of opposite sign."""
    glo = g(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def two_state_fixed_point(beta):
    """Upper fixed point of p = e^{bp} / (e^{bp} + e^{b(1-p)}) for beta > 2."""
    g = lambda p: math.exp(beta * p) / (math.exp(beta * p) + math.exp(beta * (1 - p))) - p
    return scalar_bisect(g, 0.5 + 1e-6, 1.0)


def finite_diff_jacobian(p, beta, h=1e-6):
    N = len(p)
    J = np.empty((N - 1, N - 1))
    for j in range(N - 1):
        up, dn = p.copy(), p.copy()
        up[j] += h
        up[-1] -= h
        dn[j] -= h
        dn[-1] += h
        fu = np.exp(beta * up) / np.exp(beta * up).sum()
        fd = np.exp(beta * dn) / np.exp(beta * dn).sum()
        J[:, j] = (fu[:-1] - fd[:-1]) / (2 * h)
    return J


class TestPUpdate:
    @pytest.mark.parametrize("N", [2, 3, 7, 50])
    @pytest.mark.parametrize("beta", [0.0, 0.5, 5.0, 1e4])
    def test_uniform_fixed(self, N, beta):
        u = uniform(N)
        np.testing.assert_allclose(p_update(u, beta), u, atol=1e-15, rtol=0)

    def test_high_temperature(self, rng):
        p = random_simplex(rng, 6)
        np.testing.assert_allclose(p_update(p, 1e-12), 1 / 6, atol=1e-9)

    def test_two_state_value(self):
        expected = math.exp(9) / (math.exp(9) + math.exp(1))
        out = p_update(np.array([0.9, 0.1]), 10.0)
        assert out[0] == pytest.approx(expected, abs=1e-15)
        assert out[0] == pytest.approx(0.99967, abs=1e-5)

    def test_rejects_off_simplex(self):
        with pytest.raises(ValueError):
            p_update(np.array([0.7, 0.7]), 1.0)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 9), st.floats(0.0, 50.0), st.integers(0, 2**31))
    def test_permutation_equivariance(self, N, beta, seed):
        r = np.random.default_rng(seed)
        p = random_simplex(r, N)
        perm = r.permutation(N)
        np.testing.assert_allclose(p_update(p[perm], beta), p_update(p, beta)[perm], atol=1e-15)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 9), st.floats(1e-3, 50.0), st.integers(0, 2**31))
    def test_order_preserved(self, N, beta, seed):
        p = random_simplex(np.random.default_rng(seed), N)
        q = p_update(p, beta)
        for i, j in itertools.permutations(range(N), 2):
            if p[i] > p[j] + 1e-12:
                assert q[i] >= q[j]


class TestFixedPoint:
    def test_uniform_immediate(self):
        res = find_fixed_point(uniform(5), PDynamicsConfig(5, 3.0))
        assert res.converged and res.iterations <= 1
        np.testing.assert_array_equal(res.p_star, uniform(5))

    def test_subcritical_two_state(self):
        res = find_fixed_point(np.array([0.99, 0.01]), PDynamicsConfig(2, 1.0))
        assert res.converged
        np.testing.assert_allclose(res.p_star, 0.5, atol=1e-6)
        # scan oracle: f(p) - p changes sign only at 0.5 for beta = 1
        grid = np.linspace(1e-6, 1 - 1e-6, 20001)
        g = 1 / (1 + np.exp(1.0 * (1 - 2 * grid))) - grid
        sign_changes = np.flatnonzero(np.sign(g[:-1]) != np.sign(g[1:]))
        assert len(sign_changes) == 1 and abs(grid[sign_changes[0]] - 0.5) < 1e-4

    def test_supercritical_two_state(self):
        res = find_fixed_point(np.array([0.99, 0.01]), PDynamicsConfig(2, 4.0))
        assert res.converged
        assert res.p_star[0] > 0.9
        assert res.p_star[0] == pytest.approx(two_state_fixed_point(4.0), abs=1e-10)
        assert res.spectral_radius_estimate < 1

    def test_invariant_on_convergence(self, rng):
        for _ in range(20):
            N = int(rng.integers(2, 8))
            cfg = PDynamicsConfig(N, float(rng.uniform(0.1, 20)))
            res = find_fixed_point(random_simplex(rng, N), cfg)
            assert res.converged
            assert np.max(np.abs(p_update(res.p_star, cfg.beta_eff) - res.p_star)) < cfg.tol

    def test_one_hot_limit(self):
        res = find_fixed_point(perturbed_one_hot(4, 0.1), PDynamicsConfig(4, 1e3))
        assert res.p_star.max() > 1 - 1e-6

    def test_config_validation(self):
        with pytest.raises(ValueError):
            PDynamicsConfig(1, 1.0)
        with pytest.raises(ValueError):
            PDynamicsConfig(3, 1.0, tol=0.0)
        with pytest.raises(ValueError):
            find_fixed_point(uniform(3), PDynamicsConfig(4, 1.0))


class TestJacobian:
    def test_marginal_at_two(self):
        J = jacobian(uniform(2), 2.0)
        assert J.shape == (1, 1)
        assert J[0, 0] == pytest.approx(1.0, abs=1e-9)
        # slope expression beta [p - p^2 + p(1-p)/(N-1)] at p = 1/2
        assert 2 * (0.5 - 0.25 + 0.25) == 1.0

    def test_zero_beta(self, rng):
        np.testing.assert_array_equal(jacobian(random_simplex(rng, 5), 0.0), np.zeros((4, 4)))

    def test_finite_difference_n5(self):
        p = random_simplex(np.random.default_rng(5), 5)
        np.testing.assert_allclose(jacobian(p, 3.0), finite_diff_jacobian(p, 3.0), atol=1e-5)

    def test_uniform_eigenvalue(self):
        # at the uniform point every eigenvalue of the reduced Jacobian equals beta / N
        for N in (3, 6):
            ev = np.linalg.eigvals(jacobian(uniform(N), 2.4))
            np.testing.assert_allclose(ev, 2.4 / N, atol=1e-12)


class TestEnergyInP:
    def grid_energy(self, beta, cos_theta=0.0):
        g = np.linspace(0, 1, 1001)
        return g, np.array([energy_in_p(np.array([x, 1 - x]), beta, cos_theta) for x in g])

    def test_subcritical_single_well(self):
        assert energy_in_p(np.array([0.5, 0.5]), 1.0, 0.0) < energy_in_p(np.array([0.9, 0.1]), 1.0, 0.0)
        g, e = self.grid_energy(1.0)
        assert abs(g[np.argmin(e)] - 0.5) < 1e-9

    def test_supercritical_double_well(self):
        g, e = self.grid_energy(6.0)
        assert energy_in_p(np.array([0.5, 0.5]), 6.0, 0.0) > e.min()

    def test_permutation_symmetry(self, rng):
        p = random_simplex(rng, 6)
        for _ in range(5):
            perm = rng.permutation(6)
            assert energy_in_p(p[perm], 2.3, 0.1) == pytest.approx(energy_in_p(p, 2.3, 0.1), abs=1e-14)

    def test_matches_full_energy(self, rng):
        spec = EquidistantSpec(d=6, N=5, norm=1.0, cos_theta=0.25)
        P = build_equidistant(spec)
        for _ in range(10):
            p = random_simplex(rng, 5)
            assert energy_in_p(p, 1.7, 0.25) == pytest.approx(full_energy(P.data @ p, P, 1.7), abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 7), st.floats(-0.15, 0.9), st.floats(0.1, 20.0), st.integers(0, 2**31))
    def test_non_increasing_along_iteration(self, N, cos_theta, beta, seed):
        cos_theta = max(cos_theta, -1.0 / (N - 1))
        beta_eff = beta * (1 - cos_theta)
        traj = p_trajectory(random_simplex(np.random.default_rng(seed), N), beta_eff, 60)
        energies = [energy_in_p(p, beta, cos_theta) for p in traj]
        assert np.all(np.diff(energies) <= 1e-8)


class TestCobweb:
    def test_subcritical_monotone_to_half(self):
        for p0 in (0.05, 0.3, 0.8, 0.99):
            orbit = cobweb_trace(p0, 1.5, 200).orbit_points()
            dist = np.abs(orbit - 0.5)
            assert np.all(np.diff(dist) <= 1e-15)
            assert dist[-1] < 1e-6

    def test_fixed_orbit(self):
        orbit = cobweb_trace(0.5, 7.0, 20).orbit_points()
        assert np.all(orbit == 0.5)

    def test_supercritical_upper_branch(self):
        tr = cobweb_trace(0.6, 8.0, 60)
        orbit = tr.orbit_points()
        assert np.all(np.diff(orbit) >= 0)
        target = two_state_fixed_point(8.0)
        assert target > 0.9
        assert orbit[-1] == pytest.approx(target, abs=1e-10)
        assert tr.graph.shape == (1001, 2)
