import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhn_phase.dynamics import p_trajectory
from mhn_phase.network import PatternSet, iterate_to_fixed_point, softmax_probabilities
from mhn_phase.patterns import (
    EquidistantSpec,
    InfeasibleSpecError,
    build_equidistant,
    effective_beta,
    gram_metadata,
)


@st.composite
def feasible_specs(draw, max_n=8):
    N = draw(st.integers(2, max_n))
    lower = -1.0 / (N - 1)
    simplex = draw(st.booleans())
    if simplex:
        c = lower
        d = draw(st.integers(N - 1, N + 3))
    else:
        c = draw(st.floats(lower + 1e-3, 0.95))
        d = draw(st.integers(N, N + 4))
    norm = draw(st.floats(0.2, 3.0))
    return EquidistantSpec(d=d, N=N, norm=norm, cos_theta=c)


class TestBuild:
    def test_antipodal(self):
        X = build_equidistant(EquidistantSpec(d=1, N=2, norm=1.0, cos_theta=-1.0)).data
        assert X.shape == (1, 2)
        assert X[0, 0] * X[0, 1] == pytest.approx(-1.0, abs=1e-12)
        assert abs(X[0, 0]) == pytest.approx(1.0, abs=1e-12)

    def test_triangle(self):
        X = build_equidistant(EquidistantSpec(d=2, N=3, norm=1.0, cos_theta=-0.5)).data
        G = X.T @ X
        np.testing.assert_allclose(np.diag(G), 1.0, atol=1e-10)
        np.testing.assert_allclose(G[~np.eye(3, dtype=bool)], -0.5, atol=1e-10)

    def test_gram_n10(self):
        X = build_equidistant(EquidistantSpec(d=20, N=10, norm=2.0, cos_theta=0.3)).data
        G = X.T @ X
        np.testing.assert_allclose(np.diag(G), 4.0, atol=1e-10)
        np.testing.assert_allclose(G[~np.eye(10, dtype=bool)], 1.2, atol=1e-10)

    @settings(max_examples=100, deadline=None)
    @given(feasible_specs(max_n=12))
    def test_gram_matches_target(self, spec):
        X = build_equidistant(spec).data
        assert X.shape == (spec.d, spec.N)
        np.testing.assert_allclose(X.T @ X, spec.gram(), atol=1e-10)

    @pytest.mark.parametrize(
        "kw",
        [
            dict(d=2, N=4, cos_theta=-1 / 3),  # N > d + 1
            dict(d=5, N=3, cos_theta=-0.6),  # below -1/(N-1)
            dict(d=3, N=4, cos_theta=0.0),  # rank 4 > d
            dict(d=3, N=2, cos_theta=1.5),
            dict(d=3, N=2, norm=0.0),
            dict(d=0, N=1),
        ],
    )
    def test_infeasible(self, kw):
        with pytest.raises(InfeasibleSpecError):
            EquidistantSpec(**kw)

    def test_simplex_helper(self):
        spec = EquidistantSpec.simplex(5)
        assert spec.N == 6 and spec.cos_theta == pytest.approx(-0.2)
        np.testing.assert_allclose(build_equidistant(spec).data.T @ build_equidistant(spec).data, spec.gram(), atol=1e-12)


class TestEffectiveBeta:
    def test_orthonormal_identity(self):
        assert effective_beta(7.0, EquidistantSpec.orthonormal(4)).beta_eff == 7.0

    def test_formula(self):
        spec = EquidistantSpec(d=5, N=3, norm=np.sqrt(3.0), cos_theta=0.5)
        assert effective_beta(2.0, spec).beta_eff == pytest.approx(3.0, rel=1e-15)

    def test_similar_patterns(self):
        spec = EquidistantSpec(d=5, N=3, norm=1.0, cos_theta=0.999)
        assert effective_beta(1000.0, spec).beta_eff == pytest.approx(1.0, rel=1e-12)

    def test_rejects_nonpositive_beta(self):
        with pytest.raises(ValueError):
            effective_beta(0.0, EquidistantSpec.orthonormal(2))


class TestGramMetadata:
    def test_equidistant(self):
        spec = EquidistantSpec(d=9, N=7, norm=1.7, cos_theta=0.2)
        meta = gram_metadata(build_equidistant(spec))
        np.testing.assert_allclose(meta.norms, 1.7, atol=1e-10)
        np.testing.assert_allclose(meta.cosines[~np.eye(7, dtype=bool)], 0.2, atol=1e-10)
        np.testing.assert_allclose(np.diag(meta.cosines), 1.0, atol=1e-12)

    def test_identity(self):
        meta = gram_metadata(PatternSet(np.eye(3)))
        np.testing.assert_array_equal(meta.cosines, np.eye(3))

    def test_zero_column_flagged(self):
        X = np.array([[1.0, 0.0, 2.0], [0.0, 0.0, 1.0]])
        meta = gram_metadata(PatternSet(X))
        assert meta.zero_norm == (1,)
        assert np.all(np.isfinite(meta.cosines))
        assert meta.cosines[1, 1] == 1.0 and meta.cosines[0, 1] == 0.0

    def test_mnist_ranges(self, mnist_file):
        from mhn_phase.mnist import select_patterns

        meta = gram_metadata(select_patterns(mnist_file, 25, seed=7))
        assert np.all(np.isfinite(meta.norms)) and np.all(np.isfinite(meta.cosines))
        assert meta.cosines.min() >= -1.0 and meta.cosines.max() <= 1.0

    @settings(max_examples=60, deadline=None)
    @given(feasible_specs())
    def test_round_trip(self, spec):
        meta = gram_metadata(build_equidistant(spec))
        np.testing.assert_allclose(meta.norms, spec.norm, atol=1e-9)
        off = meta.cosines[~np.eye(spec.N, dtype=bool)]
        np.testing.assert_allclose(off, spec.cos_theta, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(feasible_specs(), st.floats(0.05, 15.0), st.integers(0, 2**31))
def test_reduction_equivalence(spec, beta_eff, seed):
    """Full network p-trajectory equals the iterated softmax at beta_eff."""
    r = np.random.default_rng(seed)
    P = build_equidistant(spec)
    beta = beta_eff / (spec.norm**2 * (1 - spec.cos_theta))
    xi0 = P.data @ r.normal(size=spec.N)  # in the span of X
    rec = iterate_to_fixed_point(xi0, P, beta, tol=1e-300, max_iters=30)
    full = np.array(rec.p_history)
    reduced = p_trajectory(softmax_probabilities(xi0, P, beta), beta_eff, full.shape[0] - 1)
    np.testing.assert_allclose(full, reduced, atol=1e-9, rtol=0)
