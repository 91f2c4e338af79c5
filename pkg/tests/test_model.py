import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_f1, confidence_formula, sigmoid
from vsc.data import Dataset
from vsc.errors import ClassMissingError, DegeneracyError, ParameterError, ShapeError
from vsc.model import (
    ELM,
    KNN,
    Hyperplane,
    Pair,
    PairMode,
    VscConfig,
    VscModel,
    confidence,
    decision_value,
    feature_map,
    fit_elm,
    fit_knn,
    fit_vsc,
    make_hyperplane,
    predict_vsc,
    sample_pairs,
    sample_pairs_uniform,
)

EPS = 0.01


def _ds(x, y):
    return Dataset(x=np.asarray(x, dtype=float), y=y)


# -- pair sampling -----------------------------------------------------------


class TestSamplePairs:
    def test_single_pair_forced(self):
        ds = _ds([[1.0, 2.0], [3.0, 4.0]], [1, -1])
        pairs = sample_pairs(ds, 3, np.random.default_rng(0))
        assert len(pairs) == 3
        for p in pairs:
            np.testing.assert_array_equal(p.x_plus, [1.0, 2.0])
            np.testing.assert_array_equal(p.x_minus, [3.0, 4.0])

    def test_missing_class(self):
        ds = _ds([[0.0], [1.0]], [1, 1])
        with pytest.raises(ClassMissingError):
            sample_pairs(ds, 5, np.random.default_rng(0))

    def test_replay(self, rng):
        x = rng.normal(size=(100, 3))
        ds = _ds(x, [1] * 50 + [-1] * 50)
        a = sample_pairs(ds, 100, np.random.default_rng(9))
        b = sample_pairs(ds, 100, np.random.default_rng(9))
        for p, q in zip(a, b):
            assert np.array_equal(p.x_plus, q.x_plus) and np.array_equal(p.x_minus, q.x_minus)

    def test_labels_respected(self, rng):
        x = rng.normal(size=(40, 2))
        y = np.where(x[:, 0] > 0, 1, -1)
        for p in sample_pairs(_ds(x, y), 50, rng):
            assert p.x_plus[0] > 0 >= p.x_minus[0]

    def test_different_seeds_differ(self, rng):
        x = rng.normal(size=(20, 2))
        ds = _ds(x, [1] * 10 + [-1] * 10)
        a = sample_pairs(ds, 30, np.random.default_rng(1))
        b = sample_pairs(ds, 30, np.random.default_rng(2))
        assert any(not np.array_equal(p.x_plus, q.x_plus) for p, q in zip(a, b))

    def test_all_coincident_is_degenerate(self):
        ds = _ds([[1.0, 1.0], [1.0, 1.0]], [1, -1])
        with pytest.raises(DegeneracyError):
            sample_pairs(ds, 1, np.random.default_rng(0))

    def test_duplicates_are_resampled(self):
        # one positive coincides with the only negative; the other does not
        ds = _ds([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]], [1, 1, -1])
        for p in sample_pairs(ds, 40, np.random.default_rng(0)):
            np.testing.assert_array_equal(p.x_plus, [1.0, 0.0])


class TestSamplePairsUniform:
    def test_zero_volume_box(self):
        with pytest.raises(DegeneracyError):
            sample_pairs_uniform([(0, 0), (0, 0)], 3, np.random.default_rng(0))

    def test_inside_unit_square(self):
        pairs = sample_pairs_uniform([(0, 1), (0, 1)], 10, np.random.default_rng(0))
        pts = np.array([p.x_plus for p in pairs] + [p.x_minus for p in pairs])
        assert pts.shape == (20, 2)
        assert np.all((pts >= 0) & (pts <= 1))

    def test_replay(self):
        a = sample_pairs_uniform([(-1, 2), (3, 5)], 8, np.random.default_rng(4))
        b = sample_pairs_uniform([(-1, 2), (3, 5)], 8, np.random.default_rng(4))
        assert all(np.array_equal(p.x_plus, q.x_plus) for p, q in zip(a, b))

    def test_bad_range(self):
        with pytest.raises(ParameterError):
            sample_pairs_uniform([(1, 0)], 1, np.random.default_rng(0))


# -- geometry ----------------------------------------------------------------


class TestMakeHyperplane:
    def test_symmetric_pair(self):
        h = make_hyperplane(Pair([1.0, 0.0], [-1.0, 0.0]))
        np.testing.assert_array_equal(h.normal, [1.0, 0.0])
        assert h.bias == 0.0 and h.half_dist == 1.0

    def test_offset_pair(self):
        h = make_hyperplane(Pair([3.0, 1.0], [1.0, 1.0]))
        np.testing.assert_array_equal(h.normal, [1.0, 0.0])
        np.testing.assert_array_equal(h.center, [2.0, 1.0])
        assert h.bias == 2.0 and h.half_dist == 1.0

    def test_figure_one_pair(self):
        h = make_hyperplane(Pair([5.0, 0.0], [-5.0, 0.0]))
        assert h.half_dist == 5.0
        np.testing.assert_array_equal(h.center, [0.0, 0.0])

    def test_degenerate(self):
        with pytest.raises(DegeneracyError):
            make_hyperplane(Pair([1.0, 1.0], [1.0, 1.0]))

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            Pair([1.0, 2.0], [1.0])


class TestConfidence:
    def test_centre_exactly_half(self, backend):
        h = make_hyperplane(Pair([0.3, -1.7, 2.2], [1.1, 0.4, -0.9]))
        assert confidence(h, h.center, EPS) == 0.5

    def test_at_positive_endpoint(self, backend):
        h = make_hyperplane(Pair([1.0, 0.0], [-1.0, 0.0]))
        expected = sigmoid(100 + 1 / 4.01 - 2 / 1.01)
        assert confidence(h, [1.0, 0.0], EPS) == pytest.approx(expected, abs=1e-12)
        assert abs(confidence(h, [1.0, 0.0], EPS) - 1.0) < 1e-10

    def test_far_point(self, backend):
        # equidistant (100) from both endpoints (+-1, 0)
        h = make_hyperplane(Pair([1.0, 0.0], [-1.0, 0.0]))
        x = [0.0, math.sqrt(100**2 - 1)]
        expected = sigmoid(2 / (10000 + EPS) - 2 / 1.01)
        assert confidence(h, x, EPS) == pytest.approx(expected, rel=1e-12)
        assert confidence(h, x, EPS) == pytest.approx(0.1213, abs=5e-4)

    def test_matches_formula(self, backend, rng):
        for _ in range(50):
            xp, xm, x = rng.normal(size=(3, 4))
            h = make_hyperplane(Pair(xp, xm))
            assert confidence(h, x, EPS) == pytest.approx(
                confidence_formula(xp, xm, x, EPS), rel=1e-12
            )

    def test_rows(self, backend):
        h = make_hyperplane(Pair([1.0, 0.0], [-1.0, 0.0]))
        c = confidence(h, [[0.0, 0.0], [1.0, 0.0]], EPS)
        assert c.shape == (2,) and c[0] == 0.5


class TestFeatureMap:
    def setup_method(self):
        self.h = make_hyperplane(Pair([1.0, 0.0], [-1.0, 0.0]))

    def test_bias_component(self, backend):
        f = feature_map([self.h], [0.3, 0.2], VscConfig(k=1))
        assert f.shape == (2,) and f[0] == 1.0

    def test_centre_zero(self, backend):
        assert feature_map([self.h], [0.0, 0.0], VscConfig(k=1))[1] == 0.0

    def test_positive_endpoint(self, backend):
        f = feature_map([self.h], [1.0, 0.0], VscConfig(k=1))[1]
        assert f == pytest.approx(math.tanh(1.0), abs=1e-12)
        assert f == pytest.approx(0.7616, abs=1e-4)

    def test_confidence_disabled(self, backend):
        f = feature_map([self.h], [1.0, 0.0], VscConfig(k=1, confidence_enabled=False))[1]
        assert f == math.tanh(1.0)

    def test_ablation_differs_only_by_confidence(self, backend, rng):
        hs = [make_hyperplane(Pair(*rng.normal(size=(2, 3)))) for _ in range(5)]
        X = rng.normal(size=(20, 3))
        full = feature_map(hs, X, VscConfig(k=5))
        bare = feature_map(hs, X, VscConfig(k=5, confidence_enabled=False))
        conf = np.column_stack([confidence(h, X, EPS) for h in hs])
        np.testing.assert_allclose(full[:, 1:], bare[:, 1:] * conf, rtol=1e-12, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            feature_map([self.h], [1.0, 2.0, 3.0], VscConfig(k=1))


def _offset_confidence(d, delta, eps=EPS):
    """C at x+ + delta * u, u pointing away from x-, for a pair of half-width d."""
    h = make_hyperplane(Pair([d, 0.0], [-d, 0.0]))
    return confidence(h, [d + delta, 0.0], eps)


class TestGeometryProperties:
    @settings(max_examples=300, deadline=None)
    @given(st.integers(1, 10), st.integers(0, 2**32 - 1))
    def test_endpoint_signed_values(self, n, seed):
        r = np.random.default_rng(seed)
        xp, xm = r.uniform(-5, 5, size=(2, n))
        h = make_hyperplane(Pair(xp, xm))
        assert abs(np.linalg.norm(h.normal) - 1.0) <= 1e-10
        assert h.signed_value(xp) == pytest.approx(h.half_dist, abs=1e-10)
        assert h.signed_value(xm) == pytest.approx(-h.half_dist, abs=1e-10)
        assert h.bias == float(h.normal @ h.center)

    @settings(max_examples=300, deadline=None)
    @given(st.integers(1, 10), st.integers(0, 2**32 - 1))
    def test_confidence_range_and_peaks(self, n, seed):
        r = np.random.default_rng(seed)
        xp, xm, x = r.uniform(-3, 3, size=(3, n))
        h = make_hyperplane(Pair(xp, xm))
        c = confidence(h, x, EPS)
        # the upper end saturates to 1.0 in float64 right at an endpoint
        assert 0.0 < c <= 1.0
        mid = confidence(h, h.center, EPS)
        assert mid == 0.5
        if h.half_dist**2 > EPS:
            assert confidence(h, xp, EPS) >= mid
            assert confidence(h, xm, EPS) >= mid

    @pytest.mark.parametrize("delta", [0.05, 0.3, 1.0, 2.5, 5.0])
    def test_confidence_grows_with_half_width(self, delta):
        ds = np.linspace(1.0, 10.0, 181)
        vals = [_offset_confidence(d, delta) for d in ds]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 10), st.integers(0, 2**32 - 1))
    def test_features_bounded(self, n, seed):
        r = np.random.default_rng(seed)
        hs = [make_hyperplane(Pair(*r.uniform(-3, 3, size=(2, n)))) for _ in range(4)]
        X = r.uniform(-3, 3, size=(10, n))
        for cfg in (VscConfig(k=4), VscConfig(k=4, confidence_enabled=False)):
            F = feature_map(hs, X, cfg)
            assert np.all(np.abs(F[:, 1:]) < 1.0)


# -- VSC fit / predict -------------------------------------------------------


class TestFitVsc:
    def test_defaults(self):
        cfg = VscConfig()
        assert (cfg.k, cfg.lam, cfg.epsilon) == (100, 1.0, 0.01)
        assert cfg.confidence_enabled and cfg.pair_mode is PairMode.FROM_DATA

    @pytest.mark.parametrize("bad", [{"k": 0}, {"lam": 0.0}, {"epsilon": -1.0}, {"seed": -1}])
    def test_config_validation(self, bad):
        with pytest.raises(ParameterError):
            VscConfig(**bad)

    def test_separable_blobs(self, backend, blobs):
        m = fit_vsc(blobs, VscConfig(k=10, lam=1.0, seed=1))
        assert brute_f1(blobs.y, m.predict(blobs.x)) >= 0.95
        assert m.weights.shape == (11,) and len(m.hyperplanes) == 10

    def test_held_out_blobs(self, blobs):
        m = fit_vsc(blobs, VscConfig(k=10, seed=2))
        r = np.random.default_rng(77)
        xt = np.vstack([r.normal(2.0, 0.5, (50, 2)), r.normal(-2.0, 0.5, (50, 2))])
        yt = np.array([1] * 50 + [-1] * 50)
        assert np.mean(m.predict(xt) == yt) >= 0.95

    def test_bitwise_determinism(self, backend, twonorm_small):
        cfg = VscConfig(k=30, seed=5)
        a, b = fit_vsc(twonorm_small, cfg), fit_vsc(twonorm_small, cfg)
        assert a.weights.tobytes() == b.weights.tobytes()

    def test_uniform_variant(self, twonorm_small):
        m = fit_vsc(twonorm_small, VscConfig(k=50, pair_mode="uniform", seed=3))
        lo, hi = twonorm_small.x.min(axis=0), twonorm_small.x.max(axis=0)
        for h in m.hyperplanes:
            assert np.all((h.pair.x_plus >= lo) & (h.pair.x_plus <= hi))
        assert np.mean(m.predict(twonorm_small.x) == twonorm_small.y) > 0.9

    def test_uniform_ignores_labels(self, rng):
        x = rng.normal(size=(30, 2))
        ds = _ds(x, [1] * 30)  # one class only: data mode would fail
        fit_vsc(ds, VscConfig(k=5, pair_mode=PairMode.UNIFORM_BOX))
        with pytest.raises(ClassMissingError):
            fit_vsc(ds, VscConfig(k=5))

    def test_interpolation_limit(self, rng):
        x = np.vstack([rng.normal(1.5, 0.4, (15, 2)), rng.normal(-1.5, 0.4, (15, 2))])
        ds = _ds(x, [1] * 15 + [-1] * 15)
        m = fit_vsc(ds, VscConfig(k=60, lam=0.001, seed=0))
        assert np.all(m.predict(x) == ds.y)

    def test_too_few_samples(self):
        with pytest.raises(ParameterError):
            fit_vsc(_ds([[1.0]], [1]), VscConfig(k=1))


class TestPredict:
    def _model(self, weights, k=1):
        hs = tuple(make_hyperplane(Pair([1.0, 0.0], [-1.0, 0.0])) for _ in range(k))
        return VscModel(hyperplanes=hs, weights=np.array(weights, float), config=VscConfig(k=k), dim=2)

    def test_zero_weights_predict_positive(self, rng):
        m = self._model([0.0, 0.0])
        assert decision_value(m, [3.0, -2.0]) == 0.0
        assert np.all(predict_vsc(m, rng.normal(size=(20, 2))) == 1)

    def test_bias_only(self):
        assert decision_value(self._model([0.5, 0.0]), [7.0, 1.0]) == 0.5

    def test_positive_side(self):
        assert predict_vsc(self._model([0.0, 1.0]), [0.8, 0.1]) == 1
        assert predict_vsc(self._model([0.0, 1.0]), [-0.8, 0.1]) == -1

    def test_sign_consistency(self, twonorm_small, rng):
        m = fit_vsc(twonorm_small, VscConfig(k=20, seed=1))
        X = rng.normal(size=(1000, 20))
        scores = decision_value(m, X)
        np.testing.assert_array_equal(np.where(scores >= 0, 1, -1), predict_vsc(m, X))

    def test_shape_error(self):
        with pytest.raises(ShapeError):
            predict_vsc(self._model([0.0, 1.0]), [1.0, 2.0, 3.0])

    def test_model_invariants(self):
        with pytest.raises(ShapeError):
            self._model([0.0, 1.0, 2.0])


# -- baselines ---------------------------------------------------------------


class TestElm:
    def test_separable(self, blobs):
        clf = fit_elm(blobs, 50, 1.0, np.random.default_rng(0))
        assert brute_f1(blobs.y, clf.predict(blobs.x)) >= 0.9

    def test_determinism(self, twonorm_small):
        a = ELM(hidden=30, seed=4).fit(twonorm_small.x, twonorm_small.y)
        b = ELM(hidden=30, seed=4).fit(twonorm_small.x, twonorm_small.y)
        np.testing.assert_array_equal(a.predict(twonorm_small.x), b.predict(twonorm_small.x))
        assert np.all(np.abs(a.input_weights_) <= 1.0)

    @pytest.mark.parametrize("labels,expected", [([1, 1, -1], 1), ([-1, -1, 1], -1)])
    def test_zero_hidden_is_majority(self, labels, expected):
        x = np.array([[0.0], [1.0], [2.0]])
        clf = ELM(hidden=0, lam=1.0).fit(x, labels)
        # single 1s column: w0 = sum(y) / (N + lambda)
        assert clf.weights_[0] == pytest.approx(sum(labels) / (3 + 1.0))
        assert np.all(clf.predict(np.array([[5.0], [-3.0]])) == expected)


class TestKnn:
    def test_one_neighbour_recovers_training_labels(self, blobs):
        clf = fit_knn(blobs, 1)
        np.testing.assert_array_equal(clf.predict(blobs.x), blobs.y)

    def test_global_majority(self):
        x = np.array([[0.0], [1.0], [2.0], [3.0]])
        clf = KNN(4).fit(x, [1, 1, 1, -1])
        assert np.all(clf.predict(np.array([[3.0], [-10.0], [100.0]])) == 1)

    def test_vote_tie_gives_positive(self):
        clf = KNN(2).fit(np.array([[0.0], [2.0]]), [-1, 1])
        assert clf.predict(np.array([[0.1]]))[0] == 1

    def test_distance_tie_prefers_lower_index(self):
        clf = KNN(1).fit(np.array([[-1.0], [1.0]]), [-1, 1])
        assert clf.predict(np.array([[0.0]]))[0] == -1
        clf = KNN(1).fit(np.array([[1.0], [-1.0]]), [1, -1])
        assert clf.predict(np.array([[0.0]]))[0] == 1

    def test_too_many_neighbours(self):
        with pytest.raises(ParameterError):
            KNN(5).fit(np.zeros((3, 1)), [1, -1, 1])

    def test_blobs_held_out(self, blobs):
        r = np.random.default_rng(5)
        xt = np.vstack([r.normal(2.0, 0.5, (50, 2)), r.normal(-2.0, 0.5, (50, 2))])
        yt = [1] * 50 + [-1] * 50
        assert brute_f1(yt, fit_knn(blobs, 5).predict(xt)) >= 0.95


def test_hyperplane_is_frozen():
    h = make_hyperplane(Pair([1.0], [0.0]))
    assert isinstance(h, Hyperplane)
    with pytest.raises(Exception):
        h.bias = 3.0
