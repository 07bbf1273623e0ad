import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relnet.mlp import MlpModel, TrainingConfig, init_mlp, train_mlp


def random_model(rng, d, M, scale=1.0):
    return MlpModel(scale * rng.standard_normal((M, d + 1)), scale * rng.standard_normal((1, M + 1)))


def finite_difference(model, x, label, h=1e-5):
    """Central differences of the per-example squared error."""
    def loss(w1, w2):
        return (MlpModel(w1, w2).forward(x) - label) ** 2

    grads = []
    for which in (0, 1):
        base = [model.w1.copy(), model.w2.copy()]
        g = np.zeros_like(base[which])
        for idx in np.ndindex(g.shape):
            up = [b.copy() for b in base]
            dn = [b.copy() for b in base]
            up[which][idx] += h
            dn[which][idx] -= h
            g[idx] = (loss(*up) - loss(*dn)) / (2 * h)
        grads.append(g)
    return grads


def relative_error(a, b):
    return np.max(np.abs(a - b) / np.maximum(1e-8, np.abs(a) + np.abs(b)))


class TestForward:
    def test_zero_weights(self):
        m = MlpModel(np.zeros((3, 5)), np.zeros((1, 4)))
        assert m.forward([0.3, 1, 0, 1]) == 0.5

    def test_scalar_hand_value(self):
        m = MlpModel([[1.0, 0.0]], [[1.0, 0.0]])
        expected = 1.0 / (1.0 + math.exp(-math.tanh(1.0)))
        assert expected == pytest.approx(0.6816997, abs=1e-7)
        assert m.forward([1.0]) == pytest.approx(expected, abs=1e-15)

    def test_survey_shape(self):
        m = init_mlp(14, 17, np.random.default_rng(0))
        assert (m.d, m.M) == (14, 17)
        assert isinstance(m.forward(np.zeros(14)), float)

    def test_batch(self):
        rng = np.random.default_rng(1)
        m = random_model(rng, 3, 2)
        X = rng.random((6, 3))
        np.testing.assert_allclose(m.forward(X), [m.forward(x) for x in X])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            init_mlp(3, 2, np.random.default_rng(0)).forward([1.0, 2.0])

    @given(st.integers(1, 6), st.integers(1, 5), st.integers(0, 2**32 - 1))
    def test_open_interval(self, d, M, seed):
        rng = np.random.default_rng(seed)
        y = random_model(rng, d, M).forward(rng.uniform(-3, 3, d))
        assert 0.0 < y < 1.0

    @given(st.integers(1, 6), st.integers(2, 5), st.integers(0, 2**32 - 1))
    def test_hidden_permutation(self, d, M, seed):
        rng = np.random.default_rng(seed)
        m = random_model(rng, d, M)
        perm = rng.permutation(M)
        w2 = np.append(m.w2[0, :-1][perm], m.w2[0, -1])[None, :]
        x = rng.random(d)
        assert MlpModel(m.w1[perm], w2).forward(x) == pytest.approx(m.forward(x), abs=1e-14)


class TestClassify:
    def test_tie_goes_up(self):
        m = MlpModel(np.zeros((1, 2)), np.zeros((1, 2)))
        assert tuple(m.classify([0.7])) == (1, 0.5)

    def test_hand_value(self):
        assert MlpModel([[1.0, 0.0]], [[1.0, 0.0]]).classify([1.0]).label == 1

    def test_below_half(self):
        # logistic(b) = 0.4999 for this output bias
        b = math.log(0.4999 / 0.5001)
        m = MlpModel(np.zeros((1, 2)), [[0.0, b]])
        label, raw = m.classify([0.0])
        assert raw == pytest.approx(0.4999) and label == 0


class TestGradient:
    def test_zero_model_at_half_label(self):
        m = MlpModel(np.zeros((4, 3)), np.zeros((1, 5)))
        g1, g2 = m.gradient([0.2, 0.9], 0.5)
        assert not g1.any() and not g2.any()

    def test_shapes(self):
        m = init_mlp(5, 3, np.random.default_rng(0))
        g1, g2 = m.gradient(np.zeros(5), 1)
        assert g1.shape == m.w1.shape and g2.shape == m.w2.shape

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 6), st.integers(1, 5), st.integers(0, 1), st.integers(0, 2**32 - 1))
    def test_matches_finite_difference(self, d, M, label, seed):
        rng = np.random.default_rng(seed)
        m = random_model(rng, d, M, scale=0.5)
        x = rng.random(d)
        fd1, fd2 = finite_difference(m, x, label)
        g1, g2 = m.gradient(x, label)
        assert relative_error(g1, fd1) < 1e-5
        assert relative_error(g2, fd2) < 1e-5

    def test_batch_is_mean(self):
        rng = np.random.default_rng(2)
        m = random_model(rng, 3, 4)
        X, y = rng.random((5, 3)), np.array([0, 1, 1, 0, 1])
        parts = [m.gradient(x, t) for x, t in zip(X, y)]
        g1, g2 = m.gradient(X, y)
        np.testing.assert_allclose(g1, np.mean([p[0] for p in parts], axis=0), atol=1e-15)
        np.testing.assert_allclose(g2, np.mean([p[1] for p in parts], axis=0), atol=1e-15)


class TestTrain:
    XOR = (np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=float), np.array([0, 1, 1, 0]))

    def test_one_step_reduces_loss(self):
        x, y = np.array([[0.2, 0.7, 1.0]]), np.array([1])
        cfg = TrainingConfig(cycles=1, learning_rate=1e-3, seed=5)
        before = init_mlp(3, 4, np.random.default_rng(5)).loss(x, y)
        after = train_mlp(x, y, cfg, hidden=4, check_balance=False).loss(x, y)
        assert after < before

    def test_xor(self):
        X, y = self.XOR
        m = train_mlp(X, y, TrainingConfig(cycles=5000, seed=0), hidden=4)
        assert list(m.classify_batch(X)) == list(y)

    def test_deterministic(self):
        X, y = self.XOR
        cfg = TrainingConfig(cycles=50, seed=3)
        a = train_mlp(X, y, cfg, hidden=3)
        b = train_mlp(X, y, cfg, hidden=3)
        assert a.to_json() == b.to_json()

    def test_rejects_unbalanced(self):
        with pytest.raises(ValueError, match="unbalanced"):
            train_mlp(np.zeros((3, 2)), [1, 0, 0], TrainingConfig(cycles=1), hidden=2)

    @pytest.mark.parametrize("kwargs", [{"cycles": 0}, {"learning_rate": 0}, {"momentum": 1.0}])
    def test_bad_config(self, kwargs):
        with pytest.raises(ValueError):
            TrainingConfig(**kwargs)

    def test_init_range(self):
        m = init_mlp(16, 9, np.random.default_rng(0))
        assert np.abs(m.w1).max() <= 1 / 4 and np.abs(m.w2).max() <= 1 / 3


class TestSerialisation:
    def test_round_trip(self, tmp_path):
        m = random_model(np.random.default_rng(0), 14, 17)
        m.save(tmp_path / "mlp.json")
        back = MlpModel.load(tmp_path / "mlp.json")
        assert back == m
        assert back.w1.tobytes() == m.w1.tobytes() and back.w2.tobytes() == m.w2.tobytes()
        assert set(m.to_dict()) == {"schema_version", "d", "M", "w1", "w2"}

    def test_shape_check(self):
        d = random_model(np.random.default_rng(0), 2, 2).to_dict()
        d["M"] = 3
        with pytest.raises(ValueError):
            MlpModel.from_dict(d)
