import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relnet.network import Activation, RelationalNetwork, zero_network


def brute_node(weights, observed, k, kind):
    """Term-by-term evaluation, written straight from the node equation."""
    funcs = {
        "linear": lambda x: x,
        "logistic": lambda x: 1.0 / (1.0 + math.exp(-x)),
        "tanh": lambda x: (math.exp(2 * x) - 1.0) / (math.exp(2 * x) + 1.0),
    }
    total = 0.0
    for j in range(len(observed)):
        if j != k:
            total += weights[k][j] * funcs[kind](observed[j])
    return total


def net_from(weights, kind="linear"):
    n = len(weights)
    return RelationalNetwork(tuple(f"n{i}" for i in range(n)), np.array(weights, dtype=float), kind)


LOGISTIC3 = [[0.0, 0.25, 0.5], [0.1, 0.0, 0.2], [0.3, 0.4, 0.0]]


@st.composite
def networks(draw, max_nodes=4):
    n = draw(st.integers(2, max_nodes))
    w = np.array(draw(st.lists(st.floats(0, 1), min_size=n * n, max_size=n * n))).reshape(n, n)
    np.fill_diagonal(w, 0)
    kind = draw(st.sampled_from(list(Activation)))
    x = np.array(draw(st.lists(st.floats(0, 1), min_size=n, max_size=n)))
    return RelationalNetwork(tuple(map(str, range(n))), w, kind), x


class TestActivation:
    def test_values(self):
        assert Activation.LINEAR(0.3) == pytest.approx(0.3)
        assert Activation.LOGISTIC(0.0) == pytest.approx(0.5)
        assert Activation.TANH(1.0) == pytest.approx((math.e**2 - 1) / (math.e**2 + 1))

    def test_from_string(self):
        assert Activation("tanh") is Activation.TANH


class TestConstruction:
    def test_rejects_single_node(self):
        with pytest.raises(ValueError):
            RelationalNetwork(("a",), np.zeros((1, 1)), "linear")

    def test_rejects_diagonal(self):
        with pytest.raises(ValueError):
            net_from([[0.5, 0.1], [0.1, 0.0]])

    @pytest.mark.parametrize("bad", [-0.1, 1.1, np.nan])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            net_from([[0.0, bad], [0.1, 0.0]])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            RelationalNetwork(("a", "b", "c"), np.zeros((2, 2)), "linear")

    def test_immutable_weights(self):
        src = np.array([[0.0, 0.2], [0.3, 0.0]])
        net = net_from(src)
        src[0, 1] = 0.9
        assert net.weights[0, 1] == 0.2
        with pytest.raises(ValueError):
            net.weights[0, 1] = 0.5


class TestNodePredict:
    def test_zero_weights(self):
        net = zero_network(["a", "b", "c"], "logistic")
        assert net.node_predict([0.2, 0.9, 0.4], 1) == 0.0

    def test_identity_pass_through(self):
        assert net_from([[0, 1.0], [0, 0]]).node_predict([0.0, 0.7], 0) == pytest.approx(0.7)

    def test_logistic_hand_value(self):
        net = net_from(LOGISTIC3, "logistic")
        # 0.25 * sigmoid(0) + 0.5 * sigmoid(1)
        assert net.node_predict([0.33, 0.0, 1.0], 0) == pytest.approx(0.4905293, abs=1e-7)

    def test_by_name(self):
        net = net_from(LOGISTIC3, "logistic")
        assert net.node_predict([0.33, 0.0, 1.0], "n0") == net.node_predict([0.33, 0.0, 1.0], 0)

    def test_bad_index(self):
        with pytest.raises(IndexError):
            net_from(LOGISTIC3).node_predict([0, 0, 0], 3)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            net_from(LOGISTIC3).node_predict([0, 0], 0)

    def test_not_clamped(self):
        net = net_from([[0, 1, 1], [0, 0, 0], [0, 0, 0]])
        assert net.node_predict([0, 0.8, 0.8], 0) == pytest.approx(1.6)


class TestPredictAll:
    def test_zero(self):
        assert np.all(zero_network("abc").predict_all([0.1, 0.2, 0.3]) == 0)

    def test_swap(self):
        np.testing.assert_allclose(net_from([[0, 1], [1, 0]]).predict_all([0.3, 0.9]), [0.9, 0.3])

    def test_matches_node_loop(self):
        net = net_from(LOGISTIC3, "logistic")
        x = [0.5, 0.0, 1.0]
        np.testing.assert_allclose(net.predict_all(x), [net.node_predict(x, k) for k in range(3)], atol=1e-15)

    def test_batch(self):
        net = net_from(LOGISTIC3, "tanh")
        X = np.random.default_rng(0).random((5, 3))
        np.testing.assert_allclose(net.predict_all(X), np.array([net.predict_all(r) for r in X]))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            net_from(LOGISTIC3).predict_all(np.zeros((4, 2)))


class TestClassify:
    def test_zero(self):
        assert tuple(zero_network("ab").classify([0.5, 0.5], 0)) == (0, 0.0)

    def test_clamp_high(self):
        net = net_from([[0, 1, 1], [0, 0, 0], [0, 0, 0]])
        assert tuple(net.classify([0, 0.8, 0.8], 0)) == (1, 1.0)

    def test_below_half(self):
        assert net_from(LOGISTIC3, "logistic").classify([0.0, 0.0, 1.0], 0).label == 0

    def test_tie_rounds_up(self):
        assert net_from([[0, 1], [0, 0]]).classify([0, 0.5], 0).label == 1

    def test_batch_agrees(self):
        net = net_from(LOGISTIC3, "logistic")
        X = np.random.default_rng(1).random((20, 3))
        assert list(net.classify_batch(X, 2)) == [net.classify(r, 2).label for r in X]


class TestProperties:
    @given(networks(), st.floats(0, 1))
    def test_diagonal_exclusion(self, nx, v):
        net, x = nx
        for k in range(net.n_nodes):
            y = x.copy()
            y[k] = v
            assert net.node_predict(y, k) == net.node_predict(x, k)

    @given(networks(), st.data())
    def test_monotone(self, nx, data):
        net, x = nx
        k = data.draw(st.integers(0, net.n_nodes - 1))
        j = data.draw(st.integers(0, net.n_nodes - 1).filter(lambda j: j != k))
        y = x.copy()
        y[j] = data.draw(st.floats(x[j], 1))
        assert net.node_predict(y, k) >= net.node_predict(x, k) - 1e-12

    @given(networks())
    def test_linear_bound(self, nx):
        net, x = nx
        net = RelationalNetwork(net.node_names, net.weights, "linear")
        for k in range(net.n_nodes):
            assert -1e-12 <= net.node_predict(x, k) <= net.weights[k].sum() + 1e-12

    @given(networks(), st.data())
    def test_classify_range(self, nx, data):
        net, x = nx
        label, raw = net.classify(x, data.draw(st.integers(0, net.n_nodes - 1)))
        assert label in (0, 1) and 0.0 <= raw <= 1.0

    @settings(max_examples=200)
    @given(networks())
    def test_brute_force(self, nx):
        net, x = nx
        for k in range(net.n_nodes):
            assert net.node_predict(x, k) == pytest.approx(brute_node(net.weights, x, k, net.activation.value), abs=1e-12)


class TestSerialisation:
    @given(networks())
    def test_round_trip(self, nx):
        net, _ = nx
        back = RelationalNetwork.from_json(net.to_json())
        assert back == net
        assert back.weights.tobytes() == net.weights.tobytes()

    def test_fields(self):
        d = net_from(LOGISTIC3, "logistic").to_dict()
        assert set(d) == {"schema_version", "node_names", "activation", "weights"}
        assert d["weights"][0] == [0.0, 0.25, 0.5]

    def test_version_check(self):
        d = net_from(LOGISTIC3).to_dict()
        d["schema_version"] = 99
        with pytest.raises(ValueError):
            RelationalNetwork.from_dict(d)

    def test_file(self, tmp_path):
        net = net_from(LOGISTIC3, "tanh")
        net.save(tmp_path / "m.json")
        assert RelationalNetwork.load(tmp_path / "m.json") == net


def test_concurrent_reads():
    rng = np.random.default_rng(3)
    w = rng.random((5, 5))
    np.fill_diagonal(w, 0)
    net = RelationalNetwork(tuple("abcde"), w, "logistic")
    X = rng.random((200, 5))
    expected = net.predict_all(X)
    results = []

    def work():
        results.append(all(np.array_equal(net.predict_all(X), expected) for _ in range(20)))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(results) and len(results) == 8
