import math

import numpy as np
import pytest

from rulenet import network
from rulenet.encoder import EncodedDataset
from rulenet.errors import ConfigError
from rulenet.network import (
    Network,
    ObjectiveParams,
    classify,
    cross_entropy,
    forward,
    hidden_activations,
    init_random,
    is_correct,
    objective_and_gradient,
    pack_gradient,
    pack_weights,
    penalty,
    with_weights,
)


def small_net(rng, n=5, h=2, o=2, mask_fraction=0.0):
    net = Network(
        w=rng.uniform(-1, 1, size=(h, n)),
        v=rng.uniform(-1, 1, size=(o, h)),
        mask_w=np.ones((h, n)),
        mask_v=np.ones((o, h)),
    )
    if mask_fraction:
        net.mask_w = (rng.uniform(size=net.w.shape) > mask_fraction) * 1.0
        net.mask_v = (rng.uniform(size=net.v.shape) > mask_fraction) * 1.0
        return Network(net.w, net.v, net.mask_w, net.mask_v)
    return net


def small_data(rng, net, k=6):
    X = (rng.uniform(size=(k, net.n)) > 0.5) * 1.0
    labels = rng.integers(0, net.o, size=k)
    return EncodedDataset(X=X, labels=labels,
                          class_names=tuple(str(i) for i in range(net.o)))


class TestForward:
    def test_zero_weights_zero_activation(self, rng):
        net = small_net(rng)
        net.w[:] = 0
        assert np.all(hidden_activations(net, np.ones(net.n)) == 0)

    def test_single_path_closed_form(self):
        net = Network(w=np.array([[1.0, 0.0]]), v=np.array([[1.0], [0.0]]),
                      mask_w=np.ones((1, 2)), mask_v=np.ones((2, 1)))
        x = np.array([1.0, 1.0])
        a = hidden_activations(net, x)
        assert a[0] == pytest.approx(math.tanh(1.0), abs=1e-12)
        S = forward(net, x)
        assert S[0] == pytest.approx(1 / (1 + math.exp(-math.tanh(1.0))),
                                     abs=1e-12)

    def test_zero_v_gives_half(self, rng):
        net = small_net(rng)
        net.v[:] = 0
        S = forward(net, rng.uniform(size=net.n))
        assert np.allclose(S, 0.5)

    def test_matches_scalar_recomputation(self, rng):
        net = small_net(rng, n=7, h=3, o=2)
        x = (rng.uniform(size=7) > 0.5) * 1.0
        alpha = [math.tanh(sum(x[l] * net.w[m, l] for l in range(7)))
                 for m in range(3)]
        S = [1 / (1 + math.exp(-sum(alpha[m] * net.v[p, m] for m in range(3))))
             for p in range(2)]
        assert np.allclose(hidden_activations(net, x), alpha, atol=1e-12)
        assert np.allclose(forward(net, x), S, atol=1e-12)

    def test_ranges(self, rng):
        net = small_net(rng, n=10, h=4, o=3)
        X = rng.uniform(-2, 2, size=(50, 10))
        A = hidden_activations(net, X)
        S = forward(net, X)
        assert np.all((A >= -1) & (A <= 1))
        assert np.all((S > 0) & (S < 1))

    def test_dimension_mismatch(self, rng):
        net = small_net(rng)
        with pytest.raises(ConfigError):
            hidden_activations(net, np.ones(net.n + 1))


class TestClassification:
    def test_is_correct_cases(self):
        assert is_correct([1.0, 0.0], [1.0, 0.0], 0.01)
        assert is_correct([0.7, 0.3], [1.0, 0.0], 0.35)
        assert not is_correct([0.6, 0.4], [1.0, 0.0], 0.35)

    def test_classify_cases(self):
        assert classify([0.9, 0.1]) == 0
        assert classify([0.5, 0.5]) == 0
        assert classify([0.1, 0.2, 0.7]) == 2

    def test_classify_monotone_invariance(self, rng):
        for _ in range(50):
            S = rng.uniform(size=4)
            assert classify(S) == classify(np.exp(3 * S) + 1)


class TestObjective:
    def test_cross_entropy_at_half(self, rng):
        net = small_net(rng)
        net = Network(net.w, np.zeros_like(net.v), net.mask_w, net.mask_v)
        data = EncodedDataset(X=np.ones((1, net.n)), labels=np.array([0]),
                              class_names=("0", "1"))
        assert cross_entropy(net, data) == pytest.approx(2 * math.log(2),
                                                         abs=1e-12)

    def test_cross_entropy_clamped_limit(self):
        # Saturated outputs stay finite and essentially zero when correct.
        net = Network(w=np.array([[100.0, 0.0]]),
                      v=np.array([[100.0], [-100.0]]),
                      mask_w=np.ones((1, 2)), mask_v=np.ones((2, 1)))
        data = EncodedDataset(X=np.array([[1.0, 1.0]]), labels=np.array([0]),
                              class_names=("0", "1"))
        e = cross_entropy(net, data)
        assert 0 <= e <= 5e-12

    def test_cross_entropy_scalar_oracle(self, rng):
        net = small_net(rng, n=6, h=3, o=3)
        data = small_data(rng, net, k=8)
        T = data.targets(3)
        total = 0.0
        for i in range(8):
            a = [math.tanh(float(data.X[i] @ net.w[m])) for m in range(3)]
            for p in range(3):
                s = 1 / (1 + math.exp(-sum(a[m] * net.v[p, m] for m in range(3))))
                s = min(max(s, 1e-12), 1 - 1e-12)
                total -= T[i, p] * math.log(s) + (1 - T[i, p]) * math.log(1 - s)
        assert cross_entropy(net, data) == pytest.approx(total, abs=1e-10)

    def test_penalty_zero_weights(self, rng):
        net = small_net(rng)
        net = Network(np.zeros_like(net.w), np.zeros_like(net.v),
                      net.mask_w, net.mask_v)
        assert penalty(net, ObjectiveParams()) == 0.0

    def test_penalty_single_weight_closed_form(self):
        net = Network(w=np.array([[1.0, 0.0]]), v=np.array([[0.0], [0.0]]),
                      mask_w=np.array([[1.0, 0.0]]), mask_v=np.zeros((2, 1)))
        params = ObjectiveParams(eps1=1.0, eps2=0.0, beta=10.0)
        assert penalty(net, params) == pytest.approx(10 / 11, abs=1e-12)

    def test_penalty_monotone_in_weight_magnitude(self):
        params = ObjectiveParams()
        values = []
        for w in np.linspace(0, 3, 13):
            net = Network(w=np.array([[w, 0.0]]), v=np.array([[0.0], [0.0]]),
                          mask_w=np.array([[1.0, 0.0]]), mask_v=np.zeros((2, 1)))
            values.append(penalty(net, params))
        assert np.all(np.diff(values) > 0)

    def test_penalty_ratio_part_bounded(self, rng):
        net = small_net(rng, n=8, h=3, o=2)
        params = ObjectiveParams(eps1=0.1, eps2=0.0)
        assert penalty(net, params) < params.eps1 * net.link_count()


class TestGradient:
    def test_gradient_matches_finite_differences(self, rng):
        params = ObjectiveParams()
        for trial in range(20):
            n = int(rng.integers(2, 11))
            h = int(rng.integers(1, 4))
            o = int(rng.integers(2, 3))
            net = small_net(rng, n=n, h=h, o=o,
                            mask_fraction=0.2 if trial % 2 else 0.0)
            data = small_data(rng, net, k=int(rng.integers(1, 11)))
            value, gw, gv = objective_and_gradient(net, data, params)
            theta = pack_weights(net)
            grad = pack_gradient(net, gw, gv)

            def f(th):
                cand = with_weights(net, th)
                return (cross_entropy(cand, data) + penalty(cand, params))

            step = 1e-5
            for idx in range(theta.size):
                up = theta.copy(); up[idx] += step
                dn = theta.copy(); dn[idx] -= step
                fd = (f(up) - f(dn)) / (2 * step)
                denom = max(1e-6, abs(fd), abs(grad[idx]))
                assert abs(fd - grad[idx]) / denom < 1e-4

    def test_masked_gradient_entries_zero(self, rng):
        net = small_net(rng, n=6, h=3, o=2, mask_fraction=0.4)
        data = small_data(rng, net)
        _, gw, gv = objective_and_gradient(net, data, ObjectiveParams())
        assert np.all(gw[net.mask_w == 0] == 0)
        assert np.all(gv[net.mask_v == 0] == 0)

    def test_masked_weight_perturbation_does_not_change_objective(self, rng):
        net = small_net(rng, n=6, h=3, o=2, mask_fraction=0.4)
        data = small_data(rng, net)
        params = ObjectiveParams()
        base = objective_and_gradient(net, data, params)[0]
        bumped = Network(net.w + 5.0 * (1 - net.mask_w), net.v,
                         net.mask_w, net.mask_v)
        assert objective_and_gradient(bumped, data, params)[0] == base


class TestMaskingAndIo:
    def test_masked_weights_stay_zero(self, rng):
        net = small_net(rng, n=6, h=3, o=2, mask_fraction=0.5)
        assert np.all(net.w[net.mask_w == 0] == 0)
        theta = pack_weights(net)
        back = with_weights(net, theta + 1.0)
        assert np.all(back.w[back.mask_w == 0] == 0)
        assert np.all(back.v[back.mask_v == 0] == 0)

    def test_pack_unpack_roundtrip(self, rng):
        net = small_net(rng, n=6, h=3, o=2, mask_fraction=0.3)
        back = with_weights(net, pack_weights(net))
        assert np.array_equal(back.w, net.w)
        assert np.array_equal(back.v, net.v)

    def test_save_load_roundtrip(self, rng, tmp_path):
        net = small_net(rng, n=6, h=3, o=2, mask_fraction=0.3)
        params = ObjectiveParams()
        path = tmp_path / "model.json"
        network.save_network(net, path, params, provenance={"seed": 1})
        back, back_params, prov = network.load_network(path)
        assert np.array_equal(back.w, net.w)
        assert np.array_equal(back.v, net.v)
        assert np.array_equal(back.mask_w, net.mask_w)
        assert back_params == params
        assert prov == {"seed": 1}

    def test_init_random_range_and_shape(self):
        net = init_random(87, 4, 2, seed=0)
        assert (net.n, net.h, net.o) == (87, 4, 2)
        assert net.link_count() == 356
        assert np.all(np.abs(net.w) <= 1) and np.all(np.abs(net.v) <= 1)

    def test_shape_validation(self):
        with pytest.raises(ConfigError):
            Network(w=np.ones((1, 1)), v=np.ones((2, 1)),
                    mask_w=np.ones((1, 1)), mask_v=np.ones((2, 1)))
