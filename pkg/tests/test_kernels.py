"""Kernel correctness against independent nested-loop oracles."""

import numpy as np
import pytest

from edgeguard.verifier import Tensor4, conv3d, dense, global_avg_pool, relu
from edgeguard.verifier.kernels import (
    backend_name,
    conv3d_numpy,
    dense_numpy,
    global_avg_pool_numpy,
)
from edgeguard.verifier.ops import ShapeMismatch


def conv3d_oracle(x, w, b, padding):
    """Nested-loop cross-correlation, written independently of the engine."""
    c_out, c_in, kt, kh, kw = w.shape
    p = padding
    _, t_in, h_in, w_in = x.shape
    t_out, h_out, w_out = t_in + 2 * p - kt + 1, h_in + 2 * p - kh + 1, w_in + 2 * p - kw + 1
    out = np.zeros((c_out, t_out, h_out, w_out))
    for co in range(c_out):
        for t in range(t_out):
            for hh in range(h_out):
                for ww in range(w_out):
                    acc = b[co]
                    for ci in range(c_in):
                        for dt in range(kt):
                            for dh in range(kh):
                                for dw in range(kw):
                                    ti, hi, wi = t + dt - p, hh + dh - p, ww + dw - p
                                    if 0 <= ti < t_in and 0 <= hi < h_in and 0 <= wi < w_in:
                                        acc += x[ci, ti, hi, wi] * w[co, ci, dt, dh, dw]
                    out[co, t, hh, ww] = acc
    return out


def dense_oracle(v, w, b):
    out = np.zeros(w.shape[0])
    for i in range(w.shape[0]):
        acc = b[i]
        for j in range(w.shape[1]):
            acc += w[i, j] * v[j]
        out[i] = acc
    return out


def gap_oracle(x):
    c = x.shape[0]
    out = np.zeros(c)
    for ci in range(c):
        total = 0.0
        count = 0
        for t in range(x.shape[1]):
            for h in range(x.shape[2]):
                for w in range(x.shape[3]):
                    total += x[ci, t, h, w]
                    count += 1
        out[ci] = total / count
    return out


def random_conv_case(rng):
    c_in = rng.integers(1, 4)
    c_out = rng.integers(1, 5)
    kt, kh, kw = (int(rng.integers(0, 2)) * 2 + 1 for _ in range(3))
    p = int(rng.integers(0, 2))
    t = int(rng.integers(kt, kt + 4))
    h = int(rng.integers(kh, kh + 5))
    w = int(rng.integers(kw, kw + 5))
    x = rng.standard_normal((c_in, t, h, w))
    wgt = rng.standard_normal((c_out, c_in, kt, kh, kw))
    b = rng.standard_normal(c_out)
    return x, wgt, b, p


class TestConv3d:
    def test_identity_kernel(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((1, 4, 5, 6))
        w = np.zeros((1, 1, 3, 3, 3))
        w[0, 0, 1, 1, 1] = 1.0
        out = conv3d(Tensor4(x), w, np.zeros(1), padding=1)
        np.testing.assert_allclose(out.data, x, atol=1e-12)

    def test_all_ones_receptive_field(self):
        x = Tensor4(np.ones((1, 4, 4, 4)))
        w = np.ones((1, 1, 3, 3, 3))
        out = conv3d(x, w, np.zeros(1), padding=0)
        assert out.dims == (1, 2, 2, 2)
        np.testing.assert_array_equal(out.data, np.full((1, 2, 2, 2), 27.0))

    def test_matches_oracle_on_fixed_shape(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal((2, 6, 8, 8))
        w = rng.standard_normal((3, 2, 3, 3, 3))
        b = rng.standard_normal(3)
        got = conv3d(Tensor4(x), w, b, padding=1).data
        want = conv3d_oracle(x, w, b, 1)
        np.testing.assert_allclose(got, want, rtol=1e-5, atol=1e-10)

    @pytest.mark.parametrize("case", range(50))
    def test_matches_oracle_on_random_shapes(self, case):
        rng = np.random.default_rng(1000 + case)
        x, w, b, p = random_conv_case(rng)
        want = conv3d_oracle(x, w, b, p)
        got = conv3d(Tensor4(x), w, b, padding=p).data
        np.testing.assert_allclose(got, want, rtol=1e-5, atol=1e-10)
        # numpy fallback agrees regardless of the active backend
        np.testing.assert_allclose(conv3d_numpy(x, w, b, p), want, rtol=1e-5, atol=1e-10)

    def test_channel_mismatch(self):
        with pytest.raises(ShapeMismatch):
            conv3d(Tensor4(np.ones((2, 3, 3, 3))), np.ones((1, 1, 3, 3, 3)), np.zeros(1), 0)

    def test_even_kernel_rejected(self):
        with pytest.raises(ShapeMismatch):
            conv3d(Tensor4(np.ones((1, 4, 4, 4))), np.ones((1, 1, 2, 3, 3)), np.zeros(1), 0)

    def test_kernel_larger_than_input(self):
        with pytest.raises(ShapeMismatch):
            conv3d(Tensor4(np.ones((1, 1, 1, 1))), np.ones((1, 1, 3, 3, 3)), np.zeros(1), 0)


class TestRelu:
    def test_basic(self):
        t = Tensor4(np.array([-1.0, 0.0, 2.0, -7.0]).reshape(1, 1, 1, 4))
        np.testing.assert_array_equal(relu(t).data.ravel(), [0.0, 0.0, 2.0, 0.0])

    def test_all_negative(self):
        t = Tensor4(-np.ones((2, 2, 2, 2)))
        assert np.all(relu(t).data == 0.0)

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        t = Tensor4(rng.standard_normal((2, 3, 4, 5)))
        once = relu(t)
        np.testing.assert_array_equal(relu(once).data, once.data)


class TestGlobalAvgPool:
    def test_constant_channel(self):
        t = Tensor4(np.full((3, 2, 2, 2), 3.0))
        np.testing.assert_allclose(global_avg_pool(t), [3.0, 3.0, 3.0])

    def test_small_mean(self):
        t = Tensor4(np.arange(8.0).reshape(1, 2, 2, 2))
        assert global_avg_pool(t)[0] == pytest.approx(3.5)

    def test_concatenated_halves(self):
        rng = np.random.default_rng(4)
        half = rng.standard_normal((2, 3, 4, 4))
        double = np.concatenate([half, half], axis=1)
        np.testing.assert_allclose(
            global_avg_pool(Tensor4(double)), global_avg_pool(Tensor4(half)), rtol=1e-12
        )

    @pytest.mark.parametrize("case", range(10))
    def test_matches_oracle(self, case):
        rng = np.random.default_rng(2000 + case)
        x = rng.standard_normal(tuple(rng.integers(1, 6, size=4)))
        np.testing.assert_allclose(global_avg_pool(Tensor4(x)), gap_oracle(x), rtol=1e-12)
        np.testing.assert_allclose(global_avg_pool_numpy(x), gap_oracle(x), rtol=1e-12)


class TestDense:
    def test_identity(self):
        v = np.array([1.0, -2.0, 3.0])
        np.testing.assert_array_equal(dense(v, np.eye(3), np.zeros(3)), v)

    def test_hand_case(self):
        out = dense(np.array([1.0, 2.0]), np.array([[1.0, 1.0]]), np.array([0.5]))
        np.testing.assert_allclose(out, [3.5])

    @pytest.mark.parametrize("case", range(20))
    def test_matches_oracle(self, case):
        rng = np.random.default_rng(3000 + case)
        rows, cols = rng.integers(1, 12, size=2)
        w = rng.standard_normal((rows, cols))
        v = rng.standard_normal(cols)
        b = rng.standard_normal(rows)
        np.testing.assert_allclose(dense(v, w, b), dense_oracle(v, w, b), rtol=1e-6, atol=1e-12)
        np.testing.assert_allclose(dense_numpy(v, w, b), dense_oracle(v, w, b), rtol=1e-6, atol=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            dense(np.ones(3), np.ones((2, 4)), np.zeros(2))


def test_backend_is_identified():
    assert backend_name() in ("compiled", "numpy")
