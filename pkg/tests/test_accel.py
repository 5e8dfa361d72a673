"""Numba-jitted kernels against their pure-numpy twins: same source, same
numbers. Skipped when the jit backend is disabled."""

import numpy as np
import pytest

from sinnet import _accel
from sinnet._cores import _fit_core_impl, _jet_core_impl, fit_core, jet_core
from sinnet.trainer import _pack
from sinnet import NetworkConfig, init_network

pytestmark = pytest.mark.skipif(
    not _accel.NUMBA_ENABLED, reason="numba backend disabled via SINNET_NUMBA=0"
)


def _setup(seed=0, widths=(10, 12), input_dim=2):
    net = init_network(NetworkConfig(input_dim, widths, 1, 2.0, seed=seed))
    flat, w_off, b_off, w, scales = _pack(net)
    rng = np.random.default_rng(seed + 1)
    x = np.ascontiguousarray(rng.uniform(-1, 1, (16, input_dim)))
    return flat, w_off, b_off, w, scales, x, rng


class TestBackendParity:
    def test_fit_core(self):
        flat, w_off, b_off, w, scales, x, rng = _setup()
        y = rng.standard_normal((16, 1))
        jit_loss, jit_grad = fit_core(flat, w_off, b_off, w, scales, x, y)
        ref_loss, ref_grad = _fit_core_impl(flat, w_off, b_off, w, scales, x, y)
        assert jit_loss == pytest.approx(ref_loss, rel=1e-14)
        np.testing.assert_allclose(jit_grad, ref_grad, rtol=1e-13, atol=1e-15)

    @pytest.mark.parametrize("mode", [1, 2, 3])
    def test_jet_core(self, mode):
        flat, w_off, b_off, w, scales, x, rng = _setup(seed=mode)
        seed_mat = np.eye(2)
        g = np.ascontiguousarray(rng.standard_normal((16, 2)))
        t = np.ascontiguousarray(rng.standard_normal(16))
        args = (flat, w_off, b_off, w, scales, x, seed_mat, mode, g, t, 0.7, 0.2)
        jit_out = jet_core(*args)
        ref_out = _jet_core_impl(*args)
        for a, b in zip(jit_out[:5], ref_out[:5]):
            assert float(a) == pytest.approx(float(b), rel=1e-12, abs=1e-15)
        np.testing.assert_allclose(jit_out[5], ref_out[5], rtol=1e-12, atol=1e-14)

    def test_jit_actually_compiled(self):
        assert hasattr(fit_core, "signatures") or hasattr(fit_core, "py_func")
