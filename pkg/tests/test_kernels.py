import numpy as np
import pytest

import neelwall._kernels_np as np_impl
from neelwall.kernels import BACKEND

try:
    import neelwall._kernels as cy_impl
except ImportError:
    cy_impl = None

needs_ext = pytest.mark.skipif(cy_impl is None, reason="compiled kernels absent")


def test_active_backend_reported():
    assert BACKEND in ("cython", "numpy")


class TestPairLagSum:
    def test_two_cells(self):
        fm = np.array([1.0, 3.0])
        assert np_impl.pair_lag_sum(fm) == pytest.approx(4.0)

    def test_three_cells(self):
        fm = np.array([0.0, 1.0, 0.0])
        # lag 1: 1 + 1; lag 2: 0
        assert np_impl.pair_lag_sum(fm) == pytest.approx(2.0)

    @needs_ext
    def test_backend_parity(self):
        rng = np.random.default_rng(3)
        for n in (17, 333, 1024):
            fm = rng.normal(size=n)
            a = np_impl.pair_lag_sum(fm)
            b = cy_impl.pair_lag_sum(fm)
            assert b == pytest.approx(a, rel=1e-12, abs=1e-12)


class TestPoissonLayer:
    def test_total_kernel_mass_below_one(self):
        xs = np.linspace(-50.0, 50.0, 501)
        f = np.ones_like(xs)
        v = np_impl.poisson_layer(xs, f, np.array([0.0]), 2.0)
        assert 0.9 < v[0] <= 1.0

    @needs_ext
    def test_backend_parity(self):
        rng = np.random.default_rng(5)
        xs = np.linspace(-20.0, 20.0, 401)
        f = rng.normal(size=401)
        for y in (0.01, 0.7, 5.0):
            a = np_impl.poisson_layer(xs, f, xs, y)
            b = cy_impl.poisson_layer(xs, f, xs, y)
            assert np.max(np.abs(a - b)) < 1e-12

    @needs_ext
    def test_read_only_input_accepted(self):
        xs = np.linspace(-5.0, 5.0, 101)
        f = np.exp(-(xs**2))
        f.flags.writeable = False
        xs.flags.writeable = False
        out = cy_impl.poisson_layer(xs, f, xs, 1.0)
        assert np.all(np.isfinite(out))
