"""Kernel backends: correctness against numpy references and bit-identity
between the compiled extension and the pure fallback."""

import numpy as np
import pytest

from fcir_lab import _kernels
from fcir_lab._kernels import pure

needs_compiled = pytest.mark.skipif(
    _kernels.BACKEND != "compiled",
    reason="compiled kernel extension not built",
)


@pytest.fixture
def blocks():
    rng = np.random.default_rng(314)
    f = rng.standard_normal((7, 129))
    g = rng.standard_normal((7, 129))
    return np.ascontiguousarray(f), np.ascontiguousarray(g)


def test_cumtrapz_matches_trapezoid(blocks):
    f, _ = blocks
    dt = 0.01
    out = _kernels.cumtrapz(f, dt)
    assert out[:, 0] == pytest.approx(0.0)
    ref = np.trapezoid(f, dx=dt, axis=1)
    assert out[:, -1] == pytest.approx(ref, rel=1e-13)


def test_exp_weighted_integral_reduces_to_identity(blocks):
    f, _ = blocks
    w = np.ones(f.shape[1])
    out = _kernels.exp_weighted_integral(f, w, 0.0, 0.01)
    assert np.array_equal(out, f)


def test_midpoint_cumsum_telescopes(blocks):
    f, _ = blocks
    out = _kernels.midpoint_cumsum(f, f)
    ref = 0.5 * (f**2 - f[:, :1] ** 2)
    assert out == pytest.approx(ref, abs=1e-12)


def test_left_cumsum_constant_integrand(blocks):
    _, g = blocks
    f = np.full_like(g, 3.0)
    out = _kernels.left_cumsum(f, g)
    assert out[:, -1] == pytest.approx(3.0 * (g[:, -1] - g[:, 0]), rel=1e-12)


def test_first_nonpositive_edges():
    v = np.array([
        [1.0, 2.0, 3.0],     # never
        [1.0, -1.0, 5.0],    # at 1
        [1.0, 2.0, 0.0],     # exact zero at end
        [-1.0, 2.0, 3.0],    # start ignored (scan begins at 1)
    ])
    idx = _kernels.first_nonpositive(v)
    assert idx.tolist() == [-1, 1, 2, -1]
    assert _kernels.first_nonpositive(v[0]) == -1
    assert _kernels.first_nonpositive(v[1]) == 1
    # single-column input has nothing to scan
    assert pure.first_nonpositive(np.zeros((3, 1))).tolist() == [-1, -1, -1]
    assert _kernels.first_nonpositive(np.zeros((3, 1))).tolist() == [-1, -1, -1]


def test_row_extrema(blocks):
    f, _ = blocks
    lo, hi = _kernels.row_extrema(f)
    assert np.array_equal(lo, f.min(axis=1))
    assert np.array_equal(hi, f.max(axis=1))


def test_one_d_round_trip(blocks):
    f, g = blocks
    assert np.array_equal(_kernels.midpoint_cumsum(f[0], g[0]),
                          _kernels.midpoint_cumsum(f, g)[0])
    assert np.array_equal(_kernels.cumtrapz(f[0], 0.5),
                          _kernels.cumtrapz(f, 0.5)[0])


@needs_compiled
@pytest.mark.parametrize("n", [2, 3, 64, 1025])
def test_backends_bit_identical(n):
    rng = np.random.default_rng(n)
    f = np.ascontiguousarray(rng.standard_normal((5, n)))
    g = np.ascontiguousarray(rng.standard_normal((5, n)))
    w = np.exp(-0.7 * np.linspace(0.0, 1.0, n))
    dt = 1.0 / max(n - 1, 1)
    from fcir_lab._kernels import _native

    for args, fn in [
        ((f, w, 0.7, dt), "exp_weighted_integral"),
        ((f, dt), "cumtrapz"),
        ((f, g), "midpoint_cumsum"),
        ((f, g), "left_cumsum"),
    ]:
        a = getattr(_native, fn)(*args)
        b = getattr(pure, fn)(*args)
        assert np.array_equal(a, b), f"{fn} differs between backends"

    assert np.array_equal(_native.first_nonpositive(f), pure.first_nonpositive(f))
    lo_a, hi_a = _native.row_extrema(f)
    lo_b, hi_b = pure.row_extrema(f)
    assert np.array_equal(lo_a, lo_b) and np.array_equal(hi_a, hi_b)
