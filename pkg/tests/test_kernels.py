import os
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from steinlab import _kernels_py, kernels
from steinlab.szenum import _bounds

compiled = pytest.mark.skipif(kernels._compiled is None, reason="compiled kernel not built")


@compiled
@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_backends_agree_on_full_tree(d):
    sb, cb = _bounds(d, 2 ** (1 / d) * 1.01)
    for c1 in range(-cb[0], cb[0] + 1):
        a = kernels._compiled.enumerate_prefix(d, list(sb), list(cb), (c1,))
        b = _kernels_py.enumerate_prefix(d, sb, cb, (c1,))
        assert (list(a[0]), a[1]) == (list(b[0]), b[1])


@compiled
@given(st.integers(2, 5), st.floats(1.0, 1.6), st.data())
def test_backends_agree_random_prefix(d, a, data):
    sb, cb = _bounds(d, a)
    prefix = tuple(data.draw(st.integers(-cb[k], cb[k])) for k in range(data.draw(st.integers(1, 2))))
    x = kernels.enumerate_prefix(d, sb, cb, prefix, "cython")
    y = kernels.enumerate_prefix(d, sb, cb, prefix, "python")
    assert (list(x[0]), x[1]) == (list(y[0]), y[1])


def test_leaves_sorted_and_within_bounds():
    sb, cb = _bounds(3, 1.3)
    leaves, nodes = _kernels_py.enumerate_prefix(3, sb, cb, (0,))
    assert leaves == sorted(leaves) and nodes >= len(leaves)
    assert all(abs(c) <= b for t in leaves for c, b in zip(t, cb))


def test_int64_guard():
    assert kernels.fits_int64(5, [10] * 15, [10] * 5)
    assert not kernels.fits_int64(5, [2 ** 40] * 15, [2 ** 30] * 5)


def test_pure_python_env_selects_fallback():
    env = dict(os.environ, STEINLAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from steinlab import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    env = dict(os.environ, STEINLAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c",
                          "from steinlab.szenum import sz_margin; r = sz_margin(3); print(r.argmin, r.count)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "x^3 + x^2 - 1 25"
