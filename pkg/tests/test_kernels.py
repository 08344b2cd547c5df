import os
import subprocess
import sys

import numpy as np
import pytest

from chebyshev_a3 import _kernels, _pykernels, torus
from chebyshev_a3.poly import build_map

try:
    from chebyshev_a3 import _ckernels
except ImportError:  # pragma: no cover - extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


def _points(rng, n):
    return rng.normal(size=(n, 3)) + 1j * rng.normal(size=(n, 3))


@needs_ext
@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_poly_eval_backends_agree(rng, d):
    cube = build_map(d)._cube
    z = np.ascontiguousarray(_points(rng, 500))
    a = _ckernels.poly_eval(cube, z)
    b = _pykernels.poly_eval(cube, z)
    assert np.abs(a - b).max() <= 1e-12 * np.abs(b).max()


@needs_ext
@pytest.mark.parametrize("d", [2, 4])
def test_homogeneous_backends_agree(rng, d):
    cube = build_map(d)._cube
    Z = np.ascontiguousarray(rng.normal(size=(300, 4)) + 1j * rng.normal(size=(300, 4)))
    a = _ckernels.homogeneous_eval(cube, Z)
    b = _pykernels.homogeneous_eval(cube, Z)
    assert np.abs(a - b).max() <= 1e-12 * np.abs(b).max()


@needs_ext
def test_fold_backends_agree(rng):
    s = np.ascontiguousarray(rng.uniform(-30, 30, (2000, 3)))
    a, ca = _ckernels.fold_batch(s)
    b, cb = _pykernels.fold_batch(s)
    assert np.abs(np.asarray(a) - b).max() < 1e-12
    assert np.array_equal(np.asarray(ca), cb)
    _, short = _ckernels.fold_batch(np.array([[500.0, 0, 0]]), 2)
    assert np.asarray(short)[0] == -1


def test_dispatch_names_backend():
    assert _kernels.BACKEND in ("cython", "python")
    if _ckernels is not None:
        assert _kernels.BACKEND == "cython"


def test_pure_env_forces_python():
    env = dict(os.environ, CHEBYSHEV_A3_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "import chebyshev_a3; print(chebyshev_a3.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def test_fold_batch_public_api(rng):
    s = rng.uniform(-10, 10, (50, 3))
    f = torus.fold_batch(s)
    assert np.all(torus.in_alcove(f, 1e-10))
