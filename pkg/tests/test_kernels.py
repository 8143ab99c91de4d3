import os
import random
import subprocess
import sys

import numpy as np

from aggsig import _kernels


def _ref(a, b, q):
    return [(x * y) % q for x, y in zip(a, b)]


def test_mulmod_large_modulus():
    rng = random.Random(0)
    q = (1 << 61) - 1
    a = [rng.randrange(q) for _ in range(500)] + [q - 1, 0]
    b = [rng.randrange(q) for _ in range(500)] + [q - 1, q - 1]
    got = _kernels.mulmod(a, b, q)
    assert [int(x) for x in got] == _ref(a, b, q)


def test_mulmod_near_limit():
    q = (1 << 63) - 25  # prime just under the limit
    a = [q - 1, q - 2, 12345678901234567]
    b = [q - 1, 3, q - 7]
    assert [int(x) for x in _kernels.mulmod(a, b, q)] == _ref(a, b, q)


def test_row_dot():
    rng = random.Random(4)
    q = 101
    h = np.array([[rng.randrange(q) for _ in range(3)] for _ in range(50)], dtype=np.uint64)
    k = np.array([[rng.randrange(q) for _ in range(3)] for _ in range(50)], dtype=np.uint64)
    ref = [sum(int(x) * int(y) for x, y in zip(hr, kr)) % q for hr, kr in zip(h, k)]
    assert [int(x) for x in _kernels.row_dot(h, k, q)] == ref


def test_numpy_fallback_matches_numba():
    rng = random.Random(9)
    q = (1 << 61) - 1
    a = np.array([rng.randrange(q) for _ in range(300)], dtype=np.uint64)
    b = np.array([rng.randrange(q) for _ in range(300)], dtype=np.uint64)
    np_res = _kernels._mulmod_np(a, b, np.uint64(q))
    assert [int(x) for x in np_res] == _ref(a.tolist(), b.tolist(), q)
    assert np.array_equal(np_res, _kernels.mulmod(a, b, q))


def test_env_flag_selects_fallback():
    code = "import aggsig._kernels as k; print(k.BACKEND)"
    env = dict(os.environ, AGGSIG_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
