"""Compare the numba and numpy backends of the batch kernels.

The backend is fixed at import time by AGGSIG_DISABLE_NUMBA, so each backend
runs in its own interpreter. Outputs are hashed and compared across backends.

    python benchmarks/bench_kernels.py [--sizes 10000,100000] [--repeat 3]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import hashlib, json, sys, time
import numpy as np
from aggsig import _kernels
from aggsig.aggregate import batch_rogue_forgeries

sizes, repeat = json.loads(sys.argv[1]), int(sys.argv[2])
out = {"backend": _kernels.BACKEND, "rows": []}
rng = np.random.default_rng(0)
for q in (101, 2**61 - 1):
    for n in sizes:
        a = rng.integers(0, q, n, dtype=np.uint64)
        b = rng.integers(0, q, n, dtype=np.uint64)
        h = rng.integers(0, q, (n, 3), dtype=np.uint64)
        k = rng.integers(0, q, (n, 3), dtype=np.uint64)
        cases = {
            "mulmod": lambda: _kernels.mulmod(a, b, q),
            "row_dot": lambda: _kernels.row_dot(h, k, q),
            "rogue_batch": lambda: batch_rogue_forgeries(q, a, b, k[:, 0]),
        }
        for name, fn in cases.items():
            fn()  # warm-up, includes compilation for numba
            times = []
            for _ in range(repeat):
                t = time.perf_counter()
                res = fn()
                times.append(time.perf_counter() - t)
            digest = hashlib.sha256(np.ascontiguousarray(res).tobytes()).hexdigest()[:16]
            out["rows"].append({"kernel": name, "q": q, "n": n, "seconds": min(times), "digest": digest})
print(json.dumps(out))
"""


def run_backend(disable: bool, sizes, repeat: int) -> dict:
    env = dict(os.environ, AGGSIG_DISABLE_NUMBA="1" if disable else "0")
    proc = subprocess.run([sys.executable, "-c", WORKER, json.dumps(sizes), str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="10000,100000,1000000")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",") if s]

    fast = run_backend(False, sizes, args.repeat)
    slow = run_backend(True, sizes, args.repeat)
    print(f"{'kernel':<12} {'q':>20} {'n':>9} {fast['backend']:>10} {slow['backend']:>10} {'speedup':>8}  same")
    mismatches = 0
    for f, s in zip(fast["rows"], slow["rows"]):
        same = f["digest"] == s["digest"]
        mismatches += not same
        print(f"{f['kernel']:<12} {f['q']:>20} {f['n']:>9} {f['seconds']:>10.4f} {s['seconds']:>10.4f} "
              f"{s['seconds'] / max(f['seconds'], 1e-9):>7.1f}x  {'yes' if same else 'NO'}")
    if fast["backend"] != "numba":
        print("numba is not importable here; both columns used the numpy fallback")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
