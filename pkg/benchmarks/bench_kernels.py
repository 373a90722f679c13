"""Time the numba kernels against the pure-numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat N]

The script times every workload in the current process, then re-runs itself
with ``GATEFORGE_DISABLE_NUMBA=1`` and prints both columns side by side.
Numba timings exclude compilation: each kernel is called once before timing.
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from gateforge import kernels
from gateforge._accel import BACKEND


def _hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def workloads():
    rng = np.random.default_rng(0)
    h8, h16 = _hermitian(rng, 8), _hermitian(rng, 16)
    coeffs = rng.normal(size=64).astype(np.complex128)
    terms = np.array([_hermitian(rng, 8) for _ in range(3)])
    weights = rng.uniform(size=(256, 3))
    return {
        "expm_herm d=8": lambda: kernels.expm_herm(h8, 1.0),
        "expm_herm d=16": lambda: kernels.expm_herm(h16, 1.0),
        "schur d=16": lambda: kernels.schur(h16),
        "pauli_coefficients n=3": lambda: kernels.pauli_coefficients(h8, 3),
        "pauli_matrix n=3": lambda: kernels.pauli_matrix(coeffs, 3),
        "time_ordered_product 256 steps": lambda: kernels.time_ordered_product(terms, weights, 1 / 256),
    }


def measure(repeat):
    out = {}
    for name, fn in workloads().items():
        fn()
        timer = timeit.Timer(fn)
        number, _ = timer.autorange()
        out[name] = min(timer.repeat(repeat, number)) / number
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--json", action="store_true", help="print this backend's timings as JSON")
    args = parser.parse_args(argv)
    own = measure(args.repeat)
    if args.json:
        print(json.dumps({"backend": BACKEND, "seconds": own}))
        return 0
    env = dict(os.environ, GATEFORGE_DISABLE_NUMBA="1")
    proc = subprocess.run([sys.executable, __file__, "--json", "--repeat", str(args.repeat)],
                          env=env, capture_output=True, text=True, check=True)
    fallback = json.loads(proc.stdout)["seconds"]
    if BACKEND != "numba":
        print("numba is unavailable or disabled; both columns use the numpy fallback")
    print(f"{'workload':34s} {BACKEND + ' (us)':>12s} {'numpy (us)':>12s} {'speedup':>8s}")
    for name, t in own.items():
        print(f"{name:34s} {t * 1e6:12.1f} {fallback[name] * 1e6:12.1f} {fallback[name] / t:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
