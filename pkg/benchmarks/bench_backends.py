"""Timing comparison of the compiled and pure-python update kernels.

Runs the three primitive operations on identical batched inputs, then an
end-to-end Gram matrix build per backend, and prints a small table.

Usage: python3 benchmarks/bench_backends.py [--batch 64] [--qubits 4]
"""

import argparse
import time

import numpy as np

from noisyq.backend import get_backend


def _random_batch(rng, batch, n):
    dim = 2**n
    g = rng.normal(size=(batch, dim, dim)) + 1j * rng.normal(size=(batch, dim, dim))
    rhos = g @ g.conj().transpose(0, 2, 1)
    tr = np.trace(rhos, axis1=1, axis2=2).real
    return (rhos / tr[:, None, None]).astype(np.complex128)


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_primitives(batch, n, repeats):
    rng = np.random.Generator(np.random.PCG64(0))
    theta = 0.7
    u = np.array([
        [np.cos(theta / 2), -1j * np.sin(theta / 2)],
        [-1j * np.sin(theta / 2), np.cos(theta / 2)],
    ])
    p = 0.1
    kraus = np.stack([
        np.sqrt(1 - 3 * p / 4) * np.eye(2, dtype=complex),
        np.sqrt(p / 4) * np.array([[0, 1], [1, 0]], dtype=complex),
        np.sqrt(p / 4) * np.array([[0, -1j], [1j, 0]]),
        np.sqrt(p / 4) * np.diag([1, -1]).astype(complex),
    ])

    rows = []
    for name in ("python", "compiled"):
        try:
            impl = get_backend(name)
        except (ImportError, ValueError) as exc:
            print(f"{name}: unavailable ({exc})")
            continue
        base = _random_batch(rng, batch, n)
        ops = {
            "1q unitary": lambda: impl.apply_1q_unitary(base.copy(), u, n // 2, n),
            "1q kraus x4": lambda: impl.apply_1q_kraus(base.copy(), kraus, n // 2, n),
            "cx": lambda: impl.apply_cx(base.copy(), 0, n - 1, n),
        }
        for op_name, fn in ops.items():
            fn()  # warm up
            rows.append((name, op_name, _time(fn, repeats)))
    return rows


def bench_gram(n_points, repeats):
    import os
    import subprocess
    import sys

    script = (
        "import time, numpy as np\n"
        "from noisyq import backend_name\n"
        "from noisyq.data import make_synthetic_benchmark\n"
        "from noisyq.kernels import FeatureMapKind, kernel_matrix\n"
        "train, _ = make_synthetic_benchmark(seed=0, n_train={n}, n_test=2)\n"
        "kernel_matrix(train.X[:4], FeatureMapKind.ZZ)\n"
        "best = float('inf')\n"
        "for _ in range({r}):\n"
        "    t0 = time.perf_counter()\n"
        "    kernel_matrix(train.X, FeatureMapKind.ZZ)\n"
        "    best = min(best, time.perf_counter() - t0)\n"
        "print(backend_name, best)\n"
    ).format(n=n_points, r=repeats)

    rows = []
    for name in ("python", "compiled"):
        env = dict(os.environ, NOISYQ_BACKEND=name)
        proc = subprocess.run([sys.executable, "-c", script], env=env,
                              capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"{name}: gram benchmark failed\n{proc.stderr}")
            continue
        used, secs = proc.stdout.split()
        rows.append((used, f"gram {n_points}x{n_points} zz", float(secs)))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=64)
    ap.add_argument("--qubits", type=int, default=4)
    ap.add_argument("--points", type=int, default=40)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rows = bench_primitives(args.batch, args.qubits, args.repeats)
    rows += bench_gram(args.points, max(2, args.repeats // 2))

    print(f"\nbatch={args.batch} qubits={args.qubits} (best of {args.repeats})")
    print(f"{'backend':10s} {'operation':22s} {'seconds':>10s}")
    by_op = {}
    for backend, op, secs in rows:
        print(f"{backend:10s} {op:22s} {secs:10.6f}")
        by_op.setdefault(op, {})[backend] = secs
    print()
    for op, t in by_op.items():
        if "python" in t and "compiled" in t and t["compiled"] > 0:
            print(f"{op:22s} speedup x{t['python'] / t['compiled']:.1f}")


if __name__ == "__main__":
    main()
