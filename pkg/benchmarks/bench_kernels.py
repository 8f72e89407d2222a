"""Time every kernel in its numba and numpy flavour and check they agree.

    python3 benchmarks/bench_kernels.py [--qubits 20] [--repeat 5] [--csv out.csv]

The numba column includes no compile time: each kernel runs once before
timing. Agreement is checked on the warm-up outputs.
"""

import argparse
import csv
import sys
import time

import numpy as np

from qslab import kernels
from qslab._accel import HAVE_NUMBA
from qslab.circuit import FSim, gate_matrix, u1_matrix
from qslab.core import Prng
from qslab.learner import _offsets


def cases(n_qubits: int, rng: Prng):
    psi = rng.random(1 << n_qubits) + 1j * rng.random(1 << n_qubits)
    psi /= np.linalg.norm(psi)
    single = u1_matrix(np.pi / 2, np.pi / 4)
    pair = gate_matrix(FSim())
    samples = rng.integers(1 << 16, 200_000)
    off = _offsets(16, 6)
    p1 = rng.random(int(off[-1]))
    u_gen = rng.random((50_000, 16))
    u_perm = rng.random(1 << 18)
    probs = rng.random(1 << n_qubits)
    hfield = (rng.random(14) - 0.5) + 1j * (rng.random(14) - 0.5)
    dfield = (rng.random(6) - 0.5) + 1j * (rng.random(6) - 0.5)
    wp = (rng.random((14, 6)) - 0.5) * 0.3 + 0j

    def ar_counts(fn):
        ones = np.zeros(int(off[-1]), np.int64)
        totals = np.zeros(int(off[-1]), np.int64)
        fn(samples, 16, 6, off, ones, totals)
        return np.concatenate([ones, totals])

    def ar_generate(fn):
        out = np.empty(u_gen.shape[0], np.int64)
        fn(p1, off, 16, 6, u_gen, out)
        return out

    def fill(fn):
        out = np.empty(1 << 20, np.uint64)
        fn(np.uint64(0x9E3779B97F4A7C15), out)
        return out

    def one_q(fn):
        v = psi.copy()
        for q in range(n_qubits):
            fn(v, q, single)
        return v

    def two_q(fn):
        v = psi.copy()
        for q in range(n_qubits - 1):
            fn(v, q, q + 1, pair)
        return v

    def shuffle(fn):
        perm = np.arange(u_perm.shape[0], dtype=np.int64)
        fn(perm, u_perm)
        return perm

    def fwht(fn):
        a = probs.copy()
        fn(a)
        return a

    def latent(fn):
        return np.array([fn(hfield, dfield, wp)])

    return [
        ("xorshift_fill 2^20 words", "xorshift_fill", fill, True),
        (f"apply_1q all {n_qubits} qubits", "apply_1q", one_q, False),
        (f"apply_2q {n_qubits - 1} chain pairs", "apply_2q", two_q, False),
        ("shuffle 2^18", "shuffle", shuffle, True),
        (f"fwht 2^{n_qubits}", "fwht", fwht, False),
        ("ar_counts n=16 k=6 200k samples", "ar_counts", ar_counts, True),
        ("ar_generate n=16 k=6 50k draws", "ar_generate", ar_generate, True),
        ("latent_sum 14 hidden x 6 deep", "latent_sum", latent, False),
    ]


def best_time(run, fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        run(fn)
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--qubits", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not installed; nothing to compare", file=sys.stderr)
        return 1

    rows = []
    print(f"{'kernel':40s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}  agree")
    for label, name, run, exact in cases(args.qubits, Prng(1)):
        fast = getattr(kernels, name + "_numba")
        slow = getattr(kernels, name + "_numpy")
        a, b = run(fast), run(slow)
        agree = np.array_equal(a, b) if exact else np.allclose(a, b, rtol=1e-10, atol=1e-12)
        t_fast = best_time(run, fast, args.repeat)
        t_slow = best_time(run, slow, max(1, args.repeat // 2))
        rows.append((name, label, t_fast * 1e3, t_slow * 1e3, t_slow / t_fast, agree))
        print(f"{label:40s} {t_fast * 1e3:10.2f} {t_slow * 1e3:10.2f} {t_slow / t_fast:8.1f}  "
              f"{'exact' if exact and agree else 'yes' if agree else 'NO'}")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kernel", "case", "numba_ms", "numpy_ms", "speedup", "agree"])
            w.writerows(rows)
    return 0 if all(r[-1] for r in rows) else 2


if __name__ == "__main__":
    sys.exit(main())
