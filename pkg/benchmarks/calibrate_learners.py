"""Calibration run behind the learnability thresholds in the acceptance suite.

    python3 benchmarks/calibrate_learners.py [--seeds 5]

Prints XEB fidelity per seed for AR(4) on ordered and randomly permuted
Porter-Thomas data at n=20, and for the full-order AR and product models on
n=12 depth-14 circuit data. Every run uses 500000 training samples and 200000
model samples.
"""

import argparse

import numpy as np

from qslab.circuit import random_circuit
from qslab.core import Prng, derive_seed, sample_from_distribution
from qslab.distributions import IntegerOrder, RandomPermutation, make_dataset
from qslab.learner import fit_ar, fit_product, model_sample
from qslab.metrics import xeb
from qslab.simulator import output_distribution

TRAIN = 500_000
DRAWS = 200_000


def fidelity(model, truth, seed):
    return xeb(model_sample(model, DRAWS, Prng(seed)), truth).fidelity


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args(argv)
    cols = ["ar4_integer_n20", "ar4_permuted_n20", "ar_full_circuit_n12", "product_circuit_n12"]
    table = []
    print("seed," + ",".join(cols))
    for s in range(args.seeds):
        base = derive_seed(5000, s)
        ordered, s_ord = make_dataset(20, IntegerOrder(), TRAIN, seed=base)
        shuffled, s_shuf = make_dataset(20, RandomPermutation(s), TRAIN, seed=base)
        truth = output_distribution(random_circuit(12, 14, rng=Prng(derive_seed(base, 7))))
        train = sample_from_distribution(truth, TRAIN, Prng(derive_seed(base, 8)))
        row = [fidelity(fit_ar(s_ord, 4), ordered, 1),
               fidelity(fit_ar(s_shuf, 4), shuffled, 2),
               fidelity(fit_ar(train, 11), truth, 3),
               fidelity(fit_product(train), truth, 4)]
        table.append(row)
        print(f"{s}," + ",".join(f"{v:.4f}" for v in row), flush=True)
    arr = np.array(table)
    print("min," + ",".join(f"{v:.4f}" for v in arr.min(axis=0)))
    print("max," + ",".join(f"{v:.4f}" for v in arr.max(axis=0)))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
