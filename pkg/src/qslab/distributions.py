"""Porter-Thomas distributions and the orderings that make them (un)learnable."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (EmptyRequestError, ExplicitDistribution, Prng, SampleSet,
                   ValidationError, check_qubit_cap, derive_seed,
                   sample_from_distribution)


@dataclass(frozen=True)
class SubsetMask:
    n: int
    y: int

    def __post_init__(self):
        if not 0 <= self.y < (1 << self.n):
            raise ValidationError(f"mask {self.y} does not fit in {self.n} bits")

    @property
    def m(self) -> int:
        return bin(self.y).count("1")

    def parity(self, k: np.ndarray) -> np.ndarray:
        """popcount(k & y) mod 2, elementwise."""
        v = np.asarray(k, dtype=np.int64) & self.y
        p = np.zeros(v.shape, dtype=np.int64)
        while np.any(v):
            p ^= v & 1
            v = v >> 1
        return p


@dataclass(frozen=True)
class IntegerOrder:
    tag = "integer"


@dataclass(frozen=True)
class SubsetParityOrder:
    mask: SubsetMask

    @property
    def tag(self) -> str:
        return f"parity{self.mask.m}"


@dataclass(frozen=True)
class RandomPermutation:
    seed: int

    @property
    def tag(self) -> str:
        return f"perm{self.seed}"


Ordering = IntegerOrder | SubsetParityOrder | RandomPermutation


def porter_thomas_probs(n: int, rng: Prng) -> ExplicitDistribution:
    """2^n i.i.d. unit exponentials, normalised."""
    if n < 1:
        raise ValidationError("n must be at least 1")
    check_qubit_cap(n, bytes_per_entry=8)
    w = rng.exponential(1 << n)
    return ExplicitDistribution(n, w / w.sum())


def random_mask(n: int, m: int, rng: Prng) -> SubsetMask:
    """A mask with exactly m of the n bits set, chosen uniformly."""
    if not 0 <= m <= n:
        raise ValidationError(f"mask bit count {m} must be in [0, {n}]")
    perm = np.arange(n, dtype=np.int64)
    kernels.shuffle(perm, rng.random(n))
    return SubsetMask(n, int(sum(1 << int(b) for b in perm[:m])))


def permutation(size: int, seed: int) -> np.ndarray:
    """Fisher-Yates permutation of range(size) from ``seed``."""
    perm = np.arange(size, dtype=np.int64)
    kernels.shuffle(perm, Prng(seed).random(size))
    return perm


def rank_order(n: int, ordering: Ordering) -> np.ndarray:
    """Bitstring that receives the r-th largest probability, for each rank r."""
    size = 1 << n
    idx = np.arange(size, dtype=np.int64)
    if isinstance(ordering, IntegerOrder):
        return idx
    if isinstance(ordering, SubsetParityOrder):
        if ordering.mask.n != n:
            raise ValidationError(f"mask width {ordering.mask.n} != distribution width {n}")
        odd = ordering.mask.parity(idx).astype(bool)
        return np.concatenate([idx[~odd], idx[odd]])  # stable partition
    if isinstance(ordering, RandomPermutation):
        return permutation(size, ordering.seed)
    raise ValidationError(f"unknown ordering {ordering!r}")


def apply_ordering(dist: ExplicitDistribution, ordering: Ordering) -> ExplicitDistribution:
    """Reassign the probability values: sort descending and give the r-th
    largest to ``rank_order(n, ordering)[r]``.

    For RandomPermutation this means new[perm[r]] = sorted[r], i.e. a uniformly
    random bijection applied to the integer-ordered distribution.
    """
    ranked = np.sort(np.asarray(dist.probs))[::-1]
    out = np.empty_like(ranked)
    out[rank_order(dist.n, ordering)] = ranked
    return ExplicitDistribution(dist.n, out)


def dataset_name(n: int, ordering: Ordering, seed: int) -> str:
    return f"q{n:02d}_{ordering.tag}_s{seed}"


def make_dataset(n: int, ordering: Ordering, sample_count: int, seed: int
                 ) -> tuple[ExplicitDistribution, SampleSet]:
    """PT probabilities from derive_seed(seed, 0), ordered, then sampled with
    derive_seed(seed, 1). All seeds land in the sample metadata."""
    if sample_count < 1:
        raise EmptyRequestError("sample count must be at least 1")
    pt_seed, sample_seed = derive_seed(seed, 0), derive_seed(seed, 1)
    dist = apply_ordering(porter_thomas_probs(n, Prng(pt_seed)), ordering)
    s = sample_from_distribution(dist, sample_count, Prng(sample_seed), source_tag=dataset_name(n, ordering, seed))
    meta = {"seed": seed, "pt_seed": pt_seed, "sample_seed": sample_seed, "ordering": ordering.tag}
    if isinstance(ordering, SubsetParityOrder):
        meta["mask"] = ordering.mask.y
    if isinstance(ordering, RandomPermutation):
        meta["perm_seed"] = ordering.seed
    return dist, SampleSet(n, s.samples, source_tag=s.source_tag, seed=seed, meta=meta)
