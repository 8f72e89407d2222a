"""Shared types, deterministic randomness and the bitstring conventions.

Bit ``q`` of a basis index is the state of qubit ``q`` (little-endian). In text
form a bitstring is written with qubit ``n-1`` leftmost, so ``"10"`` is the
index 2.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels

MAX_QUBITS = 30
DEFAULT_MEM_CAP_QUBITS = 26
_MASK64 = (1 << 64) - 1


class QslError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(QslError, ValueError):
    pass


class EmptyRequestError(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.field = field


class ResourceCapError(QslError, MemoryError):
    pass


# ------------------------------------------------------------------ PRNG --

def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Seed for worker/sub-stream ``index``: seed XOR splitmix64(index)."""
    return (int(seed) ^ splitmix64(int(index))) & _MASK64


class Prng:
    """xorshift64* generator (shifts 12/25/27, multiplier 0x2545F4914F6CDD1D).

    The seed is scrambled once with splitmix64 to form the 64-bit state, so
    small or zero seeds are fine. Doubles take the top 53 bits of each output.
    Streams are identical on every platform and on both kernel backends.
    """

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & _MASK64
        state = splitmix64(self.seed)
        self._state = np.uint64(state or 0x9E3779B97F4A7C15)

    def getstate(self) -> int:
        return int(self._state)

    def setstate(self, state: int) -> None:
        if not state:
            raise ValidationError("xorshift state must be nonzero")
        self._state = np.uint64(state)

    def bits(self, count: int) -> np.ndarray:
        out = np.empty(int(count), dtype=np.uint64)
        self._state = np.uint64(kernels.xorshift_fill(self._state, out))
        return out

    def next_u64(self) -> int:
        return int(self.bits(1)[0])

    def random(self, shape) -> np.ndarray:
        """Uniform doubles in [0, 1); ``shape`` is a count or a tuple."""
        dims = (int(shape),) if np.isscalar(shape) else tuple(int(v) for v in shape)
        return kernels.uniform_from_bits(self.bits(int(np.prod(dims)))).reshape(dims)

    def integers(self, high: int, count: int) -> np.ndarray:
        """Integers in [0, high) as floor(u * high)."""
        return (self.random(count) * high).astype(np.int64)

    def exponential(self, count: int) -> np.ndarray:
        return -np.log1p(-self.random(count))

    def spawn(self, index: int) -> "Prng":
        return Prng(derive_seed(self.seed, index))


# ----------------------------------------------------------------- types --

def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ExplicitDistribution:
    n: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        if not 0 <= self.n <= MAX_QUBITS:
            raise ValidationError(f"qubit count {self.n} outside [0, {MAX_QUBITS}]")
        if probs.shape != (1 << self.n,):
            raise ValidationError(f"expected {1 << self.n} probabilities, got shape {probs.shape}")
        if not np.all(np.isfinite(probs)) or probs.min() < 0:
            raise ValidationError("probabilities must be finite and nonnegative")
        total = probs.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probs", _frozen(probs))

    @classmethod
    def from_weights(cls, n: int, weights) -> "ExplicitDistribution":
        w = np.asarray(weights, dtype=np.float64)
        return cls(n, w / w.sum())

    @classmethod
    def uniform(cls, n: int) -> "ExplicitDistribution":
        return cls(n, np.full(1 << n, 1.0 / (1 << n)))

    @classmethod
    def point_mass(cls, n: int, index: int) -> "ExplicitDistribution":
        p = np.zeros(1 << n)
        p[index] = 1.0
        return cls(n, p)

    def __eq__(self, other):
        if not isinstance(other, ExplicitDistribution):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.probs, other.probs)


@dataclass(frozen=True, eq=False)
class SampleSet:
    n: int
    samples: np.ndarray
    source_tag: str = ""
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.array(self.samples, dtype=np.int64).reshape(-1)
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValidationError(f"qubit count {self.n} outside [1, {MAX_QUBITS}]")
        if s.size and (s.min() < 0 or s.max() >= (1 << self.n)):
            raise ValidationError(f"sample outside width {self.n}")
        object.__setattr__(self, "samples", _frozen(s))

    def __len__(self):
        return self.samples.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SampleSet):
            return NotImplemented
        return (self.n == other.n and self.source_tag == other.source_tag
                and self.seed == other.seed and np.array_equal(self.samples, other.samples))

    def counts(self) -> np.ndarray:
        return np.bincount(self.samples, minlength=1 << self.n)


def check_qubit_cap(n: int, cap_qubits: int | None = None, mem_cap_gib: float | None = None,
                    bytes_per_entry: int = 16) -> None:
    """Refuse explicit 2^n arrays above the configured cap (default n <= 26)."""
    if mem_cap_gib is not None:
        if bytes_per_entry * (1 << n) > mem_cap_gib * (1 << 30):
            raise ResourceCapError(
                f"n={n} needs {bytes_per_entry * (1 << n) / (1 << 30):.2f} GiB, cap is {mem_cap_gib} GiB")
        return
    cap = DEFAULT_MEM_CAP_QUBITS if cap_qubits is None else cap_qubits
    if n > cap:
        raise ResourceCapError(f"n={n} exceeds the explicit-array cap of {cap} qubits")


# ------------------------------------------------------------- sampling --

def _draw(cdf: np.ndarray, total: float, u: np.ndarray) -> np.ndarray:
    # side="right" never lands on a zero-probability bin for u*total < total.
    idx = np.searchsorted(cdf, u * total, side="right")
    return np.minimum(idx, cdf.shape[0] - 1)


def sample_from_distribution(dist: ExplicitDistribution, count: int, rng: Prng,
                             source_tag: str = "sampled") -> SampleSet:
    """``count`` i.i.d. draws by inverse CDF with binary search."""
    if count < 1:
        raise EmptyRequestError("sample count must be at least 1")
    probs = np.asarray(dist.probs)
    if abs(probs.sum() - 1.0) > 1e-9 or probs.min() < 0:
        raise ValidationError("distribution is not normalized")
    cdf = np.cumsum(probs)
    samples = _draw(cdf, cdf[-1], rng.random(count))
    return SampleSet(dist.n, samples, source_tag=source_tag, seed=rng.seed)


def split_counts(count: int, workers: int) -> list[int]:
    base, extra = divmod(count, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def sample_parallel(dist: ExplicitDistribution, count: int, seed: int, workers: int = 1,
                    source_tag: str = "sampled") -> SampleSet:
    """Worker ``w`` draws its share with ``derive_seed(seed, w)``; results are
    concatenated in worker order. Output depends on ``workers`` but not on
    scheduling."""
    if count < 1:
        raise EmptyRequestError("sample count must be at least 1")
    workers = max(1, int(workers))
    shares = split_counts(count, workers)

    def run(w):
        if shares[w] == 0:
            return np.empty(0, dtype=np.int64)
        return sample_from_distribution(dist, shares[w], Prng(derive_seed(seed, w))).samples

    if workers == 1:
        parts = [run(0)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(workers)))
    return SampleSet(dist.n, np.concatenate(parts), source_tag=source_tag, seed=seed,
                     meta={"workers": workers})


def empirical_distribution(samples: SampleSet) -> ExplicitDistribution:
    if len(samples) == 0:
        raise EmptyRequestError("cannot build an empirical distribution from no samples")
    check_qubit_cap(samples.n)
    return ExplicitDistribution(samples.n, samples.counts() / len(samples))


# ---------------------------------------------------------- sample files --

def format_bitstring(value: int, n: int) -> str:
    return format(int(value), f"0{n}b")


def write_samples(path: str | os.PathLike, samples: SampleSet) -> None:
    """One bitstring per line, qubit n-1 leftmost, LF endings, no header."""
    fmt = f"0{samples.n}b"
    text = "".join(format(int(s), fmt) + "\n" for s in samples.samples)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def parse_samples(text: str, n: int | None = None, source_tag: str = "file") -> SampleSet:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("sample file is empty")
    width = len(lines[0]) if n is None else n
    values = np.empty(len(lines), dtype=np.int64)
    for i, line in enumerate(lines):
        if len(line) != width:
            raise ParseError(f"expected {width} characters, got {len(line)}", line=i + 1)
        if line.strip("01"):
            raise ParseError(f"invalid character in {line!r}", line=i + 1)
        values[i] = int(line, 2)
    return SampleSet(width, values, source_tag=source_tag)


def read_samples(path: str | os.PathLike, n: int | None = None) -> SampleSet:
    with open(path, newline="") as fh:
        text = fh.read()
    if "\r" in text:
        raise ParseError("sample files must use LF line endings")
    return parse_samples(text, n=n, source_tag=os.path.basename(str(path)))
