"""Schrödinger state-vector simulation and distribution files.

Amplitudes live in a complex128 array (interleaved 64-bit re/im in memory).
Gates are applied in place, one pass per gate, by the kernels in
:mod:`qslab.kernels`; results do not depend on the worker count because every
amplitude is written exactly once per gate.
"""

from __future__ import annotations

import io
import os
import struct
from dataclasses import dataclass

import numpy as np

from . import kernels
from .circuit import Circuit, gate_matrix
from .core import (ExplicitDistribution, ParseError, ValidationError,
                   check_qubit_cap)

QSLD_MAGIC = b"QSLD"
QSLD_VERSION = 1
CSV_MAX_QUBITS = 16


class StateVector:
    """2^n complex amplitudes; mutated in place by the ``apply_*`` functions."""

    def __init__(self, n: int, amps: np.ndarray | None = None):
        self.n = n
        if amps is None:
            amps = np.zeros(1 << n, dtype=np.complex128)
            amps[0] = 1.0
        amps = np.ascontiguousarray(amps, dtype=np.complex128)
        if amps.shape != (1 << n,):
            raise ValidationError(f"expected {1 << n} amplitudes, got {amps.shape}")
        self.amps = amps

    @classmethod
    def zero(cls, n: int, cap_qubits: int | None = None, mem_cap_gib: float | None = None):
        check_qubit_cap(n, cap_qubits, mem_cap_gib)
        return cls(n)

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def probabilities(self) -> np.ndarray:
        return self.amps.real ** 2 + self.amps.imag ** 2


@dataclass(frozen=True)
class NoiseModel:
    fidelity_f: float

    def __post_init__(self):
        if not 0.0 <= self.fidelity_f <= 1.0:
            raise ValidationError(f"noise fidelity {self.fidelity_f} outside [0, 1]")


def apply_single_qubit(state: StateVector, q: int, m: np.ndarray) -> StateVector:
    if not 0 <= q < state.n:
        raise IndexError(f"qubit {q} out of range for n={state.n}")
    kernels.apply_1q(state.amps, q, np.ascontiguousarray(m, dtype=np.complex128))
    return state


def apply_two_qubit(state: StateVector, q1: int, q2: int, m: np.ndarray) -> StateVector:
    """Apply a 4x4 ``m`` with row/column index ``bit(q1) + 2*bit(q2)``.

    Requires q1 < q2, as in the gather/scatter loop ``v[l], v[l+2^q1],
    v[l+2^q2], v[l+2^q1+2^q2]``. Use :func:`apply_pair` for unordered pairs.
    """
    if q1 == q2:
        raise IndexError("two-qubit gate needs distinct qubits")
    if not (0 <= q1 < q2 < state.n):
        raise IndexError(f"qubits ({q1}, {q2}) must satisfy 0 <= q1 < q2 < {state.n}")
    kernels.apply_2q(state.amps, q1, q2, np.ascontiguousarray(m, dtype=np.complex128))
    return state


def swap_qubit_roles(m: np.ndarray) -> np.ndarray:
    """Re-index a 4x4 gate so its two qubits trade places."""
    perm = [0, 2, 1, 3]
    return m[np.ix_(perm, perm)]


def apply_pair(state: StateVector, qa: int, qb: int, m: np.ndarray) -> StateVector:
    """Apply ``m`` where ``qa`` is the low-order qubit of the matrix index."""
    if qa < qb:
        return apply_two_qubit(state, qa, qb, m)
    return apply_two_qubit(state, qb, qa, swap_qubit_roles(m))


def simulate(c: Circuit, cap_qubits: int | None = None, mem_cap_gib: float | None = None,
             initial: StateVector | None = None) -> StateVector:
    """Start from |0...0> and apply each cycle: the single-qubit layer, then
    the two-qubit layer."""
    state = initial.copy() if initial is not None else StateVector.zero(c.n, cap_qubits, mem_cap_gib)
    mats: dict = {}

    def mat(g):
        if g not in mats:
            mats[g] = gate_matrix(g)
        return mats[g]

    for cyc in c.cycles:
        for q, g in enumerate(cyc.singles):
            apply_single_qubit(state, q, mat(g))
        for i, j, g in cyc.pairs:
            apply_two_qubit(state, i, j, mat(g))
    return state


def output_distribution(c: Circuit, cap_qubits: int | None = None,
                        mem_cap_gib: float | None = None) -> ExplicitDistribution:
    state = simulate(c, cap_qubits, mem_cap_gib)
    probs = state.probabilities()
    # Renormalise away the ~1e-15 rounding drift; the guard catches real bugs.
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValidationError(f"state norm drifted to {total!r}")
    return ExplicitDistribution(c.n, probs / total)


def apply_noise(dist: ExplicitDistribution, noise: NoiseModel) -> ExplicitDistribution:
    """f * P + (1 - f) * uniform."""
    f = noise.fidelity_f
    mixed = f * np.asarray(dist.probs) + (1.0 - f) / (1 << dist.n)
    return ExplicitDistribution(dist.n, mixed)


# ------------------------------------------------------ distribution files --

def dump_qsld(dist: ExplicitDistribution) -> bytes:
    header = QSLD_MAGIC + struct.pack("<BB", QSLD_VERSION, dist.n)
    return header + np.asarray(dist.probs, dtype="<f8").tobytes()


def load_qsld(data: bytes) -> ExplicitDistribution:
    if len(data) < 6 or data[:4] != QSLD_MAGIC:
        raise ParseError("not a QSLD distribution file (bad magic)")
    version, n = struct.unpack("<BB", data[4:6])
    if version != QSLD_VERSION:
        raise ParseError(f"unsupported QSLD version {version}")
    body = data[6:]
    if len(body) != 8 << n:
        raise ParseError(f"QSLD body has {len(body)} bytes, expected {8 << n} for n={n}")
    return ExplicitDistribution(n, np.frombuffer(body, dtype="<f8").astype(np.float64))


def write_distribution(path: str | os.PathLike, dist: ExplicitDistribution) -> None:
    if str(path).endswith(".csv"):
        with open(path, "w", newline="\n") as fh:
            fh.write(dump_csv(dist))
    else:
        with open(path, "wb") as fh:
            fh.write(dump_qsld(dist))


def read_distribution(path: str | os.PathLike) -> ExplicitDistribution:
    if str(path).endswith(".csv"):
        with open(path) as fh:
            return load_csv(fh.read())
    with open(path, "rb") as fh:
        return load_qsld(fh.read())


def dump_csv(dist: ExplicitDistribution) -> str:
    if dist.n > CSV_MAX_QUBITS:
        raise ValidationError(f"CSV distribution files are limited to n <= {CSV_MAX_QUBITS}")
    buf = io.StringIO()
    buf.write("index,probability\n")
    for i, p in enumerate(dist.probs):
        buf.write(f"{i},{float(p)!r}\n")
    return buf.getvalue()


def load_csv(text: str) -> ExplicitDistribution:
    lines = text.strip().split("\n")
    if not lines or lines[0].strip() != "index,probability":
        raise ParseError("missing 'index,probability' header", line=1)
    probs = []
    for ln, line in enumerate(lines[1:], start=2):
        try:
            idx, p = line.split(",")
            if int(idx) != len(probs):
                raise ParseError(f"expected index {len(probs)}", line=ln)
            probs.append(float(p))
        except ValueError:
            raise ParseError(f"malformed row {line!r}", line=ln) from None
    n = len(probs).bit_length() - 1
    if 1 << n != len(probs):
        raise ParseError(f"{len(probs)} rows is not a power of two")
    return ExplicitDistribution(n, np.array(probs))
