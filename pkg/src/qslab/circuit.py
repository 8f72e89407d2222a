"""Gates, random circuits in interlaced-cycle form, and the circuit JSON file."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import ParseError, Prng, ValidationError

SINGLE_KINDS = ("sqrt_x", "sqrt_y", "sqrt_w")
TWO_QUBIT_KINDS = ("cz", "fsim")
FORMAT_VERSION = 1

DEFAULT_FSIM_THETA = math.pi / 2
DEFAULT_FSIM_PHI = math.pi / 6


@dataclass(frozen=True)
class Gate:
    """A gate kind plus its angles (radians); fixed gates ignore the angles."""

    kind: str
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if self.kind not in SINGLE_KINDS + TWO_QUBIT_KINDS + ("u1",):
            raise ValidationError(f"unknown gate kind {self.kind!r}")

    @property
    def arity(self) -> int:
        return 2 if self.kind in TWO_QUBIT_KINDS else 1

    def rotation(self) -> tuple[float, float]:
        """(theta, phi) with matrix == U1(theta, phi), for single-qubit gates."""
        if self.kind == "u1":
            return self.theta, self.phi
        return math.pi / 2, {"sqrt_x": 0.0, "sqrt_y": math.pi / 2, "sqrt_w": math.pi / 4}[self.kind]


SQRT_X = Gate("sqrt_x")
SQRT_Y = Gate("sqrt_y")
SQRT_W = Gate("sqrt_w")
CZ = Gate("cz")


def U1(theta: float, phi: float) -> Gate:
    return Gate("u1", theta, phi)


def FSim(theta: float = DEFAULT_FSIM_THETA, phi: float = DEFAULT_FSIM_PHI) -> Gate:
    return Gate("fsim", theta, phi)


def u1_matrix(theta: float, phi: float) -> np.ndarray:
    """exp(-i theta/2 (cos phi X + sin phi Y))."""
    c = math.cos(theta / 2)
    s = math.sin(theta / 2)
    return np.array([[c, -1j * s * np.exp(-1j * phi)],
                     [-1j * s * np.exp(1j * phi), c]], dtype=np.complex128)


_R = 1 / math.sqrt(2)
_FIXED = {
    "sqrt_x": np.array([[_R, -1j * _R], [-1j * _R, _R]], dtype=np.complex128),
    "sqrt_y": np.array([[_R, -_R], [_R, _R]], dtype=np.complex128),
    # -sqrt(i) above the diagonal, sqrt(-i) below it
    "sqrt_w": np.array([[_R, -_R * np.exp(1j * math.pi / 4)],
                        [_R * np.exp(-1j * math.pi / 4), _R]], dtype=np.complex128),
    "cz": np.diag([1, 1, 1, -1]).astype(np.complex128),
}


def fsim_matrix(theta: float, phi: float) -> np.ndarray:
    c = math.cos(theta)
    s = math.sin(theta)
    return np.array([[1, 0, 0, 0],
                     [0, c, -1j * s, 0],
                     [0, -1j * s, c, 0],
                     [0, 0, 0, np.exp(-1j * phi)]], dtype=np.complex128)


def gate_matrix(g: Gate) -> np.ndarray:
    """Unitary of ``g``. Two-qubit matrices use row index 2*b_hi + b_lo."""
    if g.kind == "u1":
        return u1_matrix(g.theta, g.phi)
    if g.kind == "fsim":
        return fsim_matrix(g.theta, g.phi)
    return _FIXED[g.kind].copy()


# --------------------------------------------------------- connectivity --

@dataclass(frozen=True)
class Connectivity:
    """Coupler layout plus the per-cycle pattern schedule.

    ``chain``: patterns "A" (pairs (0,1),(2,3),...) and "B" ((1,2),(3,4),...).
    ``grid``: qubit r*cols+c; "A"/"B" horizontal pairs starting at even/odd
    columns, "C"/"D" vertical pairs starting at even/odd rows. Cycle ``i`` uses
    ``schedule[i % len(schedule)]``.
    """

    kind: str = "chain"
    rows: int = 1
    cols: int = 0
    schedule: str = "AB"

    def __post_init__(self):
        if self.kind not in ("chain", "grid"):
            raise ValidationError(f"unknown connectivity {self.kind!r}")
        allowed = "AB" if self.kind == "chain" else "ABCD"
        if not self.schedule or any(ch not in allowed for ch in self.schedule):
            raise ValidationError(f"schedule {self.schedule!r} must use patterns from {allowed}")

    @classmethod
    def chain(cls, schedule: str = "AB") -> "Connectivity":
        return cls("chain", schedule=schedule)

    @classmethod
    def grid(cls, rows: int, cols: int, schedule: str = "ABCD") -> "Connectivity":
        return cls("grid", rows, cols, schedule)

    def pairs(self, n: int, cycle: int) -> list[tuple[int, int]]:
        pattern = self.schedule[cycle % len(self.schedule)]
        if self.kind == "chain":
            start = 0 if pattern == "A" else 1
            return [(i, i + 1) for i in range(start, n - 1, 2)]
        if self.rows * self.cols != n:
            raise ValidationError(f"grid {self.rows}x{self.cols} does not hold {n} qubits")
        out = []
        if pattern in "AB":
            start = 0 if pattern == "A" else 1
            for r in range(self.rows):
                for c in range(start, self.cols - 1, 2):
                    out.append((r * self.cols + c, r * self.cols + c + 1))
        else:
            start = 0 if pattern == "C" else 1
            for r in range(start, self.rows - 1, 2):
                for c in range(self.cols):
                    out.append((r * self.cols + c, (r + 1) * self.cols + c))
        return sorted(out)

    def to_json(self) -> dict:
        return {"kind": self.kind, "rows": self.rows, "cols": self.cols, "schedule": self.schedule}

    @classmethod
    def parse(cls, text: str, n: int) -> "Connectivity":
        """'chain', 'chain:AB', 'grid:3x4' or 'grid:3x4:ABCDCDAB'."""
        parts = text.split(":")
        if parts[0] == "chain":
            return cls.chain(*(parts[1:2] or []))
        if parts[0] == "grid":
            if len(parts) < 2:
                raise ValidationError("grid connectivity needs ROWSxCOLS")
            try:
                rows, cols = (int(v) for v in parts[1].lower().split("x"))
            except ValueError:
                raise ValidationError(f"bad grid shape {parts[1]!r}") from None
            if rows * cols != n:
                raise ValidationError(f"grid {rows}x{cols} does not hold {n} qubits")
            return cls.grid(rows, cols, *(parts[2:3] or []))
        raise ValidationError(f"unknown connectivity {text!r}")


# -------------------------------------------------------------- circuits --

@dataclass(frozen=True)
class Cycle:
    singles: tuple[Gate, ...]
    pairs: tuple[tuple[int, int, Gate], ...] = ()


@dataclass(frozen=True)
class Circuit:
    n: int
    cycles: tuple[Cycle, ...]
    seed: int | None = None
    two_qubit: Gate = field(default_factory=FSim)

    def __post_init__(self):
        object.__setattr__(self, "cycles", tuple(self.cycles))
        for ci, cyc in enumerate(self.cycles):
            if len(cyc.singles) != self.n:
                raise ValidationError(f"cycle {ci}: {len(cyc.singles)} single-qubit gates for {self.n} qubits")
            for g in cyc.singles:
                if g.arity != 1:
                    raise ValidationError(f"cycle {ci}: {g.kind} is not a single-qubit gate")
            touched = set()
            for i, j, g in cyc.pairs:
                if not 0 <= i < j < self.n:
                    raise ValidationError(f"cycle {ci}: invalid pair ({i}, {j})")
                if g.arity != 2:
                    raise ValidationError(f"cycle {ci}: {g.kind} is not a two-qubit gate")
                if i in touched or j in touched:
                    raise ValidationError(f"cycle {ci}: qubit used by two pairs")
                touched.update((i, j))

    @property
    def depth(self) -> int:
        return len(self.cycles)

    def gate_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for cyc in self.cycles:
            for g in cyc.singles:
                counts[g.kind] = counts.get(g.kind, 0) + 1
            for _, _, g in cyc.pairs:
                counts[g.kind] = counts.get(g.kind, 0) + 1
        return counts


def random_circuit(n: int, depth: int, connectivity: Connectivity | None = None,
                   two_qubit: Gate | None = None, rng: Prng | None = None,
                   no_repeat: bool = False) -> Circuit:
    """``depth`` cycles: uniform single-qubit gates from {sqrt_x, sqrt_y,
    sqrt_w}, then the two-qubit gate on the connectivity pattern of the cycle.
    With ``no_repeat`` a qubit never gets the same single-qubit gate twice in
    a row."""
    if n < 2:
        raise ValidationError("random circuits need at least 2 qubits")
    if depth < 0:
        raise ValidationError("depth must be nonnegative")
    connectivity = connectivity or Connectivity.chain()
    two_qubit = two_qubit or FSim()
    if two_qubit.arity != 2:
        raise ValidationError(f"{two_qubit.kind} is not a two-qubit gate")
    rng = rng or Prng(0)
    if depth and not any(connectivity.pairs(n, c) for c in range(len(connectivity.schedule))):
        raise ValidationError("connectivity yields no qubit pairs")
    gates = (SQRT_X, SQRT_Y, SQRT_W)
    cycles = []
    prev = [-1] * n
    for c in range(depth):
        picks = rng.integers(3, n)
        if no_repeat:
            alt = rng.integers(2, n)
            for q in range(n):
                if picks[q] == prev[q]:
                    picks[q] = [v for v in range(3) if v != prev[q]][alt[q]]
        prev = list(picks)
        singles = tuple(gates[p] for p in picks)
        pairs = tuple((i, j, two_qubit) for i, j in connectivity.pairs(n, c))
        cycles.append(Cycle(singles, pairs))
    return Circuit(n, tuple(cycles), seed=rng.seed, two_qubit=two_qubit)


# ------------------------------------------------------------ file format --

def circuit_to_json(c: Circuit) -> dict:
    tq = c.two_qubit
    two = {"kind": tq.kind, "theta": None, "phi": None}
    if tq.kind == "fsim":
        two.update(theta=float(tq.theta), phi=float(tq.phi))
    return {
        "version": FORMAT_VERSION,
        "n_qubits": c.n,
        "seed": c.seed,
        "two_qubit": two,
        "cycles": [
            {"singles": [g.kind for g in cyc.singles], "pairs": [[i, j] for i, j, _ in cyc.pairs]}
            for cyc in c.cycles
        ],
    }


def serialize_circuit(c: Circuit) -> str:
    for cyc in c.cycles:
        for g in cyc.singles:
            if g.kind not in SINGLE_KINDS:
                raise ValidationError(f"gate {g.kind!r} has no circuit-file encoding")
        for _, _, g in cyc.pairs:
            if g != c.two_qubit:
                raise ValidationError("circuit file supports one two-qubit gate per circuit")
    # json writes floats with repr, i.e. 17 significant digits
    return json.dumps(circuit_to_json(c), indent=1) + "\n"


def _field(obj, key, ctx, types):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError("missing field", field=f"{ctx}{key}")
    value = obj[key]
    if not isinstance(value, types) or isinstance(value, bool):
        raise ParseError(f"wrong type {type(value).__name__}", field=f"{ctx}{key}")
    return value


def _line_of(text: str, needle: str) -> int | None:
    pos = text.find(needle)
    return text.count("\n", 0, pos) + 1 if pos >= 0 else None


def parse_circuit(text: str) -> Circuit:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    version = _field(data, "version", "", int)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported version {version}", field="version")
    n = _field(data, "n_qubits", "", int)
    seed = data.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise ParseError("seed must be an integer or null", field="seed")
    two = _field(data, "two_qubit", "", dict)
    kind = _field(two, "kind", "two_qubit.", str)
    if kind == "fsim":
        two_qubit = FSim(float(_field(two, "theta", "two_qubit.", (int, float))),
                         float(_field(two, "phi", "two_qubit.", (int, float))))
    elif kind == "cz":
        two_qubit = CZ
    else:
        raise ParseError(f"unknown two-qubit gate {kind!r}", line=_line_of(text, f'"{kind}"'),
                         field="two_qubit.kind")
    cycles = []
    for ci, raw in enumerate(_field(data, "cycles", "", list)):
        ctx = f"cycles[{ci}]."
        singles = []
        for qi, name in enumerate(_field(raw, "singles", ctx, list)):
            if name not in SINGLE_KINDS:
                raise ParseError(f"unknown gate {name!r}", line=_line_of(text, f'"{name}"'),
                                 field=f"{ctx}singles[{qi}]")
            singles.append(Gate(name))
        pairs = []
        for pi, pair in enumerate(_field(raw, "pairs", ctx, list)):
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(v, int) and not isinstance(v, bool) for v in pair)):
                raise ParseError(f"pair must be [i, j], got {pair!r}", field=f"{ctx}pairs[{pi}]")
            pairs.append((pair[0], pair[1], two_qubit))
        cycles.append(Cycle(tuple(singles), tuple(pairs)))
    try:
        return Circuit(n, tuple(cycles), seed=seed, two_qubit=two_qubit)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None
