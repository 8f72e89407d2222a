"""Exact deep-Boltzmann-machine representation of circuits, built gate by gate.

The amplitude of a physical configuration z is

    Psi(z) = scale * sum_{h, d} exp( omega.z + z.W.h + b.h + h.W'.d + b'.d + z.W''.d )

with hidden units h and deep units d in {-1, +1}. Physical units use spins
z = 1 - 2*bit (so |0> <-> z = +1) by default; ``convention="bit"`` stores the
same network re-expressed for z in {0, 1}.

Every gate is added as "copy the old qubit dependence onto a new deep unit,
then attach a small kernel between the new deep unit and the physical units".
Concretely, for a single-qubit gate on qubit q:

* every hidden unit coupled to z_q is re-coupled to a new deep unit d with the
  same weight, and z_q's bias moves to d's bias (the old couplings are deleted);
* a new hidden unit couples z_q and d so that summing it out gives
  K(z_q, d) = <z_q| U |d>, up to a constant folded into ``global_scale``.

The fSim construction follows the same pattern with one deep unit and three
hidden units: the deep unit carries the new value of qubit l, qubit m's old
value is the linear combination z_l + z_m - d, and a hidden unit with weights
(i*pi/6, i*pi/6, -i*pi/6) on (z_l, z_m, d) vanishes on the combinations where
that value would not be +-1.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .circuit import Circuit, gate_matrix
from .core import ExplicitDistribution, ResourceCapError, ValidationError
from .metrics import csv_text

BRUTE_FORCE_LATENT_CAP = 24
CONVENTIONS = ("spin", "bit")


class InfeasibleError(ResourceCapError):
    """Brute-force evaluation would exceed the latent-configuration cap."""


@dataclass(frozen=True)
class SizeRecord:
    label: str
    hidden: int
    deep: int
    edges: int | None


@dataclass
class DbmNetwork:
    n_physical: int
    W: np.ndarray        # physical x hidden
    Wp: np.ndarray       # hidden x deep
    Wpp: np.ndarray      # physical x deep
    omega: np.ndarray    # physical biases
    b: np.ndarray        # hidden biases
    bp: np.ndarray       # deep biases
    global_scale: complex = 1.0 + 0j
    convention: str = "spin"
    history: list[SizeRecord] = field(default_factory=list)

    @property
    def hidden_count(self) -> int:
        return self.W.shape[1]

    @property
    def deep_count(self) -> int:
        return self.Wp.shape[1]

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.W) + np.count_nonzero(self.Wp) + np.count_nonzero(self.Wpp))

    def copy(self) -> "DbmNetwork":
        return replace(self, W=self.W.copy(), Wp=self.Wp.copy(), Wpp=self.Wpp.copy(),
                       omega=self.omega.copy(), b=self.b.copy(), bp=self.bp.copy(),
                       history=list(self.history))

    def check_finite(self) -> None:
        for name in ("W", "Wp", "Wpp", "omega", "b", "bp"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValidationError(f"DBM weights {name} contain NaN or infinity")
        if not cmath.isfinite(self.global_scale):
            raise ValidationError("DBM global scale is not finite")

    def _record(self, label: str) -> None:
        self.history.append(SizeRecord(label, self.hidden_count, self.deep_count, self.edge_count))


# -------------------------------------------------------------- helpers ---

def _half_arccosh(x: complex) -> complex:
    """w with cosh(2w) == x, principal branch."""
    return 0.5 * complex(np.arccosh(complex(x)))


def _add_hidden(net: DbmNetwork, phys: dict[int, complex], deep: dict[int, complex] | None = None) -> int:
    n = net.n_physical
    col = np.zeros((n, 1), dtype=np.complex128)
    for i, w in phys.items():
        col[i, 0] = w
    net.W = np.hstack([net.W, col])
    row = np.zeros((1, net.deep_count), dtype=np.complex128)
    for k, w in (deep or {}).items():
        row[0, k] = w
    net.Wp = np.vstack([net.Wp, row])
    net.b = np.append(net.b, 0j)
    return net.hidden_count - 1


def _add_deep(net: DbmNetwork, hidden_weights: np.ndarray, bias: complex) -> int:
    net.Wp = np.hstack([net.Wp, hidden_weights.reshape(-1, 1).astype(np.complex128)])
    net.Wpp = np.hstack([net.Wpp, np.zeros((net.n_physical, 1), dtype=np.complex128)])
    net.bp = np.append(net.bp, complex(bias))
    return net.deep_count - 1


def _require_transferable(net: DbmNetwork, *qubits: int) -> None:
    for q in qubits:
        if np.any(net.Wpp[q] != 0):
            raise ValidationError(f"physical unit {q} has direct deep couplings; cannot re-route it")


def _unit_factor(weights: list[complex], spins: list[int]) -> complex:
    return 2.0 * cmath.cosh(sum(w * s for w, s in zip(weights, spins)))


def _in_spin(op):
    """Run a spin-form construction step on a network of either convention."""
    def wrapper(net: DbmNetwork, *args, **kwargs):
        conv = net.convention
        work = to_convention(net, "spin") if conv != "spin" else net.copy()
        op(work, *args, **kwargs)
        out = to_convention(work, conv) if conv != "spin" else work
        out.history = work.history
        return out
    wrapper.__name__ = op.__name__
    wrapper.__doc__ = op.__doc__
    return wrapper


# ---------------------------------------------------------- conventions ---

def to_convention(net: DbmNetwork, convention: str) -> DbmNetwork:
    """Re-express the same amplitudes for physical spins or bits.

    With z = 1 - 2*bit every term z*x turns into x - 2*bit*x, so weights on
    physical units are scaled by -2 and the constant parts move into the
    hidden/deep biases and the global scale (and back).
    """
    if convention not in CONVENTIONS:
        raise ValidationError(f"unknown convention {convention!r}")
    out = net.copy()
    if convention == net.convention:
        return out
    if convention == "bit":  # spin -> bit
        out.b = net.b + net.W.sum(axis=0)
        out.bp = net.bp + net.Wpp.sum(axis=0)
        out.global_scale = net.global_scale * cmath.exp(net.omega.sum())
        out.W, out.Wpp, out.omega = -2 * net.W, -2 * net.Wpp, -2 * net.omega
    else:  # bit -> spin
        out.b = net.b + 0.5 * net.W.sum(axis=0)
        out.bp = net.bp + 0.5 * net.Wpp.sum(axis=0)
        out.global_scale = net.global_scale * cmath.exp(0.5 * net.omega.sum())
        out.W, out.Wpp, out.omega = -0.5 * net.W, -0.5 * net.Wpp, -0.5 * net.omega
    out.convention = convention
    return out


# ---------------------------------------------------------- construction --

def dbm_init(n: int, state: str = "plus", convention: str = "spin") -> DbmNetwork:
    """One hidden unit per physical unit, W = identity pattern.

    ``state="plus"`` uses unit weights, which with spins gives the uniform
    superposition (the Hadamard-prepared start state). ``state="zero"`` uses
    weight -i*pi/4 and hidden bias i*pi/4 so the hidden sum vanishes for
    z = -1 and the network represents |0...0>.
    """
    if n < 1:
        raise ValidationError("a DBM needs at least one physical unit")
    if state == "plus":
        W = np.eye(n, dtype=np.complex128)
        b = np.zeros(n, dtype=np.complex128)
        scale = 1.0 / ((2.0 * math.cosh(1.0)) ** n * 2.0 ** (n / 2))
    elif state == "zero":
        W = np.eye(n, dtype=np.complex128) * (-0.25j * math.pi)
        b = np.full(n, 0.25j * math.pi)
        scale = 1.0 / 2.0 ** n
    else:
        raise ValidationError(f"unknown initial state {state!r}")
    net = DbmNetwork(n, W, np.zeros((n, 0), np.complex128), np.zeros((n, 0), np.complex128),
                     np.zeros(n, np.complex128), b, np.zeros(0, np.complex128), complex(scale))
    net._record("init")
    return to_convention(net, convention) if convention != "spin" else net


def _transfer_single(net: DbmNetwork, q: int) -> int:
    _require_transferable(net, q)
    d = _add_deep(net, net.W[q].copy(), net.omega[q])
    net.W[q] = 0
    net.omega[q] = 0
    return d


@_in_spin
def dbm_apply_single(net: DbmNetwork, q: int, theta: float, phi: float) -> None:
    """Append U1(theta, phi) = exp(-i theta/2 (cos phi X + sin phi Y)) on qubit q.

    Adds one deep and one hidden unit. The kernel <z|U1|d> is
    exp(-i phi/2 z + i phi/2 d) * g(z*d) with g(same) = cos(theta/2) and
    g(different) = -i sin(theta/2): the phases become biases on z_q and d and
    g comes from a hidden unit with cosh(2w) equal to the ratio of the two.
    """
    if not 0 <= q < net.n_physical:
        raise IndexError(f"qubit {q} out of range")
    g_same = math.cos(theta / 2)
    g_diff = -1j * math.sin(theta / 2)
    d = _transfer_single(net, q)
    alpha, beta = -0.5j * phi, 0.5j * phi
    net.omega[q] += alpha
    net.bp[d] += beta
    if abs(g_same) >= abs(g_diff):
        w, sign = _half_arccosh(g_diff / g_same), -1
    else:
        w, sign = _half_arccosh(g_same / g_diff), +1
    _add_hidden(net, {q: w}, {d: sign * w})
    # normalise against the exact kernel at the larger of the two entries
    zr, dr, target = (1, 1, g_same) if abs(g_same) >= abs(g_diff) else (1, -1, g_diff * cmath.exp(-1j * phi))
    realised = cmath.exp(alpha * zr + beta * dr) * _unit_factor([w, sign * w], [zr, dr])
    net.global_scale *= target / realised
    net._record(f"u1(q={q})")


@_in_spin
def dbm_apply_cz(net: DbmNetwork, i: int, j: int, psi: float) -> None:
    """Multiply amplitudes by exp(-i psi z_i z_j) with one hidden unit.

    Weights: w on z_i and sign(psi)*w on z_j with cosh(2w) = exp(-2i|psi|).
    """
    if i == j:
        raise ValidationError("zz coupling needs two distinct qubits")
    for q in (i, j):
        if not 0 <= q < net.n_physical:
            raise IndexError(f"qubit {q} out of range")
    w = _half_arccosh(cmath.exp(-2j * abs(psi)))
    sign = -1 if psi < 0 else 1
    _add_hidden(net, {i: w, j: sign * w})
    realised = _unit_factor([w, sign * w], [1, 1])
    net.global_scale *= cmath.exp(-1j * psi) / realised
    net._record(f"zz(i={i},j={j})")


def dbm_apply_cz_gate(net: DbmNetwork, i: int, j: int) -> DbmNetwork:
    """The CZ unitary: exp(i pi/4) exp(-i pi/4 (z_i + z_j)) exp(i pi/4 z_i z_j)."""
    out = dbm_apply_cz(net, i, j, -math.pi / 4)
    factor = -0.25j * math.pi if out.convention == "spin" else 0.5j * math.pi
    out.omega[i] += factor
    out.omega[j] += factor
    if out.convention == "spin":
        out.global_scale *= cmath.exp(0.25j * math.pi)
    else:
        out.global_scale *= cmath.exp(0.25j * math.pi) * cmath.exp(-0.5j * math.pi)
    return out


FSIM_PROJECTOR_WEIGHT = 1j * math.pi / 6


def _fsim_target(zl: int, zm: int, d: int, theta: float, phi: float) -> complex:
    """<z_l z_m| fSim |d, z_l + z_m - d> on spins (0 if the column is invalid)."""
    dm = zl + zm - d
    if dm not in (1, -1):
        return 0j
    bl, bm = (1 - zl) // 2, (1 - zm) // 2
    cl, cm = (1 - d) // 2, (1 - dm) // 2
    m = gate_matrix_fsim(theta, phi)
    return complex(m[bl + 2 * bm, cl + 2 * cm])


def gate_matrix_fsim(theta: float, phi: float) -> np.ndarray:
    from .circuit import fsim_matrix
    return fsim_matrix(theta, phi)


@_in_spin
def dbm_apply_fsim(net: DbmNetwork, l: int, m: int, theta: float, phi: float,
                   literal: bool = False) -> None:
    """Append fSim(theta, phi) on qubits (l, m): +1 deep unit, +3 hidden units.

    1. deep unit d with W'_{j,d} = W_{l,j} - W_{m,j} (bias omega_l - omega_m);
    2. z_l takes over z_m's couplings and bias;
    3. a hidden unit for the swap amplitude;
    4. a hidden unit on (z_l, z_m) with weights (w, -w),
       cosh(2w) = cos(theta) exp(i phi/2);
    5. the projector unit with weights (i pi/6, i pi/6, -i pi/6) on (z_l, z_m, d).

    Step 3 sets cosh(2w) = i cot(theta) on (z_l, d). When |sin| > |cos| the
    unit instead sits on (z_m, d) with the reciprocal ratio, and step 4
    absorbs -i tan(theta); this keeps every weight finite including at
    theta = pi/2. ``literal=True`` uses the unmodified textbook weights
    (cosh(2w) = cot(theta) on (z_l, d), no phase factor i) so their error can
    be measured; see :func:`oracle_report`.
    """
    if l == m:
        raise ValidationError("fSim needs two distinct qubits")
    for q in (l, m):
        if not 0 <= q < net.n_physical:
            raise IndexError(f"qubit {q} out of range")
    _require_transferable(net, l, m)
    c, s = math.cos(theta), math.sin(theta)
    # steps 1-2
    d = _add_deep(net, net.W[l] - net.W[m], net.omega[l] - net.omega[m])
    net.W[l] = net.W[m]
    net.omega[l] = net.omega[m]
    # local part of the |11> phase: exp(-i phi/4) exp(i phi/4 (z_l + z_m)) exp(-i phi/4 z_l z_m)
    net.omega[l] += 0.25j * phi
    net.omega[m] += 0.25j * phi
    units: list[tuple[dict, dict, list]] = []
    zz_phase = cmath.exp(0.5j * phi)
    if literal:
        w1 = _half_arccosh(1.0 / math.tan(theta) if s != 0 else complex("inf"))
        w2 = _half_arccosh(c * zz_phase)
        units.append(({l: w1}, {d: w1}, ["l", "d"]))
        units.append(({l: w2, m: -w2}, {}, ["l", "m"]))
    elif abs(c) >= abs(s):
        # step 3 on (z_l, d): 1 if d == z_l, -i tan(theta) otherwise
        w1 = _half_arccosh(-1j * s / c)
        w2 = _half_arccosh(c * zz_phase)
        units.append(({l: w1}, {d: -w1}, ["l", "d"]))
        units.append(({l: w2, m: -w2}, {}, ["l", "m"]))
    else:
        # step 3 on (z_m, d): 1 if d == z_m, i cot(theta) otherwise
        w1 = _half_arccosh(1j * c / s)
        w2 = _half_arccosh(-1j * s * zz_phase)
        units.append(({m: w1}, {d: -w1}, ["m", "d"]))
        units.append(({l: w2, m: -w2}, {}, ["l", "m"]))
    p = FSIM_PROJECTOR_WEIGHT
    units.append(({l: p, m: p}, {d: -p}, ["l", "m", "d"]))
    for phys, deep, _ in units:
        _add_hidden(net, phys, deep)

    def realised(zl, zm, dd):
        val = cmath.exp(0.25j * phi * (zl + zm))
        for phys, deep, _ in units:
            arg = sum(w * (zl if q == l else zm) for q, w in phys.items()) + sum(w * dd for w in deep.values())
            val *= 2.0 * cmath.cosh(arg)
        return val * cmath.exp(-0.25j * phi)

    # normalise on the valid column with the largest target entry
    best = max(((zl, zm, dd) for zl in (1, -1) for zm in (1, -1) for dd in (1, -1)),
               key=lambda t: abs(_fsim_target(*t, theta, phi)))
    r = realised(*best)
    net.global_scale *= cmath.exp(-0.25j * phi)
    if abs(r) > 1e-300 and math.isfinite(abs(r)):
        net.global_scale *= _fsim_target(*best, theta, phi) / r
    net._record(f"fsim(l={l},m={m})")


# ------------------------------------------------------------ evaluation --

def _physical_values(net: DbmNetwork, index: int) -> np.ndarray:
    bits = (index >> np.arange(net.n_physical)) & 1
    return (1.0 - 2.0 * bits) if net.convention == "spin" else bits.astype(np.float64)


def dbm_amplitude(net: DbmNetwork, z: int, method: str = "brute") -> complex:
    """Psi(z) for basis index z (bit q = qubit q), including ``global_scale``.

    ``brute`` enumerates all 2^(H+D) latent configurations; ``marginal`` sums
    the hidden units out analytically (2 cosh of their fields) and enumerates
    the deep units only.
    """
    if not 0 <= z < (1 << net.n_physical):
        raise ValidationError(f"basis index {z} out of range")
    net.check_finite()
    zv = _physical_values(net, z)
    hfield = net.b + zv @ net.W
    dfield = net.bp + zv @ net.Wpp
    const = complex(zv @ net.omega)
    if method == "brute":
        latent = net.hidden_count + net.deep_count
        if latent > BRUTE_FORCE_LATENT_CAP:
            raise InfeasibleError(f"{latent} latent units exceed the brute-force cap of {BRUTE_FORCE_LATENT_CAP}")
        total = kernels.latent_sum(np.ascontiguousarray(hfield), np.ascontiguousarray(dfield),
                                   np.ascontiguousarray(net.Wp))
    elif method == "marginal":
        if net.deep_count > BRUTE_FORCE_LATENT_CAP:
            raise InfeasibleError(f"{net.deep_count} deep units exceed the cap of {BRUTE_FORCE_LATENT_CAP}")
        dconf = kernels._spin_configs(net.deep_count)
        eff = hfield[None, :] + dconf @ net.Wp.T
        logs = dconf @ dfield + np.log(2.0 * np.cosh(eff)).sum(axis=1)
        total = np.exp(logs).sum()
    else:
        raise ValidationError(f"unknown method {method!r}")
    return complex(net.global_scale * cmath.exp(const) * total)


def dbm_amplitudes(net: DbmNetwork, method: str = "brute") -> np.ndarray:
    return np.array([dbm_amplitude(net, z, method) for z in range(1 << net.n_physical)])


def dbm_distribution(net: DbmNetwork, method: str = "brute") -> ExplicitDistribution:
    amps = dbm_amplitudes(net, method)
    p = np.abs(amps) ** 2
    total = p.sum()
    if not total > 0 or not math.isfinite(total):
        raise ValidationError("DBM amplitudes vanish or overflow")
    return ExplicitDistribution(net.n_physical, p / total)


# -------------------------------------------------------------- circuits --

@dataclass
class DbmSizeReport:
    hidden_count: int
    deep_count: int
    edge_count: int | None
    history: list[tuple[int, int, int, int | None]]  # (cycle, hidden, deep, edges)
    layers: list[tuple[int, str, int, int]] = field(default_factory=list)  # (cycle, layer, hidden, deep)

    @property
    def latent_count(self) -> int:
        return self.hidden_count + self.deep_count

    def to_csv(self) -> str:
        return csv_text(["cycle", "hidden", "deep", "edges"],
                        [(c, h, d, "" if e is None else e) for c, h, d, e in self.history])


def dbm_size_recurrence(n: int, depth: int) -> DbmSizeReport:
    """Counting rules per cycle: a single-qubit layer doubles the hidden units
    and adds n deep units; a two-qubit layer adds n deep and 3n hidden units.
    Edges are not covered by the rules and reported as None."""
    hidden, deep = n, 0
    history = [(0, hidden, deep, None)]
    layers = [(0, "init", hidden, deep)]
    for c in range(1, depth + 1):
        hidden, deep = 2 * hidden, deep + n
        layers.append((c, "single", hidden, deep))
        hidden, deep = hidden + 3 * n, deep + n
        layers.append((c, "two", hidden, deep))
        history.append((c, hidden, deep, None))
    return DbmSizeReport(hidden, deep, None, history, layers)


def dbm_build(c: Circuit, convention: str = "spin") -> tuple[DbmNetwork, DbmSizeReport]:
    """DBM whose amplitudes equal the circuit's output state from |0...0>."""
    net = dbm_init(c.n, state="zero", convention=convention)
    history = [(0, net.hidden_count, net.deep_count, net.edge_count)]
    layers = [(0, "init", net.hidden_count, net.deep_count)]
    for ci, cyc in enumerate(c.cycles, start=1):
        for q, g in enumerate(cyc.singles):
            theta, phi = g.rotation()
            net = dbm_apply_single(net, q, theta, phi)
        layers.append((ci, "single", net.hidden_count, net.deep_count))
        for i, j, g in cyc.pairs:
            if g.kind == "cz":
                net = dbm_apply_cz_gate(net, i, j)
            elif g.kind == "fsim":
                net = dbm_apply_fsim(net, i, j, g.theta, g.phi)
            else:
                raise ValidationError(f"no DBM construction for {g.kind!r}")
        layers.append((ci, "two", net.hidden_count, net.deep_count))
        history.append((ci, net.hidden_count, net.deep_count, net.edge_count))
    return net, DbmSizeReport(net.hidden_count, net.deep_count, net.edge_count, history, layers)


def compare_counts(c: Circuit) -> list[dict]:
    """Constructed counts next to the counting-rule recurrence, per cycle."""
    _, built = dbm_build(c)
    rec = dbm_size_recurrence(c.n, c.depth)
    rows = []
    for (ci, h, d, e), (_, rh, rd, _) in zip(built.history, rec.history):
        rows.append({"cycle": ci, "hidden": h, "deep": d, "edges": e,
                     "rule_hidden": rh, "rule_deep": rd,
                     "match": (h, d) == (rh, rd)})
    return rows


# ---------------------------------------------------------- oracle check --

def oracle_report(gate: str, theta: float | None = None, phi: float | None = None,
                  literal: bool = False, convention: str = "spin",
                  state: str = "plus") -> dict:
    """Apply one gate after initialisation and compare with the state-vector
    result of the same gate on the same start state.

    Returns a dict with the total variation distance of the normalised
    distributions and the max amplitude error (amplitudes compared exactly,
    global phase included)."""
    from .circuit import Gate, U1
    from .simulator import StateVector, apply_pair, apply_single_qubit

    fixed = {"sqrt_x": (math.pi / 2, 0.0), "sqrt_y": (math.pi / 2, math.pi / 2),
             "sqrt_w": (math.pi / 2, math.pi / 4)}
    two = gate in ("cz", "fsim")
    n = 2 if two else 1
    net = dbm_init(n, state=state, convention=convention)
    start = dbm_amplitudes(net)
    sv = StateVector(n, start.copy())
    if gate in fixed or gate == "u1":
        th, ph = fixed.get(gate, (theta, phi))
        net = dbm_apply_single(net, 0, th, ph)
        apply_single_qubit(sv, 0, gate_matrix(U1(th, ph)))
    elif gate == "cz":
        net = dbm_apply_cz_gate(net, 0, 1)
        apply_pair(sv, 0, 1, gate_matrix(Gate("cz")))
    elif gate == "fsim":
        net = dbm_apply_fsim(net, 0, 1, theta, phi, literal=literal)
        apply_pair(sv, 0, 1, gate_matrix(Gate("fsim", theta, phi)))
    else:
        raise ValidationError(f"unknown gate {gate!r}")
    report = {"gate": gate, "theta": theta, "phi": phi, "rule": "literal" if literal else "exact",
              "convention": convention, "state": state,
              "hidden": net.hidden_count, "deep": net.deep_count, "edges": net.edge_count}
    try:
        amps = dbm_amplitudes(net)
    except ValidationError as exc:
        report.update(total_variation=None, max_amplitude_error=None, error=str(exc))
        return report
    p_dbm = np.abs(amps) ** 2
    p_sim = sv.probabilities()
    tv = 0.5 * float(np.abs(p_dbm / p_dbm.sum() - p_sim / p_sim.sum()).sum()) if p_dbm.sum() > 0 else 1.0
    report.update(total_variation=tv, max_amplitude_error=float(np.abs(amps - sv.amps).max()), error=None)
    return report


# ----------------------------------------------------------------- JSON ---

def _cx(v: complex) -> list[float]:
    return [float(v.real), float(v.imag)]


def network_to_json(net: DbmNetwork) -> str:
    edges = []
    for kind, mat, a, b in (("ph", net.W, "physical", "hidden"), ("hd", net.Wp, "hidden", "deep"),
                            ("pd", net.Wpp, "physical", "deep")):
        for i, j in zip(*np.nonzero(mat)):
            edges.append({"kind": kind, a: int(i), b: int(j), "weight": _cx(mat[i, j])})
    doc = {
        "convention": net.convention,
        "n_physical": net.n_physical,
        "global_scale": _cx(net.global_scale),
        "physical": [{"index": i, "bias": _cx(v)} for i, v in enumerate(net.omega)],
        "hidden": [{"index": j, "bias": _cx(v)} for j, v in enumerate(net.b)],
        "deep": [{"index": k, "bias": _cx(v)} for k, v in enumerate(net.bp)],
        "edges": edges,
    }
    return json.dumps(doc, indent=1) + "\n"


def network_from_json(text: str) -> DbmNetwork:
    doc = json.loads(text)
    n, H, D = doc["n_physical"], len(doc["hidden"]), len(doc["deep"])

    def cvec(items):
        return np.array([complex(*u["bias"]) for u in items], dtype=np.complex128)

    W = np.zeros((n, H), np.complex128)
    Wp = np.zeros((H, D), np.complex128)
    Wpp = np.zeros((n, D), np.complex128)
    for e in doc["edges"]:
        w = complex(*e["weight"])
        if e["kind"] == "ph":
            W[e["physical"], e["hidden"]] = w
        elif e["kind"] == "hd":
            Wp[e["hidden"], e["deep"]] = w
        else:
            Wpp[e["physical"], e["deep"]] = w
    return DbmNetwork(n, W, Wp, Wpp, cvec(doc["physical"]), cvec(doc["hidden"]), cvec(doc["deep"]),
                      complex(*doc["global_scale"]), doc["convention"])
