import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import fsim_expm, u1_expm
from qslab.circuit import (CZ, SQRT_W, SQRT_X, SQRT_Y, Circuit, Connectivity, Cycle, FSim,
                           Gate, U1, gate_matrix, parse_circuit, random_circuit,
                           serialize_circuit)
from qslab.core import ParseError, Prng, ValidationError

R = 1 / math.sqrt(2)


def unitarity_error(m):
    return np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()


def test_sqrt_x_matrix():
    assert np.allclose(gate_matrix(SQRT_X), R * np.array([[1, -1j], [-1j, 1]]), atol=1e-15)


def test_fixed_gates_are_u1_rotations():
    for g, phi in ((SQRT_X, 0.0), (SQRT_Y, math.pi / 2), (SQRT_W, math.pi / 4)):
        assert np.abs(gate_matrix(g) - gate_matrix(U1(math.pi / 2, phi))).max() < 1e-12
        assert np.abs(gate_matrix(g) - u1_expm(math.pi / 2, phi)).max() < 1e-12


def test_sqrt_gates_square_to_paulis():
    # sqrt_y^2 = -iY, sqrt_w^2 = -i(X+Y)/sqrt2
    x, y = np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]])
    assert np.allclose(gate_matrix(SQRT_X) @ gate_matrix(SQRT_X), -1j * x)
    assert np.allclose(gate_matrix(SQRT_Y) @ gate_matrix(SQRT_Y), -1j * y)
    assert np.allclose(gate_matrix(SQRT_W) @ gate_matrix(SQRT_W), -1j * (x + y) * R)


def test_cz_and_fsim_matrices():
    assert np.array_equal(gate_matrix(CZ), np.diag([1, 1, 1, -1]).astype(complex))
    assert np.abs(gate_matrix(FSim(0.0, 0.0)) - np.eye(4)).max() < 1e-15
    for theta, phi in ((math.pi / 2, math.pi / 6), (0.3, 1.1), (2.0, -0.4)):
        assert np.abs(gate_matrix(FSim(theta, phi)) - fsim_expm(theta, phi)).max() < 1e-12


@given(st.floats(-7, 7), st.floats(-7, 7))
@settings(max_examples=100, deadline=None)
def test_all_gates_unitary(theta, phi):
    for g in (U1(theta, phi), FSim(theta, phi), SQRT_X, SQRT_Y, SQRT_W, CZ):
        assert unitarity_error(gate_matrix(g)) < 1e-12


def test_chain_pairs_alternate():
    c = random_circuit(4, 2, rng=Prng(0))
    assert [(i, j) for i, j, _ in c.cycles[0].pairs] == [(0, 1), (2, 3)]
    assert [(i, j) for i, j, _ in c.cycles[1].pairs] == [(1, 2)]


def test_grid_pairs_disjoint_and_cover_couplers():
    conn = Connectivity.parse("grid:3x4", 12)
    seen = set()
    for cycle in range(4):
        pairs = conn.pairs(12, cycle)
        flat = [q for p in pairs for q in p]
        assert len(flat) == len(set(flat))
        seen.update(pairs)
    # 3x4 grid has 3*3 horizontal + 2*4 vertical couplers
    assert len(seen) == 17


def test_connectivity_parse_errors():
    with pytest.raises(ValidationError):
        Connectivity.parse("grid:3x3", 12)
    with pytest.raises(ValidationError):
        Connectivity.parse("ring", 4)


def test_random_circuit_deterministic_and_disjoint():
    a = random_circuit(7, 9, rng=Prng(3))
    b = random_circuit(7, 9, rng=Prng(3))
    assert a == b
    for cyc in a.cycles:
        flat = [q for i, j, _ in cyc.pairs for q in (i, j)]
        assert len(flat) == len(set(flat))
        assert all(g.kind in ("sqrt_x", "sqrt_y", "sqrt_w") for g in cyc.singles)


def test_single_gate_choice_roughly_uniform():
    c = random_circuit(10, 300, rng=Prng(8))
    counts = c.gate_counts()
    for k in ("sqrt_x", "sqrt_y", "sqrt_w"):
        assert abs(counts[k] / 3000 - 1 / 3) < 0.03


def test_no_repeat_option():
    c = random_circuit(6, 50, rng=Prng(2), no_repeat=True)
    for a, b in zip(c.cycles, c.cycles[1:]):
        assert all(x != y for x, y in zip(a.singles, b.singles))


def test_random_circuit_errors():
    with pytest.raises(ValidationError):
        random_circuit(1, 3)
    with pytest.raises(ValidationError):
        random_circuit(4, -1)


@given(st.integers(2, 9), st.integers(0, 6), st.integers(0, 2 ** 63), st.sampled_from(["fsim", "cz"]))
@settings(max_examples=50, deadline=None)
def test_serialize_round_trip(n, depth, seed, kind):
    gate = CZ if kind == "cz" else FSim(0.1 * (seed % 31), 0.7)
    c = random_circuit(n, depth, two_qubit=gate, rng=Prng(seed))
    text = serialize_circuit(c)
    assert parse_circuit(text) == c
    assert serialize_circuit(parse_circuit(text)) == text


def test_parse_errors_name_the_problem():
    text = serialize_circuit(random_circuit(3, 2, rng=Prng(0)))
    bad = text.replace('"sqrt_x"', '"sqrt_q"', 1).replace('"sqrt_y"', '"sqrt_q"', 1).replace('"sqrt_w"', '"sqrt_q"', 1)
    with pytest.raises(ParseError, match="sqrt_q") as exc:
        parse_circuit(bad)
    assert exc.value.line is not None and "singles" in exc.value.field
    with pytest.raises(ParseError, match="line"):
        parse_circuit("{\n  \"version\": 1,\n  oops\n}")
    with pytest.raises(ParseError, match="n_qubits"):
        parse_circuit('{"version": 1}')


def test_invalid_pairs_rejected():
    singles = (SQRT_X,) * 4
    with pytest.raises(ValidationError):
        Circuit(4, (Cycle(singles, ((3, 3, FSim()),)),))
    with pytest.raises(ValidationError):
        Circuit(4, (Cycle(singles, ((0, 1, FSim()), (1, 2, FSim()))),))
    with pytest.raises(ValidationError):
        Circuit(4, (Cycle(singles, ((0, 1, SQRT_X),)),))
    text = serialize_circuit(random_circuit(4, 1, rng=Prng(0))).replace("[\n     0,\n     1\n    ]", "[\n     3,\n     3\n    ]")
    with pytest.raises(ValidationError):
        parse_circuit(text)


def test_gate_rejects_unknown_kind():
    with pytest.raises(ValidationError):
        Gate("hadamard")
