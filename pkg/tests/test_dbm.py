import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qslab.circuit import CZ, SQRT_W, SQRT_X, SQRT_Y, Circuit, Cycle, FSim, gate_matrix, random_circuit
from qslab.core import Prng, ValidationError
from qslab.dbm import (BRUTE_FORCE_LATENT_CAP, InfeasibleError, dbm_amplitude, dbm_amplitudes,
                       dbm_apply_cz, dbm_apply_cz_gate, dbm_apply_fsim, dbm_apply_single,
                       dbm_build, dbm_distribution, dbm_init, dbm_size_recurrence,
                       network_from_json, network_to_json, oracle_report, to_convention)
from qslab.simulator import StateVector, apply_pair, apply_single_qubit, simulate

R = 1 / math.sqrt(2)
FIXED = {"sqrt_x": (math.pi / 2, 0.0), "sqrt_y": (math.pi / 2, math.pi / 2), "sqrt_w": (math.pi / 2, math.pi / 4)}


def normalized(v):
    return np.abs(v) ** 2 / (np.abs(v) ** 2).sum()


def same_up_to_scale(a, b, tol=1e-10):
    k = np.argmax(np.abs(b))
    return np.abs(a * (b[k] / a[k]) - b).max() < tol


# ------------------------------------------------------------ init ---

def test_init_shape_and_uniform_amplitudes():
    net = dbm_init(2)
    assert net.hidden_count == 2 and net.deep_count == 0
    assert np.array_equal(net.W, np.eye(2))
    amps = dbm_amplitudes(net)
    assert np.allclose(amps, 0.5, atol=1e-15)
    assert np.allclose(dbm_amplitudes(dbm_init(1)), R, atol=1e-15)
    with pytest.raises(ValidationError):
        dbm_init(0)


def test_zero_init_is_basis_state():
    amps = dbm_amplitudes(dbm_init(3, state="zero"))
    assert abs(amps[0] - 1) < 1e-15 and np.abs(amps[1:]).max() < 1e-15


def test_identity_weights_on_bit_variables_are_not_uniform():
    # W = delta read with z in {0, 1}: z=0 gives 2cosh(0), z=1 gives 2cosh(1)
    net = dbm_init(1)
    net.convention = "bit"
    a = dbm_amplitudes(net)
    assert abs(abs(a[1] / a[0]) - math.cosh(1)) < 1e-12


# ---------------------------------------------------------- singles ---

def test_sqrt_x_after_zero_init():
    amps = dbm_amplitudes(dbm_apply_single(dbm_init(1, "zero"), 0, math.pi / 2, 0.0))
    assert np.allclose(amps, [R, -1j * R], atol=1e-14)
    assert same_up_to_scale(amps, np.array([1, -1j]))


@pytest.mark.parametrize("convention", ["spin", "bit"])
@pytest.mark.parametrize("state", ["plus", "zero"])
@pytest.mark.parametrize("gate", ["sqrt_x", "sqrt_y", "sqrt_w", "cz"])
def test_fixed_gate_oracle(gate, state, convention):
    r = oracle_report(gate, convention=convention, state=state)
    assert r["total_variation"] < 1e-12 and r["max_amplitude_error"] < 1e-12


@given(st.floats(-6.3, 6.3), st.floats(-6.3, 6.3), st.sampled_from(["plus", "zero"]))
@settings(max_examples=60, deadline=None)
def test_u1_exact_for_any_angle(theta, phi, state):
    r = oracle_report("u1", theta, phi, state=state)
    assert r["max_amplitude_error"] < 1e-10


def test_phi_enters_only_through_biases():
    base = dbm_init(2)
    a = dbm_apply_single(base, 1, math.pi / 2, 0.0)
    b = dbm_apply_single(base, 1, math.pi / 2, math.pi / 2)
    for name in ("W", "Wp", "Wpp", "b"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    assert np.array_equal(a.omega[:1], b.omega[:1])
    assert b.omega[1] - a.omega[1] == pytest.approx(-0.25j * math.pi)
    assert b.bp[-1] - a.bp[-1] == pytest.approx(0.25j * math.pi)


def test_single_update_adds_one_deep_one_hidden():
    net = dbm_init(3)
    out = dbm_apply_single(net, 1, 0.7, 0.2)
    assert (out.hidden_count, out.deep_count) == (4, 1)
    assert np.all(out.W[1, :3] == 0)  # old couplings moved to the deep unit
    assert out.Wp[1, 0] == net.W[1, 1]
    with pytest.raises(IndexError):
        dbm_apply_single(net, 3, 0.1, 0.1)


def test_successive_singles_commute_with_evaluation():
    net = dbm_apply_single(dbm_apply_single(dbm_init(2), 0, 0.4, 0.3), 1, 1.1, -0.2)
    assert np.abs(dbm_amplitudes(net, "brute") - dbm_amplitudes(net, "marginal")).max() < 1e-13


# --------------------------------------------------------------- zz ---

@pytest.mark.parametrize("psi", [0.3, -0.3, 1.2, math.pi / 4, -math.pi / 4])
def test_zz_factor_exact(psi):
    net = dbm_apply_single(dbm_apply_single(dbm_init(2), 0, 0.9, 0.1), 1, 0.4, 1.0)
    before = dbm_amplitudes(net)
    after = dbm_amplitudes(dbm_apply_cz(net, 0, 1, psi))
    for z in range(4):
        s0, s1 = 1 - 2 * (z & 1), 1 - 2 * (z >> 1)
        assert after[z] == pytest.approx(before[z] * cmath.exp(-1j * psi * s0 * s1), abs=1e-13)


def test_zz_zero_angle_and_sign_flip():
    net = dbm_init(2)
    assert np.allclose(dbm_amplitudes(dbm_apply_cz(net, 0, 1, 0.0)), dbm_amplitudes(net), atol=1e-15)
    plus = dbm_amplitudes(dbm_apply_cz(net, 0, 1, 0.5)) / dbm_amplitudes(net)
    minus = dbm_amplitudes(dbm_apply_cz(net, 0, 1, -0.5)) / dbm_amplitudes(net)
    assert np.allclose(minus, plus.conj(), atol=1e-13)
    with pytest.raises(ValidationError):
        dbm_apply_cz(net, 1, 1, 0.5)


def test_cz_after_hadamard_like_prep():
    net = dbm_apply_cz_gate(dbm_init(2), 0, 1)
    assert np.abs(dbm_amplitudes(net) - np.array([0.5, 0.5, 0.5, -0.5])).max() < 1e-14


# ------------------------------------------------------------- fsim ---

def test_fsim_identity_angles():
    net = dbm_apply_single(dbm_init(2), 0, 0.8, 0.3)
    out = dbm_apply_fsim(net, 0, 1, 0.0, 0.0)
    assert np.abs(dbm_amplitudes(out) - dbm_amplitudes(net)).max() < 1e-13
    assert (out.hidden_count - net.hidden_count, out.deep_count - net.deep_count) == (3, 1)


def test_fsim_default_angles_exact():
    r = oracle_report("fsim", math.pi / 2, math.pi / 6)
    assert r["total_variation"] < 1e-12 and r["max_amplitude_error"] < 1e-12


@given(st.floats(-6.3, 6.3), st.floats(-6.3, 6.3), st.sampled_from(["plus", "zero"]),
       st.sampled_from(["spin", "bit"]))
@settings(max_examples=60, deadline=None)
def test_fsim_exact_for_any_angle(theta, phi, state, convention):
    r = oracle_report("fsim", theta, phi, state=state, convention=convention)
    assert r["max_amplitude_error"] < 1e-10


def test_fsim_on_entangled_input_both_orders():
    rng = Prng(3)
    for l, m in ((0, 1), (1, 0), (0, 2), (2, 1)):
        net = dbm_init(3)
        sv = StateVector(3, dbm_amplitudes(net))
        for q in range(3):
            th, ph = rng.random(2) * 3
            net = dbm_apply_single(net, q, th, ph)
            from qslab.circuit import U1
            apply_single_qubit(sv, q, gate_matrix(U1(th, ph)))
        net = dbm_apply_cz_gate(net, 0, 2)
        apply_pair(sv, 0, 2, gate_matrix(CZ))
        net = dbm_apply_fsim(net, l, m, 1.1, 0.4)
        apply_pair(sv, l, m, gate_matrix(FSim(1.1, 0.4)))
        assert np.abs(dbm_amplitudes(net) - sv.amps).max() < 1e-11


def test_literal_fsim_rule_is_reported_not_hidden():
    r = oracle_report("fsim", math.pi / 2, math.pi / 6, literal=True)
    assert r["rule"] == "literal" and r["total_variation"] > 0.1
    r = oracle_report("fsim", 0.0, 0.0, literal=True)
    assert r["error"] is not None and "NaN or infinity" in r["error"]


# ------------------------------------------------------- evaluation ---

def test_amplitude_methods_agree_and_cap():
    c = random_circuit(2, 2, rng=Prng(4))
    net, _ = dbm_build(c)
    assert np.abs(dbm_amplitudes(net, "brute") - dbm_amplitudes(net, "marginal")).max() < 1e-12
    big = dbm_init(BRUTE_FORCE_LATENT_CAP + 1)
    with pytest.raises(InfeasibleError):
        dbm_amplitude(big, 0)
    with pytest.raises(ValidationError):
        dbm_amplitude(net, 4)


def test_nonfinite_weights_rejected():
    net = dbm_init(2)
    net.W[0, 1] = np.nan
    with pytest.raises(ValidationError):
        dbm_amplitude(net, 0)


def test_two_gate_circuits_match_simulator():
    singles = {"sqrt_x": SQRT_X, "sqrt_y": SQRT_Y, "sqrt_w": SQRT_W}
    gates = [("1", g) for g in singles] + [("2", "cz"), ("2", "fsim")]
    for (ka, a), (kb, b) in itertools.product(gates, repeat=2):
        for convention in ("spin", "bit"):
            net = dbm_init(2, convention=convention)
            sv = StateVector(2, dbm_amplitudes(net))
            for kind, g in ((ka, a), (kb, b)):
                if kind == "1":
                    net = dbm_apply_single(net, 1, *FIXED[g])
                    apply_single_qubit(sv, 1, gate_matrix(singles[g]))
                elif g == "cz":
                    net = dbm_apply_cz_gate(net, 0, 1)
                    apply_pair(sv, 0, 1, gate_matrix(CZ))
                else:
                    net = dbm_apply_fsim(net, 0, 1, math.pi / 2, math.pi / 6)
                    apply_pair(sv, 0, 1, gate_matrix(FSim()))
            assert 0.5 * np.abs(normalized(dbm_amplitudes(net)) - sv.probabilities()).sum() < 1e-6


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("convention", ["spin", "bit"])
def test_build_matches_simulator(seed, convention):
    gate = CZ if seed % 2 else FSim(0.3 + seed, 0.5)
    c = random_circuit(3, 2, two_qubit=gate, rng=Prng(seed))
    net, rep = dbm_build(c, convention=convention)
    assert np.abs(dbm_amplitudes(net) - simulate(c).amps).max() < 1e-10
    assert 0.5 * np.abs(dbm_distribution(net).probs - simulate(c).probabilities()).sum() < 1e-10


def test_one_qubit_depth_one():
    c = Circuit(1, (Cycle((SQRT_W,), ()),))
    net, _ = dbm_build(c)
    assert np.abs(dbm_distribution(net).probs - simulate(c).probabilities()).max() < 1e-12


# ------------------------------------------------------------ sizes ---

def test_recurrence_example():
    r = dbm_size_recurrence(2, 1)
    assert [(h, d) for _, _, h, d in r.layers] == [(2, 0), (4, 2), (10, 4)]
    assert (r.hidden_count, r.deep_count) == (10, 4)
    assert r.to_csv().splitlines() == ["cycle,hidden,deep,edges", "0,2,0,", "1,10,4,"]


@given(st.integers(1, 12), st.integers(0, 10))
def test_recurrence_rules(n, depth):
    r = dbm_size_recurrence(n, depth)
    for (c0, l0, h0, d0), (c1, l1, h1, d1) in zip(r.layers, r.layers[1:]):
        if l1 == "single":
            assert (h1, d1) == (2 * h0, d0 + n)
        else:
            assert (h1, d1) == (h0 + 3 * n, d0 + n)


def test_build_counts_per_gate_and_report_consistency():
    c = random_circuit(4, 3, rng=Prng(2))
    net, rep = dbm_build(c)
    pairs = sum(len(cyc.pairs) for cyc in c.cycles)
    assert net.hidden_count == 4 + 4 * 3 + 3 * pairs
    assert net.deep_count == 4 * 3 + pairs
    assert (rep.hidden_count, rep.deep_count, rep.edge_count) == (net.hidden_count, net.deep_count, net.edge_count)
    assert rep.edge_count == np.count_nonzero(net.W) + np.count_nonzero(net.Wp) + np.count_nonzero(net.Wpp)
    for a, b in zip(rep.history, rep.history[1:]):
        assert b[1] >= a[1] and b[2] >= a[2] and b[3] >= a[3]
    assert all(b.edges >= a.edges for a, b in zip(net.history, net.history[1:]))
    assert not np.any(net.Wpp)


# ----------------------------------------------------------- formats ---

def test_convention_round_trip_and_json():
    net, _ = dbm_build(random_circuit(3, 1, rng=Prng(1)))
    bit = to_convention(net, "bit")
    back = to_convention(bit, "spin")
    assert np.abs(dbm_amplitudes(bit) - dbm_amplitudes(net)).max() < 1e-12
    assert np.allclose(back.W, net.W) and np.allclose(back.b, net.b)
    loaded = network_from_json(network_to_json(bit))
    assert loaded.convention == "bit"
    assert np.abs(dbm_amplitudes(loaded) - dbm_amplitudes(bit)).max() < 1e-12
    with pytest.raises(ValidationError):
        to_convention(net, "qubit")
