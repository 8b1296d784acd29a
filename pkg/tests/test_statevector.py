import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sqaoa import statevector as sv
from sqaoa.pauli import ResourceError, symmetric_pair, to_dense_matrix, transverse_field, two_body
from sqaoa.problems import ProblemInstance, cost_hamiltonian, generate

from conftest import dense_exp, random_state


def test_plus_state():
    np.testing.assert_allclose(sv.plus_state(1), [2 ** -0.5] * 2)
    np.testing.assert_allclose(sv.plus_state(2), [0.5] * 4)
    assert sv.norm(sv.plus_state(14)) == pytest.approx(1.0, abs=1e-12)
    for n in (0, 25):
        with pytest.raises(ResourceError):
            sv.plus_state(n)


def test_state_type_checks():
    with pytest.raises(TypeError):
        sv.apply_mixer(np.ones(4), 0.1)
    with pytest.raises(ValueError):
        sv.apply_mixer(np.ones(3, dtype=complex), 0.1)


def test_mixer_examples():
    psi = sv.plus_state(3)
    np.testing.assert_allclose(sv.apply_mixer(psi.copy(), 0.0), psi)
    one = sv.apply_mixer(sv.basis_state(1, 0), np.pi / 2)
    np.testing.assert_allclose(one, [0, 1j], atol=1e-15)


def test_mixer_dense_oracle(rng):
    beta = np.pi / 8
    psi = random_state(rng, 3)
    # H_B = -sum X, so exp(+i beta sum X) = exp(-i beta H_B)
    ref = dense_exp(to_dense_matrix(transverse_field(3)), beta) @ psi
    np.testing.assert_allclose(sv.apply_mixer(psi.copy(), beta), ref, atol=1e-10)


def test_diagonal_phase_examples(rng):
    sk2 = ProblemInstance("SK", 2, ((0, 1, 1.0),))
    psi = random_state(rng, 2)
    np.testing.assert_allclose(sv.apply_diagonal_phase(psi.copy(), sk2.h_diag, 0.0), psi)
    out = sv.apply_diagonal_phase(psi.copy(), sk2.h_diag, np.pi)
    np.testing.assert_allclose(out, -psi, atol=1e-14)
    path = ProblemInstance("u3R", 3, ((0, 1, 1.0), (1, 2, 1.0)))
    gamma = 0.731
    psi = random_state(rng, 3)
    ref = dense_exp(to_dense_matrix(cost_hamiltonian(path)), gamma) @ psi
    np.testing.assert_allclose(sv.apply_diagonal_phase(psi.copy(), path.h_diag, gamma), ref, atol=1e-10)
    with pytest.raises(ValueError):
        sv.apply_diagonal_phase(psi, np.zeros(4), 0.1)


@pytest.mark.parametrize("m_type", sv.M_TYPES)
@pytest.mark.parametrize("pair", [(0, 1), (2, 0), (1, 3)])
def test_two_body_exp_dense_oracle(rng, m_type, pair):
    i, j = pair
    n, theta, alpha = 4, 0.37, 0.5
    gen = two_body(n, i, j, "Z", "Z") + symmetric_pair(n, i, j, m_type, alpha)
    psi = random_state(rng, n)
    ref = dense_exp(to_dense_matrix(gen), theta) @ psi
    got = sv.apply_two_body_exp(psi.copy(), i, j, theta, alpha, m_type)
    np.testing.assert_allclose(got, ref, atol=1e-10)


def test_two_body_exp_reductions(rng):
    psi = random_state(rng, 3)
    np.testing.assert_allclose(sv.apply_two_body_exp(psi.copy(), 0, 2, 0.0, 0.9, "YY"), psi, atol=1e-15)
    inst = ProblemInstance("SK", 3, ((0, 2, 1.0),))
    ref = sv.apply_diagonal_phase(psi.copy(), inst.h_diag, 0.41)
    for m in ("none", "YY", "XZ"):
        np.testing.assert_allclose(sv.apply_two_body_exp(psi.copy(), 0, 2, 0.41, 0.0, m), ref, atol=1e-14)
    with pytest.raises(ValueError):
        sv.apply_two_body_exp(psi, 1, 1, 0.1, 0.1, "YY")


def test_multi_type_generator(rng):
    n = 3
    gen = (two_body(n, 0, 1, "Z", "Z") + symmetric_pair(n, 0, 1, "YZ", 0.3)
           + symmetric_pair(n, 0, 1, "YY", -0.7))
    psi = random_state(rng, n)
    ref = dense_exp(to_dense_matrix(gen), 0.8) @ psi
    got = sv.apply_two_body_exp(psi.copy(), 0, 1, 0.8, [0.3, -0.7], ("YZ", "YY"))
    np.testing.assert_allclose(got, ref, atol=1e-10)


def test_expectation_examples():
    u = generate("w3R", 6, 1)
    assert sv.expectation_diagonal(sv.plus_state(6), u.h_diag) == pytest.approx(-u.weights.sum() / 2, abs=1e-12)
    sk = generate("SK", 6, 1)
    assert sv.expectation_diagonal(sv.plus_state(6), sk.h_diag) == pytest.approx(0.0, abs=1e-12)
    sk2 = ProblemInstance("SK", 2, ((0, 1, 1.0),))
    assert sv.expectation_diagonal(sv.basis_state(2, 0), sk2.h_diag) == 1
    assert sv.expectation_diagonal(sv.basis_state(2, 0b10), sk2.h_diag) == -1


def test_fidelity_examples(rng):
    assert sv.fidelity(sv.plus_state(2), [0b01, 0b10]) == pytest.approx(0.5)
    psi = np.zeros(8, dtype=complex)
    psi[[3, 4]] = 2 ** -0.5
    assert sv.fidelity(psi, [3, 4]) == pytest.approx(1.0)
    psi = random_state(rng, 3)
    ground = [1, 6]
    assert sv.fidelity(psi, ground) == pytest.approx(sum(abs(psi[z]) ** 2 for z in ground))
    with pytest.raises(ValueError):
        sv.fidelity(psi, [])


def test_gauge_invariance(rng):
    inst = generate("SK", 5, 3)
    psi = random_state(rng, 5)
    rot = np.exp(1j * 1.234) * psi
    assert sv.expectation_diagonal(rot, inst.h_diag) == pytest.approx(
        sv.expectation_diagonal(psi, inst.h_diag), abs=1e-15)
    assert sv.fidelity(rot, inst.solution.ground) == pytest.approx(sv.fidelity(psi, inst.solution.ground), abs=1e-15)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_norm_preserved_over_random_gate_sequence(seed):
    rng = np.random.default_rng(seed)
    n = 5
    inst = generate("SK", n, seed % 1000)
    psi = sv.plus_state(n)
    for _ in range(100):
        kind = rng.integers(3)
        if kind == 0:
            sv.apply_mixer(psi, rng.uniform(-np.pi, np.pi))
        elif kind == 1:
            sv.apply_diagonal_phase(psi, inst.h_diag, rng.uniform(-np.pi, np.pi))
        else:
            i, j = rng.choice(n, size=2, replace=False)
            m = sv.M_TYPES[rng.integers(len(sv.M_TYPES))]
            sv.apply_two_body_exp(psi, int(i), int(j), rng.uniform(-2, 2), rng.uniform(-2, 2), m)
    assert abs(sv.norm(psi) - 1) < 1e-9


@pytest.mark.parametrize("m_type", ["YY", "XX"])
def test_disjoint_blocks_commute(rng, m_type):
    psi = random_state(rng, 6)
    matching = [(0, 3), (1, 5), (2, 4)]
    thetas = rng.uniform(-1, 1, 3)
    a = psi.copy()
    for (i, j), t in zip(matching, thetas):
        sv.apply_two_body_exp(a, i, j, t, 0.6, m_type)
    b = psi.copy()
    for (i, j), t in reversed(list(zip(matching, thetas))):
        sv.apply_two_body_exp(b, i, j, t, 0.6, m_type)
    assert np.max(np.abs(a - b)) < 1e-12


def test_apply_blocks_matches_sequential(rng):
    inst = generate("u3R", 8, 4)
    ii, jj = inst.pairs
    us = sv.two_body_unitaries(rng.uniform(-1, 1, inst.num_edges), 0.3, "YY")
    psi = random_state(rng, 8)
    ref = psi.copy()
    for e in range(inst.num_edges):
        sv.apply_two_qubit(ref, us[e], int(ii[e]), int(jj[e]))
    np.testing.assert_allclose(sv.apply_blocks(psi.copy(), us, ii, jj), ref, atol=1e-13)


@pytest.mark.parametrize("m_type", ["YY", "XX"])
def test_fused_pair_layer_matches_blocks(rng, m_type):
    inst = generate("w3R", 8, 2)
    ii, jj = inst.pairs
    thetas, offsets = rng.uniform(-1, 1, inst.num_edges), rng.uniform(-1, 1, inst.num_edges)
    psi = random_state(rng, 8)
    us = sv.two_body_unitaries(thetas, 0.7, m_type) * np.exp(-1j * offsets)[:, None, None]
    ref = sv.apply_blocks(psi.copy(), us, ii, jj)
    got = sv.apply_zz_pair_layer(psi.copy(), ii, jj, thetas, 0.7 * thetas, offsets, m_type)
    np.testing.assert_allclose(got, ref, atol=1e-13)
    with pytest.raises(ValueError):
        sv.apply_zz_pair_layer(psi, ii, jj, thetas, thetas, offsets, "YZ")
