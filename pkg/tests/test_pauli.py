import numpy as np
import pytest
from hypothesis import given, strategies as st

from sqaoa.pauli import (
    DimensionError,
    PauliSum,
    PauliTerm,
    ResourceError,
    bch_second_order,
    commutator,
    multiply,
    nested_commutator,
    to_dense_matrix,
    transverse_field,
)
from sqaoa.problems import ProblemInstance, cost_hamiltonian

from conftest import kron_string, kron_sum, random_sum

axes_st = st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.text("IXYZ", min_size=n, max_size=n), st.text("IXYZ", min_size=n, max_size=n)))


def test_multiply_table():
    assert multiply(PauliTerm(1, "X"), PauliTerm(1, "Z")) == PauliTerm(-1j, "Y")
    assert multiply(PauliTerm(1, "X"), PauliTerm(1, "X")) == PauliTerm(1, "I")
    assert multiply(PauliTerm(1, "Y"), PauliTerm(1, "Z")) == PauliTerm(1j, "X")
    assert multiply(PauliTerm(1, "XZ"), PauliTerm(1, "ZZ")) == PauliTerm(-1j, "YI")


def test_multiply_two_qubit_against_kron():
    prod = multiply(PauliTerm(1, "XZ"), PauliTerm(1, "ZZ"))
    np.testing.assert_allclose(prod.coefficient * kron_string(prod.axes),
                               kron_string("XZ") @ kron_string("ZZ"), atol=1e-14)


@given(axes_st)
def test_multiply_matches_matrices(pair):
    a, b = pair
    prod = multiply(PauliTerm(1, a), PauliTerm(1, b))
    np.testing.assert_allclose(prod.coefficient * kron_string(prod.axes),
                               kron_string(a) @ kron_string(b), atol=1e-14)


def test_multiply_dimension_mismatch():
    with pytest.raises(DimensionError):
        multiply(PauliTerm(1, "X"), PauliTerm(1, "XZ"))


def test_canonicalization_merges_and_prunes():
    s = PauliSum.from_terms([(1, "ZI"), (2, "ZI"), (1, "XX"), (-1, "XX"), (1e-14, "YY")])
    assert s.to_dict() == {"ZI": 3}
    assert [t.axes for t in PauliSum.from_terms([(1, "ZX"), (1, "IY"), (1, "XI")]).terms] == ["IY", "XI", "ZX"]


def test_commutator_examples():
    x0 = PauliSum.from_terms([(1, "XI")])
    zz = PauliSum.from_terms([(1, "ZZ")])
    assert commutator(x0, zz) == PauliSum.from_terms([(-2j, "YZ")])
    assert not commutator(zz, zz)


def test_first_order_cd_two_vertex_sk():
    inst = ProblemInstance("SK", 2, ((0, 1, 1.0),))
    hb, hc = transverse_field(2), cost_hamiltonian(inst)
    got = 1j * commutator(hb, hc)
    assert got == PauliSum.from_terms([(-2, "YZ"), (-2, "ZY")])


def test_commutator_antisymmetry_and_jacobi(rng):
    for _ in range(20):
        a, b, c = (random_sum(rng, 3, 5) for _ in range(3))
        assert commutator(a, b).allclose(-commutator(b, a), atol=1e-12)
        jac = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b))
        assert jac.allclose(PauliSum.zero(3), atol=1e-10)


def test_commutator_bilinear(rng):
    a, b, c = (random_sum(rng, 3, 4) for _ in range(3))
    lhs = commutator(2.5 * a + b, c)
    rhs = 2.5 * commutator(a, c) + commutator(b, c)
    assert lhs.allclose(rhs, atol=1e-12)


def test_dense_matches_commutator_of_dense(rng):
    for n in (1, 3, 5, 8):
        a, b = random_sum(rng, n, 6), random_sum(rng, n, 6)
        A, B = to_dense_matrix(a), to_dense_matrix(b)
        assert np.max(np.abs(to_dense_matrix(commutator(a, b)) - (A @ B - B @ A))) < 1e-12


def test_to_dense_matrix_against_kron(rng):
    s = random_sum(rng, 4, 10)
    np.testing.assert_allclose(to_dense_matrix(s), kron_sum(s), atol=1e-14)
    np.testing.assert_array_equal(to_dense_matrix(PauliSum.from_terms([(1, "Z")])), np.diag([1, -1]))
    inst = ProblemInstance("SK", 2, ((0, 1, 1.0),))
    np.testing.assert_array_equal(to_dense_matrix(cost_hamiltonian(inst)), np.diag([1, -1, -1, 1]))


def test_dense_commutator_identity_i_hb_hc():
    inst = ProblemInstance("SK", 3, ((0, 1, 1.0), (0, 2, -1.0), (1, 2, 1.0)))
    hb, hc = transverse_field(3), cost_hamiltonian(inst)
    B, C = to_dense_matrix(hb), to_dense_matrix(hc)
    assert np.max(np.abs(to_dense_matrix(1j * commutator(hb, hc)) - 1j * (B @ C - C @ B))) < 1e-12


def test_dense_guard():
    with pytest.raises(ResourceError):
        to_dense_matrix(transverse_field(13))


def test_hermiticity_flag(rng):
    h = random_sum(rng, 3, 5, real=True)
    assert h.is_hermitian()
    anti = commutator(h, transverse_field(3))
    assert (1j * anti).is_hermitian()


def test_nested_commutator_orders():
    inst = ProblemInstance("SK", 2, ((0, 1, 1.0),))
    hb, hc = transverse_field(2), cost_hamiltonian(inst)
    assert nested_commutator(hb, hc, 1) == commutator(hb, hc)
    h = hb + hc
    assert nested_commutator(h, hc, 2) == commutator(h, commutator(h, commutator(h, hc)))
    with pytest.raises(ValueError):
        nested_commutator(hb, hc, 0)


def test_nested_commutator_dense_oracle():
    inst = ProblemInstance("SK", 3, ((0, 1, 1.0), (0, 2, -1.0), (1, 2, 1.0)))
    hb, hc = transverse_field(3), cost_hamiltonian(inst)
    h = 0.7 * hb + 1.3 * hc
    seed = commutator(hb, hc)
    got = to_dense_matrix(nested_commutator(h, seed, 2))
    H, S = to_dense_matrix(h), to_dense_matrix(seed)
    ref = S
    for _ in range(3):
        ref = H @ ref - ref @ H
    assert np.max(np.abs(got - ref)) < 1e-10


def test_bch_two_generators():
    inst = ProblemInstance("SK", 2, ((0, 1, 1.0),))
    hb, hc = transverse_field(2), cost_hamiltonian(inst)
    beta, gamma = 0.3, 0.8
    got = bch_second_order([(beta, hb), (gamma, hc)])
    ref = beta * hb + gamma * hc + (-0.5j * beta * gamma) * commutator(hb, hc)
    assert got.allclose(ref, atol=1e-15)


def test_bch_matches_matrix_log_to_second_order():
    # exp(-i a A) exp(-i b B) = exp(-i H_eff) + O(t^3)
    from scipy.linalg import expm
    inst = ProblemInstance("SK", 2, ((0, 1, 1.0),))
    hb, hc = transverse_field(2), cost_hamiltonian(inst)
    B, C = to_dense_matrix(hb), to_dense_matrix(hc)
    errs = []
    for t in (1e-2, 5e-3):
        heff = to_dense_matrix(bch_second_order([(t, hb), (2 * t, hc)]))
        errs.append(np.abs(expm(-1j * t * B) @ expm(-2j * t * C) - expm(-1j * heff)).max())
    assert errs[0] / errs[1] == pytest.approx(8, rel=0.1)


def test_bch_errors():
    with pytest.raises(ValueError):
        bch_second_order([])
