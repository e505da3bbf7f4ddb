import numpy as np
import pytest

from vqalab.linalg import embed, kron
from vqalab.pauli import (
    PAULI_MATS,
    PauliString,
    coefficient_four_norm_dense,
    enumerate_paulis,
    hermitian_from_coefficients,
    k_norm_dense,
    pauli_coefficient,
    pauli_coefficients_dense,
    pauli_matrix,
    random_hermitian,
    two_norm,
)

rng = np.random.default_rng(23)


def test_code_table():
    # 0 -> I, 1 -> X, 2 -> Z, 3 -> Y
    assert np.allclose(pauli_matrix(PauliString((2,))), np.diag([1, -1]))
    assert np.allclose(pauli_matrix(PauliString((1,))), [[0, 1], [1, 0]])
    assert np.allclose(pauli_matrix(PauliString((3,))), [[0, -1j], [1j, 0]])


def test_string_round_trip():
    p = PauliString.from_string("IZXY")
    assert p.digits == (0, 2, 1, 3)
    assert p.to_string() == "IZXY"
    assert PauliString.from_index(p.index(), 4) == p


def test_identity_matrix():
    assert np.allclose(pauli_matrix(PauliString((0, 0, 0))), np.eye(8))


def test_matrix_is_kron_of_factors():
    p = PauliString.from_string("XZ")
    assert np.allclose(pauli_matrix(p), kron(PAULI_MATS[1], PAULI_MATS[2]))


def test_orthogonality_and_hermiticity():
    n = 2
    mats = [pauli_matrix(p) for p in enumerate_paulis(n)]
    for i, a in enumerate(mats):
        assert np.allclose(a, a.conj().T)
        for j, b in enumerate(mats):
            expected = 2**n if i == j else 0.0
            assert abs(np.trace(a @ b) - expected) < 1e-12


def test_enumeration_order_lexicographic():
    first = [p.to_string() for p in list(enumerate_paulis(2))[:6]]
    assert first == ["II", "IX", "IZ", "IY", "XI", "XX"]


def test_coefficient_z_last_qubit():
    n = 3
    w = embed(PAULI_MATS[2], n, n - 1)
    assert abs(pauli_coefficient(w, PauliString((0, 0, 2))) - 2 ** (n / 2)) < 1e-12
    assert abs(pauli_coefficient(w, PauliString((0, 2, 0)))) < 1e-12
    assert abs(pauli_coefficient(w, PauliString((2, 0, 2)))) < 1e-12


def test_coefficient_projector_identity():
    # |0><0| on the last qubit = (I + Z)/2
    n = 3
    proj = embed(np.diag([1.0, 0.0]), n, n - 1)
    assert abs(pauli_coefficient(proj, PauliString((0, 0, 2))) - 2 ** (n / 2) / 2) < 1e-12


def test_coefficient_rejects_non_hermitian():
    with pytest.raises(ValueError):
        pauli_coefficient(np.array([[0, 1], [0, 0]], dtype=complex), PauliString((2,)))


def test_dense_coefficients_match_single_coefficient():
    n = 3
    w = random_hermitian(n, rng)
    coeffs = pauli_coefficients_dense(w)
    for p in enumerate_paulis(n):
        assert abs(coeffs[p.index()] - pauli_coefficient(w, p)) < 1e-10


def test_completeness_parseval():
    for n in (2, 3, 4):
        w = random_hermitian(n, rng)
        coeffs = pauli_coefficients_dense(w)
        assert abs(np.sum(coeffs**2) - two_norm(w) ** 2) < 1e-9


def test_reconstruction_round_trip():
    n = 2
    w = random_hermitian(n, rng)
    coeffs = pauli_coefficients_dense(w)
    assert np.max(np.abs(hermitian_from_coefficients(coeffs, n) - w)) < 1e-10


def test_k_norm_single_pauli_is_one():
    p = pauli_matrix(PauliString.from_string("XZY"))
    assert abs(k_norm_dense(p) - 1.0) < 1e-12


def test_k_norm_flat_coefficients_floor():
    # equal weight on all 4^n strings -> 2^(-n/2)
    n = 2
    coeffs = np.full(4**n, 0.37)
    w = hermitian_from_coefficients(coeffs, n)
    assert abs(k_norm_dense(w) - 2 ** (-n / 2)) < 1e-12


def test_k_norm_matches_bruteforce_enumeration():
    n = 3
    w = random_hermitian(n, rng)
    brute = sum(pauli_coefficient(w, p) ** 4 for p in enumerate_paulis(n)) ** 0.25
    assert abs(k_norm_dense(w) - brute / two_norm(w)) < 1e-9
    assert abs(coefficient_four_norm_dense(w) - brute) < 1e-9


def test_k_norm_scale_invariance_and_range():
    for n in (2, 3):
        w = random_hermitian(n, rng)
        v = k_norm_dense(w)
        assert abs(k_norm_dense(2.7 * w) - v) < 1e-12
        assert abs(k_norm_dense(-0.3 * w) - v) < 1e-12
        assert 2 ** (-n / 2) - 1e-12 <= v <= 1 + 1e-12


def test_k_norm_rejects_zero():
    with pytest.raises(ValueError):
        k_norm_dense(np.zeros((4, 4)))


def test_four_norm_absolute_homogeneity():
    w = random_hermitian(2, rng)
    assert abs(coefficient_four_norm_dense(-2.0 * w) - 2.0 * coefficient_four_norm_dense(w)) < 1e-10
