"""Pauli-string algebra: enumeration, matrix realization, and orthonormal-basis
coefficient extraction.

Digit code table (nonstandard on purpose, matching the rest of the package's
serialization): 0 -> I, 1 -> X, 2 -> Z, 3 -> Y. Text form uses the characters
"IXZY" with qubit 1 leftmost, e.g. "IZXY". Enumeration order is lexicographic
over base-4 digit strings with qubit 1 as the most significant digit, so
string index == int(digits, base 4).

The orthonormal basis element attached to a Pauli string P on n qubits is
K = P / 2^(n/2), so tr(K_a K_b) = delta_ab and any Hermitian W expands as
W = sum_K tr(K W) K with real coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .linalg import is_hermitian, kron_all, require_hermitian

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)

PAULI_MATS = (PAULI_I, PAULI_X, PAULI_Z, PAULI_Y)
PAULI_CHARS = "IXZY"

DENSE_QUBIT_CAP = 14
KNORM_QUBIT_CAP = 8


@dataclass(frozen=True)
class PauliString:
    digits: tuple[int, ...]

    def __post_init__(self):
        if any(d not in (0, 1, 2, 3) for d in self.digits):
            raise ValueError(f"digit codes must be in 0..3, got {self.digits}")

    @property
    def n(self) -> int:
        return len(self.digits)

    @classmethod
    def from_string(cls, s: str) -> "PauliString":
        try:
            return cls(tuple(PAULI_CHARS.index(c) for c in s.upper()))
        except ValueError:
            raise ValueError(f"Pauli text must use characters IXZY, got {s!r}") from None

    @classmethod
    def from_index(cls, idx: int, n: int) -> "PauliString":
        digits = []
        for _ in range(n):
            digits.append(idx % 4)
            idx //= 4
        return cls(tuple(reversed(digits)))

    @classmethod
    def single(cls, n: int, site: int, code: int) -> "PauliString":
        """Pauli `code` on 0-based qubit `site`, identity elsewhere."""
        digits = [0] * n
        digits[site] = code
        return cls(tuple(digits))

    def to_string(self) -> str:
        return "".join(PAULI_CHARS[d] for d in self.digits)

    def index(self) -> int:
        idx = 0
        for d in self.digits:
            idx = idx * 4 + d
        return idx

    def weight(self) -> int:
        return sum(1 for d in self.digits if d != 0)


def enumerate_paulis(n: int) -> Iterator[PauliString]:
    for idx in range(4**n):
        yield PauliString.from_index(idx, n)


def pauli_matrix(p: PauliString) -> np.ndarray:
    if p.n > DENSE_QUBIT_CAP:
        raise ValueError(f"dense Pauli realization capped at {DENSE_QUBIT_CAP} qubits")
    return kron_all(*(PAULI_MATS[d] for d in p.digits))


def two_norm(w: np.ndarray) -> float:
    """Frobenius norm, i.e. the 2-norm of the orthonormal coefficient vector."""
    return float(np.linalg.norm(np.asarray(w)))


def pauli_coefficient(w: np.ndarray, p: PauliString) -> float:
    """tr(K W) with K = P / 2^(n/2); real for Hermitian W."""
    w = require_hermitian(w)
    if w.shape[0] != 2**p.n:
        raise ValueError(f"dimension mismatch: W is {w.shape}, Pauli has {p.n} qubits")
    val = np.einsum("ab,ba->", pauli_matrix(p), w) / 2 ** (p.n / 2)
    return float(val.real)


def _coefficient_transform_matrix() -> np.ndarray:
    # M[s, 2*b + a] = K_s[a, b] so that c_s = sum_ab M[s, 2b+a] W[b, a]
    m = np.zeros((4, 4), dtype=complex)
    for s, mat in enumerate(PAULI_MATS):
        for a in range(2):
            for b in range(2):
                m[s, 2 * b + a] = mat[a, b] / np.sqrt(2)
    return m


_COEFF_M4 = _coefficient_transform_matrix()


def pauli_coefficients_dense(w: np.ndarray, n: int | None = None) -> np.ndarray:
    """All 4^n orthonormal-Pauli coefficients of W, in enumeration order.

    One 4x4 mode product per site, so O(n 4^n) instead of a 4^n-term loop of
    dense traces.
    """
    w = np.asarray(w, dtype=complex)
    if n is None:
        n = int(round(np.log2(w.shape[0])))
    if w.shape != (2**n, 2**n):
        raise ValueError(f"expected a {2**n}x{2**n} matrix, got {w.shape}")
    # c_s = sum_ab K_s[a,b] W[b,a]; pair row bit b_i with col bit a_i per site
    t = w.reshape([2] * (2 * n))
    order = [ax for i in range(n) for ax in (i, n + i)]
    t = np.transpose(t, order).reshape([4] * n)
    for i in range(n):
        t = np.tensordot(_COEFF_M4, t, axes=([1], [i]))
        t = np.moveaxis(t, 0, i)
    coeffs = t.reshape(-1)
    imag = float(np.max(np.abs(coeffs.imag))) if coeffs.size else 0.0
    if imag > 1e-9 * max(1.0, float(np.max(np.abs(coeffs.real)))):
        raise ValueError("coefficients are not real; input is not Hermitian")
    return np.ascontiguousarray(coeffs.real)


def coefficient_four_norm_dense(w: np.ndarray) -> float:
    """Unnormalized concentration kernel: the l4 norm of the coefficient vector.

    This is the absolutely homogeneous quantity the norm-axiom suite checks;
    dividing by ||W||_2 gives `k_norm_dense`.
    """
    c = pauli_coefficients_dense(np.asarray(w, dtype=complex))
    return float(np.sum(c**4) ** 0.25)


def k_norm_dense(w: np.ndarray) -> float:
    """Concentration norm of the Pauli-coefficient distribution of W.

    (1/||W||_2) * [sum_K tr(K W)^4]^(1/4); lies in [2^(-n/2), 1], with 1 for a
    single Pauli string and 2^(-n/2) for perfectly flat coefficients.
    """
    w = require_hermitian(w)
    n = int(round(np.log2(w.shape[0])))
    if n > KNORM_QUBIT_CAP:
        raise ValueError(f"dense coefficient enumeration capped at {KNORM_QUBIT_CAP} qubits")
    nrm2 = two_norm(w)
    if nrm2 == 0.0:
        raise ValueError("concentration norm is undefined for the zero matrix")
    return coefficient_four_norm_dense(w) / nrm2


def pauli_distribution_dense(w: np.ndarray) -> np.ndarray:
    """Probabilities tr(K W)^2 / ||W||_2^2 over all 4^n basis elements; sums to 1."""
    c = pauli_coefficients_dense(np.asarray(w, dtype=complex))
    total = float(np.sum(c**2))
    if total == 0.0:
        raise ValueError("distribution is undefined for the zero matrix")
    return c**2 / total


def hermitian_from_coefficients(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Inverse of `pauli_coefficients_dense` (test utility)."""
    w = np.zeros((2**n, 2**n), dtype=complex)
    for idx, c in enumerate(coeffs):
        if c != 0.0:
            p = PauliString.from_index(idx, n)
            w += c * pauli_matrix(p) / 2 ** (n / 2)
    return w


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
    return (a + a.conj().T) / 2


__all__ = [
    "PauliString",
    "PAULI_MATS",
    "PAULI_CHARS",
    "enumerate_paulis",
    "pauli_matrix",
    "pauli_coefficient",
    "pauli_coefficients_dense",
    "coefficient_four_norm_dense",
    "k_norm_dense",
    "pauli_distribution_dense",
    "hermitian_from_coefficients",
    "random_hermitian",
    "two_norm",
]
