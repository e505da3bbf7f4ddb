"""Dense complex linear-algebra kernel: Kronecker products, matrix norms,
and the statevector container.

Bit-order convention, fixed globally for the whole package: qubit 1 is the
most significant bit of a basis index, so the basis label reads left to
right as the qubit string. ``basis_index((b1, ..., bn)) == sum(b_i 2^(n-i))``.
All other modules inherit this convention and it is pinned by round-trip
tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-10


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; dimensions multiply."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(*mats: np.ndarray) -> np.ndarray:
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def entrywise_one_norm(a: np.ndarray) -> float:
    """Sum of the absolute values of all matrix entries."""
    return float(np.abs(np.asarray(a)).sum())


def trace_norm(a: np.ndarray) -> float:
    """Sum of singular values via a dense SVD.

    Raises numpy.linalg.LinAlgError if the SVD fails to converge.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"trace_norm expects a square matrix, got shape {a.shape}")
    return float(np.linalg.svd(a, compute_uv=False).sum())


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.max(np.abs(a - a.conj().T)) < tol


def require_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if not is_hermitian(a, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    return a


def embed(op: np.ndarray, n: int, start: int) -> np.ndarray:
    """Embed an operator on contiguous qubits [start, start+m) (0-based) into n qubits."""
    m = int(round(np.log2(op.shape[0])))
    return kron_all(np.eye(2**start), op, np.eye(2 ** (n - start - m)))


def basis_index(bits) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | int(b)
    return idx


def index_bits(idx: int, n: int) -> tuple[int, ...]:
    return tuple((idx >> (n - 1 - i)) & 1 for i in range(n))


@dataclass(frozen=True)
class Statevector:
    """Pure state on n qubits; amps[basis_index(bits)] with qubit 1 = MSB."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amps, dtype=complex)
        if amps.shape != (2**self.n,):
            raise ValueError(f"expected {2**self.n} amplitudes, got shape {amps.shape}")
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {nrm} deviates from 1 beyond {NORM_TOL}")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def zero(cls, n: int) -> "Statevector":
        amps = np.zeros(2**n, dtype=complex)
        amps[0] = 1.0
        return cls(n, amps)

    @classmethod
    def from_bits(cls, bits) -> "Statevector":
        n = len(bits)
        amps = np.zeros(2**n, dtype=complex)
        amps[basis_index(bits)] = 1.0
        return cls(n, amps)

    def density(self) -> np.ndarray:
        return np.outer(self.amps, self.amps.conj())


def random_statevector(n: int, rng: np.random.Generator) -> Statevector:
    amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return Statevector(n, amps / np.linalg.norm(amps))
