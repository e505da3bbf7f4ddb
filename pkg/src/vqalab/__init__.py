"""Desk-scale laboratory for trainability and effective-subspace experiments
on cascaded-subcircuit state-approximation ansatzes."""

from .circuits import Ansatz, SubcircuitTemplate, apply, build_ansatz, dense_unitary
from .linalg import Statevector
from .observables import Observable, expectation, fidelity, grad, parse_observable
from .pauli import PauliString, k_norm_dense, pauli_coefficient, pauli_matrix
from .tensornet import PauliMPS, heisenberg_evolve, k_norm_mps

__version__ = "0.1.0"

__all__ = [
    "Ansatz",
    "Observable",
    "PauliMPS",
    "PauliString",
    "Statevector",
    "SubcircuitTemplate",
    "apply",
    "build_ansatz",
    "dense_unitary",
    "expectation",
    "fidelity",
    "grad",
    "heisenberg_evolve",
    "k_norm_dense",
    "k_norm_mps",
    "parse_observable",
    "pauli_coefficient",
    "pauli_matrix",
    "__version__",
]
