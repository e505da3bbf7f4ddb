"""Observable construction, objective evaluation, fidelity, and exact
parameter-shift gradients.

Objective: f(theta) = tr(W sigma_{C(theta)}) for a pure input sigma, i.e.
<psi|W|psi> with psi = C(theta)|sigma>. Expectations never densify W: the
all-zeros projector reads off one amplitude, single-site projectors and Z
marginalize one qubit axis, and Pauli strings act site by site.

Serialized observable spec strings (1-based sites): "global0", "local-avg",
"z:<i>", "proj0:<i>", "pauli:<IXZY string>".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import Ansatz, apply
from .linalg import Statevector
from .pauli import PAULI_MATS, PauliString

PROJ0 = np.array([[1, 0], [0, 0]], dtype=complex)


@dataclass(frozen=True)
class Observable:
    kind: str  # "global0" | "local-avg" | "proj0" | "z" | "pauli"
    n: int
    site: int | None = None  # 0-based, for proj0/z
    pauli: PauliString | None = None

    def __post_init__(self):
        if self.kind in ("proj0", "z"):
            if self.site is None or not 0 <= self.site < self.n:
                raise ValueError(f"site out of range for {self.kind} on {self.n} qubits")
        elif self.kind == "pauli":
            if self.pauli is None or self.pauli.n != self.n:
                raise ValueError("pauli observable needs a matching-length string")
        elif self.kind not in ("global0", "local-avg"):
            raise ValueError(f"unknown observable kind {self.kind!r}")

    def label(self) -> str:
        if self.kind in ("proj0", "z"):
            return f"{self.kind}:{self.site + 1}"
        if self.kind == "pauli":
            return f"pauli:{self.pauli.to_string()}"
        return self.kind


def parse_observable(text: str, n: int) -> Observable:
    text = text.strip()
    if text == "global0":
        return Observable("global0", n)
    if text == "local-avg":
        return Observable("local-avg", n)
    if ":" in text:
        kind, _, arg = text.partition(":")
        if kind in ("z", "proj0"):
            site = int(arg)
            if not 1 <= site <= n:
                raise ValueError(f"site {site} out of range 1..{n}")
            return Observable(kind, n, site=site - 1)
        if kind == "pauli":
            p = PauliString.from_string(arg)
            if p.n != n:
                raise ValueError(f"Pauli string length {p.n} != n={n}")
            return Observable("pauli", n, pauli=p)
    raise ValueError(f"cannot parse observable spec {text!r}")


def _prob_zero(amps: np.ndarray, n: int, site: int) -> float:
    t = np.abs(amps.reshape([2] * n)) ** 2
    axes = tuple(a for a in range(n) if a != site)
    return float(t.sum(axis=axes)[0])


def _pauli_apply(amps: np.ndarray, n: int, p: PauliString) -> np.ndarray:
    t = amps.reshape([2] * n)
    for site, code in enumerate(p.digits):
        if code == 0:
            continue
        t = np.tensordot(PAULI_MATS[code], t, axes=([1], [site]))
        t = np.moveaxis(t, 0, site)
    return t.reshape(-1)


def expectation_state(psi: Statevector, w: Observable) -> float:
    if psi.n != w.n:
        raise ValueError(f"state has {psi.n} qubits, observable has {w.n}")
    amps = psi.amps
    if w.kind == "global0":
        return float(np.abs(amps[0]) ** 2)
    if w.kind == "proj0":
        return _prob_zero(amps, psi.n, w.site)
    if w.kind == "z":
        return 2.0 * _prob_zero(amps, psi.n, w.site) - 1.0
    if w.kind == "local-avg":
        return float(np.mean([_prob_zero(amps, psi.n, i) for i in range(psi.n)]))
    return float(np.vdot(amps, _pauli_apply(amps, psi.n, w.pauli)).real)


def expectation(sigma: Statevector, w: Observable, ansatz: Ansatz, theta: np.ndarray) -> float:
    """f(theta) = tr(W sigma_C); in [0,1] for projector-valued W, [-1,1] for Paulis."""
    return expectation_state(apply(ansatz, theta, sigma), w)


def fidelity(rho: Statevector, sigma: Statevector) -> float:
    if rho.n != sigma.n:
        raise ValueError("states must have equal qubit counts")
    return float(np.abs(np.vdot(rho.amps, sigma.amps)) ** 2)


def _resolve_index(ansatz: Ansatz, index) -> int:
    if isinstance(index, tuple):
        return ansatz.flat_index(*index)
    idx = int(index)
    if not 0 <= idx < ansatz.param_count:
        raise IndexError(f"parameter index {idx} out of range 0..{ansatz.param_count - 1}")
    return idx


def parameter_shift_grad(
    sigma: Statevector, w: Observable, ansatz: Ansatz, theta: np.ndarray, index
) -> float:
    """Exact d f / d theta_index from two shifted evaluations.

    Half-angle rotation convention => shift +-pi/2 with a 1/2 prefactor.
    """
    idx = _resolve_index(ansatz, index)
    shifted = np.array(theta, dtype=float)
    shifted[idx] += np.pi / 2
    plus = expectation(sigma, w, ansatz, shifted)
    shifted[idx] -= np.pi
    minus = expectation(sigma, w, ansatz, shifted)
    return (plus - minus) / 2.0


def grad(sigma: Statevector, w: Observable, ansatz: Ansatz, theta: np.ndarray) -> np.ndarray:
    return np.array(
        [parameter_shift_grad(sigma, w, ansatz, theta, i) for i in range(ansatz.param_count)]
    )


def finite_difference_grad(
    sigma: Statevector,
    w: Observable,
    ansatz: Ansatz,
    theta: np.ndarray,
    index=None,
    h: float = 1e-5,
) -> float | np.ndarray:
    """Central finite differences; the independent check on the shift rule."""

    def fd(idx: int) -> float:
        shifted = np.array(theta, dtype=float)
        shifted[idx] += h
        plus = expectation(sigma, w, ansatz, shifted)
        shifted[idx] -= 2 * h
        minus = expectation(sigma, w, ansatz, shifted)
        return (plus - minus) / (2 * h)

    if index is None:
        return np.array([fd(i) for i in range(ansatz.param_count)])
    return fd(_resolve_index(ansatz, index))


def observable_matrix(w: Observable) -> np.ndarray:
    """Dense matrix (test/oracle path only)."""
    from .linalg import embed
    from .pauli import pauli_matrix

    d = 2**w.n
    if w.kind == "global0":
        m = np.zeros((d, d), dtype=complex)
        m[0, 0] = 1.0
        return m
    if w.kind == "proj0":
        return embed(PROJ0, w.n, w.site)
    if w.kind == "z":
        return embed(PAULI_MATS[2], w.n, w.site)
    if w.kind == "local-avg":
        return sum(embed(PROJ0, w.n, i) for i in range(w.n)) / w.n
    return pauli_matrix(w.pauli)


def product_factors(w: Observable) -> list[np.ndarray]:
    """Per-site 2x2 factors for product-form observables; local-avg has none."""
    if w.kind == "local-avg":
        raise ValueError("the local average is a sum, not a product observable")
    if w.kind == "global0":
        return [PROJ0.copy() for _ in range(w.n)]
    if w.kind == "proj0":
        return [PROJ0.copy() if i == w.site else np.eye(2, dtype=complex) for i in range(w.n)]
    if w.kind == "z":
        return [
            PAULI_MATS[2].copy() if i == w.site else np.eye(2, dtype=complex)
            for i in range(w.n)
        ]
    return [PAULI_MATS[d].copy() for d in w.pauli.digits]
