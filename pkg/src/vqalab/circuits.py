"""Cascaded, brickwork, and pooled ansatz construction on a shared 2-qubit
block template (two arbitrary single-qubit rotations followed by a CNOT).

Conventions, fixed here and tested against the dense-matrix oracle:

* Single-qubit gate: U(alpha, beta, gamma) = Rz(alpha) Ry(beta) Rz(gamma)
  with R_a(phi) = exp(-i phi P_a / 2) (half-angle). All-zero parameters give
  the identity, so a zero parameter vector reduces any ansatz to its fixed
  CNOT skeleton.
* CNOT control is the lower-indexed qubit of each block.
* The cascade ansatz on n qubits with width-k subcircuits has T = n - k + 1
  subcircuits; subcircuit p occupies the qubit window starting at 0-based
  offset n - k - p + 1 (so p = T sits on qubits 1..k and p = 1 on the last
  k qubits, 1-based). As an operator product the ansatz reads
  E_1 E_2 ... E_T, i.e. subcircuit T is applied to the state FIRST.
* The flat parameter vector is the concatenation theta_1 (+) ... (+) theta_T
  in subcircuit order (not application order).
* With the half-angle convention the exact gradient shift is +-pi/2 with a
  1/2 prefactor; see `observables.parameter_shift_grad`, which is tested
  against central finite differences.

Qubit indices are 0-based internally; serialized formats are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .haar import haar_unitaries
from .linalg import Statevector

DENSE_UNITARY_CAP = 12

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

PARAMS_PER_BLOCK = 6


def rz(phi: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * phi), 0], [0, np.exp(0.5j * phi)]])


def ry(phi: float) -> np.ndarray:
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def single_qubit_gate(alpha: float, beta: float, gamma: float) -> np.ndarray:
    return rz(alpha) @ ry(beta) @ rz(gamma)


def block_unitary(params: np.ndarray) -> np.ndarray:
    """4x4 unitary of one block: singles on both qubits, then CNOT."""
    u0 = single_qubit_gate(*params[0:3])
    u1 = single_qubit_gate(*params[3:6])
    return CNOT @ np.kron(u0, u1)


def brickwork_pairs(width: int, depth: int) -> list[tuple[int, int]]:
    """Block placements of a width x depth brickwork, layer by layer.

    Odd layers pair (0,1),(2,3),...; even layers pair (1,2),(3,4),....
    Width 2 degenerates to `depth` stacked blocks on the single pair.
    """
    pairs = []
    for layer in range(depth):
        start = layer % 2 if width > 2 else 0
        pairs.extend((q, q + 1) for q in range(start, width - 1, 2))
    return pairs


@dataclass(frozen=True)
class SubcircuitTemplate:
    """Brickwork of 2-qubit blocks used as the k-qubit parameterized unitary."""

    width: int
    depth: int

    def __post_init__(self):
        if self.width < 2 or self.depth < 0:
            raise ValueError("template needs width >= 2 and depth >= 0")

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return brickwork_pairs(self.width, self.depth)

    @property
    def param_count(self) -> int:
        return PARAMS_PER_BLOCK * len(self.pairs)

    def dense_unitary(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.param_count,):
            raise ValueError(f"expected {self.param_count} parameters")
        u = np.eye(2**self.width, dtype=complex)
        for j, (q0, q1) in enumerate(self.pairs):
            b = block_unitary(theta[PARAMS_PER_BLOCK * j : PARAMS_PER_BLOCK * (j + 1)])
            u = _embed_pair(b, self.width, q0, q1) @ u
        return u


@dataclass(frozen=True)
class BlockPlacement:
    """One 2-qubit block: target qubits (0-based) and its flat-parameter slice."""

    q0: int
    q1: int
    offset: int


@dataclass(frozen=True)
class Ansatz:
    kind: str  # "mps" | "hea" | "qcnn"
    n: int
    k: int  # subcircuit width (mps) / block width 2 otherwise
    subcircuit_depth: int
    blocks: tuple[BlockPlacement, ...]  # application order: blocks[0] acts first
    subcircuit_slices: tuple[tuple[int, int], ...]  # (offset, length) per subcircuit p=1..T

    @property
    def param_count(self) -> int:
        return sum(length for _, length in self.subcircuit_slices)

    @property
    def subcircuit_count(self) -> int:
        return len(self.subcircuit_slices)

    def flat_index(self, p: int, q: int) -> int:
        """Flat position of parameter q (0-based) of subcircuit p (1-based)."""
        off, length = self.subcircuit_slices[p - 1]
        if not 0 <= q < length:
            raise IndexError(f"subcircuit {p} has {length} parameters")
        return off + q

    def block_unitaries(self, theta: np.ndarray) -> list[tuple[int, int, np.ndarray]]:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.param_count,):
            raise ValueError(
                f"parameter vector has length {theta.shape}, ansatz needs {self.param_count}"
            )
        return [
            (b.q0, b.q1, block_unitary(theta[b.offset : b.offset + PARAMS_PER_BLOCK]))
            for b in self.blocks
        ]


def build_ansatz(
    kind: str,
    n: int,
    k: int | None = None,
    depth: int | None = None,
    subcircuit_depth: int | None = None,
) -> Ansatz:
    kind = kind.lower()
    if kind == "mps":
        if k is None:
            raise ValueError("cascade ansatz needs the subcircuit width k")
        d = subcircuit_depth if subcircuit_depth is not None else k
        return _build_mps(n, k, d)
    if kind == "hea":
        if depth is None:
            raise ValueError("brickwork ansatz needs a depth")
        return _build_hea(n, depth)
    if kind == "qcnn":
        d = subcircuit_depth if subcircuit_depth is not None else 1
        return _build_qcnn(n, d)
    raise ValueError(f"unknown ansatz kind {kind!r}")


def _build_mps(n: int, k: int, subcircuit_depth: int) -> Ansatz:
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    template = SubcircuitTemplate(k, subcircuit_depth)
    t_count = n - k + 1
    m = template.param_count
    slices = tuple((m * (p - 1), m) for p in range(1, t_count + 1))
    blocks = []
    for p in range(t_count, 0, -1):  # subcircuit T is applied first
        start = n - k - p + 1
        off = m * (p - 1)
        for j, (q0, q1) in enumerate(template.pairs):
            blocks.append(
                BlockPlacement(start + q0, start + q1, off + PARAMS_PER_BLOCK * j)
            )
    return Ansatz("mps", n, k, subcircuit_depth, tuple(blocks), slices)


def _build_hea(n: int, depth: int) -> Ansatz:
    template = SubcircuitTemplate(n, depth)
    blocks = tuple(
        BlockPlacement(q0, q1, PARAMS_PER_BLOCK * j)
        for j, (q0, q1) in enumerate(template.pairs)
    )
    return Ansatz("hea", n, 2, depth, blocks, ((0, template.param_count),))


def _build_qcnn(n: int, stage_depth: int) -> Ansatz:
    if n < 2 or n & (n - 1):
        raise ValueError(f"pooled ansatz needs n a power of 2, got {n}")
    blocks: list[BlockPlacement] = []
    slices: list[tuple[int, int]] = []
    active = list(range(n))
    offset = 0
    while len(active) > 1:
        stage_params = PARAMS_PER_BLOCK * stage_depth * (len(active) // 2)
        slices.append((offset, stage_params))
        for i in range(0, len(active), 2):
            q0, q1 = active[i], active[i + 1]
            for _ in range(stage_depth):
                blocks.append(BlockPlacement(q0, q1, offset))
                offset += PARAMS_PER_BLOCK
        # pooling drops the lower-indexed qubit of each pair; the survivor
        # chain ends on the last qubit, where the readout observable sits
        active = active[1::2]
    return Ansatz("qcnn", n, 2, stage_depth, tuple(blocks), tuple(slices))


def stage_count(ansatz: Ansatz) -> int:
    """Pooling stages of a pooled ansatz (= subcircuit groups)."""
    if ansatz.kind != "qcnn":
        raise ValueError("stage_count applies to pooled ansatzes")
    return ansatz.subcircuit_count


def zero_params(ansatz: Ansatz) -> np.ndarray:
    return np.zeros(ansatz.param_count)


def random_params(
    ansatz: Ansatz, rng: np.random.Generator, low: float = 0.0, high: float = 2 * np.pi
) -> np.ndarray:
    return rng.uniform(low, high, size=ansatz.param_count)


def _apply_block_tensor(t: np.ndarray, u4: np.ndarray, q0: int, q1: int, n: int) -> np.ndarray:
    """Apply a 4x4 on qubit axes (q0, q1); trailing axes of t are batch axes."""
    g = u4.reshape(2, 2, 2, 2)
    t = np.tensordot(g, t, axes=([2, 3], [q0, q1]))
    # tensordot put the block's output axes in front
    return np.moveaxis(t, [0, 1], [q0, q1])


def apply(ansatz: Ansatz, theta: np.ndarray, psi: Statevector) -> Statevector:
    """Evolve a statevector; norm preserved within 1e-10 (checked on construction)."""
    if psi.n != ansatz.n:
        raise ValueError(f"state has {psi.n} qubits, ansatz has {ansatz.n}")
    t = psi.amps.reshape([2] * ansatz.n)
    for q0, q1, u4 in ansatz.block_unitaries(theta):
        t = _apply_block_tensor(t, u4, q0, q1, ansatz.n)
    return Statevector(ansatz.n, t.reshape(-1))


def _embed_pair(u4: np.ndarray, n: int, q0: int, q1: int) -> np.ndarray:
    d = 2**n
    t = np.eye(d, dtype=complex).reshape([2] * n + [d])
    t = _apply_block_tensor(t, u4, q0, q1, n)
    return t.reshape(d, d)


def dense_unitary(ansatz: Ansatz, theta: np.ndarray) -> np.ndarray:
    """Full 2^n x 2^n matrix of the ansatz (oracle path)."""
    if ansatz.n > DENSE_UNITARY_CAP:
        raise ValueError(f"dense unitary capped at {DENSE_UNITARY_CAP} qubits")
    d = 2**ansatz.n
    t = np.eye(d, dtype=complex).reshape([2] * ansatz.n + [d])
    for q0, q1, u4 in ansatz.block_unitaries(theta):
        t = _apply_block_tensor(t, u4, q0, q1, ansatz.n)
    return t.reshape(d, d)


def random_hea_state(n: int, depth: int, rng: np.random.Generator) -> Statevector:
    """Input-state generator: brickwork with Haar-random singles applied to |0...0>."""
    t = Statevector.zero(n).amps.reshape([2] * n)
    for q0, q1 in brickwork_pairs(n, depth):
        u4 = CNOT @ np.kron(haar_unitaries(rng, 2), haar_unitaries(rng, 2))
        t = _apply_block_tensor(t, u4, q0, q1, n)
    return Statevector(n, t.reshape(-1))


@dataclass(frozen=True)
class TemplateFamily:
    """Adapter exposing a subcircuit template as a unitary family for moment checks."""

    template: SubcircuitTemplate
    label: str = "hea-subcircuit"

    @property
    def dim(self) -> int:
        return 2**self.template.width

    @property
    def width(self) -> int:
        return self.template.width

    @property
    def depth(self) -> int:
        return self.template.depth

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        theta = rng.uniform(0.0, 2 * np.pi, size=self.template.param_count)
        return self.template.dense_unitary(theta)


@dataclass(frozen=True)
class FixedUnitaryFamily:
    """Degenerate one-element family (never a design); moment-check control case."""

    unitary: np.ndarray
    label: str = "fixed-unitary"

    @property
    def dim(self) -> int:
        return self.unitary.shape[0]

    @property
    def width(self) -> int:
        return int(round(np.log2(self.dim)))

    @property
    def depth(self) -> int:
        return 0

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return self.unitary
