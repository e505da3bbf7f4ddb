"""Exact transfer-matrix evaluation of Haar-averaged second moments of the
cascade ansatz, the variance bounds built on them, Monte-Carlo oracles, and
the two input-state functionals (rotated entrywise 1-norm, distance to the
nearest product state).

Averaging each width-k subcircuit over the Haar measure (top window first)
reduces the second moment of an overlap to a product of 2x2 matrices over a
two-element operator basis: the window content collapses onto either matching
projector blocks ("=") or mismatched ones ("!="). The coefficient schedule
implemented here was re-derived from the Weingarten first/second moment
formulas and is pinned, coefficient by coefficient, to an exact two-copy
twirl oracle and to brute-force Monte-Carlo in the test suite; where a
published transcription disagreed, the oracle won.

Conventions: bit strings are MSB-first (qubit 1 leftmost), matching the
package-wide bit order. "Z on the last window" means the single-site Z
observable sits on any of the last k qubits; its second moment is
position-independent inside that window and reduces to a shorter chain when
the site lies above it.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from .haar import haar_unitaries, mean_and_se
from .linalg import Statevector

# ---------------------------------------------------------------------------
# transfer-matrix schedule
# ---------------------------------------------------------------------------


def _as_bits(x, n: int) -> tuple[int, ...]:
    if isinstance(x, str):
        bits = tuple(int(c) for c in x)
    else:
        bits = tuple(int(b) for b in x)
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise ValueError(f"expected an n={n} bit string, got {x!r}")
    return bits


def _global_pair(k: int, dtr: float, dip: float) -> tuple[float, float]:
    """(alpha, beta) weights produced by one window average, global observable.

    dtr = tr-pairing delta of the window content, dip = inner-product pairing
    delta. tau is the traceless-Pauli channel weight; the identity channel
    additionally collects the Z (x) identity term, hence the 2^(2k-1)-1 count.
    """
    nn = 2**k
    tau = (nn * dip - dtr) / (nn * nn - 1)
    alpha = (dtr + (2 ** (2 * k - 1) - 1) * tau) / 2 ** (k + 1)
    beta = (
        (2 ** (k - 1) - 1) * dtr + (2 ** (k - 1) + 1 - 2 ** (2 * k - 1)) * tau
    ) / 2 ** (k + 1)
    return alpha, beta


def global_interior_matrix(k: int, dtr: float, dip: float) -> np.ndarray:
    """Interior 2x2 transfer matrix, columns = image of the ("=", "!=") basis."""
    a_eq, b_eq = _global_pair(k, dtr, dip)
    a_ne, b_ne = _global_pair(k, dtr, 0.0)  # mismatched blocks never overlap
    return np.array([[a_eq, a_ne], [b_eq, b_ne]])


def global_boundary(k: int, dtr: float, dip: float) -> np.ndarray:
    """Final single-window average against the all-zeros projector."""
    nn = 2**k
    return np.array([dtr + dip, dtr]) / (nn * (nn + 1))


def second_moment_global(n: int, k: int, p, q, r, s) -> float:
    """Haar average of <0|(|p><q|)_C|0> <0|(|r><s|)_C|0> over the cascade.

    Exact for 2-design subcircuits; |value| <= 1 with geometric decay in the
    chain length.
    """
    if not 2 <= k < n:
        raise ValueError(f"need 2 <= k < n, got k={k}, n={n}")
    pb, qb, rb, sb = (_as_bits(x, n) for x in (p, q, r, s))
    dtr = float(pb[:k] == qb[:k]) * float(rb[:k] == sb[:k])
    dip = float(qb[:k] == rb[:k]) * float(pb[:k] == sb[:k])
    vec = np.array(_global_pair(k, dtr, dip))
    for i in range(k, n - 1):  # fresh 0-based bit entering each interior window
        dtr = float(pb[i] == qb[i]) * float(rb[i] == sb[i])
        dip = float(qb[i] == rb[i]) * float(pb[i] == sb[i])
        vec = global_interior_matrix(k, dtr, dip) @ vec
    dtr = float(pb[-1] == qb[-1]) * float(rb[-1] == sb[-1])
    dip = float(qb[-1] == rb[-1]) * float(pb[-1] == sb[-1])
    return float(global_boundary(k, dtr, dip) @ vec)


def _local_pair(k: int, overlap: float) -> tuple[float, float]:
    """(alpha, beta) weights for one window average, single-site Z observable.

    Only identity-on-the-first-qubit Paulis survive (the observable sits below
    the window), each trace contributing a factor 2. `overlap` is tr(A0 C0) of
    the two diagonal window blocks.
    """
    nn = 2**k
    tau = (nn * overlap - 1.0) / (nn * nn - 1)
    alpha = (1.0 + (4 ** (k - 1) - 1) * tau) / 2 ** (k - 1)
    beta = ((2 ** (k - 1) - 1) - (4 ** (k - 1) - 1) * tau) / 2 ** (k - 1)
    return alpha, beta


def local_interior_matrix(k: int) -> np.ndarray:
    a_eq, b_eq = _local_pair(k, 1.0)
    a_ne, b_ne = _local_pair(k, 0.0)
    return np.array([[a_eq, a_ne], [b_eq, b_ne]])


def local_boundary(k: int) -> np.ndarray:
    nn = 2**k
    return np.array([1.0 / (nn + 1), -1.0 / (nn * nn - 1)])


def second_moment_z_last(n: int, k: int) -> float:
    """Haar average of tr(Z_i |0...0><0...0|_C)^2 for i in the last window.

    Equals B0 + B1 * B2^(n-k-1); bounded below by B0 = 1/(2^(2k-1)+1).
    """
    if k < 2:
        raise ValueError("need k >= 2")
    if n == k:
        return 1.0 / (2**k + 1)  # single-window chain
    if n < k:
        raise ValueError(f"need n >= k, got n={n}, k={k}")
    vec = np.array(_local_pair(k, 1.0))
    mat = local_interior_matrix(k)
    for _ in range(n - k - 1):
        vec = mat @ vec
    return float(local_boundary(k) @ vec)


def local_chain_constants(k: int) -> tuple[float, float, float]:
    """(B0, B1, B2) with second_moment_z_last(n,k) = B0 + B1 B2^(n-k-1)."""
    mat = local_interior_matrix(k)
    evals, evecs = np.linalg.eig(mat)
    order = np.argsort(-evals.real)
    evals, evecs = evals[order].real, evecs[:, order].real
    coeffs = np.linalg.solve(evecs, np.array(_local_pair(k, 1.0)))
    bnd = local_boundary(k)
    b0 = float((bnd @ evecs[:, 0]) * coeffs[0])
    b1 = float((bnd @ evecs[:, 1]) * coeffs[1])
    return b0, b1, float(evals[1])


def second_moment_z_site(n: int, k: int, site: int) -> float:
    """Second moment for Z on 0-based `site`; sites above the last window
    reduce to a shorter chain with the Z at its bottom edge."""
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range")
    from_right = n - site  # 1-based distance from the bottom qubit
    if from_right <= k:
        return second_moment_z_last(n, k)
    return second_moment_z_last(n - from_right + k, k)


def global_mean_exact(n: int, k: int) -> float:
    """Haar average of the all-zeros overlap itself (sigma = |0...0>)."""
    return 2.0**-n


def global_variance_exact(n: int, k: int) -> float:
    """Exact 2-design variance of the global objective at sigma = |0...0>."""
    zeros = (0,) * n
    return second_moment_global(n, k, zeros, zeros, zeros, zeros) - 4.0**-n


def local_average_variance_exact(n: int, k: int) -> float:
    """Exact 2-design variance of the local-average objective at product input.

    Var(f_O) = (1/4n^2) sum_i m_i: single-site means vanish and cross terms
    cancel, leaving the per-site Z second moments, each reduced to its chain.
    """
    total = sum(second_moment_z_site(n, k, i) for i in range(n))
    return total / (4.0 * n * n)


def global_variance_bound(n: int, k: int, sparsity: float) -> float:
    """Upper bound sparsity / 4^(n-k-1) on the global-objective variance."""
    if sparsity < 0:
        raise ValueError("sparsity functional is nonnegative")
    return sparsity / 4.0 ** (n - k - 1)


def local_variance_floor(n: int, k: int, product_distance: float) -> float:
    """Lower bound 1/(n(2^(2k+1)+4)) - distance/(2n); negative means vacuous."""
    if product_distance < 0:
        raise ValueError("product distance is nonnegative")
    return 1.0 / (n * (2 ** (2 * k + 1) + 4)) - product_distance / (2.0 * n)


# ---------------------------------------------------------------------------
# Monte-Carlo oracles
# ---------------------------------------------------------------------------


def _cascade_windows(n: int, k: int) -> list[int]:
    """0-based window offsets in application order (top window first)."""
    return list(range(0, n - k + 1))


def _apply_window_batch(states: np.ndarray, gates: np.ndarray, start: int, k: int, n: int):
    """states: (B, 2^n); gates: (B, 2^k, 2^k) acting on qubits [start, start+k)."""
    b = states.shape[0]
    left = 2**start
    mid = 2**k
    right = 2 ** (n - start - k)
    t = states.reshape(b, left, mid, right)
    t = np.einsum("bwk,blkr->blwr", gates, t)
    return t.reshape(b, 2**n)


def mc_second_moment_global_batch(
    n: int,
    k: int,
    tuples: list[tuple],
    samples: int,
    seed: int,
    batch: int = 50000,
) -> list[tuple[float, float]]:
    """Brute-force Haar MC for `second_moment_global`, all tuples sharing one
    sample stream. Returns (estimate, se) per (p, q, r, s) tuple."""
    bit_tuples = [tuple(_as_bits(x, n) for x in tup) for tup in tuples]
    idx = [
        tuple(int("".join(map(str, bits)), 2) for bits in tup) for tup in bit_tuples
    ]
    rng = np.random.Generator(np.random.PCG64(seed))
    sums = np.zeros(len(tuples))
    sq_sums = np.zeros(len(tuples))
    done = 0
    dim = 2**n
    while done < samples:
        m = min(batch, samples - done)
        # v = C^dag |0>, so <0|C|x> = conj(v[x]); daggered cascade applied
        # bottom window first
        states = np.zeros((m, dim), dtype=complex)
        states[:, 0] = 1.0
        for start in reversed(_cascade_windows(n, k)):
            gates = haar_unitaries(rng, 2**k, m).conj().transpose(0, 2, 1)
            states = _apply_window_batch(states, gates, start, k, n)
        for j, (pi, qi, ri, si) in enumerate(idx):
            vals = (
                states[:, pi].conj() * states[:, qi] * states[:, ri].conj() * states[:, si]
            ).real
            sums[j] += vals.sum()
            sq_sums[j] += (vals**2).sum()
        done += m
    out = []
    for j in range(len(tuples)):
        mean = sums[j] / samples
        var = max(sq_sums[j] / samples - mean**2, 0.0) * samples / (samples - 1)
        out.append((float(mean), float(np.sqrt(var / samples))))
    return out


def mc_second_moment_global(n, k, p, q, r, s, samples, seed) -> tuple[float, float]:
    return mc_second_moment_global_batch(n, k, [(p, q, r, s)], samples, seed)[0]


def mc_second_moment_z(
    n: int, k: int, site: int, samples: int, seed: int, batch: int = 50000
) -> tuple[float, float]:
    """Brute-force Haar MC of tr(Z_site |0..0><0..0|_C)^2 (0-based site)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    dim = 2**n
    signs = 1.0 - 2.0 * ((np.arange(dim) >> (n - 1 - site)) & 1)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        states = np.zeros((m, dim), dtype=complex)
        states[:, 0] = 1.0
        for start in _cascade_windows(n, k):  # top window applied first
            gates = haar_unitaries(rng, 2**k, m)
            states = _apply_window_batch(states, gates, start, k, n)
        vals = (np.abs(states) ** 2 @ signs) ** 2
        total += vals.sum()
        total_sq += (vals**2).sum()
        done += m
    mean = total / samples
    var = max(total_sq / samples - mean**2, 0.0) * samples / (samples - 1)
    return float(mean), float(np.sqrt(var / samples))


def mc_second_moment_generic(
    n: int,
    k: int,
    w_diag_signs: np.ndarray,
    a_idx: tuple[int, int],
    b_idx: tuple[int, int],
    samples: int,
    seed: int,
    conjugators: list[np.ndarray] | None = None,
    batch: int = 50000,
) -> tuple[float, float]:
    """MC of tr(W A_C) tr(W B_C) for diagonal W (given as its 2^n diagonal)
    and basis-pair operators A = |p><q|, B = |r><s| given by index pairs.
    Optional `conjugators`: per-window-qubit product unitary applied to A and B
    first (used by the invariance tests)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    dim = 2**n
    pi, qi = a_idx
    ri, si = b_idx
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        cols = np.zeros((4, m, dim), dtype=complex)
        for j, col in enumerate((pi, qi, ri, si)):
            cols[j, :, col] = 1.0
        if conjugators is not None:
            v = conjugators[0]
            for w in conjugators[1:]:
                v = np.kron(v, w)
            cols = np.einsum("xy,jby->jbx", v, cols)
        # evolve all four columns forward through the cascade, one shared
        # gate draw per (sample, window); batch layout is sample-major
        flat = cols.transpose(1, 0, 2).reshape(4 * m, dim)
        for start in _cascade_windows(n, k):
            gates = np.repeat(haar_unitaries(rng, 2**k, m), 4, axis=0)
            flat = _apply_window_batch(flat, gates, start, k, n)
        cp, cq, cr, cs = flat.reshape(m, 4, dim).transpose(1, 0, 2)
        # tr(W C|p><q|C^dag) = <Cq| W |Cp> for diagonal W
        ta = np.einsum("bx,x,bx->b", cq.conj(), w_diag_signs, cp)
        tb = np.einsum("bx,x,bx->b", cs.conj(), w_diag_signs, cr)
        vals = (ta * tb).real
        total += vals.sum()
        total_sq += (vals**2).sum()
        done += m
    mean = total / samples
    var = max(total_sq / samples - mean**2, 0.0) * samples / (samples - 1)
    return float(mean), float(np.sqrt(var / samples))


# ---------------------------------------------------------------------------
# input-state functionals
# ---------------------------------------------------------------------------


def _apply_single(amps: np.ndarray, n: int, site: int, u: np.ndarray) -> np.ndarray:
    t = amps.reshape([2] * n)
    t = np.tensordot(u, t, axes=([1], [site]))
    return np.moveaxis(t, 0, site).reshape(-1)


def _angles_unitary(a: float, b: float, c: float) -> np.ndarray:
    from .circuits import single_qubit_gate

    return single_qubit_gate(a, b, c)


def rotated_one_norm_min(sigma: Statevector, restarts: int = 4, seed: int = 0) -> float:
    """Upper bound on min over per-qubit rotations of the squared entrywise
    1-norm of the rotated state's density matrix.

    For a pure state this is (sum_i |amps_i|)^4 minimized by alternating
    per-qubit angle optimization; 1 exactly for product basis-aligned states
    and within 1e-6 of 1 for any product pure state.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    n = sigma.n
    best = float(np.abs(sigma.amps).sum())

    for restart in range(restarts):
        amps = sigma.amps.copy()
        if restart > 0:
            for q in range(n):
                amps = _apply_single(amps, n, q, _angles_unitary(*rng.uniform(0, 2 * np.pi, 3)))
        current = float(np.abs(amps).sum())
        for _ in range(12):  # sweeps
            improved = False
            for q in range(n):

                def objective(angles, amps=amps, q=q):
                    rotated = _apply_single(amps, n, q, _angles_unitary(*angles))
                    return float(np.abs(rotated).sum())

                # tight tolerances: near a basis-aligned optimum the objective
                # has a |angle| kink, so loose xatol leaks linearly into h1
                res = minimize(
                    objective,
                    np.zeros(3),
                    method="Nelder-Mead",
                    options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000, "maxfev": 4000},
                )
                if res.fun < current - 1e-12:
                    amps = _apply_single(amps, n, q, _angles_unitary(*res.x))
                    current = float(res.fun)
                    improved = True
            if not improved:
                break
        best = min(best, current)
    return best**4


def nearest_product_distance(sigma: Statevector, restarts: int = 8, seed: int = 0) -> float:
    """Upper bound on the trace distance min over pure product states.

    Alternating exact conditional updates of each site vector (rank-1 fit);
    for pure states the distance is 2 sqrt(1 - F) with F the best overlap.
    Returns 0 within 1e-6 for product inputs.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    n = sigma.n
    psi = sigma.amps.reshape([2] * n)
    best_f = 0.0
    for _ in range(restarts):
        factors = []
        for _q in range(n):
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            factors.append(v / np.linalg.norm(v))
        overlap = 0.0
        for _sweep in range(60):
            overlap_now = overlap
            for q in range(n):
                # conditional vector at site q: contract every other site
                t = np.moveaxis(psi, q, -1)
                for r in [r for r in range(n) if r != q]:
                    t = np.tensordot(factors[r].conj(), t, axes=([0], [0]))
                nv = float(np.linalg.norm(t))
                if nv == 0.0:
                    break
                factors[q] = t / nv
                overlap_now = nv * nv
            if abs(overlap_now - overlap) < 1e-14:
                break
            overlap = overlap_now
        best_f = max(best_f, overlap)
    best_f = min(best_f, 1.0)
    return 2.0 * float(np.sqrt(max(1.0 - best_f, 0.0)))
