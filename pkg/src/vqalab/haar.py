"""Haar-random unitary sampling and executable first/second moment oracles.

Sampling is the standard Ginibre + QR construction with the R-diagonal phase
correction. PRNG: numpy PCG64 (numpy >= 1.26); a sampler seeded identically
reproduces the same unitary sequence bit-exactly. Parallel Monte-Carlo work
derives per-sample substreams as PCG64(base_seed XOR sample_index).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

UNITARITY_TOL = 1e-10


def haar_unitaries(rng: np.random.Generator, dim: int, size: int | None = None) -> np.ndarray:
    """One Haar unitary (size=None) or a stacked batch of them."""
    shape = (dim, dim) if size is None else (size, dim, dim)
    z = (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


@dataclass
class HaarSampler:
    """Deterministic Haar sampler with substream support."""

    seed: int
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self._rng = np.random.Generator(np.random.PCG64(self.seed))

    def unitary(self, dim: int) -> np.ndarray:
        if dim < 2:
            raise ValueError("dim must be >= 2")
        return haar_unitaries(self._rng, dim)

    def unitaries(self, dim: int, count: int) -> np.ndarray:
        if dim < 2:
            raise ValueError("dim must be >= 2")
        return haar_unitaries(self._rng, dim, count)

    def substream(self, index: int) -> "HaarSampler":
        return HaarSampler(self.seed ^ index)

    def generator(self) -> np.random.Generator:
        return self._rng


def sample_haar(sampler: HaarSampler, dim: int) -> np.ndarray:
    return sampler.unitary(dim)


def first_moment_analytic(a: np.ndarray, b: np.ndarray) -> float:
    """Exact Haar average of tr(B A_U): tr(A) tr(B) / N."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected equal square shapes, got {a.shape} and {b.shape}")
    n = a.shape[0]
    return float((np.trace(a) * np.trace(b)).real / n)


def second_moment_analytic(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> float:
    """Exact Haar average of tr(B A_U) tr(D C_U) for arbitrary A, B, C, D."""
    mats = [np.asarray(m) for m in (a, b, c, d)]
    shape = mats[0].shape
    if any(m.shape != shape for m in mats) or shape[0] != shape[1]:
        raise ValueError("expected four equal square shapes")
    n = shape[0]
    if n < 2:
        raise ValueError("dimension must be >= 2")
    a, b, c, d = mats
    ta, tb, tc, td = (np.trace(m) for m in mats)
    tac = np.trace(a @ c)
    tbd = np.trace(b @ d)
    val = (ta * tb * tc * td + tac * tbd) / (n**2 - 1) - (
        tac * tb * td + ta * tc * tbd
    ) / (n * (n**2 - 1))
    return float(val.real)


def mean_and_se(samples: np.ndarray) -> tuple[float, float]:
    """Sample mean with its standard error (reported with every MC estimate)."""
    samples = np.asarray(samples, dtype=float)
    m = float(samples.mean())
    if samples.size < 2:
        return m, 0.0
    return m, float(samples.std(ddof=1) / np.sqrt(samples.size))


def monte_carlo_first_moment(
    rng: np.random.Generator, a: np.ndarray, b: np.ndarray, samples: int, batch: int = 20000
) -> tuple[float, float]:
    """MC estimate (with SE) of the first-moment trace product."""
    vals = np.empty(samples)
    dim = a.shape[0]
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        u = haar_unitaries(rng, dim, m)
        au = np.einsum("sij,jk,slk->sil", u, a, u.conj())
        vals[done : done + m] = np.einsum("ij,sji->s", b, au).real
        done += m
    return mean_and_se(vals)


def monte_carlo_second_moment(
    rng: np.random.Generator,
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    d: np.ndarray,
    samples: int,
    batch: int = 20000,
) -> tuple[float, float]:
    """MC estimate (with SE) of tr(B A_U) tr(D C_U) under Haar U."""
    vals = np.empty(samples)
    dim = a.shape[0]
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        u = haar_unitaries(rng, dim, m)
        uc = u.conj()
        t1 = np.einsum("ij,sjk,kl,sil->s", b, u, a, uc, optimize=True)
        t2 = np.einsum("ij,sjk,kl,sil->s", d, u, c, uc, optimize=True)
        vals[done : done + m] = (t1 * t2).real
        done += m
    return mean_and_se(vals)


def design_check(family, moment: int, trials: int, seed: int, tests: int = 4) -> list[dict]:
    """Compare parameter-averaged moments of a circuit family with Haar values.

    `family` needs `.dim`, `.width`, `.depth`, `.label` and
    `.sample(rng) -> unitary` (drawing its own uniform parameters). Returns one
    report row per probe operator tuple; `pass` means |deviation| <= 3 SE.

    Probes are random pure-state projectors and Pauli words, the operator
    families the lab's objectives are built from. Designhood of a finite-depth
    family is budget-relative: a shallow family's residual bias hides under the
    SE at small `trials` and resolves at large `trials`; the report carries
    both numbers so the caller can judge.
    """
    if moment not in (1, 2):
        raise ValueError("moment must be 1 or 2")
    rng = np.random.Generator(np.random.PCG64(seed))
    dim = family.dim
    rows = []
    for test_id in range(tests):
        ops = [random_probe(rng, dim) for _ in range(2 * moment)]
        us = np.stack([family.sample(rng) for _ in range(trials)])
        ucs = us.conj()
        if moment == 1:
            a, b = ops
            analytic = first_moment_analytic(a, b)
            vals = np.einsum("ij,sjk,kl,sil->s", b, us, a, ucs, optimize=True).real
        else:
            a, b, c, d = ops
            analytic = second_moment_analytic(a, b, c, d)
            t1 = np.einsum("ij,sjk,kl,sil->s", b, us, a, ucs, optimize=True)
            t2 = np.einsum("ij,sjk,kl,sil->s", d, us, c, ucs, optimize=True)
            vals = (t1 * t2).real
        est, se = mean_and_se(vals)
        rows.append(
            {
                "family": family.label,
                "width": family.width,
                "depth": family.depth,
                "moment": moment,
                "test_id": test_id,
                "analytic": analytic,
                "estimate": est,
                "se": se,
                "pass": abs(est - analytic) <= 3 * se,
            }
        )
    return rows


def random_probe(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Random moment-check probe: a pure projector or a Pauli word."""
    if rng.random() < 0.5:
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        v /= np.linalg.norm(v)
        return np.outer(v, v.conj())
    single = [
        np.eye(2, dtype=complex),
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
    ]
    n = int(round(np.log2(dim)))
    codes = rng.integers(0, 4, size=n)
    while not codes.any():
        codes = rng.integers(0, 4, size=n)
    out = single[codes[0]]
    for c in codes[1:]:
        out = np.kron(out, single[c])
    return out
