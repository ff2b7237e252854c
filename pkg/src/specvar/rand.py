"""Seeded random instances: orthogonal frames, symmetric matrices, and
spectra with prescribed eigenvalue clusters.

All generators take a numpy Generator so callers control determinism; none
of them read global RNG state.
"""
from __future__ import annotations

import numpy as np


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR with sign-fixed R diagonal)."""
    a = rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    d = np.sign(np.diag(r))
    d[d == 0.0] = 1.0
    return q * d


def random_symmetric(
    rng: np.random.Generator, n: int, frob: float | None = 1.0
) -> np.ndarray:
    """Symmetrized Gaussian matrix, rescaled to the given Frobenius norm
    (pass frob=None to skip rescaling)."""
    a = rng.standard_normal((n, n))
    a = (a + a.T) / 2.0
    if frob is not None:
        nrm = float(np.linalg.norm(a))
        if nrm == 0.0:
            a[0, 0] = 1.0
            nrm = 1.0
        a *= frob / nrm
    return a


def gapped_spectrum(
    rng: np.random.Generator,
    sizes: tuple[int, ...],
    gap: float = 1.0,
    top: float | None = None,
) -> np.ndarray:
    """Nonincreasing spectrum with exact ties inside each cluster and
    consecutive cluster values separated by at least ``gap``.

    ``sizes`` gives the cluster multiplicities from the top down; ``top``
    fixes the largest value (default: uniform in [0, 1])."""
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("cluster sizes must be positive")
    value = float(rng.uniform(0.0, 1.0)) if top is None else float(top)
    out = []
    for k, s in enumerate(sizes):
        if k > 0:
            value -= gap + float(rng.uniform(0.0, 1.0))
        out.extend([value] * s)
    return np.array(out)


def matrix_with_spectrum(
    rng: np.random.Generator, spectrum
) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric matrix with the given spectrum in a random eigenbasis;
    returns (X, U) with X = U Diag(spectrum) U^T."""
    lam = np.asarray(spectrum, dtype=float)
    u = random_orthogonal(rng, lam.size)
    x = u @ np.diag(lam) @ u.T
    return (x + x.T) / 2.0, u
