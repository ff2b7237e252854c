"""Directional behavior of ordered eigenvalues under symmetric perturbation.

For a perturbation direction H, the first-order movement of the eigenvalues
inside cluster m is given by the ordered spectrum of the compression
U_m^T H U_m; stacking the per-cluster spectra (each nonincreasing) yields
the directional derivative of the full eigenvalue map.  The second-order
prediction additionally routes H through the shifted pseudoinverse of the
cluster, which captures the curvature induced by the other clusters.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symmat import EigenSystem, as_sym_array, pinv_shift


@dataclass(frozen=True)
class EigDirDeriv:
    """Directional derivative of the ordered eigenvalue map.

    ``per_block[m]`` holds the nonincreasing spectrum of the m-th cluster
    compression; ``vector`` is their concatenation in cluster order.
    """

    per_block: tuple[np.ndarray, ...]
    vector: np.ndarray


def _desc_eigvals(a: np.ndarray) -> np.ndarray:
    return np.sort(np.linalg.eigvalsh((a + a.T) / 2.0))[::-1]


def eig_dir_derivative(es: EigenSystem, h) -> EigDirDeriv:
    """First-order movement of all eigenvalues in direction ``h``."""
    hm = as_sym_array(h)
    if hm.shape != (es.n, es.n):
        raise ValueError(f"direction must be {es.n}x{es.n}, got {hm.shape}")
    per_block = []
    vector = np.empty(es.n)
    for m, b in enumerate(es.blocks):
        um = es.block_basis(m)
        d = _desc_eigvals(um.T @ hm @ um)
        per_block.append(d)
        vector[b] = d
    return EigDirDeriv(tuple(per_block), vector)


def eig_second_prediction(es: EigenSystem, h, t: float) -> np.ndarray:
    """Second-order prediction of the eigenvalues of X + t h.

    Cluster m is predicted as mu_m plus the ordered spectrum of
    U_m^T (tH) U_m + U_m^T (tH) (mu_m I - X)^+ (tH) U_m; the residual
    against the exact eigenvalues decays cubically in t.
    """
    hm = as_sym_array(h)
    if hm.shape != (es.n, es.n):
        raise ValueError(f"direction must be {es.n}x{es.n}, got {hm.shape}")
    t = float(t)
    th = t * hm
    out = np.empty(es.n)
    for m, b in enumerate(es.blocks):
        um = es.block_basis(m)
        pm = pinv_shift(es, m).entries
        core = um.T @ th @ um + um.T @ th @ pm @ th @ um
        out[b] = es.mu[m] + _desc_eigvals(core)
    return out


def ell_index(es: EigenSystem, i: int) -> int:
    """1-based position of the i-th eigenvalue (i itself 1-based) within its
    own cluster; this is the rank selecting the matching compressed
    eigenvalue."""
    if not 1 <= i <= es.n:
        raise IndexError(f"eigenvalue index {i} out of range 1..{es.n}")
    m = es.block_of(i - 1)
    return i - es.blocks[m].start
