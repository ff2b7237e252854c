"""Dense symmetric-matrix numerics.

This module provides the shared ground floor for everything else: ordered
eigendecompositions with clustering of numerically repeated eigenvalues,
shifted pseudoinverses taken across eigenvalue clusters, blockwise sorting
permutations, and the trace/eigenvalue gap behind Fan's inequality.

All container types are immutable after construction and every operation is
a pure function of its inputs, so values can be shared freely across
threads.

Conventions
-----------
Eigenvalues are kept in nonincreasing order.  Cluster ("block") m covers the
contiguous index range ``blocks[m]`` and has representative value ``mu[m]``;
indices into eigenvalues and blocks are 0-based throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EigenSolveError

SYMMETRY_RTOL = 1e-12
ORTHOGONALITY_TOL = 1e-10
RECONSTRUCTION_RTOL = 1e-9
FAN_TOL = 1e-8
CLUSTER_RTOL = 1e-8


def as_sym_array(x) -> np.ndarray:
    """Return the ndarray behind ``x`` (SymMatrix or array-like), validated
    to be a finite square matrix.  Does not symmetrize."""
    if isinstance(x, SymMatrix):
        return x.entries
    a = np.asarray(x, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SymMatrix:
    """Dense real symmetric matrix.

    Construction symmetrizes its input via (A + A^T)/2 and records the
    asymmetry of the raw input so callers can warn on suspicious data.
    """

    entries: np.ndarray
    asymmetry: float = field(init=False, default=0.0)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
        object.__setattr__(self, "entries", _frozen((a + a.T) / 2.0))
        object.__setattr__(self, "asymmetry", asym)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @staticmethod
    def identity(n: int) -> "SymMatrix":
        return SymMatrix(np.eye(n))

    @staticmethod
    def diagonal(values) -> "SymMatrix":
        return SymMatrix(np.diag(np.asarray(values, dtype=float)))

    def spectral_norm(self) -> float:
        if self.n == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.eigvalsh(self.entries))))


def default_cluster_tol(x) -> float:
    """Default eigenvalue clustering width: 1e-8 * (1 + ||X||_2)."""
    mat = x if isinstance(x, SymMatrix) else SymMatrix(as_sym_array(x))
    return CLUSTER_RTOL * (1.0 + mat.spectral_norm())


@dataclass(frozen=True)
class EigenSystem:
    """Ordered eigendecomposition with eigenvalue clustering.

    ``u`` holds orthonormal eigenvectors as columns, ``lam`` the
    nonincreasing eigenvalues.  ``blocks[m]`` is the contiguous index range
    of the m-th cluster of numerically equal eigenvalues and ``mu[m]`` its
    representative value (the cluster mean), strictly decreasing in m.
    ``ambiguous`` is set when some consecutive eigenvalue gap falls in
    [0.5 * cluster_tol, 2 * cluster_tol], i.e. the clustering was a close
    call at the given tolerance.
    """

    matrix: SymMatrix
    u: np.ndarray
    lam: np.ndarray
    blocks: tuple[range, ...]
    mu: np.ndarray
    cluster_tol: float
    ambiguous: bool = False

    def __post_init__(self):
        object.__setattr__(self, "u", _frozen(self.u))
        object.__setattr__(self, "lam", _frozen(self.lam))
        object.__setattr__(self, "mu", _frozen(self.mu))

    @property
    def n(self) -> int:
        return self.lam.shape[0]

    @property
    def r(self) -> int:
        return len(self.blocks)

    def block_basis(self, m: int) -> np.ndarray:
        """Eigenvector columns spanning the m-th eigenvalue cluster."""
        return self.u[:, self.blocks[m]]

    def block_of(self, i: int) -> int:
        """Index of the cluster containing eigenvalue position i."""
        if not 0 <= i < self.n:
            raise IndexError(f"eigenvalue index {i} out of range for n={self.n}")
        for m, b in enumerate(self.blocks):
            if b.start <= i < b.stop:
                return m
        raise AssertionError("blocks do not partition the index range")

    def reconstruct(self) -> np.ndarray:
        return self.u @ np.diag(self.lam) @ self.u.T


def eig(x, cluster_tol: float | None = None) -> EigenSystem:
    """Ordered eigendecomposition of a symmetric matrix with greedy
    clustering of nearby eigenvalues.

    Consecutive eigenvalues whose gap is at most ``cluster_tol`` are joined
    into one cluster.  A gap within a factor of two of the tolerance flags
    the result as ambiguous rather than failing.
    """
    mat = x if isinstance(x, SymMatrix) else SymMatrix(as_sym_array(x))
    if cluster_tol is None:
        cluster_tol = default_cluster_tol(mat)
    cluster_tol = float(cluster_tol)
    if cluster_tol <= 0.0:
        raise ValueError("cluster_tol must be positive")
    try:
        w, v = np.linalg.eigh(mat.entries)
    except np.linalg.LinAlgError as exc:
        raise EigenSolveError(
            f"symmetric eigendecomposition failed for n={mat.n}: {exc}"
        ) from exc
    lam = w[::-1].copy()
    u = v[:, ::-1].copy()
    gaps = lam[:-1] - lam[1:]
    ambiguous = bool(np.any((gaps >= 0.5 * cluster_tol) & (gaps <= 2.0 * cluster_tol)))
    blocks: list[range] = []
    start = 0
    for i, g in enumerate(gaps):
        if g > cluster_tol:
            blocks.append(range(start, i + 1))
            start = i + 1
    blocks.append(range(start, mat.n))
    mu = np.array([lam[b].mean() for b in blocks])
    return EigenSystem(
        matrix=mat,
        u=u,
        lam=lam,
        blocks=tuple(blocks),
        mu=mu,
        cluster_tol=cluster_tol,
        ambiguous=ambiguous,
    )


def pinv_shift(es: EigenSystem, m: int) -> SymMatrix:
    """Moore-Penrose inverse of (mu_m I - X) assembled from the
    eigendecomposition: sum over clusters s != m of
    (mu_m - mu_s)^{-1} U_s U_s^T.  Vanishes on the m-th eigenspace."""
    if not 0 <= m < es.r:
        raise IndexError(f"cluster index {m} out of range for r={es.r}")
    out = np.zeros((es.n, es.n))
    for s in range(es.r):
        if s == m:
            continue
        us = es.block_basis(s)
        out += (us @ us.T) / (es.mu[m] - es.mu[s])
    return SymMatrix(out)


@dataclass(frozen=True)
class BlockPermutation:
    """Permutation acting within eigenvalue clusters only.

    ``q`` is the 0/1 permutation matrix; applying it to the eigenvalue
    vector is a no-op because eigenvalues are constant on each cluster.
    """

    block_perms: tuple[np.ndarray, ...]
    q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _frozen(self.q))
        object.__setattr__(
            self, "block_perms", tuple(_frozen(p) for p in self.block_perms)
        )

    def apply(self, y) -> np.ndarray:
        return self.q @ np.asarray(y, dtype=float)

    def apply_transpose(self, y) -> np.ndarray:
        return self.q.T @ np.asarray(y, dtype=float)


def block_sort_permutation(y, es: EigenSystem) -> tuple[np.ndarray, BlockPermutation]:
    """Stable blockwise nonincreasing sort of ``y`` along the clusters of
    ``es``.  Returns the sorted vector v and the permutation Q with v = Q y.
    Ties keep their original relative order."""
    y = np.asarray(y, dtype=float)
    if y.shape != (es.n,):
        raise ValueError(f"expected a vector of length {es.n}, got shape {y.shape}")
    q = np.zeros((es.n, es.n))
    v = np.empty(es.n)
    perms = []
    for b in es.blocks:
        order = np.argsort(-y[b], kind="stable")
        perms.append(order.astype(np.intp))
        for k, j in enumerate(order):
            q[b.start + k, b.start + j] = 1.0
        v[b] = y[b][order]
    return v, BlockPermutation(tuple(perms), q)


def fan_gap(a, b) -> float:
    """lambda(A) . lambda(B) - <A, B>.

    Nonnegative by Fan's trace inequality; zero exactly when A and B admit a
    simultaneous ordered spectral decomposition.
    """
    am = as_sym_array(a)
    bm = as_sym_array(b)
    if am.shape != bm.shape:
        raise ValueError("fan_gap requires matrices of equal shape")
    la = np.sort(np.linalg.eigvalsh((am + am.T) / 2.0))[::-1]
    lb = np.sort(np.linalg.eigvalsh((bm + bm.T) / 2.0))[::-1]
    return float(la @ lb - np.vdot(am, bm))
