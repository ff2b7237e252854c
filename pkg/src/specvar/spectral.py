"""Variational calculus of spectral lifts g(X) = theta(ordered eigenvalues).

Given a symmetric penalty theta on R^n, its spectral lift acts on real
symmetric matrices through the nonincreasing eigenvalue vector.  Everything
first- and second-order about the lift reduces to theta along the spectrum,
plus one genuinely matrix-level ingredient: directions that rotate
eigenspaces pick up curvature through the shifted pseudoinverses
(mu_m I - X)^+ of the eigenvalue clusters.

The exported pieces:

* value / subgradient / subderivative of the lift,
* the critical cone test for a (point, subgradient, direction) triple,
* the second subderivative bundled into a SecondOrderReport, optionally
  cross-checked against the brute-force quotient oracle,
* a specialized route for single ordered eigenvalues,
* the second semiderivative on the smooth branch,
* the proximal map and its directional derivative.

Conventions.  Subgradient data for the lift is carried as a triple: the raw
weight vector y (one weight per eigenvector column, in eigenvalue order),
its blockwise nonincreasing rearrangement v, and the embedded matrix
U Diag(y) U^T.  The penalty-level second subderivative is evaluated at the
sorted pair (v, eigenvalue directional derivative); the cluster curvature
correction uses the raw y.  Mixing these up breaks instances with repeated
eigenvalues, so the triple keeps both vectors side by side.

The second subderivative is reported as +infinity off the critical cone
even when the penalty-level term happens to be finite there; rotating a
repeated eigenspace against the weights makes the true quotients blow up,
and the finite-implies-critical invariant is kept unconditional.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedPointError
from .extreal import POS_INF, ExtReal
from .oracle import QuotientProbe, numeric_second_subderivative
from .perturb import eig_dir_derivative
from .symmat import (
    FAN_TOL,
    BlockPermutation,
    EigenSystem,
    SymMatrix,
    as_sym_array,
    block_sort_permutation,
    eig,
    fan_gap,
    pinv_shift,
)
from .symfun import OrderStat, SymmetricFunction, spec_to_json

PROX_DIR_TOL = 1e-4
SEMIDERIV_CHECK_RTOL = 1e-8


def _as_eigensystem(x, cluster_tol: float | None = None) -> EigenSystem:
    if isinstance(x, EigenSystem):
        return x
    return eig(x, cluster_tol=cluster_tol)


def lifted(theta: SymmetricFunction):
    """The lift as a plain callable on symmetric arrays, for oracle use."""

    def f(a) -> float:
        w = np.linalg.eigvalsh(as_sym_array(a))
        return theta.value(w[::-1])

    return f


def spectral_value(theta: SymmetricFunction, x, cluster_tol: float | None = None) -> float:
    es = _as_eigensystem(x, cluster_tol)
    return theta.value(es.lam)


@dataclass(frozen=True)
class SubgradientTriple:
    """A subgradient of the lift in both coordinates.

    y: weight per eigenvector column, in eigenvalue order;
    v: blockwise nonincreasing rearrangement of y (v = q.apply(y));
    matrix: the embedded subgradient U Diag(y) U^T.
    """

    y: np.ndarray
    v: np.ndarray
    q: BlockPermutation
    matrix: SymMatrix


def spectral_subgradient(
    theta: SymmetricFunction,
    x,
    y=None,
    cluster_tol: float | None = None,
) -> SubgradientTriple:
    """Validate (or choose) a subgradient weight vector and embed it.

    When y is omitted the canonical vertex of the penalty subdifferential at
    the spectrum is used, which makes downstream reports deterministic.
    Membership is checked on the blockwise sorted rearrangement; a failure
    raises InvalidSubgradientError.
    """
    es = _as_eigensystem(x, cluster_tol)
    if y is None:
        y = theta.subgradients(es.lam).canonical_vertex()
    y = np.asarray(y, dtype=float)
    if y.shape != (es.n,):
        raise ValueError(f"subgradient vector must have length {es.n}, got {y.shape}")
    v, q = block_sort_permutation(y, es)
    theta.check_subgradient(es.lam, v)
    mat = SymMatrix(es.u @ np.diag(y) @ es.u.T)
    return SubgradientTriple(y=y, v=v, q=q, matrix=mat)


def spectral_subderivative(
    theta: SymmetricFunction, x, h, cluster_tol: float | None = None
) -> float:
    """Directional derivative of the lift: the penalty subderivative along
    the eigenvalue directional derivative."""
    es = _as_eigensystem(x, cluster_tol)
    dd = eig_dir_derivative(es, h)
    return theta.subderivative(es.lam, dd.vector)


def subderivative_gap(
    theta: SymmetricFunction, x, triple: SubgradientTriple, h
) -> float:
    """dg(X)(H) - <Y, H>; nonnegative up to rounding, and zero exactly on
    the critical cone.  This is the definition-level cone test the
    structural one is equivalent to."""
    es = _as_eigensystem(x)
    dg = spectral_subderivative(theta, es, h)
    pairing = float(np.vdot(triple.matrix.entries, as_sym_array(h)))
    return dg - pairing


def curvature_correction(x, y, h, cluster_tol: float | None = None) -> float:
    """Cluster curvature term of the second subderivative:

        2 sum_m < Diag(y)_mm , U_m^T H (mu_m I - X)^+ H U_m >.

    Uses the raw weight vector y; only directions that rotate eigenspaces
    across clusters contribute."""
    es = _as_eigensystem(x, cluster_tol)
    hm = as_sym_array(h)
    y = np.asarray(y, dtype=float)
    if y.shape != (es.n,):
        raise ValueError(f"weight vector must have length {es.n}, got {y.shape}")
    total = 0.0
    for m, b in enumerate(es.blocks):
        um = es.block_basis(m)
        pm = pinv_shift(es, m).entries
        core = um.T @ hm @ pm @ hm @ um
        total += 2.0 * float(y[b] @ np.diag(core))
    return total


def fan_block_gaps(x, y, h, cluster_tol: float | None = None) -> np.ndarray:
    """Per-cluster Fan inequality gaps between Diag(y)_mm and U_m^T H U_m.

    Each gap is nonnegative; simultaneous vanishing is the matrix half of
    the critical cone condition."""
    es = _as_eigensystem(x, cluster_tol)
    hm = as_sym_array(h)
    y = np.asarray(y, dtype=float)
    gaps = np.empty(es.r)
    for m, b in enumerate(es.blocks):
        um = es.block_basis(m)
        gaps[m] = fan_gap(np.diag(y[b]), um.T @ hm @ um)
    return gaps


def critical_cone_member(
    theta: SymmetricFunction,
    x,
    triple: SubgradientTriple,
    h,
    cluster_tol: float | None = None,
) -> bool:
    """Structural critical cone test for direction h at (X, Y).

    Two conditions: the eigenvalue directional derivative lies in the
    penalty critical cone at (spectrum, v), and every cluster satisfies the
    Fan equality (gap at most 1e-8) between Diag(y)_mm and the compression
    of h.  The conjunction is equivalent to dg(X)(H) = <Y, H> because both
    residuals are nonnegative."""
    es = _as_eigensystem(x, cluster_tol)
    hm = as_sym_array(h)
    dd = eig_dir_derivative(es, hm)
    if not theta.critical_cone_member(es.lam, triple.v, dd.vector):
        return False
    gaps = fan_block_gaps(es, triple.y, hm)
    return bool(np.all(gaps <= FAN_TOL))


@dataclass(frozen=True)
class SecondOrderReport:
    """Everything the second-order analysis at (X, Y, H) produced.

    ``curvature_correction`` and ``theta_d2`` are reported even when the
    direction is not critical (the former is an unconditional quadratic in
    H); ``d2`` is +infinity off the critical cone regardless, so that a
    finite d2 always certifies criticality."""

    theta: dict
    n: int
    direction: np.ndarray
    spectrum: np.ndarray
    block_ranges: tuple[tuple[int, int], ...]
    cluster_values: np.ndarray
    ambiguous_clustering: bool
    y: np.ndarray
    v: np.ndarray
    value: float
    eig_dir: np.ndarray
    dg: float
    pairing: float
    fan_gaps: np.ndarray
    in_critical_cone: bool
    theta_d2: ExtReal
    curvature_correction: float
    d2: ExtReal
    oracle_d2: ExtReal | None = None
    oracle_gap: float | None = None


def spectral_second_subderivative(
    theta: SymmetricFunction,
    x,
    triple: SubgradientTriple,
    h,
    cluster_tol: float | None = None,
    probe: QuotientProbe | None = None,
) -> SecondOrderReport:
    """Second subderivative of the lift at (X, Y) in direction h, bundled
    with everything computed along the way.

    d2 is the penalty second subderivative at the sorted pair plus the
    cluster curvature correction on the critical cone, +infinity off it.
    With a probe, the quotient oracle runs against the same data and its
    estimate is attached; the oracle never feeds back into the closed-form
    numbers."""
    es = _as_eigensystem(x, cluster_tol)
    hm = as_sym_array(h)
    dd = eig_dir_derivative(es, hm)
    dg = theta.subderivative(es.lam, dd.vector)
    pairing = float(np.vdot(triple.matrix.entries, hm))
    gaps = fan_block_gaps(es, triple.y, hm)
    in_cone = critical_cone_member(theta, es, triple, hm)
    theta_d2 = theta.second_subderivative(es.lam, triple.v, dd.vector)
    corr = curvature_correction(es, triple.y, hm)
    d2 = theta_d2 + corr if in_cone else POS_INF
    oracle_d2 = None
    oracle_gap = None
    if probe is not None:
        res = numeric_second_subderivative(
            lifted(theta), es.matrix.entries, triple.matrix.entries, hm, probe
        )
        oracle_d2 = res.estimate
        if d2.is_finite and oracle_d2.is_finite:
            oracle_gap = abs(float(d2) - float(oracle_d2))
    return SecondOrderReport(
        theta=spec_to_json(theta),
        n=es.n,
        direction=np.array(hm),
        spectrum=es.lam.copy(),
        block_ranges=tuple((b.start, b.stop) for b in es.blocks),
        cluster_values=es.mu.copy(),
        ambiguous_clustering=es.ambiguous,
        y=triple.y.copy(),
        v=triple.v.copy(),
        value=theta.value(es.lam),
        eig_dir=dd.vector.copy(),
        dg=dg,
        pairing=pairing,
        fan_gaps=gaps,
        in_critical_cone=in_cone,
        theta_d2=theta_d2,
        curvature_correction=corr,
        d2=d2,
        oracle_d2=oracle_d2,
        oracle_gap=oracle_gap,
    )


def leading_eig_second_subderivative(
    x, i: int, triple: SubgradientTriple, h, cluster_tol: float | None = None
) -> ExtReal:
    """Second subderivative of the single ordered eigenvalue leading the
    i-th cluster (i is 1-based), via the direct matrix formula

        2 < Y, H (mu_i I - X)^+ H >      on the critical cone,
        +infinity                        off it.

    The triple must be a valid order-statistic subgradient supported on the
    i-th cluster; the result agrees with the general machinery run on the
    matching order statistic."""
    es = _as_eigensystem(x, cluster_tol)
    if not 1 <= i <= es.r:
        raise UnsupportedPointError(
            f"cluster index {i} out of range: the spectrum has {es.r} clusters"
        )
    m = i - 1
    theta = OrderStat(rank=es.blocks[m].start + 1)
    theta.check_subgradient(es.lam, triple.v)
    off = [j for j in range(es.n) if not es.blocks[m].start <= j < es.blocks[m].stop]
    if off and float(np.max(np.abs(triple.y[off]))) > 1e-12:
        raise UnsupportedPointError(
            f"subgradient weights must be supported on cluster {i}"
        )
    if not critical_cone_member(theta, es, triple, h):
        return POS_INF
    hm = as_sym_array(h)
    pm = pinv_shift(es, m).entries
    return ExtReal(2.0 * float(np.vdot(triple.matrix.entries, hm @ pm @ hm)))


def second_semiderivative(
    theta: SymmetricFunction, x, h, cluster_tol: float | None = None
) -> float:
    """Second-order directional expansion coefficient on the smooth branch:
    for theta twice differentiable along the spectrum,

        g(X + tH) = g(X) + t dg(X)(H) + (t^2/2) d2 + o(t^2)

    with d2 = sum_j hess_j (lambda'_j)^2 plus the cluster curvature
    correction at y = grad theta(spectrum).  Raises UnsupportedPointError
    where the penalty is not twice differentiable along the spectrum."""
    es = _as_eigensystem(x, cluster_tol)
    grad = theta.gradient(es.lam)
    hess = theta.hessian_diagonal(es.lam)
    dd = eig_dir_derivative(es, h)
    corr = curvature_correction(es, grad, h)
    semi = float(hess @ (dd.vector**2)) + corr
    # The smooth branch must coincide with the general second subderivative
    # taken at the gradient; a drift here means the two formulas diverged.
    triple = spectral_subgradient(theta, es, grad)
    general = spectral_second_subderivative(theta, es, triple, h).d2
    assert general.is_finite
    assert abs(float(general) - semi) <= SEMIDERIV_CHECK_RTOL * (1.0 + abs(semi))
    return semi


@dataclass(frozen=True)
class SpectralProxResult:
    matrix: SymMatrix
    eigenvalues: np.ndarray
    closed_form: bool


def spectral_prox(
    theta: SymmetricFunction, gamma: float, x, cluster_tol: float | None = None
) -> SpectralProxResult:
    """Proximal point of the lift: the penalty prox applied along the
    spectrum, rebuilt in the same eigenbasis.

    The spectrum prox is re-sorted nonincreasingly before embedding; for a
    symmetric penalty a sorted minimizer always exists at a sorted input,
    so this never increases the proximal objective (it guards against
    unsorted output from the brute-force fallback)."""
    es = _as_eigensystem(x, cluster_tol)
    pr = theta.prox(gamma, es.lam)
    p = np.sort(np.asarray(pr.point, dtype=float))[::-1]
    mat = SymMatrix(es.u @ np.diag(p) @ es.u.T)
    return SpectralProxResult(matrix=mat, eigenvalues=p, closed_form=pr.closed_form)


@dataclass(frozen=True)
class ProxDirectional:
    """Directional derivative estimate of the prox map with Richardson
    extrapolation across a geometric step grid."""

    derivative: np.ndarray
    converged: bool
    quotients: tuple[np.ndarray, ...]
    extrapolants: tuple[np.ndarray, ...]


def prox_directional_derivative(
    theta: SymmetricFunction,
    gamma: float,
    x,
    d,
    t_grid: tuple[float, ...] = (1e-3, 1e-4, 1e-5),
    cluster_tol: float | None = None,
) -> ProxDirectional:
    """Forward-difference quotients of the prox map in direction d, with
    Richardson extrapolation assuming first-order error decay.

    ``converged`` requires the last two extrapolants to agree entrywise to
    1e-4; expect failure where the prox map is not directionally
    differentiable and the quotients drift."""
    if len(t_grid) < 3:
        raise ValueError("t_grid needs at least three levels for extrapolation")
    ts = [float(t) for t in t_grid]
    ratios = {round(ts[k] / ts[k + 1], 9) for k in range(len(ts) - 1)}
    if len(ratios) != 1:
        raise ValueError("t_grid must be geometric")
    rho = ts[0] / ts[1]
    if rho <= 1.0:
        raise ValueError("t_grid must be decreasing")
    xa = as_sym_array(x)
    da = as_sym_array(d)
    base = spectral_prox(theta, gamma, xa, cluster_tol).matrix.entries
    quotients = []
    for t in ts:
        pt = spectral_prox(theta, gamma, xa + t * da, cluster_tol).matrix.entries
        quotients.append((pt - base) / t)
    extrapolants = [
        (rho * quotients[k + 1] - quotients[k]) / (rho - 1.0)
        for k in range(len(quotients) - 1)
    ]
    drift = float(np.max(np.abs(extrapolants[-1] - extrapolants[-2])))
    return ProxDirectional(
        derivative=extrapolants[-1],
        converged=bool(drift <= PROX_DIR_TOL),
        quotients=tuple(quotients),
        extrapolants=tuple(extrapolants),
    )
